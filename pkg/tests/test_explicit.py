from __future__ import annotations

import math

import numpy as np
import pytest

import oracles
from lfedge import explicit, families, tensor
from lfedge.core import DomainError, log_conductor
from lfedge.zeros import ZeroSet, load_zeros, save_zeros, zeta_zeros


@pytest.fixture(scope="module")
def zeta():
    return families.zeta_spec(10**5)


def test_zeta_zeros_bundle():
    zs = zeta_zeros()
    assert zs.gamma.size == 100
    assert zs.gamma[0] == pytest.approx(14.134725141734693)
    assert zs.critical_assumed and zs.height_limit == zs.gamma[-1]
    assert zs.rhos().size == 200


def test_zeros_file_round_trip(tmp_path):
    path = tmp_path / "z.txt"
    path.write_text("# two columns\n0.5 14.134725\n0.5 21.022040\n")
    zs = load_zeros(path)
    assert zs.gamma.tolist() == [14.134725, 21.02204]
    save_zeros(zs, tmp_path / "y.txt")
    back = load_zeros(tmp_path / "y.txt")
    assert back.gamma.tolist() == zs.gamma.tolist()
    assert back.height_limit == zs.height_limit
    # a header height limit above the last ordinate survives the round trip
    save_zeros(zeta_zeros(10).first(5), tmp_path / "t.txt")
    assert load_zeros(tmp_path / "t.txt").height_limit == zeta_zeros(5).height_limit


def test_zeros_file_rejects_mixed_columns(tmp_path):
    path = tmp_path / "z.txt"
    path.write_text("14.1\n0.5 21.0\n")
    with pytest.raises(Exception, match=":2:"):
        load_zeros(path)


def test_default_exclusion_zeta_and_character():
    assert explicit.default_exclusions(families.zeta_spec(10)) == {(1, 0)}
    assert explicit.default_exclusions(families.dirichlet_spec(5, 1, 10)) == frozenset()


def test_trivial_zero_sum_zeta_example():
    z = families.zeta_spec(10)
    # k >= 1 only: 100^-4/16 + 100^-6/36 + ...
    expected = sum(100.0 ** (-2 - 2 * k) / (2 + 2 * k) ** 2 for k in range(1, 10))
    got = explicit.trivial_zero_terms(z, 2.0, 100.0)
    assert got.value.real == pytest.approx(expected, rel=1e-12)
    assert got.value.real == pytest.approx(6.2503e-10, rel=1e-4)
    assert got.excluded == ((1, 0),)
    # with the pole pair kept the k = 0 term 1/(4 * 10^4) appears
    assert explicit.trivial_zero_sum(z, 2.0, 100.0, exclude=()).real == pytest.approx(2.5000625e-5, rel=1e-6)


def test_trivial_zero_sum_vanishes_for_large_x():
    z = families.zeta_spec(10)
    assert abs(explicit.trivial_zero_sum(z, 2.0, 1e8)) < 1e-30


def test_trivial_zero_rejects_trivial_zero():
    with pytest.raises(DomainError):
        explicit.trivial_zero_sum(families.zeta_spec(10), -2.0, 10.0)


def test_lemma1_zeta_example(zeta):
    res = explicit.lemma1_rhs(zeta, 2.0, 100.0, zeta_zeros(100))
    assert abs(res.value - 0.5699609930945329) <= res.zero_tail_estimate + 1e-3
    # the achieved residual is much smaller than the tail allowance
    assert abs(res.value - 0.5699609930945329) < 1e-6


def test_lemma1_large_x_empty_zeros(zeta):
    lhs = oracles.neg_zeta_logderiv(3.0)
    prev = math.inf
    for x in (10.0, 100.0, 1e4):
        res = explicit.lemma1_rhs(zeta, 3.0, x, ZeroSet.empty())
        err = abs(res.value - lhs)
        assert err <= res.zero_tail_estimate
        assert err < prev
        prev = err


@pytest.mark.parametrize("x", [10.0, 30.0, 1000.0])
def test_lemma1_residual_shrinks_with_zero_count(zeta, x):
    lhs = oracles.neg_zeta_logderiv(2.0)
    errs = [abs(explicit.lemma1_rhs(zeta, 2.0, x, zeta_zeros(c)).value - lhs) for c in (25, 50, 100)]
    assert errs[0] > errs[1] > errs[2]


def test_lemma1_at_x100_zeros_help_but_oscillate(zeta):
    # at x = 100 the omitted tail oscillates; residuals stay far below the allowance
    lhs = oracles.neg_zeta_logderiv(2.0)
    none = abs(explicit.lemma1_rhs(zeta, 2.0, 100.0, ZeroSet.empty()).value - lhs)
    for c in (25, 50, 100):
        res = explicit.lemma1_rhs(zeta, 2.0, 100.0, zeta_zeros(c))
        assert abs(res.value - lhs) < none / 10


def test_lemma1_rejects_complex_or_left_s(zeta):
    with pytest.raises(DomainError):
        explicit.lemma1_rhs(zeta, 0.9, 100.0, ZeroSet.empty())
    with pytest.raises(DomainError):
        explicit.lemma1_rhs(zeta, 2 + 1j, 100.0, ZeroSet.empty())


def test_zero_sum_real_for_conjugate_pairs():
    rho = zeta_zeros(100).rhos()
    u = rho - 1.5
    total = np.sum(np.exp(u * math.log(100.0)) / u**2)
    assert abs(total.imag) < 1e-12


def test_lemma5_sum_brute_force():
    z = families.zeta_spec(10)
    pk = [(2, 2), (3, 3), (4, 2), (5, 5), (7, 7), (8, 2), (9, 3)]
    expected = sum(math.log(p) * (1 - (n / 10) ** 2) / n**1.5 for n, p in pk)
    assert explicit.lemma5_sum(z, 1.5, 10.0) == pytest.approx(expected, rel=1e-13)
    assert explicit.lemma5_sum(z, 1.5, 1.9) == 0.0


def test_lemma5_weight_normalization():
    assert explicit.lemma5_weight(1.0, 1.0) == 0.0
    assert explicit.lemma5_weight(7.0, 7.0) == 0.0
    assert explicit.lemma5_weight(0.0, 7.0) == 1.0


def test_verify_lemma5_zeta(zeta):
    rep = explicit.verify_lemma5(zeta, 1.5, 1000.0, zeta_zeros(100))
    assert rep.lhs == pytest.approx(1.505235355788268, abs=1e-9)
    assert rep.residual <= rep.tail_estimate + 1e-2
    assert rep.ok


def test_verify_lemma5_trend(zeta):
    res = [explicit.verify_lemma5(zeta, 1.5, 1000.0, zeta_zeros(c)).residual for c in (25, 50, 100)]
    assert res[0] > res[1] > res[2]


def test_verify_lemma5_empty_zeros_sigma3(zeta):
    rep = explicit.verify_lemma5(zeta, 3.0, 1e4, ZeroSet.empty())
    assert rep.residual <= rep.tail_estimate


def test_choose_A_in_range_and_avoids_trivial_zeros():
    z = families.zeta_spec(10)
    A = explicit.choose_A(z, 1.5)
    assert 1.5 <= A <= 1.6
    locs = [t.real - 1.5 for _, _, t in explicit.trivial_zeros(z, -10, exclude=())]
    assert min(abs(-A - l) for l in locs) >= 0.04


def test_lemma5_residual_envelope_at_formula_x():
    spec = families.dirichlet_spec(4, 1, 10)
    logc = log_conductor(spec)
    for c0 in (0.05, 0.1, 1.0):
        lx = explicit.lemma5_x(logc, c0)
        val = explicit.lemma5_residual_bound(spec, 1.01, None, c0, log_x=lx)
        # zero part equals exactly 1 + 1 at the proof's x
        assert val == pytest.approx(2.0 + spec.degree**2 * math.exp(-1.5 * lx) * logc, rel=1e-12)


def test_lemma5_residual_envelope_monotone_in_x():
    spec = families.dirichlet_spec(4, 1, 10)
    vals = [explicit.lemma5_residual_bound(spec, 1.1, x, 0.1) for x in (10, 100, 1e4, 1e8)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    with pytest.raises(DomainError):
        explicit.lemma5_residual_bound(spec, 1.1, 10, 0.0)


@pytest.fixture(scope="module")
def chi4_pair():
    spec = families.dirichlet_spec(4, 1, 10**6 + 1)
    return spec, tensor.rs_square(spec)


def test_lower_bound_chi_minus4(chi4_pair):
    spec, rs = chi4_pair
    lb, rep = explicit.lower_bound_L1(spec, rs, explicit.LowerBoundConfig(c0=0.1, C0=5.0))
    assert 0 < lb <= math.pi / 4
    assert rep.flags["clamped"] and rep.flags["heuristic"]
    assert rep.x == 1e6
    assert rep.log_x_formula > math.log(1e6)


def test_lower_bound_large_C0_limit(chi4_pair):
    spec, rs = chi4_pair
    lb, rep = explicit.lower_bound_L1(spec, rs, explicit.LowerBoundConfig(c0=0.1, C0=200.0))
    assert rep.derivative_push < 1e-100
    assert lb == pytest.approx(math.exp(-rep.log_L_sigma1_bound), rel=1e-12)


def test_lower_bound_negative_reported_not_raised(chi4_pair):
    spec, rs = chi4_pair
    lb, rep = explicit.lower_bound_L1(spec, rs, explicit.LowerBoundConfig(c0=0.1, C0=1.0, C1=100.0))
    assert lb <= 0 and not rep.positive
    assert rep.message == "no positive lower bound at these constants"


def test_lower_bound_config_validation():
    with pytest.raises(DomainError):
        explicit.LowerBoundConfig(c0=0.0)
