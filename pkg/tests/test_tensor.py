from __future__ import annotations

import json
import math

import numpy as np
import pytest

from lfedge import families, tensor
from lfedge.core import DataGapError, DomainError, LFunctionSpec, LocalFactor, complete_homogeneous, log_conductor
from lfedge.primes import primes_upto


def gl2_spec(a1, a2, limit=20, ramified=()):
    locs = {}
    for p in primes_upto(limit):
        p = int(p)
        locs[p] = LocalFactor(p, (), ramified=True) if p in ramified else LocalFactor(p, (a1, a2))
    return LFunctionSpec(2, 0, 1.0, (0.0, 0.5), locs, coeff_growth=1.0, label="toy")


def roots_of(spec, p):
    return sorted(spec.local(p).roots, key=lambda z: (z.real, z.imag))


def test_conjugate_involution():
    spec = families.dirichlet_spec(5, 1, 30)
    c = tensor.conjugate_spec(spec)
    assert c.local(2).roots[0] == pytest.approx(spec.local(2).roots[0].conjugate())
    assert tensor.conjugate_spec(c).locals == spec.locals


def test_conjugate_real_spec_unchanged():
    z = families.zeta_spec(30)
    assert tensor.conjugate_spec(z).locals == z.locals


def test_rs_zeta_squared_is_zeta_locally():
    z = families.zeta_spec(30)
    rs = tensor.rankin_selberg_spec(z, z)
    assert rs.degree == 1
    assert all(lf.roots == (1,) for lf in rs.locals.values())
    assert log_conductor(rs) == pytest.approx(2 * log_conductor(z))


def test_rs_pairwise_products():
    A = gl2_spec(2.0, 0.5)
    rs = tensor.rs_square(A)
    assert rs.degree == 4 and rs.pole_order == 1
    assert sorted(r.real for r in rs.local(3).roots) == [0.25, 1.0, 1.0, 4.0]


def test_rs_character_square_trivial_away_from_ramified():
    chi = families.dirichlet_spec(4, 1, 50)
    rs = tensor.rs_square(chi)
    assert rs.local(2).ramified and rs.local(2).roots == ()
    for p in (3, 5, 7, 47):
        assert rs.local(p).roots[0] == pytest.approx(1.0)


def test_rs_ramified_union_and_override(tmp_path):
    A = gl2_spec(1j, -1j, ramified=(3,))
    M = gl2_spec(1.0, 1.0, ramified=(5,))
    rs = tensor.rankin_selberg_spec(A, M)
    assert set(rs.ramified_primes) == {3, 5}
    path = tmp_path / "ovr.json"
    path.write_text(json.dumps([{"p": 3, "roots": [{"re": 0.5}], "ramified": True}]))
    rs2 = tensor.rankin_selberg_spec(A, M, overrides=tensor.load_overrides(path))
    assert rs2.local(3).roots == (0.5,)


def test_rs_conductor_scale():
    A = gl2_spec(1.0, 1.0)
    rs = tensor.rankin_selberg_spec(A, A, conductor_scale=2.0)
    assert log_conductor(rs) == pytest.approx(4 * log_conductor(A))


def test_rs_needs_common_range():
    with pytest.raises(DataGapError):
        tensor.rankin_selberg_spec(gl2_spec(1, 1, limit=1), families.zeta_spec(10))


def test_sym_power_roots():
    A = gl2_spec(2.0, 0.5)
    s2 = tensor.symmetric_power_spec(A, 2)
    assert sorted(r.real for r in s2.local(2).roots) == [0.25, 1.0, 4.0]
    th = gl2_spec(1.0, 1.0)
    assert tensor.symmetric_power_spec(th, 2).local(2).power_sum(1) == pytest.approx(3)
    assert tensor.symmetric_power_spec(A, 1) is A
    with pytest.raises(DomainError):
        tensor.symmetric_power_spec(families.zeta_spec(10), 2)


def test_sym_power_sum_is_complete_homogeneous():
    a1, a2 = 0.3 + 1.1j, 0.7 - 0.2j
    A = gl2_spec(a1, a2)
    ps = np.array([a1**k + a2**k for k in range(1, 7)])
    h = complete_homogeneous(ps)
    for l in range(1, 7):
        assert tensor.symmetric_power_spec(A, l).local(2).power_sum(1) == pytest.approx(h[l], rel=1e-12)


def test_sym_ramified_inherited():
    A = gl2_spec(1.0, 1.0, ramified=(7,))
    assert tensor.symmetric_power_spec(A, 3).local(7).ramified


def test_rs_identity_examples():
    A = gl2_spec(2.0, 0.5)
    r = tensor.check_rs_identity(A, 2, 1)
    assert r.lhs == pytest.approx(6.25) and r.rhs == pytest.approx(6.25) and r.ok and r.mode == "identity"
    z = families.zeta_spec(20)
    for p in (2, 3, 19):
        for k in range(1, 9):
            r = tensor.check_rs_identity(z, p, k)
            assert r.lhs == pytest.approx(1) and r.rhs == pytest.approx(1)


def test_rs_identity_ramified_inequality_mode():
    A = gl2_spec(1.0, 1.0, ramified=(3,))
    r = tensor.check_rs_identity(A, 3, 1, tensor.rs_square(A))
    assert r.mode == "inequality" and r.ok


def test_rs_identity_on_corpus_specs():
    for spec in [families.ramanujan_delta_spec(50), families.dirichlet_spec(7, 2, 50), families.synthetic_spec(3, 4, 0.5, 50)]:
        rs = tensor.rs_square(spec)
        for p in primes_upto(50):
            if spec.local(int(p)).ramified:
                continue
            for k in range(1, 9):
                r = tensor.check_rs_identity(spec, int(p), k, rs)
                scale = sum(abs(a) ** k for a in spec.local(int(p)).roots) ** 2
                assert abs(r.lhs - r.rhs) <= 1e-9 * scale


def test_chain_example():
    A = gl2_spec(2.0, 0.5)
    rep = tensor.check_coeff_chain(A, 2, 2, 1)
    assert rep.c_abs**2 == pytest.approx(6.25)
    assert rep.b_abs == pytest.approx(5.25)
    assert rep.rhs_i == pytest.approx(42.0)
    assert rep.ok
    assert rep.growth == pytest.approx(2**2 * (1 - 1 / 2))
    assert rep.constants == {"i_factor": 8.0, "i_floor": 16.0, "ii_factor": 64.0, "ii_shift": 16.0}


def test_chain_unit_circle():
    for l in range(1, 8):
        rep = tensor.chain_report(np.exp(0.3j), np.exp(-0.3j), l, 3)
        assert rep.M == pytest.approx(1.0)
        assert rep.lhs_i <= 2**l + 1e-12
        assert rep.ok


def test_chain_swaps_and_rejects_non_unit():
    rep = tensor.chain_report(0.5, 2.0, 2, 1)
    assert rep.M == pytest.approx(2.0)
    with pytest.raises(DomainError):
        tensor.chain_report(2.0, 2.0, 2, 1)


def test_maass_example():
    rep = tensor.maass_report(2.0, 0.5, 1)
    assert rep.s_abs == pytest.approx(5.25)
    # sym^4 roots 16, 4, 1, 1/4, 1/16
    assert rep.b4_abs == pytest.approx(21.3125)
    assert rep.ok
    assert rep.K == 8 * 4**5


def test_maass_unit_circle_small():
    rep = tensor.maass_chain_check(gl2_spec(1j, -1j), 5, 2)
    assert rep.s_abs <= 3 and rep.b4_abs <= 5 and rep.ok


def test_sweeps_small():
    assert tensor.rs_sweep(0, 2000).violations == 0
    assert tensor.chain_sweep(0, 2000).violations == 0
    assert tensor.maass_sweep(0, 2000).violations == 0
