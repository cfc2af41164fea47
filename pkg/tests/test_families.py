from __future__ import annotations

import math

import numpy as np
import pytest

import oracles
from lfedge import core, families
from lfedge.core import DomainError, ResourceError, SpecParseError, SpecValidationError, validate


@pytest.mark.parametrize("q", list(range(1, 201)))
def test_character_orthogonality(q):
    g = families.character_group(q)
    assert g.size == oracles.phi(q)
    M = g.value_matrix(range(g.size))
    gram = M @ M.conj().T
    assert np.allclose(gram, oracles.phi(q) * np.eye(g.size), atol=1e-8)


@pytest.mark.parametrize("q", [3, 4, 8, 9, 12, 15, 16, 25, 60, 97])
def test_characters_are_multiplicative(q):
    g = families.character_group(q)
    for idx in range(g.size):
        v = g.values(idx)
        a = np.arange(q)
        prod = v[(a[:, None] * a[None, :]) % q]
        assert np.allclose(prod, v[:, None] * v[None, :], atol=1e-12)


def brute_primitive_count(q):
    # number of primitive characters mod q: Dirichlet convolution of phi with Moebius
    from lfedge.primes import factorize

    total = 0
    for d in range(1, q + 1):
        if q % d:
            continue
        mu_part = q // d
        f = factorize(mu_part)
        if any(e > 1 for _, e in f):
            continue
        total += (-1) ** len(f) * oracles.phi(d)
    return total


@pytest.mark.parametrize("q", [3, 4, 5, 8, 9, 12, 16, 20, 27, 30, 64, 100])
def test_primitive_counts(q):
    assert len(families.character_group(q).primitive_indices()) == brute_primitive_count(q)


def test_principal_character_has_pole():
    spec = families.dirichlet_spec(7, 0, 20)
    assert spec.pole_order == 1
    with pytest.raises(DomainError):
        families.dirichlet_spec(7, 0, 20, strict=True)


def test_chi_minus4_spec():
    spec = families.dirichlet_spec(4, 1, 50)
    assert spec.q_mag == pytest.approx(4 / math.pi)
    assert spec.shifts == (0.5,)
    assert spec.local(2).ramified and spec.local(2).roots == ()
    assert spec.local(3).roots == (-1,)
    assert spec.local(5).roots == (1,)


def test_character_matches_mpmath_values():
    chi = families.DirichletCharacter(5, 1)
    vals = [chi(a) for a in range(5)]
    assert vals in ([0, 1, 1j, -1j, -1], [0, 1, -1j, 1j, -1])


def test_character_index_out_of_range():
    with pytest.raises(DomainError):
        families.character_group(5).exponents(4)


def test_tau_values():
    tau = families.tau_values(31)
    assert tau[1:31].tolist() == list(oracles.tau_list(30)[1:31])
    # multiplicativity and the Hecke relation at p = 2
    assert tau[6] == tau[2] * tau[3]
    assert tau[4] == tau[2] ** 2 - 2**11


def test_tau_hecke_relation_prime_squares():
    tau = families.tau_values(2500)
    for p in [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]:
        assert tau[p * p] == tau[p] ** 2 - p**11


def test_tau_table_cache(tmp_path):
    path = tmp_path / "tau.txt"
    a = families.tau_table(500, cache=path)
    assert path.exists()
    b = families.tau_table(500, cache=path)
    assert a.tolist() == b.tolist()


def test_delta_spec_unit_determinant():
    spec = families.ramanujan_delta_spec(100)
    assert validate(spec) == []
    for p in [2, 3, 97]:
        a1, a2 = spec.local(p).roots
        assert abs(a1 * a2 - 1) < 1e-12
        assert abs(abs(a1) - 1) < 1e-12


def test_delta_limit_resource_error():
    with pytest.raises(ResourceError):
        families.ramanujan_delta_spec(families.DELTA_MAX_LIMIT + 1)


def test_synthetic_is_deterministic():
    a = families.synthetic_spec(3, 11, 0.25, 200)
    b = families.synthetic_spec(3, 11, 0.25, 200)
    c = families.synthetic_spec(3, 12, 0.25, 200)
    assert families.dumps_spec(a) == families.dumps_spec(b)
    assert families.dumps_spec(a) != families.dumps_spec(c)
    assert validate(a) == []


def test_spec_file_round_trip(tmp_path):
    for spec in [families.zeta_spec(30), families.dirichlet_spec(5, 1, 30), families.synthetic_spec(2, 1, 0.3, 30)]:
        path = tmp_path / "s.json"
        families.save_spec(spec, path)
        assert families.load_spec(path) == spec


def test_parse_error_names_field():
    text = families.dumps_spec(families.zeta_spec(10)).replace('"q_mag"', '"qmag"')
    with pytest.raises(SpecParseError, match="qmag"):
        families.loads_spec(text)
    text = families.dumps_spec(families.zeta_spec(10)).replace('"degree": 1', '"degree": "x"')
    with pytest.raises(SpecParseError, match="degree"):
        families.loads_spec(text)


def test_validation_error_has_line():
    text = families.dumps_spec(families.zeta_spec(10)).replace('"coeff_growth": 0.0', '"coeff_growth": 2.0')
    with pytest.raises(SpecValidationError, match="coeff_growth"):
        families.loads_spec(text)


def test_malformed_json_reports_position():
    with pytest.raises(SpecParseError, match=r"<string>:1"):
        families.loads_spec("{not json")


@pytest.mark.parametrize("q", [5, 8, 12, 15, 16, 21])
def test_character_column_orthogonality(q):
    group = families.character_group(q)
    table = group.value_matrix(range(group.size))
    col = table.sum(axis=0)
    for a in range(q):
        expected = oracles.phi(q) if a % q == 1 % q else 0
        assert abs(col[a] - expected) < 1e-9


def test_mod5_order4_root_at_three():
    spec = families.dirichlet_spec(5, 1, 10)
    assert spec.locals[2].roots[0] == pytest.approx(1j)
    assert spec.locals[3].roots[0] == pytest.approx(-1j)


def test_delta_small_normalized_coefficients():
    spec = families.ramanujan_delta_spec(10)
    a = np.asarray(core.dirichlet_coefficients(spec, 10).dirichlet_coeffs)
    assert a[2] == pytest.approx(-24 / 2**5.5, abs=1e-12)
    assert a[3].real == pytest.approx(252 / 3**5.5, abs=1e-12)
    assert a[2].real == pytest.approx(-0.53033, abs=1e-5)
