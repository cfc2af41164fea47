"""Rankin-Selberg products, duals and GL(2) symmetric powers on local roots,
plus the coefficient inequalities used by the Cauchy-Schwarz / Hölder bounds.

Inside the inequality checks ``c``, ``b`` and ``dd`` are power sums of local
roots (``Lambda(p^k) / log p``), not Dirichlet coefficients.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping

import numpy as np

from .core import (
    DataGapError,
    DomainError,
    LFunctionSpec,
    LocalFactor,
    SpecParseError,
    log_conductor,
)

RS_RTOL = 1e-9
UNIT_DET_TOL = 1e-9

# |s|^4 <= MAASS_K (dd + MAASS_K2) with s = c^2 - (a1 a2)^k and dd the squared
# sym^4 power sum: |s| <= |c|^2 + 1, (u + v)^4 <= 8 (u^4 + v^4), then the
# l = 4 chain |c|^8 <= 4^5 (dd + 4^4).
MAASS_K = 8 * 4**5
MAASS_K2 = 4**4 + 1 / 4**5


def conjugate_spec(spec: LFunctionSpec) -> LFunctionSpec:
    locs = {p: LocalFactor(p, tuple(r.conjugate() for r in lf.roots), lf.ramified) for p, lf in spec.locals.items()}
    rn = None if spec.root_number is None else spec.root_number.conjugate()
    return replace(
        spec, shifts=tuple(b.conjugate() for b in spec.shifts), locals=locs, root_number=rn,
        label=_conj_label(spec.label),
    )


def _conj_label(label: str) -> str:
    if label.startswith("conj(") and label.endswith(")"):
        return label[5:-1]
    return f"conj({label})" if label else ""


def load_overrides(path: str | Path) -> dict[int, LocalFactor]:
    """Ramified local factors from a JSON array of ``{p, roots, ramified}`` objects."""
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SpecParseError(f"{path}:{exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, list):
        raise SpecParseError(f"{path}: expected a JSON array of local factors")
    out = {}
    for i, entry in enumerate(doc):
        try:
            p = int(entry["p"])
            roots = tuple(complex(r["re"], r.get("im", 0.0)) for r in entry.get("roots", []))
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecParseError(f"{path}: entry {i}: {exc}") from None
        out[p] = LocalFactor(p, roots, bool(entry.get("ramified", True)))
    return out


def rankin_selberg_spec(
    A: LFunctionSpec,
    M: LFunctionSpec,
    pole_order: int = 0,
    overrides: Mapping[int, LocalFactor] | None = None,
    conductor_scale: float = 1.0,
) -> LFunctionSpec:
    """``L(s, A x M)``: pairwise products of unramified roots; primes ramified
    for either factor get the override factor or the empty factor."""
    limit = min(A.prime_limit, M.prime_limit)
    if limit < 2 and (A.locals or M.locals):
        raise DataGapError("no common prime range for the Rankin-Selberg product")
    overrides = dict(overrides or {})
    locs = {}
    for p in A.locals:
        if p > limit:
            break
        la, lm = A.local(p), M.local(p)
        if la.ramified or lm.ramified:
            locs[p] = overrides.get(p, LocalFactor(p, (), ramified=True))
        else:
            locs[p] = LocalFactor(p, tuple(a * m for a in la.roots for m in lm.roots))
    shifts = tuple(a + b.conjugate() for a in A.shifts for b in M.shifts)
    # The shifts above are bookkeeping only; the conductor is set explicitly.
    shifts = tuple(complex(max(s.real, -0.499), s.imag) for s in shifts)
    period = None
    if A.period is not None and M.period is not None:
        period = A.period * M.period // math.gcd(A.period, M.period)
    return LFunctionSpec(
        degree=A.degree * M.degree,
        pole_order=pole_order,
        q_mag=A.q_mag**M.degree * M.q_mag**A.degree,
        shifts=shifts,
        locals=locs,
        coeff_growth=min(1.0, A.coeff_growth + M.coeff_growth),
        period=None if period is None or (A.ramified_primes or M.ramified_primes) else period,
        log_conductor=conductor_scale * (log_conductor(A) + log_conductor(M)),
        label=f"rs({A.label},{M.label})",
    )


def rs_square(A: LFunctionSpec, **kwargs) -> LFunctionSpec:
    """``A x conj(A)`` with its simple pole at ``s = 1``."""
    kwargs.setdefault("pole_order", 1)
    return rankin_selberg_spec(A, conjugate_spec(A), **kwargs)


def symmetric_power_spec(A: LFunctionSpec, l: int) -> LFunctionSpec:
    if A.degree != 2:
        raise DomainError(f"symmetric powers need a degree-2 spec, got degree {A.degree}")
    if l < 1:
        raise DomainError("l must be >= 1")
    if l == 1:
        return A
    locs = {}
    for p, lf in A.locals.items():
        if lf.ramified:
            locs[p] = LocalFactor(p, (), ramified=True)
        else:
            a1, a2 = lf.roots
            locs[p] = LocalFactor(p, tuple(a1**j * a2 ** (l - j) for j in range(l + 1)))
    b1, b2 = A.shifts
    shifts = tuple((j * b1 + (l - j) * b2) / l for j in range(l + 1))
    return LFunctionSpec(
        degree=l + 1, pole_order=0, q_mag=A.q_mag ** ((l + 1) / 2), shifts=shifts, locals=locs,
        coeff_growth=min(1.0, l * A.coeff_growth),
        log_conductor=(l + 1) / 2 * log_conductor(A),
        label=f"sym{l}({A.label})",
    )


@dataclass(frozen=True)
class RSCheck:
    lhs: float
    rhs: float
    ok: bool
    mode: str


def rs_identity_values(roots: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized ``(|sum_j a_j^k|^2, sum_{i,j} (a_i conj(a_j))^k)`` over rows of ``roots``."""
    rk = roots**k
    lhs = np.abs(rk.sum(axis=1)) ** 2
    prod = rk[:, :, None] * np.conj(rk)[:, None, :]
    rhs = prod.reshape(rk.shape[0], -1).sum(axis=1)
    return lhs, rhs


def check_rs_identity(A: LFunctionSpec, p: int, k: int, rs: LFunctionSpec | None = None) -> RSCheck:
    lf = A.local(p)
    c = lf.power_sum(k)
    lhs = abs(c) ** 2
    if lf.ramified:
        rhs_c = (rs.local(p).power_sum(k) if rs is not None else 0j)
        rhs = rhs_c.real
        return RSCheck(lhs, rhs, lhs <= rhs + RS_RTOL * abs(rhs), "inequality")
    rsl = rs.local(p) if rs is not None else LocalFactor(p, tuple(a * b.conjugate() for a in lf.roots for b in lf.roots))
    rhs = rsl.power_sum(k).real
    return RSCheck(lhs, rhs, lhs <= rhs + RS_RTOL * abs(rhs), "identity")


@dataclass(frozen=True)
class ChainReport:
    l: int
    k: int
    M: float
    c_abs: float
    b_abs: float
    dd: float
    lhs_i: float
    rhs_i: float
    lhs_ii: float
    rhs_ii: float
    growth: float  # M^{kl} (1 - 1/M^k)
    ok_i: bool
    ok_ii: bool
    constants: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.ok_i and self.ok_ii


def _normalize_pair(a1: complex, a2: complex) -> tuple[complex, complex]:
    if abs(abs(a1 * a2) - 1) > UNIT_DET_TOL:
        raise DomainError(f"|alpha_1 alpha_2| = {abs(a1 * a2)} != 1")
    if abs(a1) < abs(a2):
        a1, a2 = a2, a1
    return a1, a2


def chain_quantities(a1: np.ndarray, a2: np.ndarray, l: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized ``(|c|, |b|)`` with ``c = a1^k + a2^k`` and ``b`` the k-th power sum of sym^l roots."""
    u1, u2 = a1**k, a2**k
    c = u1 + u2
    b = sum(u1 ** (l - i) * u2**i for i in range(l + 1))
    return np.abs(c), np.abs(b)


def chain_holds(c_abs: np.ndarray, b_abs: np.ndarray, l: int, rtol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    lhs_i = c_abs**l
    rhs_i = np.maximum(2.0 ** (l + 1) * b_abs, 4.0**l)
    lhs_ii = c_abs ** (2 * l)
    rhs_ii = 4.0 ** (l + 1) * (b_abs**2 + 4.0**l)
    return lhs_i <= rhs_i * (1 + rtol), lhs_ii <= rhs_ii * (1 + rtol)


def _pair(A: LFunctionSpec, p: int) -> tuple[complex, complex]:
    lf = A.local(p)
    if A.degree != 2:
        raise DomainError("coefficient chains need a degree-2 spec")
    if lf.ramified or len(lf.roots) != 2:
        raise DomainError(f"p={p} is ramified")
    return _normalize_pair(*lf.roots)


def check_coeff_chain(A: LFunctionSpec, l: int, p: int, k: int) -> ChainReport:
    """(i) ``|c|^l <= max(2^{l+1}|b|, 4^l)``; (ii) ``|c|^{2l} <= 4^{l+1}(|b|^2 + 4^l)``."""
    a1, a2 = _pair(A, p)
    return chain_report(a1, a2, l, k)


def chain_report(a1: complex, a2: complex, l: int, k: int) -> ChainReport:
    a1, a2 = _normalize_pair(a1, a2)
    c_abs, b_abs = (float(v) for v in chain_quantities(np.array(a1), np.array(a2), l, k))
    ok_i, ok_ii = (bool(v) for v in chain_holds(np.array(c_abs), np.array(b_abs), l))
    M = abs(a1)
    return ChainReport(
        l=l, k=k, M=M, c_abs=c_abs, b_abs=b_abs, dd=b_abs**2,
        lhs_i=c_abs**l, rhs_i=max(2.0 ** (l + 1) * b_abs, 4.0**l),
        lhs_ii=c_abs ** (2 * l), rhs_ii=4.0 ** (l + 1) * (b_abs**2 + 4.0**l),
        growth=M ** (k * l) * (1 - M ** (-k)),
        ok_i=ok_i, ok_ii=ok_ii,
        constants={"i_factor": 2.0 ** (l + 1), "i_floor": 4.0**l, "ii_factor": 4.0 ** (l + 1), "ii_shift": 4.0**l},
    )


@dataclass(frozen=True)
class MaassReport:
    k: int
    s_abs: float
    a_abs: float
    b2_abs: float  # sym^2 power sum
    b4_abs: float  # sym^4 power sum
    dd: float
    lhs: float
    rhs: float
    chain2: ChainReport
    chain4: ChainReport
    K: float = MAASS_K
    K2: float = MAASS_K2

    @property
    def ok(self) -> bool:
        return self.lhs <= self.rhs * (1 + 1e-12) and self.chain2.ok and self.chain4.ok


def maass_report(a1: complex, a2: complex, k: int) -> MaassReport:
    """``|s|^4 <= K (dd + K')`` where ``s`` is the sym^2 power sum at ``p^k``
    and ``dd = |b|^2`` with ``b`` the sym^4 power sum."""
    a1, a2 = _normalize_pair(a1, a2)
    u1, u2 = a1**k, a2**k
    a = u1 + u2
    s = u1 * u1 + u1 * u2 + u2 * u2
    b4 = sum(u1 ** (4 - i) * u2**i for i in range(5))
    dd = abs(b4) ** 2
    lhs = abs(s) ** 4
    rhs = MAASS_K * (dd + MAASS_K2)
    return MaassReport(
        k=k, s_abs=abs(s), a_abs=abs(a), b2_abs=abs(s), b4_abs=abs(b4), dd=dd, lhs=lhs, rhs=rhs,
        chain2=chain_report(a1, a2, 2, k), chain4=chain_report(a1, a2, 4, k),
    )


def maass_chain_check(A: LFunctionSpec, p: int, k: int) -> MaassReport:
    return maass_report(*_pair(A, p), k)


# --- randomized sweeps --------------------------------------------------------------------

@dataclass(frozen=True)
class SweepResult:
    seed: int
    checks: int
    violations: int
    worst: float

    def to_dict(self) -> dict:
        return {"seed": self.seed, "checks": self.checks, "violations": self.violations, "worst": self.worst}


def random_gl2_roots(rng: np.random.Generator, count: int, unit_det: bool) -> tuple[np.ndarray, np.ndarray]:
    """Random root pairs; ``|alpha|`` log-uniform on ``[1/10, 10]`` (or ``M``, ``1/M`` with
    ``M`` log-uniform on ``[1, 10]`` when ``unit_det``), phases uniform."""
    ph = rng.uniform(0, 2 * np.pi, size=(2, count))
    if unit_det:
        M = 10 ** rng.uniform(0, 1, size=count)
        r1, r2 = M, 1 / M
    else:
        r1, r2 = 10 ** rng.uniform(-1, 1, size=(2, count))
    return r1 * np.exp(1j * ph[0]), r2 * np.exp(1j * ph[1])


def rs_sweep(seed: int, count: int, kmax: int = 6) -> SweepResult:
    """``|sum_j a_j^k|^2`` against the ``A x conj A`` power sum for random pairs.

    The error is measured relative to ``(sum_j |a_j|^k)^2``, the size of the
    individual terms, since the two sides may cancel to far below it.
    """
    rng = np.random.default_rng(seed)
    a1, a2 = random_gl2_roots(rng, count, unit_det=False)
    roots = np.stack([a1, a2], axis=1)
    worst = 0.0
    bad = 0
    for k in range(1, kmax + 1):
        lhs, rhs = rs_identity_values(roots, k)
        scale = (np.abs(roots) ** k).sum(axis=1) ** 2
        err = np.maximum(np.abs(lhs - rhs.real), np.abs(rhs.imag)) / scale
        bad += int(np.count_nonzero(err > RS_RTOL))
        worst = max(worst, float(err.max()))
    return SweepResult(seed, count * kmax, bad, worst)


def chain_sweep(seed: int, count: int, lmax: int = 6, kmax: int = 6) -> SweepResult:
    """Both coefficient chains on random unit-determinant pairs, ``l <= lmax``, ``k <= kmax``.
    ``worst`` is the largest ``lhs / rhs`` seen."""
    rng = np.random.default_rng(seed)
    a1, a2 = random_gl2_roots(rng, count, unit_det=True)
    worst = 0.0
    bad = 0
    for l in range(1, lmax + 1):
        for k in range(1, kmax + 1):
            c_abs, b_abs = chain_quantities(a1, a2, l, k)
            ok_i, ok_ii = chain_holds(c_abs, b_abs, l)
            bad += int(np.count_nonzero(~(ok_i & ok_ii)))
            ratio_i = c_abs**l / np.maximum(2.0 ** (l + 1) * b_abs, 4.0**l)
            ratio_ii = c_abs ** (2 * l) / (4.0 ** (l + 1) * (b_abs**2 + 4.0**l))
            worst = max(worst, float(ratio_i.max()), float(ratio_ii.max()))
    return SweepResult(seed, count * lmax * kmax, bad, worst)


def maass_sweep(seed: int, count: int, kmax: int = 6) -> SweepResult:
    rng = np.random.default_rng(seed)
    a1, a2 = random_gl2_roots(rng, count, unit_det=True)
    worst = 0.0
    bad = 0
    for k in range(1, kmax + 1):
        u1, u2 = a1**k, a2**k
        s = u1 * u1 + u1 * u2 + u2 * u2
        b4 = sum(u1 ** (4 - i) * u2**i for i in range(5))
        ratio = np.abs(s) ** 4 / (MAASS_K * (np.abs(b4) ** 2 + MAASS_K2))
        bad += int(np.count_nonzero(ratio > 1 + 1e-12))
        worst = max(worst, float(ratio.max()))
    return SweepResult(seed, count * kmax, bad, worst)
