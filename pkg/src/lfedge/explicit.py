"""Explicit formulas against finite zero lists, and the lower bound for L(1).

Two smoothed explicit formulas are implemented:

* kernel ``x^w / w^2``: ``-L'/L(s) = sum_{n<=x} Lambda(n) log(x/n) / (n^s log x)
  + (L'/L)'(s) / log x + sum_rho x^{rho-s} / ((rho-s)^2 log x)
  - m x^{1-s} / ((1-s)^2 log x) + sum_flat x^{-s-2(beta_i+k)} / ((s+2(beta_i+k))^2 log x)``;
* kernel ``2 x^w / (w (w+2))``: ``-L'/L(sigma) = sum_{n<=x} Lambda(n) (1 - (n/x)^2) / n^sigma
  - 2 m x^{1-sigma} / ((1-sigma)(3-sigma)) + sum_rho 2 x^{rho-sigma} / ((rho-sigma)(rho-sigma+2))
  + (trivial zeros right of -A) - I_A``.

``flat`` sums run over trivial zeros ``-2(beta_i + k)``.  By default every
pair ``(i, k)`` counts except that, when ``L`` has a pole of order ``m`` at
1, the first ``m`` pairs with ``beta_i + k = 0`` are dropped (for zeta the
Gamma pole at 0 is not a zero).  Callers can pass an explicit exclusion set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable

import numpy as np

from . import analytic
from .bounds import Constants
from .core import DomainError, LFunctionSpec, log_conductor, power_sums
from .zeros import ZeroSet

TERM_FLOOR = 1e-18
MAX_TRIVIAL_K = 10**5
A_RANGE = (1.5, 1.6)


def default_exclusions(spec: LFunctionSpec) -> frozenset[tuple[int, int]]:
    """Pairs ``(i, k)`` (1-based ``i``) whose Gamma pole at ``-2(beta_i+k) = 0`` is cancelled by the pole of L."""
    out = []
    budget = spec.pole_order
    for i, b in enumerate(spec.shifts, 1):
        if budget and abs(b) < 1e-12:
            out.append((i, 0))
            budget -= 1
    return frozenset(out)


def trivial_zeros(spec: LFunctionSpec, right_of: float, exclude: Iterable[tuple[int, int]] | None = None) -> list[tuple[int, int, complex]]:
    """Trivial zeros ``t = -2(beta_i + k)`` with ``Re t > right_of``."""
    excl = default_exclusions(spec) if exclude is None else frozenset(exclude)
    out = []
    for i, b in enumerate(spec.shifts, 1):
        k = 0
        while True:
            t = -2 * (b + k)
            if t.real <= right_of:
                break
            if (i, k) not in excl:
                out.append((i, k, t))
            k += 1
    return out


@dataclass(frozen=True)
class TrivialSum:
    value: complex
    terms: int
    excluded: tuple[tuple[int, int], ...]


def trivial_zero_terms(spec: LFunctionSpec, s: complex, x: float,
                       exclude: Iterable[tuple[int, int]] | None = None) -> TrivialSum:
    """``sum_{(i,k)} x^{-s-2(beta_i+k)} / (s+2(beta_i+k))^2`` truncated below ``1e-18``."""
    excl = default_exclusions(spec) if exclude is None else frozenset(exclude)
    s = complex(s)
    total = 0j
    count = 0
    logx = math.log(x)
    for i, b in enumerate(spec.shifts, 1):
        for k in range(MAX_TRIVIAL_K):
            if (i, k) in excl:
                continue
            u = s + 2 * (b + k)
            if abs(u) == 0:
                raise DomainError(f"s = {s} is a trivial zero")
            term = np.exp(-u * logx) / (u * u)
            total += term
            count += 1
            # terms decrease once u is to the right of 0
            if abs(term) < TERM_FLOOR and u.real > 0:
                break
    return TrivialSum(complex(total), count, tuple(sorted(excl)))


def trivial_zero_sum(spec: LFunctionSpec, s: complex, x: float,
                     exclude: Iterable[tuple[int, int]] | None = None) -> complex:
    return trivial_zero_terms(spec, s, x, exclude).value


def _zero_tail(x: float, sigma: float, logc: float, T: float, C_tail: float) -> float:
    return C_tail * x ** (1 - sigma) * (logc + math.log(T + 2)) / max(T, 1.0)


@dataclass
class Lemma1Result:
    value: float
    zero_tail_estimate: float
    components: dict[str, float] = field(default_factory=dict)
    eval_error: float = 0.0


def _real_s(s: complex) -> float:
    s = complex(s)
    if s.imag != 0:
        raise DomainError("only real s is supported")
    if not s.real > 1:
        raise DomainError("s must satisfy Re s > 1")
    return s.real


def lemma1_rhs(spec: LFunctionSpec, s: float, x: float, zeros: ZeroSet,
               constants: Constants | None = None,
               exclude: Iterable[tuple[int, int]] | None = None) -> Lemma1Result:
    C = constants or Constants()
    s = _real_s(s)
    if not x > 1:
        raise DomainError("x must exceed 1")
    logx = math.log(x)
    rho = zeros.rhos()
    if np.any(np.abs(rho - s) == 0):
        raise DomainError("s coincides with a zero")
    n, p, k, c = power_sums(spec, x)
    nf = n.astype(float)
    prime = complex(np.sum(np.log(p) * c * np.log(x / nf) / nf**s)) / logx
    dd = analytic.log_deriv_prime(spec, s)
    zero_sum = complex(np.sum(np.exp((rho - s) * logx) / (rho - s) ** 2)) / logx
    m = spec.pole_order
    pole = -m * x ** (1 - s) / ((1 - s) ** 2 * logx)
    triv = trivial_zero_sum(spec, s, x, exclude) / logx
    comps = {
        "prime_sum": prime.real,
        "log_deriv_prime": dd.value.real / logx,
        "zero_sum": zero_sum.real,
        "pole_term": pole,
        "trivial_sum": triv.real,
    }
    value = math.fsum(comps.values())
    tail = _zero_tail(x, s, log_conductor(spec), zeros.height_limit, C.C_tail) / logx
    return Lemma1Result(value, tail, comps, dd.tail_bound / logx)


def lemma5_weight(n: np.ndarray | float, x: float) -> np.ndarray | float:
    return 1 - (np.asarray(n, dtype=float) / x) ** 2


def lemma5_sum(spec: LFunctionSpec, sigma: float, x: float) -> float:
    """``Re sum_{n <= x} Lambda(n) (1 - (n/x)^2) / n^sigma``."""
    if x < 2:
        return 0.0
    n, p, k, c = power_sums(spec, x)
    nf = n.astype(float)
    return float(np.sum((np.log(p) * c).real * lemma5_weight(nf, x) / nf**sigma))


def lemma5_x(logc: float, c0: float) -> float:
    """``log x`` for ``x = c^{4 log log c / c0}``."""
    return 4 * math.log(logc) * logc / c0


def lemma5_residual_bound(spec: LFunctionSpec, sigma: float, x: float | None, c0: float,
                          const: float = 1.0, A: float = 1.5, log_x: float | None = None) -> float:
    """``const (x^{-c0/(2 log c)} log^2 c + 1) + d^2 x^{-A} log c``.

    Pass ``log_x`` instead of ``x`` for cutoffs too large for a float.
    """
    if not c0 > 0:
        raise DomainError("c0 must be positive")
    lx = math.log(x) if log_x is None else log_x
    logc = log_conductor(spec)
    zero_part = math.exp(-c0 / (2 * logc) * lx) * logc**2 + 1
    arch = spec.degree**2 * math.exp(-A * lx) * logc
    return const * zero_part + arch


def choose_A(spec: LFunctionSpec, sigma: float, grid: int = 101) -> float:
    """``A`` in ``[3/2, 8/5]`` maximizing the distance from ``-A`` to every ``Re(t) - sigma``."""
    tz = trivial_zeros(spec, right_of=-A_RANGE[1] - 4 + sigma, exclude=())
    locs = np.array([t.real - sigma for _, _, t in tz])
    cand = np.linspace(*A_RANGE, grid)
    if locs.size == 0:
        return A_RANGE[0]
    dist = np.min(np.abs(locs[None, :] + cand[:, None]), axis=1)
    return float(cand[int(np.argmax(dist))])


@dataclass
class Lemma5Report:
    sigma: float
    x: float
    lhs: float
    rhs: float
    residual: float
    tail_estimate: float
    A: float
    components: dict[str, float]
    trivial_zeros: list[complex]

    @property
    def ok(self) -> bool:
        return self.residual <= self.tail_estimate

    def to_dict(self) -> dict[str, Any]:
        return {
            "sigma": self.sigma, "x": self.x, "lhs": self.lhs, "rhs": self.rhs, "residual": self.residual,
            "tail_estimate": self.tail_estimate, "A": self.A, "components": self.components,
            "trivial_zeros": [[t.real, t.imag] for t in self.trivial_zeros],
        }


def verify_lemma5(spec: LFunctionSpec, sigma: float, x: float, zeros: ZeroSet,
                  constants: Constants | None = None,
                  exclude: Iterable[tuple[int, int]] | None = None) -> Lemma5Report:
    """Compare ``-L'/L(sigma)`` with the weighted prime sum plus all explicit residues."""
    C = constants or Constants()
    if not sigma > 1:
        raise DomainError("verify_lemma5 needs sigma > 1")
    lhs = -analytic.log_derivative(spec, sigma).value.real
    logx = math.log(x)
    A = choose_A(spec, sigma)
    m = spec.pole_order
    # the pole of L sits at w = 1 - sigma; it is crossed only if right of -A
    pole = -2 * m * x ** (1 - sigma) / ((1 - sigma) * (3 - sigma)) if 1 - sigma > -A else 0.0
    rho = zeros.rhos()
    u = rho - sigma
    zero_sum = float(np.sum(2 * np.exp(u * logx) / (u * (u + 2))).real) if rho.size else 0.0
    crossed = [t for _, _, t in trivial_zeros(spec, right_of=sigma - A, exclude=exclude)]
    triv = 0.0
    for t in crossed:
        v = t - sigma
        triv += (2 * np.exp(v * logx) / (v * (v + 2))).real
    prime = lemma5_sum(spec, sigma, x)
    comps = {"prime_sum": prime, "pole_term": pole, "zero_sum": zero_sum, "trivial_sum": triv}
    rhs = math.fsum(comps.values())
    logc = log_conductor(spec)
    tail = _zero_tail(x, sigma, logc, zeros.height_limit, C.C_tail)
    tail += C.C_tail * spec.degree**2 * x ** (-A) * logc
    return Lemma5Report(sigma, x, lhs, rhs, abs(lhs - rhs), tail, A, comps, crossed)


# --- lower bound at s = 1 ---------------------------------------------------------------

@dataclass(frozen=True)
class LowerBoundConfig:
    c0: float
    C0: float = 5.0
    C1: float = 1.0
    C2: float = 0.5
    x_max: float = 1e6
    residual_const: float = 1.0

    def __post_init__(self) -> None:
        if not self.c0 > 0:
            raise DomainError("c0 must be positive")
        if not (self.C0 > 0 and self.C1 >= 0 and self.C2 >= 0):
            raise DomainError("C0 must be positive, C1 and C2 nonnegative")


@dataclass
class LowerBoundReport:
    lower_bound: float
    positive: bool
    sigma1: float
    x: float
    log_x_formula: float
    log_L_sigma1_bound: float
    derivative_push: float
    components: dict[str, float]
    flags: dict[str, bool]
    message: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "lower_bound": self.lower_bound, "positive": self.positive, "sigma1": self.sigma1,
            "x": self.x, "log_x_formula": self.log_x_formula, "log_L_sigma1_bound": self.log_L_sigma1_bound,
            "derivative_push": self.derivative_push, "components": self.components, "flags": self.flags,
            "message": self.message,
        }


def lower_bound_L1(A: LFunctionSpec, rs: LFunctionSpec, cfg: LowerBoundConfig) -> tuple[float, LowerBoundReport]:
    """Lower bound for ``|L(1)|`` under the zero-free region with constant ``c0``.

    ``|log L(sigma1)| <= (S + log(1/(sigma1-1)))^{1/2} P^{1/2} + R``
    with ``S = sum_{n<=x} Lambda_{A x conj A}(n) / (n^sigma1 log n)``, ``P = sum_{p^k<=x} p^{-k sigma1}``,
    ``R`` the Lemma 5 residual envelope (its ``+ 1`` absorbs the integration endpoint); then
    ``|L(1)| >= exp(-bound) - C1 exp(C2 sqrt(log c)) (sigma1 - 1)``.
    """
    logc = log_conductor(A)
    if logc <= 1:
        raise DomainError("lower_bound_L1 needs log c > 1")
    llc = math.log(logc)
    gap = math.exp(-cfg.C0 * logc / llc)
    sigma1 = 1 + gap
    log_x_formula = lemma5_x(logc, cfg.c0)
    clamped = log_x_formula > math.log(cfg.x_max)
    x = cfg.x_max if clamped else math.exp(log_x_formula)
    n, p, k, c_rs = power_sums(rs, x)
    nf = n.astype(float)
    S = float(np.sum(c_rs.real / k * nf ** (-sigma1)))
    P = float(np.sum(nf ** (-sigma1)))
    cs = math.sqrt(max(S + math.log(1 / gap), 0.0) * P)
    resid = lemma5_residual_bound(A, sigma1, x, cfg.c0, cfg.residual_const)
    comps = {"cauchy_schwarz": cs, "residual": resid}
    bound = math.fsum(comps.values())
    push = cfg.C1 * math.exp(cfg.C2 * math.sqrt(logc)) * gap
    lb = math.exp(-bound) - push
    positive = lb > 0
    flags = {"clamped": clamped, "heuristic": clamped, "conditional": True}
    msg = "" if positive else "no positive lower bound at these constants"
    report = LowerBoundReport(lb, positive, sigma1, x, log_x_formula, bound, push,
                              dict(comps, first_factor=S, second_factor=P), flags, msg)
    return lb, report


__all__ = [
    "LowerBoundConfig", "LowerBoundReport", "Lemma1Result", "Lemma5Report", "TrivialSum",
    "choose_A", "default_exclusions", "lemma1_rhs", "lemma5_residual_bound", "lemma5_sum", "lemma5_weight",
    "lemma5_x", "lower_bound_L1", "trivial_zero_sum", "trivial_zero_terms",
    "trivial_zeros", "verify_lemma5",
]
