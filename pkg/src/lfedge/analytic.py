"""Archimedean toolbox and direct evaluation of L(sigma) for sigma > 1.

``log_gamma`` and ``digamma`` are implemented here (upward recurrence to
``|z| >= 10`` followed by the Stirling series truncated at its smallest
term).  L-values come either from the truncated Euler product with a
rigorous tail bound, or, for specs whose Dirichlet coefficients are
periodic, from the exact Hurwitz-zeta decomposition.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy import special

from .core import (
    ConvergenceError,
    DomainError,
    LFunctionSpec,
    dirichlet_coefficients,
    power_sums,
)
from .zeros import ZeroSet

SHIFT_THRESHOLD = 10.0
HALF_LOG_2PI = 0.5 * math.log(2 * math.pi)


def _bernoulli_even(count: int) -> list[Fraction]:
    """``B_2, B_4, ..., B_{2 count}`` via the Akiyama-Tanigawa algorithm."""
    n_max = 2 * count
    out = []
    a = [Fraction(0)] * (n_max + 1)
    for m in range(n_max + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        if m >= 2 and m % 2 == 0:
            out.append(a[0])
    return out


_B2K = _bernoulli_even(30)
_LG_COEF = [float(b / ((2 * k) * (2 * k - 1))) for k, b in enumerate(_B2K, 1)]
_PSI_COEF = [float(b / (2 * k)) for k, b in enumerate(_B2K, 1)]


def _check_pole(z: complex) -> None:
    if z.imag == 0 and z.real <= 0 and z.real == math.floor(z.real):
        raise DomainError(f"Gamma has a pole at {z.real:g}")


def _stirling_sum(coefs: list[float], zinv: complex, first_pow: complex) -> complex:
    # Truncate at the smallest term.
    total = 0j
    zinv2 = zinv * zinv
    power = first_pow
    prev = math.inf
    for c in coefs:
        term = c * power
        size = abs(term)
        if size >= prev:
            break
        total += term
        if size < 1e-18:
            break
        prev = size
        power *= zinv2
    return total


def log_gamma(z: complex) -> complex:
    """Principal branch of ``log Gamma(z)``."""
    z = complex(z)
    _check_pole(z)
    shift = 0j
    while abs(z) < SHIFT_THRESHOLD or z.real < 0.5:
        shift += cmath.log(z)
        z += 1
    zinv = 1 / z
    main = (z - 0.5) * cmath.log(z) - z + HALF_LOG_2PI
    return main + _stirling_sum(_LG_COEF, zinv, zinv) - shift


def digamma(z: complex) -> complex:
    """``psi(z) = Gamma'(z) / Gamma(z)``."""
    z = complex(z)
    _check_pole(z)
    shift = 0j
    while abs(z) < SHIFT_THRESHOLD or z.real < 0.5:
        shift += 1 / z
        z += 1
    zinv = 1 / z
    main = cmath.log(z) - 0.5 * zinv
    return main - _stirling_sum(_PSI_COEF, zinv, zinv * zinv) - shift


def gamma(z: complex) -> complex:
    return cmath.exp(log_gamma(z))


def G_term(spec: LFunctionSpec, s: float) -> float:
    """``sum_i (1/2) Re psi(s/2 + beta_i)``."""
    return sum(0.5 * digamma(s / 2 + b).real for b in spec.shifts)


def F_term(spec: LFunctionSpec, s: complex, zeros: ZeroSet) -> float:
    """``sum_rho (sigma - beta) / ((sigma - beta)^2 + (t - gamma)^2)`` over the supplied zeros."""
    s = complex(s)
    rho = zeros.rhos()
    if rho.size == 0:
        return 0.0
    if (rho.real >= s.real).any():
        raise DomainError("F_term requires Re(s) to the right of every zero")
    dx = s.real - rho.real
    dy = s.imag - rho.imag
    return float(np.sum(dx / (dx * dx + dy * dy)))


@dataclass(frozen=True)
class EvalResult:
    value: complex
    tail_bound: float
    cutoff: int
    method: str = "euler"


def _check_convergent(spec: LFunctionSpec, sigma: float) -> float:
    margin = sigma - spec.coeff_growth
    if not margin > 1:
        raise ConvergenceError(
            f"sigma={sigma} needs sigma > 1 + theta = {1 + spec.coeff_growth} for absolute convergence"
        )
    return margin


def euler_eval(spec: LFunctionSpec, sigma: float, cutoff: int | None = None) -> EvalResult:
    """``prod_{p <= cutoff} prod_j (1 - alpha_j(p) p^{-sigma})^{-1}`` with tail bound.

    The tail uses ``|log L_tail| <= d sum_{n > N} u_n / (1 - u_N)`` with
    ``u_n = n^{theta - sigma}``, summed by an integral comparison.
    """
    a = _check_convergent(spec, sigma)
    N = spec.prime_limit if cutoff is None else int(cutoff)
    primes, mat = spec.root_matrix(N)
    local = np.log1p(-mat * np.power(primes.astype(float), -sigma)[:, None])
    log_val = -local.sum()
    value = complex(np.exp(log_val))
    uN = N ** (-a)
    log_tail = spec.degree * N ** (1 - a) / ((a - 1) * (1 - uN))
    return EvalResult(value, abs(value) * math.expm1(log_tail), N, "euler")


def _log_weighted_tail(d: int, N: int, a: float, power: int) -> float:
    """Bound for ``d * sum_{n > N} (log n)^power n^{-a}`` with ``a > 1``."""
    L = math.log(N)
    b = a - 1
    # int_N^inf (log t)^j t^{-a} dt in closed form
    if power == 1:
        integral = N ** (-b) * (L / b + 1 / b**2)
    elif power == 2:
        integral = N ** (-b) * (L * L / b + 2 * L / b**2 + 2 / b**3)
    else:
        raise ValueError("power must be 1 or 2")
    # first term accounts for the monotone comparison starting at N
    return d * (integral + L**power * N ** (-a))


def log_deriv_eval(spec: LFunctionSpec, sigma: float, cutoff: int | None = None) -> EvalResult:
    """``L'/L(sigma) = -sum_{p^k <= cutoff} Lambda(p^k) p^{-k sigma}`` with tail bound."""
    a = _check_convergent(spec, sigma)
    N = spec.prime_limit if cutoff is None else int(cutoff)
    n, p, _, c = power_sums(spec, N)
    value = -complex(np.sum(np.log(p) * c * np.power(n.astype(float), -sigma)))
    return EvalResult(value, _log_weighted_tail(spec.degree, N, a, 1), N, "euler")


def log_deriv_prime_eval(spec: LFunctionSpec, sigma: float, cutoff: int | None = None) -> EvalResult:
    """``(L'/L)'(sigma) = sum Lambda(n) log(n) n^{-sigma}`` with tail bound."""
    a = _check_convergent(spec, sigma)
    N = spec.prime_limit if cutoff is None else int(cutoff)
    n, p, _, c = power_sums(spec, N)
    nf = n.astype(float)
    value = complex(np.sum(np.log(p) * c * np.log(nf) * np.power(nf, -sigma)))
    return EvalResult(value, _log_weighted_tail(spec.degree, N, a, 2), N, "euler")


def periodic_coefficients(spec: LFunctionSpec) -> np.ndarray:
    """``a_1 .. a_q`` for a spec flagged with ``period = q``."""
    if spec.period is None:
        raise DomainError("spec has no period; Hurwitz evaluation unavailable")
    q = spec.period
    if q == 1:
        return np.ones(1, dtype=complex)
    return dirichlet_coefficients(spec, q).dirichlet_coeffs[1 : q + 1]


def series_eval(spec: LFunctionSpec, sigma: float) -> EvalResult:
    """Exact evaluation for periodic coefficients:
    ``L(s) = q^{-s} sum_{a=1}^q a_a zeta(s, a/q)``; at ``s = 1`` (mean-zero
    coefficients only) ``L(1) = -(1/q) sum a_a psi(a/q)``."""
    coeffs = periodic_coefficients(spec)
    q = coeffs.size
    frac = np.arange(1, q + 1) / q
    if sigma == 1:
        if abs(coeffs.sum()) > 1e-9:
            raise ConvergenceError("L has a pole at s = 1")
        psi = special.digamma(frac)
        value = complex(-(coeffs * psi).sum() / q)
    elif sigma > 1:
        hz = special.zeta(sigma, frac)
        value = complex(q ** (-sigma) * (coeffs * hz).sum())
    else:
        raise ConvergenceError("series evaluation needs sigma >= 1")
    rounding = 1e-15 * q * (1 + abs(value))
    return EvalResult(value, rounding, q, "hurwitz")


def l_value(spec: LFunctionSpec, sigma: float, cutoff: int | None = None) -> EvalResult:
    """Best available evaluation of ``L(sigma)``."""
    if spec.period is not None and cutoff is None:
        return series_eval(spec, sigma)
    return euler_eval(spec, sigma, cutoff)


def log_derivative(spec: LFunctionSpec, sigma: float, cutoff: int | None = None) -> EvalResult:
    """Best available ``L'/L(sigma)``; periodic specs differentiate ``log L`` numerically."""
    if spec.period is not None and cutoff is None:
        if not sigma > 1:
            raise ConvergenceError("log_derivative needs sigma > 1")
        h = min(1e-3, (sigma - 1) / 4)
        f = lambda t: cmath.log(series_eval(spec, t).value)
        value, err = richardson(lambda hh: (f(sigma + hh) - f(sigma - hh)) / (2 * hh), h, levels=5)
        return EvalResult(complex(value), err + 1e-12, spec.period, "hurwitz")
    return log_deriv_eval(spec, sigma, cutoff)


def log_deriv_prime(spec: LFunctionSpec, sigma: float, cutoff: int | None = None) -> EvalResult:
    """Best available ``(L'/L)'(sigma)``."""
    if spec.period is not None and cutoff is None:
        if not sigma > 1:
            raise ConvergenceError("log_deriv_prime needs sigma > 1")
        h = min(1e-2, (sigma - 1) / 4)
        f = lambda t: cmath.log(series_eval(spec, t).value)
        second = lambda hh: (f(sigma + hh) - 2 * f(sigma) + f(sigma - hh)) / (hh * hh)
        value, err = richardson(second, h, levels=4)
        return EvalResult(complex(value), err + 1e-9, spec.period, "hurwitz")
    return log_deriv_prime_eval(spec, sigma, cutoff)


def gamma_ratio(spec: LFunctionSpec, sigma: float, sigma0: float) -> float:
    """``|Q|^{(sigma0-sigma)/2} prod_i |Gamma(sigma0/2+beta_i) / Gamma(sigma/2+beta_i)|``."""
    if not 1 <= sigma <= sigma0:
        raise DomainError(f"gamma_ratio needs 1 <= sigma <= sigma0, got {sigma}, {sigma0}")
    log_r = 0.5 * (sigma0 - sigma) * math.log(spec.q_mag)
    for b in spec.shifts:
        log_r += (log_gamma(sigma0 / 2 + b) - log_gamma(sigma / 2 + b)).real
    return math.exp(log_r)


def log_archimedean(spec: LFunctionSpec, sigma: float) -> complex:
    """``log(|Q|^{sigma/2} prod Gamma(sigma/2 + beta_i))``."""
    return 0.5 * sigma * math.log(spec.q_mag) + sum((log_gamma(sigma / 2 + b) for b in spec.shifts), 0j)


def xi_value(spec: LFunctionSpec, sigma: float, cutoff: int | None = None) -> EvalResult:
    """``Xi(sigma) = sigma^m (1-sigma)^m |Q|^{sigma/2} prod Gamma(sigma/2+beta_i) L(sigma)``."""
    if not sigma > 1:
        raise ConvergenceError("xi_value is evaluated for sigma > 1")
    lv = l_value(spec, sigma, cutoff)
    m = spec.pole_order
    factor = (sigma * (1 - sigma)) ** m * cmath.exp(log_archimedean(spec, sigma))
    return EvalResult(factor * lv.value, abs(factor) * lv.tail_bound, lv.cutoff, lv.method)


def richardson(estimate: Callable[[float], complex], h: float, levels: int = 6) -> tuple[complex, float]:
    """Neville extrapolation of ``estimate(h / 2^i)`` to ``h -> 0`` (all integer powers).

    Returns the extrapolated value and the difference between the last two
    diagonal entries as an error estimate.
    """
    hs = [h / 2**i for i in range(levels)]
    table = [complex(estimate(x)) for x in hs]
    diag = [table[0]]
    for i in range(1, levels):
        for j in range(levels - 1, i - 1, -1):
            ratio = hs[j - i] / hs[j]
            table[j] = table[j] + (table[j] - table[j - 1]) / (ratio - 1)
        diag.append(table[i])
    return diag[-1], abs(diag[-1] - diag[-2])


def central_difference(func: Callable[[float], complex], x0: float, j: int, h: float) -> complex:
    """Order-``j`` central difference of ``func`` at ``x0`` with step ``h``."""
    total = 0j
    for i in range(j + 1):
        total += (-1) ** i * math.comb(j, i) * func(x0 + (j / 2 - i) * h)
    return total / h**j


@dataclass(frozen=True)
class DerivativeEstimate:
    value: complex
    error: float
    order: int


def edge_function(spec: LFunctionSpec) -> Callable[[float], complex]:
    """``f(s) = (s - 1)^m L(s)`` on ``s > 1``."""
    m = spec.pole_order
    return lambda s: (s - 1) ** m * l_value(spec, s).value


def numeric_derivative(spec: LFunctionSpec, j: int, h: float = 0.1, levels: int = 6) -> DerivativeEstimate:
    """Estimate ``f^{(j)}(1)`` for ``f(s) = (s-1)^m L(s)``.

    Central differences with step ``h_i`` are taken at ``1 + 2 h_i max(j, 1)``
    (the stencil stays right of 1) and Richardson-extrapolated to ``h -> 0``.
    """
    if not 0 <= j <= 4:
        raise DomainError("derivative order must be in 0..4")
    f = edge_function(spec)
    span = max(j, 1)

    def estimate(hh: float) -> complex:
        return central_difference(f, 1 + 2 * hh * span, j, hh)

    left = 1 + 2 * h * span - j * h / 2
    if spec.period is None and left - spec.coeff_growth <= 1:
        raise ConvergenceError("stencil leaves the region of absolute convergence")
    value, err = richardson(estimate, h, levels)
    return DerivativeEstimate(complex(value), float(err), j)


def xi_grid(spec: LFunctionSpec, grid: np.ndarray) -> np.ndarray:
    """``|Xi(sigma)|`` on a grid of ``sigma > 1``."""
    return np.array([abs(xi_value(spec, float(s)).value) for s in grid])


def xi_monotone_violations(spec: LFunctionSpec, grid: np.ndarray | None = None, rtol: float = 1e-9) -> list[tuple[float, float]]:
    """Grid points where ``|Xi|`` drops by more than ``rtol`` relative to its left neighbour."""
    if grid is None:
        grid = np.round(np.arange(101, 301) / 100, 2)
    vals = xi_grid(spec, grid)
    bad = vals[1:] < vals[:-1] * (1 - rtol)
    return [(float(grid[i + 1]), float(vals[i + 1] / vals[i])) for i in np.flatnonzero(bad)]
