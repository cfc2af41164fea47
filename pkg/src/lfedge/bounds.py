"""Upper bounds for log|L(sigma_0)| assembled from smoothed prime sums.

Every bound returns a :class:`BoundReport` whose ``bound_log`` is the exact
sum of its named components.  Implied constants are explicit and live in
:class:`Constants`.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Sequence

import numpy as np
from scipy import optimize

from . import analytic
from .core import (
    DataGapError,
    DomainError,
    LFunctionSpec,
    dirichlet_coefficients,
    log_conductor,
    power_sums,
)
from .primes import prime_powers_upto

COMPONENTS = ("prime_sum", "q_term", "gamma_term", "conductor_term", "ramified_term", "constant_term")


@dataclass(frozen=True)
class Constants:
    C_abs: float = 10.0
    C_gamma: float = 10.0
    C_closed: float = 20.0
    x_max: float = 1e6
    C_tail: float = 10.0

    def canonical(self) -> str:
        return "".join(f"{f.name} = {getattr(self, f.name)!r}\n" for f in fields(self))

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()


def load_constants(path: str | Path | None) -> Constants:
    """``key = value`` lines; ``#`` comments and blank lines ignored."""
    if path is None:
        return Constants()
    known = {f.name for f in fields(Constants)}
    vals: dict[str, float] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip()
            if not sep or key not in known:
                raise DomainError(f"{path}:{lineno}: expected one of {sorted(known)} = value")
            try:
                vals[key] = float(value)
            except ValueError:
                raise DomainError(f"{path}:{lineno}: bad number {value.strip()!r}") from None
    return Constants(**vals)


def omega_lambda() -> float:
    """The real solution of ``exp(-lambda) = lambda``."""
    f = lambda t: math.exp(-t) - t
    lam = optimize.brentq(f, 0.5, 0.6, xtol=1e-15)
    for _ in range(2):
        lam -= f(lam) / (-math.exp(-lam) - 1)
    return lam


OMEGA = omega_lambda()


@dataclass(frozen=True)
class BoundParams:
    x: float
    lam: float = OMEGA
    constants: Constants = field(default_factory=Constants)

    def __post_init__(self) -> None:
        if not self.x > 2:
            raise DomainError(f"x = {self.x} must exceed 2")
        if not (self.lam > 0 and math.exp(-self.lam) <= self.lam * (1 + 1e-12)):
            raise DomainError(f"lambda = {self.lam} violates exp(-lambda) <= lambda")

    @property
    def sigma0(self) -> float:
        return 1 + self.lam / math.log(self.x)

    def to_dict(self) -> dict[str, Any]:
        return {"x": self.x, "lambda": self.lam, "sigma0": self.sigma0, "constants": asdict(self.constants)}


@dataclass
class BoundReport:
    mode: str
    components: dict[str, float]
    params: BoundParams
    flags: dict[str, bool] = field(default_factory=dict)
    extras: dict[str, Any] = field(default_factory=dict)
    label: str = ""

    def __post_init__(self) -> None:
        comps = {name: float(self.components.get(name, 0.0)) for name in COMPONENTS}
        extra = set(self.components) - set(COMPONENTS)
        if extra:
            raise ValueError(f"unknown components {sorted(extra)}")
        self.components = comps
        self.flags = {k: bool(self.flags.get(k, False)) for k in ("clamped", "heuristic", "conditional")} | {
            k: bool(v) for k, v in self.flags.items()
        }

    @property
    def bound_log(self) -> float:
        return math.fsum(self.components.values())

    @property
    def bound(self) -> float:
        return math.exp(self.bound_log) if self.bound_log < 700 else math.inf

    def to_dict(self) -> dict[str, Any]:
        return {
            "mode": self.mode,
            "label": self.label,
            "bound_log": self.bound_log,
            "components": dict(self.components),
            "params": self.params.to_dict(),
            "flags": dict(self.flags),
            "extras": _jsonable(self.extras),
        }


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


# --- kernels ---------------------------------------------------------------------

def smoothing_weights(x: float, sigma0: float) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """``(n, p, k, w)`` with ``w = log(x/n) / (k n^sigma0 log x)`` over prime powers ``n <= x``,
    so that ``Lambda(n) log(x/n) / (n^sigma0 log n log x) = c(n) w``."""
    if not x > 2:
        raise DomainError(f"x = {x} must exceed 2")
    n, p, k = prime_powers_upto(x)
    nf = n.astype(float)
    w = np.log(x / nf) / (k * nf**sigma0 * math.log(x))
    return n, p, k, w


def smoothed_prime_sum(spec: LFunctionSpec, x: float, sigma0: float) -> complex:
    """``sum_{n <= x} Lambda(n) log(x/n) / (n^sigma0 log n log x)``."""
    n, p, k, w = smoothing_weights(x, sigma0)
    if n.size == 0:
        return 0j
    _, _, _, c = power_sums(spec, x)
    return complex(np.dot(c, w))


def lemma2_rhs(spec: LFunctionSpec, params: BoundParams) -> BoundReport:
    """``Re S + (log|Q|/2 + G(sigma0)) / log x + C_abs d``."""
    x, s0, C = params.x, params.sigma0, params.constants
    L = math.log(x)
    comps = {
        "prime_sum": smoothed_prime_sum(spec, x, s0).real,
        "q_term": 0.5 * math.log(spec.q_mag) / L,
        "gamma_term": analytic.G_term(spec, s0) / L,
        "constant_term": C.C_abs * spec.degree,
    }
    return BoundReport("lemma2", comps, params, label=spec.label)


def lemma3_rhs(spec: LFunctionSpec, params: BoundParams) -> BoundReport:
    """``Re S + C_gamma log(c) / log x + C_abs d``."""
    x, s0, C = params.x, params.sigma0, params.constants
    comps = {
        "prime_sum": smoothed_prime_sum(spec, x, s0).real,
        "conductor_term": C.C_gamma * log_conductor(spec) / math.log(x),
        "constant_term": C.C_abs * spec.degree,
    }
    # gap between the conductor term and the exact archimedean terms of lemma2
    exact = (0.5 * math.log(spec.q_mag) + analytic.G_term(spec, s0)) / math.log(x)
    return BoundReport("lemma3", comps, params, extras={"gamma_absorption_slack": comps["conductor_term"] - exact},
                       label=spec.label)


@dataclass(frozen=True)
class CharacterSweep:
    """Lemma 2/3 right-hand sides and the exact ``log|L(sigma0)|`` for a batch
    of characters sharing one modulus."""

    q: int
    indices: tuple[int, ...]
    x: float
    sigma0: float
    log_abs_L: np.ndarray
    lemma2: np.ndarray
    lemma3: np.ndarray


def character_sweep(q: int, indices: Sequence[int], params: BoundParams) -> CharacterSweep:
    """Vectorized lemma2/lemma3 over characters mod ``q`` (same kernels as the per-spec path)."""
    from scipy import special

    from .families import character_group

    group = character_group(q)
    vals = group.value_matrix(indices)
    x, s0, C = params.x, params.sigma0, params.constants
    L = math.log(x)
    n, _, _, w = smoothing_weights(x, s0)
    prime_sum = (vals[:, n % q] @ w).real
    # L(s0) = q^{-s0} sum_a chi(a) zeta(s0, a/q)
    hz = special.zeta(s0, np.arange(1, q + 1) / q)
    hz_shift = np.roll(hz, 1)  # column a (mod q) holds zeta(s0, a/q), with a = q at column 0
    Lval = q ** (-s0) * (vals @ hz_shift)
    odd = vals[:, q - 1].real < 0
    beta = np.where(odd, 0.5, 0.0)
    G = np.array([0.5 * analytic.digamma(s0 / 2 + b).real for b in beta])
    q_mag = q / math.pi
    lemma2 = prime_sum + (0.5 * math.log(q_mag) + G) / L + C.C_abs
    logc = np.log1p(q_mag) + np.log(3 + beta)
    lemma3 = prime_sum + C.C_gamma * logc / L + C.C_abs
    return CharacterSweep(q, tuple(indices), x, s0, np.log(np.abs(Lval)), lemma2, lemma3)


# --- Theorem 1: trivial coefficient bound, x = log c --------------------------------

def trivial_prime_envelope(d: int, x: float, sigma0: float) -> float:
    """``sum_{p^k <= x} d p^k log p * log(x/n) / (n^sigma0 log n log x)``."""
    n, p, k, w = smoothing_weights(x, sigma0)
    return float(np.sum(d * n.astype(float) * w))


def closed_form_theorem1(d: int, logc: float, C: float) -> float:
    """``C d log c / log log c`` (log of the closed form)."""
    return C * d * logc / math.log(logc)


def transfer_log(spec: LFunctionSpec, bound_log_at_sigma0: float, sigma: float, sigma0: float) -> float:
    """Bound for ``log|(sigma-1)^m L(sigma)|`` from one at ``sigma0`` via monotonicity of Xi."""
    m = spec.pole_order
    out = bound_log_at_sigma0 + math.log(analytic.gamma_ratio(spec, sigma, sigma0))
    if m:
        out += m * math.log(sigma0 - 1) + m * math.log(sigma0 / sigma)
    return out


def theorem1_bound(spec: LFunctionSpec, constants: Constants | None = None, sigma: float | None = None,
                   degree: int | None = None, logc: float | None = None) -> BoundReport:
    """Lemma 3 at ``x = max(3, log c)`` with ``|Lambda(p^k)| <= d p^k log p``.

    Needs no local data; ``degree``/``logc`` override the spec's values (used
    when only the shape of a Rankin-Selberg square is known).
    """
    C = constants or Constants()
    d = spec.degree if degree is None else degree
    lc = log_conductor(spec) if logc is None else logc
    clamped = lc < 3
    x = max(3.0, lc)
    params = BoundParams(x, OMEGA, C)
    s0 = params.sigma0
    comps = {
        "prime_sum": trivial_prime_envelope(d, x, s0),
        "conductor_term": C.C_gamma * lc / math.log(x),
        "constant_term": C.C_abs * d,
    }
    extras: dict[str, Any] = {"closed_form_log": closed_form_theorem1(d, lc, C.C_closed), "log_conductor": lc}
    report = BoundReport("theorem1", comps, params, {"clamped": clamped}, extras, spec.label)
    if sigma is not None:
        if not 1 <= sigma <= s0:
            raise DomainError(f"transfer needs 1 <= sigma <= sigma0 = {s0}")
        extras["sigma"] = sigma
        extras["transfer_log"] = transfer_log(spec, report.bound_log, sigma, s0)
    return report


# --- Theorem 2 / symmetric powers ---------------------------------------------------------

def _clamp(x: float, C: Constants) -> tuple[float, bool]:
    if x > C.x_max:
        return C.x_max, True
    return x, False


def _unramified_mask(spec: LFunctionSpec, p: np.ndarray) -> np.ndarray:
    ram = np.array(spec.ramified_primes, dtype=np.int64)
    return ~np.isin(p, ram)


def _holder_report(mode: str, A: LFunctionSpec, x: float, clamped: bool, C: Constants,
                   first_terms: np.ndarray, l: int, extras: dict[str, Any]) -> BoundReport:
    """Shared assembly: ``(sum first_terms)^{1/2l} (sum p^{-k s0})^{(2l-1)/2l}`` over unramified
    prime powers, plus the ramified envelope, conductor and constant terms."""
    params = BoundParams(x, OMEGA, C)
    s0 = params.sigma0
    n, p, k, w = smoothing_weights(x, s0)
    _, _, _, c = power_sums(A, x)
    unram = _unramified_mask(A, p)
    nf = n.astype(float)
    first = float(np.sum(first_terms[unram]))
    second = float(np.sum(nf[unram] ** (-s0)))
    holder = first ** (1 / (2 * l)) * second ** ((2 * l - 1) / (2 * l)) if first > 0 else 0.0
    ram = ~unram
    envelope = np.maximum(np.abs(c[ram]), nf[ram] ** (1 / (2 * l)))
    ramified = float(np.sum(envelope * w[ram]))
    logc = log_conductor(A)
    comps = {
        "prime_sum": holder,
        "ramified_term": ramified,
        "conductor_term": C.C_gamma * logc / math.log(x),
        "constant_term": C.C_abs * A.degree,
    }
    extras = dict(extras, first_factor=first, second_factor=second, log_conductor=logc)
    return BoundReport(mode, comps, params, {"clamped": clamped}, extras, A.label)


def theorem2_x(logc: float) -> float:
    return math.exp(math.sqrt(logc))


def theorem2_bound(A: LFunctionSpec, rs: LFunctionSpec | None = None, constants: Constants | None = None,
                   fallback: bool = False) -> BoundReport:
    """Cauchy-Schwarz bound at ``x = exp(sqrt(log c))`` using ``Lambda_{A x conj A}``."""
    C = constants or Constants()
    logc = log_conductor(A)
    x, clamped = _clamp(theorem2_x(logc), C)
    params = BoundParams(x, OMEGA, C)
    s0 = params.sigma0
    n, p, k, _ = smoothing_weights(x, s0)
    nf = n.astype(float)
    extras: dict[str, Any] = {"closed_form_log": C.C_closed * math.sqrt(logc)}
    heuristic = False
    if rs is not None:
        _, _, _, c_rs = power_sums(rs, x)
        first_terms = c_rs.real / k * nf ** (-s0)
    elif fallback:
        # sum of nonnegative terms <= log L(s0, A x conj A) <= theorem-1 bound + pole contribution
        t1 = theorem1_bound(A, C, degree=A.degree**2, logc=2 * logc)
        total = t1.bound_log + A.degree**2 * math.log(1 / (s0 - 1))
        first_terms = np.zeros(n.size)
        if n.size:
            first_terms[0] = total
        extras["fallback_first_factor"] = total
        heuristic = True
    else:
        raise DataGapError("theorem2_bound needs Rankin-Selberg local data (or fallback=True)")
    report = _holder_report("theorem2", A, x, clamped, C, first_terms, 1, extras)
    report.flags["heuristic"] = heuristic
    return report


def sympower_first_terms(A: LFunctionSpec, x: float, sigma0: float, l: int) -> tuple[np.ndarray, bool]:
    """Terms ``D_l(p^k) / (k p^{k sigma0})`` of the Hölder first factor.

    ``l = 1``: ``D_1 = |c|^2`` exactly.  ``l >= 2``: ``D_l = 4^{l+1}(|b|^2 + 4^l)`` with ``b`` the
    sym^l power sum, valid for unit-determinant roots; other primes fall back
    to the exact ``|c|^{2l}`` (reported via the returned flag).
    """
    n, p, k, c = power_sums(A, x)
    nf = n.astype(float)
    if l == 1:
        D = np.abs(c) ** 2
        return D / k * nf ** (-sigma0), False
    primes, mat = A.root_matrix(x)
    row = np.searchsorted(primes, p)
    a1 = mat[row, 0] ** k
    a2 = mat[row, 1] ** k
    b = sum(a1 ** (l - i) * a2**i for i in range(l + 1))
    D = 4.0 ** (l + 1) * (np.abs(b) ** 2 + 4.0**l)
    unit = np.abs(np.abs(mat[row, 0] * mat[row, 1]) - 1) <= 1e-9
    exact = np.abs(c) ** (2 * l)
    D = np.where(unit, D, exact)
    return D / k * nf ** (-sigma0), bool((~unit & _unramified_mask(A, p)).any())


def sympower_closed_form_log(logc: float, l: int, C: float) -> float:
    return C * logc ** (1 / (2 * l)) * math.log(logc) ** ((l - 1) / l)


def sympower_bound(A: LFunctionSpec, l: int, constants: Constants | None = None) -> BoundReport:
    """Hölder bound through sym^l.  ``l = 1`` coincides with :func:`theorem2_bound`
    (any degree); ``l >= 2`` needs GL(2) data and uses ``x = c`` (clamped)."""
    if l < 1:
        raise DomainError("l must be >= 1")
    if l >= 2 and A.degree != 2:
        raise DomainError(f"sympower_bound with l >= 2 needs degree 2, got {A.degree}")
    C = constants or Constants()
    logc = log_conductor(A)
    raw_x = theorem2_x(logc) if l == 1 else math.exp(logc)
    x, clamped = _clamp(raw_x, C)
    s0 = BoundParams(x, OMEGA, C).sigma0
    terms, nonunit = sympower_first_terms(A, x, s0, l)
    extras = {
        "l": l,
        "closed_form_log": sympower_closed_form_log(logc, l, C.C_closed) if logc > 1 else 0.0,
        "closed_form_exponent": 1 / (2 * l),
        "chain_constants": {"factor": 4.0 ** (l + 1), "shift": 4.0**l} if l > 1 else {},
    }
    report = _holder_report("sympower", A, x, clamped, C, terms, l, extras)
    report.flags["non_unit_determinant"] = nonunit
    return report


# --- Corollary 5: short sums -----------------------------------------------------------------

@dataclass(frozen=True)
class ShortSum:
    exact: float
    bound: float
    refined: float
    euler_majorant: float
    x: float

    def to_dict(self) -> dict[str, float]:
        return asdict(self)


def short_sum_bound(spec: LFunctionSpec, x: float, constants: Constants | None = None,
                    pole_order: int | None = None) -> ShortSum:
    """``sum_{n <= x} |a_n| / n`` and its bounds.

    ``bound = exp(e (sum |Lambda(n)|^2 / (n^{1+1/log x} log^2 n))^{1/2} (log log x)^{1/2})``;
    ``refined = (log x)^k exp(C sqrt(log c / log log c))`` with ``k`` the pole order
    of ``A x conj A`` (default ``max(1, m)``); ``euler_majorant = e prod_{p <= x} prod_j
    (1 - |alpha_j| p^{-sigma})^{-1}`` at ``sigma = 1 + 1/log x``, which dominates the
    sum whenever every ``|alpha_j(p)| < p^sigma``.
    """
    if not x >= 3:
        raise DomainError("short sums need x >= 3")
    C = constants or Constants()
    N = int(math.floor(x))
    table = dirichlet_coefficients(spec, N)
    nn = np.arange(1, N + 1)
    exact = float(math.fsum(np.abs(table.dirichlet_coeffs[1:]) / nn))
    sigma = 1 + 1 / math.log(x)
    n, p, k, c = power_sums(spec, x)
    S = float(np.sum(np.abs(c) ** 2 / (k * k) * n.astype(float) ** (-sigma)))
    bound = math.exp(math.e * math.sqrt(S) * math.sqrt(math.log(math.log(x))))
    logc = log_conductor(spec)
    kk = max(1, spec.pole_order) if pole_order is None else pole_order
    refined = math.log(x) ** kk * math.exp(C.C_closed * math.sqrt(logc / math.log(logc)))
    primes, mat = spec.root_matrix(x)
    u = np.abs(mat) * primes[:, None].astype(float) ** (-sigma)
    maj = math.inf if (u >= 1).any() else math.e * math.exp(-np.log1p(-u).sum())
    return ShortSum(exact, bound, refined, maj, float(x))


# --- GRH mode ------------------------------------------------------------------------------------

def grh_bound(spec: LFunctionSpec, delta: float, constants: Constants | None = None) -> BoundReport:
    """Conditional (GRH) bound at ``x = log^2 c`` with weight ``1 - (n/x)^2`` and the coefficient
    envelope ``|Lambda(p^k) / log p| <= d p^{k delta}``."""
    if not 0 <= delta <= 0.5:
        raise DomainError("delta must lie in [0, 1/2]")
    C = constants or Constants()
    logc = log_conductor(spec)
    raw_x = logc**2
    x = max(3.0, raw_x)
    params = BoundParams(x, OMEGA, C)
    s0 = params.sigma0
    n, p, k = prime_powers_upto(x)
    nf = n.astype(float)
    weight = 1 - (nf / x) ** 2
    envelope = float(np.sum(spec.degree * p.astype(float) ** (k * delta) * weight / (k * nf**s0)))
    comps = {"prime_sum": envelope, "constant_term": C.C_abs * spec.degree}
    band = C.C_abs * spec.degree * logc ** (2 * delta) / math.log(logc)
    extras: dict[str, Any] = {"delta": delta, "envelope_log": band, "envelope": [-band, band]}
    try:
        _, _, _, c = power_sums(spec, x)
        extras["weighted_prime_sum"] = float(np.sum(c.real * weight / (k * nf**s0)))
    except DataGapError:
        pass
    return BoundReport("grh", comps, params, {"clamped": raw_x < 3, "conditional": True}, extras, spec.label)
