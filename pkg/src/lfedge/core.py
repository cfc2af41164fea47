"""L-function data model: local Euler data, Gamma shifts and derived coefficients.

An :class:`LFunctionSpec` stores the degree ``d``, the pole order ``m`` at
``s = 1``, the magnitude ``|Q|``, the Gamma shifts ``beta_i`` and, for every
prime up to some limit, the local roots ``alpha_j(p)``.  Everything else
(conductor, von Mangoldt-type coefficients, Dirichlet coefficients) is
derived here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Iterable, Mapping

import numpy as np

from .primes import is_prime, prime_powers_upto, primes_upto

ROOT_RTOL = 1e-9


class LFunctionError(Exception):
    """Base class for errors raised by this package."""


class DataGapError(LFunctionError, KeyError):
    """Local data for a needed prime is missing."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "missing local data"


class SpecValidationError(LFunctionError, ValueError):
    def __init__(self, diagnostics: Iterable[str] | str):
        if isinstance(diagnostics, str):
            diagnostics = [diagnostics]
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


class SpecParseError(SpecValidationError):
    """Malformed spec document."""


class DomainError(LFunctionError, ValueError):
    """Argument outside the mathematical domain (pole, wrong degree, ...)."""


class ConvergenceError(LFunctionError, ValueError):
    """Requested evaluation lies outside the region where the series converges."""


class ResourceError(LFunctionError, ValueError):
    pass


@dataclass(frozen=True)
class GammaShift:
    value: complex

    def __post_init__(self) -> None:
        v = complex(self.value)
        object.__setattr__(self, "value", v)
        if not v.real > -0.5:
            raise SpecValidationError(f"shift {v} violates Re(beta) > -1/2")


@dataclass(frozen=True)
class LocalFactor:
    """Euler factor at ``prime``; an empty ``roots`` tuple is the factor 1."""

    prime: int
    roots: tuple[complex, ...]
    ramified: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "roots", tuple(complex(r) for r in self.roots))

    def power_sum(self, k: int) -> complex:
        return sum((r**k for r in self.roots), 0j)


@dataclass(frozen=True, eq=False)
class LFunctionSpec:
    degree: int
    pole_order: int
    q_mag: float
    shifts: tuple[complex, ...]
    locals: Mapping[int, LocalFactor]
    root_number: complex | None = None
    coeff_growth: float = 1.0
    # Dirichlet coefficients periodic mod ``period`` (characters, zeta); enables
    # the Hurwitz-zeta evaluator in ``analytic``.
    period: int | None = None
    # Overrides (1+|Q|) prod(3+|beta|) when set, e.g. for Rankin-Selberg specs.
    log_conductor: float | None = None
    label: str = ""
    # Optional lower bound for Re(2 beta_i) + 1/2 (Luo-Rudnick-Sarnak type); informational.
    lrs_margin: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "shifts", tuple(complex(b) for b in self.shifts))
        object.__setattr__(self, "locals", dict(sorted(self.locals.items())))
        object.__setattr__(self, "q_mag", float(self.q_mag))
        object.__setattr__(self, "coeff_growth", float(self.coeff_growth))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LFunctionSpec):
            return NotImplemented
        return spec_to_dict(self) == spec_to_dict(other)

    def local(self, p: int) -> LocalFactor:
        try:
            return self.locals[p]
        except KeyError:
            raise DataGapError(f"no local data at p={p}") from None

    @cached_property
    def prime_limit(self) -> int:
        """Largest ``P`` such that every prime ``<= P`` has local data."""
        if not self.locals:
            return 1
        stored = np.fromiter(self.locals.keys(), dtype=np.int64)
        top = int(stored.max())
        primes = primes_upto(top)
        present = np.isin(primes, stored)
        if present.all():
            # no prime lies strictly between top and the next prime
            nxt = top + 1
            while not is_prime(nxt):
                nxt += 1
            return nxt - 1
        first_gap = int(primes[np.argmin(present)])
        return first_gap - 1

    def require(self, x: float) -> None:
        if x >= 2 and self.prime_limit < math.floor(x):
            raise DataGapError(
                f"local data covers primes <= {self.prime_limit}, need <= {math.floor(x)}"
            )

    @cached_property
    def _root_matrix(self) -> tuple[np.ndarray, np.ndarray]:
        primes = primes_upto(self.prime_limit)
        width = max([self.degree] + [len(self.locals[int(p)].roots) for p in primes])
        mat = np.zeros((primes.size, width), dtype=complex)
        for i, p in enumerate(primes):
            roots = self.locals[int(p)].roots
            if roots:
                mat[i, : len(roots)] = roots
        mat.setflags(write=False)
        return primes, mat

    def root_matrix(self, x: float | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Primes and a zero-padded ``(n_primes, width)`` root matrix up to ``x``."""
        primes, mat = self._root_matrix
        if x is None:
            return primes, mat
        self.require(x)
        cut = int(np.searchsorted(primes, math.floor(x), side="right"))
        return primes[:cut], mat[:cut]

    @cached_property
    def ramified_primes(self) -> tuple[int, ...]:
        return tuple(p for p, lf in self.locals.items() if lf.ramified)


@dataclass(frozen=True)
class CoefficientTable:
    lambda_coeffs: np.ndarray
    dirichlet_coeffs: np.ndarray
    limit: int

    def lam(self, n: int) -> complex:
        return complex(self.lambda_coeffs[n])

    def a(self, n: int) -> complex:
        return complex(self.dirichlet_coeffs[n])


def log_conductor(spec: LFunctionSpec) -> float:
    if spec.log_conductor is not None:
        return float(spec.log_conductor)
    return math.log1p(spec.q_mag) + sum(math.log(3 + abs(b)) for b in spec.shifts)


def conductor(spec: LFunctionSpec) -> float:
    """``(1 + |Q|) * prod_j (3 + |beta_j|)``."""
    return math.exp(log_conductor(spec))


def lambda_coefficient(spec: LFunctionSpec, p: int, k: int) -> complex:
    """``log p * sum_j alpha_j(p)^k``."""
    if k < 1:
        raise DomainError("k must be >= 1")
    return math.log(p) * spec.local(p).power_sum(k)


def power_sums(spec: LFunctionSpec, x: float) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Arrays ``(n, p, k, c)`` over prime powers ``n = p^k <= x`` with
    ``c = Lambda(n) / log p = sum_j alpha_j(p)^k``."""
    n, p, k = prime_powers_upto(x)
    if n.size == 0:
        return n, p, k, np.zeros(0, dtype=complex)
    primes, mat = spec.root_matrix(x)
    row = np.searchsorted(primes, p)
    c = np.empty(n.size, dtype=complex)
    for kk in np.unique(k):
        sel = k == kk
        c[sel] = (mat[row[sel]] ** int(kk)).sum(axis=1)
    return n, p, k, c


def lambda_values(spec: LFunctionSpec, x: float) -> tuple[np.ndarray, np.ndarray]:
    n, p, _, c = power_sums(spec, x)
    return n, np.log(p) * c


def complete_homogeneous(psums: np.ndarray) -> np.ndarray:
    """Newton recurrence ``k h_k = sum_{i=1..k} p_i h_{k-i}``.

    ``psums[..., i-1]`` holds the i-th power sum; returns ``h[..., 0..K]``.
    """
    psums = np.asarray(psums, dtype=complex)
    K = psums.shape[-1]
    h = np.zeros(psums.shape[:-1] + (K + 1,), dtype=complex)
    h[..., 0] = 1.0
    for k in range(1, K + 1):
        acc = np.zeros(psums.shape[:-1], dtype=complex)
        for i in range(1, k + 1):
            acc += psums[..., i - 1] * h[..., k - i]
        h[..., k] = acc / k
    return h


def check_trivial_bound(spec: LFunctionSpec, n: np.ndarray, p: np.ndarray, lam: np.ndarray) -> None:
    bound = spec.degree * n.astype(float) * np.log(p)
    bad = np.abs(lam) > bound * (1 + ROOT_RTOL)
    if bad.any():
        i = int(np.argmax(bad))
        raise SpecValidationError(
            f"|Lambda({int(n[i])})| = {abs(lam[i]):.6g} exceeds d p^k log p = {bound[i]:.6g}"
        )


def dirichlet_coefficients(spec: LFunctionSpec, limit: int) -> CoefficientTable:
    limit = int(limit)
    spec.require(limit)
    a = np.ones(limit + 1, dtype=complex)
    a[0] = 0
    lam = np.zeros(limit + 1, dtype=complex)
    primes, mat = spec.root_matrix(limit)
    for row, p in enumerate(primes):
        p = int(p)
        K = 1
        while p ** (K + 1) <= limit:
            K += 1
        roots = mat[row]
        ps = np.array([(roots**i).sum() for i in range(1, K + 1)])
        h = complete_homogeneous(ps)
        pk = 1
        for k in range(1, K + 1):
            pk *= p
            lam[pk] = math.log(p) * ps[k - 1]
            idx = np.arange(pk, limit + 1, pk)
            if pk * p <= limit:
                idx = idx[idx % (pk * p) != 0]
            a[idx] *= h[k]
    n, p, _ = prime_powers_upto(limit)
    check_trivial_bound(spec, n, p, lam[n])
    return CoefficientTable(lambda_coeffs=lam, dirichlet_coeffs=a, limit=limit)


def validate(spec: LFunctionSpec, strict: bool = False) -> list[str]:
    """All invariant violations of ``spec``; empty means valid."""
    out = []
    if spec.degree < 1:
        out.append(f"degree {spec.degree} must be positive")
    if spec.pole_order < 0:
        out.append(f"pole_order {spec.pole_order} must be nonnegative")
    if strict and spec.pole_order > spec.degree:
        out.append(f"pole_order {spec.pole_order} exceeds degree {spec.degree} (strict mode)")
    if not spec.q_mag > 0 or not math.isfinite(spec.q_mag):
        out.append(f"q_mag {spec.q_mag} must be a positive real")
    if len(spec.shifts) != spec.degree:
        out.append(f"shifts has {len(spec.shifts)} entries, expected degree {spec.degree}")
    for i, b in enumerate(spec.shifts):
        if not b.real > -0.5:
            out.append(f"shift beta_{i + 1} = {b} violates Re(beta) > -1/2")
    theta = spec.coeff_growth
    if not 0 <= theta <= 1:
        out.append(f"coeff_growth {theta} outside [0, 1]")
    if spec.root_number is not None and abs(abs(spec.root_number) - 1) > 1e-9:
        out.append(f"root_number {spec.root_number} must have modulus 1")
    for p, lf in spec.locals.items():
        if lf.prime != p:
            out.append(f"local factor keyed {p} carries prime {lf.prime}")
        if len(lf.roots) > spec.degree:
            out.append(f"p={p}: {len(lf.roots)} roots exceed degree {spec.degree}")
        if not lf.ramified and len(lf.roots) != spec.degree:
            out.append(f"p={p}: unramified factor has {len(lf.roots)} roots, expected {spec.degree}")
        for r in lf.roots:
            if abs(r) > p * (1 + ROOT_RTOL):
                out.append(f"p={p}: root {r} violates root bound |alpha| <= p")
            elif abs(r) > p**theta * (1 + ROOT_RTOL):
                out.append(f"p={p}: root {r} violates coeff_growth bound |alpha| <= p^{theta}")
    return out


def ensure_valid(spec: LFunctionSpec, strict: bool = False) -> LFunctionSpec:
    diags = validate(spec, strict=strict)
    if diags:
        raise SpecValidationError(diags)
    return spec


# --- JSON document -----------------------------------------------------------

SPEC_FIELDS = {
    "degree", "pole_order", "q_mag", "shifts", "coeff_growth", "locals",
    "root_number", "period", "log_conductor", "label", "lrs_margin",
}


def _cplx(z: complex) -> dict[str, float]:
    return {"re": float(z.real), "im": float(z.imag)}


def _from_cplx(obj: Any, where: str) -> complex:
    if isinstance(obj, (int, float)):
        return complex(obj)
    if not isinstance(obj, dict) or "re" not in obj:
        raise SpecParseError(f"{where}: expected {{re, im}} object, got {obj!r}")
    try:
        return complex(float(obj["re"]), float(obj.get("im", 0.0)))
    except (TypeError, ValueError) as exc:
        raise SpecParseError(f"{where}: {exc}") from None


def spec_to_dict(spec: LFunctionSpec) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "degree": spec.degree,
        "pole_order": spec.pole_order,
        "q_mag": spec.q_mag,
        "shifts": [_cplx(b) for b in spec.shifts],
        "coeff_growth": spec.coeff_growth,
        "locals": [
            {"p": lf.prime, "roots": [_cplx(r) for r in lf.roots], "ramified": lf.ramified}
            for lf in spec.locals.values()
        ],
    }
    if spec.root_number is not None:
        doc["root_number"] = _cplx(spec.root_number)
    if spec.period is not None:
        doc["period"] = spec.period
    if spec.log_conductor is not None:
        doc["log_conductor"] = spec.log_conductor
    if spec.label:
        doc["label"] = spec.label
    if spec.lrs_margin is not None:
        doc["lrs_margin"] = spec.lrs_margin
    return doc


def spec_from_dict(doc: Mapping[str, Any], strict: bool = True) -> LFunctionSpec:
    if not isinstance(doc, Mapping):
        raise SpecParseError("spec document must be a JSON object")
    unknown = set(doc) - SPEC_FIELDS
    if strict and unknown:
        raise SpecParseError(f"unknown field(s): {', '.join(sorted(unknown))}")
    for key in ("degree", "pole_order", "q_mag", "shifts", "locals"):
        if key not in doc:
            raise SpecParseError(f"missing field '{key}'")
    scalars: dict[str, Any] = {}
    for key, cast in (("degree", int), ("pole_order", int), ("q_mag", float)):
        try:
            scalars[key] = cast(doc[key])
        except (TypeError, ValueError):
            raise SpecParseError(f"field '{key}': expected {cast.__name__}, got {doc[key]!r}") from None
    degree, pole_order, q_mag = scalars["degree"], scalars["pole_order"], scalars["q_mag"]
    shifts = tuple(_from_cplx(b, f"shifts[{i}]") for i, b in enumerate(doc["shifts"]))
    locs: dict[int, LocalFactor] = {}
    for i, entry in enumerate(doc["locals"]):
        where = f"locals[{i}]"
        if not isinstance(entry, Mapping) or "p" not in entry:
            raise SpecParseError(f"{where}: expected object with 'p'")
        extra = set(entry) - {"p", "roots", "ramified"}
        if strict and extra:
            raise SpecParseError(f"{where}: unknown field(s): {', '.join(sorted(extra))}")
        p = int(entry["p"])
        roots = tuple(_from_cplx(r, f"{where}.roots[{j}]") for j, r in enumerate(entry.get("roots", [])))
        locs[p] = LocalFactor(p, roots, bool(entry.get("ramified", False)))
    rn = doc.get("root_number")
    return LFunctionSpec(
        degree=degree,
        pole_order=pole_order,
        q_mag=q_mag,
        shifts=shifts,
        locals=locs,
        root_number=None if rn is None else _from_cplx(rn, "root_number"),
        coeff_growth=float(doc.get("coeff_growth", 1.0)),
        period=None if doc.get("period") is None else int(doc["period"]),
        log_conductor=None if doc.get("log_conductor") is None else float(doc["log_conductor"]),
        label=str(doc.get("label", "")),
        lrs_margin=None if doc.get("lrs_margin") is None else float(doc["lrs_margin"]),
    )


def replace_roots(spec: LFunctionSpec, fn, **changes: Any) -> LFunctionSpec:
    """New spec with every local root list mapped through ``fn(p, roots)``."""
    locs = {p: LocalFactor(p, tuple(fn(p, lf.roots)), lf.ramified) for p, lf in spec.locals.items()}
    kwargs = dict(
        degree=spec.degree, pole_order=spec.pole_order, q_mag=spec.q_mag, shifts=spec.shifts,
        locals=locs, root_number=spec.root_number, coeff_growth=spec.coeff_growth,
        period=spec.period, log_conductor=spec.log_conductor, label=spec.label,
        lrs_margin=spec.lrs_margin,
    )
    kwargs.update(changes)
    return LFunctionSpec(**kwargs)
