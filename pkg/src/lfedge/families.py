"""Concrete L-functions: zeta, Dirichlet characters, Ramanujan Delta, random specs.

Characters mod ``q`` are labelled by their exponent vector on a fixed list
of generators of ``(Z/qZ)^*``.  The generators are taken prime-power
component by component (a primitive root for odd ``p``; ``-1`` for ``4``;
``-1`` and ``5`` for ``2^e``, ``e >= 3``), each lifted by CRT to be ``1``
modulo the other components.  If ``g_i`` has order ``n_i`` and the index
is written in mixed radix as ``index = j_1 + n_1 (j_2 + n_2 (...))`` then
``chi(g_i) = exp(2 pi i j_i / n_i)``.  Index 0 is the principal character.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from functools import lru_cache
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import (
    DomainError,
    LFunctionSpec,
    LocalFactor,
    ResourceError,
    SpecParseError,
    SpecValidationError,
    ensure_valid,
    spec_from_dict,
    spec_to_dict,
    validate,
)
from .primes import factorize, primes_upto

DELTA_MAX_LIMIT = 10**6


# --- Riemann zeta ---------------------------------------------------------------

def zeta_spec(limit: int) -> LFunctionSpec:
    locs = {int(p): LocalFactor(int(p), (1.0,)) for p in primes_upto(limit)}
    return LFunctionSpec(
        degree=1, pole_order=1, q_mag=1 / math.pi, shifts=(0.0,), locals=locs,
        root_number=1.0, coeff_growth=0.0, period=1, label="zeta",
    )


# --- Dirichlet characters -----------------------------------------------------

def _primitive_root(p: int) -> int:
    if p == 2:
        return 1
    factors = [f for f, _ in factorize(p - 1)]
    for g in range(2, p):
        if all(pow(g, (p - 1) // f, p) != 1 for f in factors):
            return g
    raise AssertionError("no primitive root")


def _component_generators(p: int, e: int) -> list[tuple[int, int]]:
    """``(generator, order)`` pairs for ``(Z/p^e Z)^*``."""
    pe = p**e
    if p == 2:
        if e == 1:
            return []
        if e == 2:
            return [(3, 2)]
        return [(pe - 1, 2), (5, 2 ** (e - 2))]
    g = _primitive_root(p)
    if e > 1 and pow(g, p - 1, p * p) == 1:
        g += p
    return [(g % pe, (p - 1) * p ** (e - 1))]


@dataclass(frozen=True)
class CharacterGroup:
    """All Dirichlet characters mod ``modulus`` as a value table."""

    modulus: int
    orders: tuple[int, ...]
    # logs[a, i] = discrete log of a on generator i (-1 where gcd(a, q) > 1)
    logs: np.ndarray

    @property
    def size(self) -> int:
        return math.prod(self.orders)

    def exponents(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.size:
            raise DomainError(f"character index {index} invalid for modulus {self.modulus} (group order {self.size})")
        out = []
        for n in self.orders:
            out.append(index % n)
            index //= n
        return tuple(out)

    def values(self, index: int) -> np.ndarray:
        """``chi(a)`` for ``a = 0 .. q-1``."""
        return self.value_matrix([index])[0]

    def value_matrix(self, indices: Sequence[int]) -> np.ndarray:
        q = self.modulus
        units = self.logs[:, 0] >= 0 if self.orders else np.array([math.gcd(a, q) == 1 for a in range(q)])
        out = np.zeros((len(indices), q), dtype=complex)
        for row, idx in enumerate(indices):
            phase = np.zeros(q)
            for i, (j, n) in enumerate(zip(self.exponents(idx), self.orders)):
                phase += j * self.logs[:, i] / n
            vals = np.exp(2j * np.pi * phase)
            # snap to exact values where the order allows it
            vals.real[np.abs(vals.real) < 1e-15] = 0.0
            vals.imag[np.abs(vals.imag) < 1e-15] = 0.0
            out[row] = np.where(units, vals, 0)
        return out

    def is_primitive(self, index: int) -> bool:
        return _is_primitive(self.modulus, self.values(index))

    def primitive_indices(self) -> list[int]:
        return [i for i in range(self.size) if self.is_primitive(i)]


def _is_primitive(q: int, vals: np.ndarray) -> bool:
    # chi is induced from modulus q/p iff it is trivial on units a = 1 mod q/p
    for p, _ in factorize(q):
        d = q // p
        a = np.arange(1, q, d)
        a = a[vals[a] != 0]
        if np.allclose(vals[a], 1.0):
            return False
    return True


@lru_cache(maxsize=1024)
def character_group(q: int) -> CharacterGroup:
    if q < 1:
        raise DomainError("modulus must be positive")
    comps = [(p, e, p**e) for p, e in factorize(q)]
    gens: list[tuple[int, int, int]] = []  # (component position, generator mod p^e, order)
    for c, (p, e, pe) in enumerate(comps):
        for g, n in _component_generators(p, e):
            gens.append((c, g, n))
    logs = -np.ones((q, len(gens)), dtype=np.int64)
    a = np.arange(q)
    unit = np.array([math.gcd(int(v), q) == 1 for v in a]) if q > 1 else np.ones(1, bool)
    col = 0
    for c, (p, e, pe) in enumerate(comps):
        cg = [(g, n) for cc, g, n in gens if cc == c]
        # discrete log table on the component
        table = -np.ones((pe, len(cg)), dtype=np.int64)
        if len(cg) == 1:
            g, n = cg[0]
            x = 1
            for j in range(n):
                table[x, 0] = j
                x = x * g % pe
        elif len(cg) == 2:
            (g1, n1), (g2, n2) = cg
            x1 = 1
            for j1 in range(n1):
                x = x1
                for j2 in range(n2):
                    table[x] = (j1, j2)
                    x = x * g2 % pe
                x1 = x1 * g1 % pe
        logs[:, col : col + len(cg)] = table[a % pe]
        col += len(cg)
    logs[~unit] = -1
    logs.setflags(write=False)
    return CharacterGroup(q, tuple(n for _, _, n in gens), logs)


@dataclass(frozen=True)
class DirichletCharacter:
    modulus: int
    index: int

    @property
    def table(self) -> np.ndarray:
        return character_group(self.modulus).values(self.index)

    def __call__(self, n: int) -> complex:
        return complex(self.table[n % self.modulus])

    def values(self, limit: int) -> dict[int, complex]:
        """``p -> chi(p)`` for primes ``p <= limit``."""
        t = self.table
        return {int(p): complex(t[int(p) % self.modulus]) for p in primes_upto(limit)}

    @property
    def parity(self) -> int:
        return 0 if self.modulus <= 2 or self(-1).real > 0 else 1

    @property
    def primitive(self) -> bool:
        return _is_primitive(self.modulus, self.table)


def character_spec_from_values(q: int, vals: np.ndarray, limit: int, label: str = "") -> LFunctionSpec:
    """Spec for the character with value table ``vals`` (length ``q``)."""
    locs = {}
    for p in primes_upto(limit):
        p = int(p)
        v = complex(vals[p % q])
        locs[p] = LocalFactor(p, (), ramified=True) if q % p == 0 else LocalFactor(p, (v,))
    odd = q > 2 and complex(vals[q - 1]).real < 0
    return LFunctionSpec(
        degree=1, pole_order=0, q_mag=q / math.pi, shifts=(0.5 if odd else 0.0,), locals=locs,
        coeff_growth=0.0, period=q, label=label,
    )


def dirichlet_spec(q: int, index: int, limit: int, strict: bool = False) -> LFunctionSpec:
    """L-function of character number ``index`` mod ``q``; imprimitive characters
    are rejected when ``strict`` is set."""
    if q < 3:
        raise DomainError("dirichlet_spec needs q >= 3")
    chi = DirichletCharacter(q, index)
    vals = chi.table
    if strict and not _is_primitive(q, vals):
        raise DomainError(f"character {index} mod {q} is not primitive")
    if index == 0 and not strict:
        # principal character: pole at s = 1
        spec = character_spec_from_values(q, vals, limit, f"dirichlet:{q}:{index}")
        return replace(spec, pole_order=1)
    return character_spec_from_values(q, vals, limit, f"dirichlet:{q}:{index}")


# --- Ramanujan Delta --------------------------------------------------------------

_M61 = (1 << 61) - 1


def _pentagonal_terms(limit: int) -> list[tuple[int, int]]:
    """``(exponent, sign)`` of ``prod (1 - q^n) = sum (-1)^k q^{k(3k-1)/2}``."""
    out = [(0, 1)]
    k = 1
    while True:
        sign = -1 if k % 2 else 1
        e1 = k * (3 * k - 1) // 2
        e2 = k * (3 * k + 1) // 2
        if e1 > limit:
            break
        out.append((e1, sign))
        if e2 <= limit:
            out.append((e2, sign))
        k += 1
    return out


def tau_values(limit: int) -> np.ndarray:
    """``tau(0..limit)`` as Python ints in an object array (``tau(0) = 0``).

    ``q prod (1 - q^n)^24`` is built by 24 multiplications by the sparse
    pentagonal series, done twice: modulo ``2^64`` (uint64 wraparound) and
    modulo ``2^61 - 1``; CRT recovers the exact signed values.
    """
    if limit > DELTA_MAX_LIMIT:
        raise ResourceError(f"tau table limit {limit} exceeds {DELTA_MAX_LIMIT}")
    N = max(int(limit), 1)  # need coefficients of prod up to q^{N-1}
    terms = _pentagonal_terms(N - 1)
    a64 = np.zeros(N, dtype=np.uint64)
    a61 = np.zeros(N, dtype=np.int64)
    a64[0] = 1
    a61[0] = 1
    for _ in range(24):
        n64 = np.zeros(N, dtype=np.uint64)
        n61 = np.zeros(N, dtype=np.int64)
        for e, sign in terms:
            if sign > 0:
                n64[e:] += a64[: N - e]
                n61[e:] += a61[: N - e]
            else:
                n64[e:] -= a64[: N - e]
                n61[e:] -= a61[: N - e]
                n61[e:] %= _M61
            n61[e:] %= _M61
        a64, a61 = n64, n61
    two64 = 1 << 64
    modulus = two64 * _M61
    inv = pow(two64, -1, _M61)
    out = np.zeros(limit + 1, dtype=object)
    for n in range(1, limit + 1):
        r64 = int(a64[n - 1])
        r61 = int(a61[n - 1])
        x = r64 + two64 * ((r61 - r64) * inv % _M61)
        if x > modulus // 2:
            x -= modulus
        out[n] = x
    return out


def tau_table(limit: int, cache: str | Path | None = None) -> np.ndarray:
    """``tau(n)`` for ``n <= limit``, optionally cached in a text file of ``n tau(n)`` lines."""
    if cache is not None:
        path = Path(cache)
        if path.exists():
            vals = {}
            with open(path, encoding="utf-8") as fh:
                for line in fh:
                    parts = line.split()
                    if len(parts) == 2:
                        vals[int(parts[0])] = int(parts[1])
            if all(n in vals for n in range(1, limit + 1)):
                out = np.zeros(limit + 1, dtype=object)
                for n in range(1, limit + 1):
                    out[n] = vals[n]
                return out
    out = tau_values(limit)
    if cache is not None:
        with open(cache, "w", encoding="utf-8") as fh:
            for n in range(1, limit + 1):
                fh.write(f"{n} {out[n]}\n")
    return out


def ramanujan_delta_spec(limit: int, cache: str | Path | None = None) -> LFunctionSpec:
    """Analytically normalized L-function of the discriminant form (weight 12, level 1)."""
    if limit > DELTA_MAX_LIMIT:
        raise ResourceError(f"Delta spec limit {limit} exceeds {DELTA_MAX_LIMIT}")
    tau = tau_table(limit, cache)
    locs = {}
    for p in primes_upto(limit):
        p = int(p)
        a = float(tau[p]) / p**5.5
        disc = complex(a * a - 4)
        r = disc**0.5
        locs[p] = LocalFactor(p, ((a + r) / 2, (a - r) / 2))
    return LFunctionSpec(
        degree=2, pole_order=0, q_mag=1 / math.pi**2, shifts=(2.75, 3.25), locals=locs,
        root_number=1.0, coeff_growth=0.0, label="delta",
    )


# --- synthetic specs ----------------------------------------------------------------

def synthetic_spec(d: int, seed: int, theta: float, limit: int) -> LFunctionSpec:
    """Random spec: ``|alpha|`` uniform on ``[0, p^theta]`` with uniform phase,
    ``m = 0``, ``|Q|`` log-uniform on ``[1, 1000]``, ``Re beta`` uniform on
    ``[0, 3]``, ``Im beta`` uniform on ``[-10, 10]``; each prime ``p <= 7`` is
    ramified with probability 1/5 (random shorter root list)."""
    if d < 1 or not 0 <= theta <= 1:
        raise DomainError("synthetic_spec needs d >= 1 and 0 <= theta <= 1")
    rng = np.random.default_rng([seed, d, int(round(theta * 10**6)), limit])
    q_mag = float(10 ** rng.uniform(0, 3))
    shifts = tuple(complex(rng.uniform(0, 3), rng.uniform(-10, 10)) for _ in range(d))
    primes = primes_upto(limit)
    radius = rng.uniform(0, 1, size=(primes.size, d)) * primes[:, None].astype(float) ** theta
    phase = rng.uniform(0, 2 * np.pi, size=(primes.size, d))
    roots = radius * np.exp(1j * phase)
    ram_draw = rng.uniform(size=primes.size)
    ram_len = rng.integers(0, d, size=primes.size)
    locs = {}
    for i, p in enumerate(primes):
        p = int(p)
        if p <= 7 and ram_draw[i] < 0.2:
            locs[p] = LocalFactor(p, tuple(roots[i, : ram_len[i]]), ramified=True)
        else:
            locs[p] = LocalFactor(p, tuple(roots[i]))
    return LFunctionSpec(
        degree=d, pole_order=0, q_mag=q_mag, shifts=shifts, locals=locs,
        coeff_growth=float(theta), label=f"synthetic:{d}:{seed}:{theta:g}",
    )


# --- files ------------------------------------------------------------------------------

def _line_of(text: str, needle: str) -> int | None:
    pos = text.find(needle)
    return None if pos < 0 else text.count("\n", 0, pos) + 1


def dumps_spec(spec: LFunctionSpec) -> str:
    return json.dumps(spec_to_dict(spec), indent=1, sort_keys=True) + "\n"


def save_spec(spec: LFunctionSpec, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_spec(spec))


def loads_spec(text: str, strict: bool = True, where: str = "<string>") -> LFunctionSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecParseError(f"{where}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    try:
        spec = spec_from_dict(doc, strict=strict)
    except SpecParseError as exc:
        msg = str(exc)
        token = msg.split(": ")[-1].split(",")[0].strip("'")
        line = _line_of(text, f'"{token}"')
        prefix = f"{where}:{line}" if line else where
        raise SpecParseError(f"{prefix}: {msg}") from None
    diags = validate(spec, strict=strict)
    if diags:
        out = []
        for dmsg in diags:
            line = None
            if dmsg.startswith("p="):
                line = _line_of(text, f'"p": {dmsg[2:].split(":")[0]}')
            elif "shift" in dmsg:
                line = _line_of(text, '"shifts"')
            out.append(f"{where}:{line}: {dmsg}" if line else f"{where}: {dmsg}")
        raise SpecValidationError(out)
    return spec


def load_spec(path: str | Path, strict: bool = True) -> LFunctionSpec:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return loads_spec(text, strict=strict, where=str(path))


__all__ = [
    "CharacterGroup", "DirichletCharacter", "character_group", "character_spec_from_values",
    "dirichlet_spec", "dumps_spec", "ensure_valid", "load_spec", "loads_spec",
    "ramanujan_delta_spec", "save_spec", "synthetic_spec", "tau_table", "tau_values", "zeta_spec",
]
