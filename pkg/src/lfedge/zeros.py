"""Finite lists of nontrivial zeros and the zeros-file format.

File format: UTF-8 text, one zero per line, ``#`` starts a comment.  A line
is either ``gamma`` (ordinate only, the zero is taken on the critical line)
or ``beta gamma``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import SpecParseError


@dataclass(frozen=True, eq=False)
class ZeroSet:
    beta: np.ndarray
    gamma: np.ndarray
    height_limit: float
    critical_assumed: bool = False
    # Each stored zero also stands for its mirror image beta - i*gamma.
    symmetric: bool = True

    def __post_init__(self) -> None:
        beta = np.asarray(self.beta, dtype=float).ravel()
        gamma = np.asarray(self.gamma, dtype=float).ravel()
        if beta.shape != gamma.shape:
            raise ValueError("beta and gamma must have the same length")
        order = np.argsort(gamma, kind="stable")
        beta, gamma = beta[order], gamma[order]
        if gamma.size and gamma[-1] > self.height_limit:
            raise ValueError(f"ordinate {gamma[-1]} exceeds height limit {self.height_limit}")
        if ((beta < 0) | (beta > 1)).any():
            raise ValueError("zeros must lie in the critical strip 0 <= beta <= 1")
        if self.symmetric and (gamma < 0).any():
            raise ValueError("symmetric zero sets store nonnegative ordinates only")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "gamma", gamma)

    def __len__(self) -> int:
        return int(self.gamma.size)

    @classmethod
    def empty(cls, height_limit: float = 0.0) -> "ZeroSet":
        return cls(np.zeros(0), np.zeros(0), height_limit)

    @classmethod
    def critical(cls, ordinates, height_limit: float | None = None) -> "ZeroSet":
        gamma = np.asarray(ordinates, dtype=float)
        T = float(gamma.max()) if height_limit is None and gamma.size else (height_limit or 0.0)
        return cls(np.full(gamma.size, 0.5), gamma, T, critical_assumed=True)

    def first(self, count: int) -> "ZeroSet":
        """The ``count`` lowest zeros; the height limit drops to the last kept ordinate."""
        if count >= len(self):
            return self
        T = float(self.gamma[count - 1]) if count else 0.0
        return ZeroSet(self.beta[:count], self.gamma[:count], T, self.critical_assumed, self.symmetric)

    def rhos(self) -> np.ndarray:
        """All zeros as complex numbers, mirror images included."""
        rho = self.beta + 1j * self.gamma
        if not self.symmetric:
            return rho
        off_axis = self.gamma > 0
        return np.concatenate([rho, np.conj(rho[off_axis])])


def load_zeros(path: str | Path, critical_assumed: bool | None = None, height_limit: float | None = None) -> ZeroSet:
    betas, gammas = [], []
    columns = None
    header_T = None
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line, _, comment = raw.partition("#")
            line = line.strip()
            if not line:
                head = comment.split()
                if height_limit is None and len(head) == 2 and head[0] == "height_limit":
                    header_T = float(head[1])
                continue
            parts = line.split()
            if columns is None:
                columns = len(parts)
            if len(parts) != columns or columns not in (1, 2):
                raise SpecParseError(f"{path}:{lineno}: expected 1 or 2 columns consistently, got {len(parts)}")
            try:
                vals = [float(v) for v in parts]
            except ValueError:
                raise SpecParseError(f"{path}:{lineno}: not a number: {line!r}") from None
            if columns == 1:
                betas.append(0.5)
                gammas.append(vals[0])
            else:
                betas.append(vals[0])
                gammas.append(vals[1])
    if columns == 1 and critical_assumed is False:
        raise SpecParseError(f"{path}: single-column zeros file requires critical_assumed")
    gamma = np.asarray(gammas, dtype=float)
    if height_limit is not None:
        T = height_limit
    elif header_T is not None:
        T = header_T
    else:
        T = float(gamma.max()) if gamma.size else 0.0
    return ZeroSet(np.asarray(betas, dtype=float), gamma, T, critical_assumed=(columns == 1) or bool(critical_assumed))


def save_zeros(zeros: ZeroSet, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# height_limit {float(zeros.height_limit)!r}\n")
        for b, g in zip(zeros.beta.tolist(), zeros.gamma.tolist()):
            if zeros.critical_assumed:
                fh.write(f"{g!r}\n")
            else:
                fh.write(f"{b!r} {g!r}\n")


def zeta_zeros(count: int | None = None) -> ZeroSet:
    """Bundled ordinates of the first 100 zeros of the Riemann zeta function."""
    path = Path(__file__).with_name("data") / "zeta_zeros.txt"
    zs = load_zeros(path, critical_assumed=True)
    return zs if count is None else zs.first(count)
