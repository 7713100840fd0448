"""Dense symmetric eigensolver, majorization comparator and the rank-one
determinant formula.

Everything else in the package is checked against :func:`eigen_symmetric`,
so it is kept deliberately simple: a cyclic Jacobi iteration with a
round-robin pair ordering, which lets every rotation of a round be applied
at once with vectorised row/column updates.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

DEFAULT_JACOBI_TOL = 1e-14
DEFAULT_MAJORIZATION_TOL = 1e-8
MAX_SWEEPS = 60
# |lambda - 1| below this counts as exactly 1 in det_diag_plus_ones
UNIT_CANCELLATION_TOL = 1e-12


class ConvergenceError(ArithmeticError):
    """Jacobi iteration ran out of sweeps before the off-diagonal vanished."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class SymmetricMatrix:
    """Read-only dense real symmetric matrix.

    Construction copies the input and rejects anything that is not exactly
    symmetric, so ``m[i, j] == m[j, i]`` always holds bit for bit.
    """

    __slots__ = ("_a",)

    def __init__(self, entries):
        a = np.array(entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        if not np.array_equal(a, a.T):
            raise ValueError("matrix is not exactly symmetric")
        a.setflags(write=False)
        self._a = a

    @property
    def entries(self) -> np.ndarray:
        return self._a

    @property
    def dimension(self) -> int:
        return self._a.shape[0]

    def trace(self) -> float:
        return float(np.trace(self._a))

    def frobenius(self) -> float:
        return float(np.linalg.norm(self._a))

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._a
        return self._a.astype(dtype)

    def __getitem__(self, idx):
        return self._a[idx]

    def __eq__(self, other):
        if not isinstance(other, SymmetricMatrix):
            return NotImplemented
        return np.array_equal(self._a, other._a)

    __hash__ = None

    def __repr__(self):
        return f"SymmetricMatrix({self._a.tolist()!r})"


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues sorted weakly decreasing."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float).reshape(-1)
        if v.size > 1 and np.any(v[:-1] < v[1:]):
            raise ValueError("spectrum must be sorted weakly decreasing")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.size

    def __iter__(self):
        return iter(self.values.tolist())

    def __getitem__(self, idx):
        return self.values[idx]

    def tolist(self) -> list[float]:
        return self.values.tolist()


@dataclass(frozen=True)
class MajorizationReport:
    """Prefix-sum comparison of two decreasing sequences.

    ``first_violation`` is the 1-based prefix length of the first margin
    below ``-tol``, or None.
    """

    holds: bool
    prefix_margins: tuple[float, ...]
    first_violation: Optional[int]


@lru_cache(maxsize=None)
def _round_robin(dim: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """Pair schedule where each round touches every index at most once."""
    size = dim + (dim % 2)
    players = list(range(size))
    rounds = []
    for _ in range(size - 1):
        ps, qs = [], []
        for i in range(size // 2):
            p, q = players[i], players[size - 1 - i]
            if p < dim and q < dim:
                ps.append(min(p, q))
                qs.append(max(p, q))
        rounds.append((np.array(ps, dtype=np.intp), np.array(qs, dtype=np.intp)))
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(rounds)


def _off_diagonal_max(a: np.ndarray) -> float:
    if a.shape[0] < 2:
        return 0.0
    off = np.abs(a - np.diag(np.diag(a)))
    return float(off.max())


def jacobi_eigh(m, tol: float = DEFAULT_JACOBI_TOL, max_sweeps: int = MAX_SWEEPS,
                vectors: bool = True):
    """Eigen-decomposition of a real symmetric matrix by cyclic Jacobi.

    Sweeps until every off-diagonal magnitude is at most ``tol`` times the
    Frobenius norm of the input.

    Returns
    -------
    values : ndarray
        Eigenvalues sorted weakly decreasing.
    vecs : ndarray or None
        Orthogonal matrix whose columns are the matching eigenvectors.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = np.array(m.entries if isinstance(m, SymmetricMatrix) else SymmetricMatrix(m).entries)
    dim = a.shape[0]
    v = np.eye(dim) if vectors else None
    threshold = tol * float(np.linalg.norm(a))
    residual = _off_diagonal_max(a)
    sweeps = 0
    while residual > threshold:
        if sweeps == max_sweeps:
            raise ConvergenceError(
                f"Jacobi did not converge in {max_sweeps} sweeps "
                f"(off-diagonal residual {residual:.3e}, threshold {threshold:.3e})",
                residual)
        for p, q in _round_robin(dim):
            apq = a[p, q]
            active = apq != 0.0
            if not active.any():
                continue
            p, q, apq = p[active], q[active], apq[active]
            # a subnormal apq can overflow theta; t -> 0 is then the right rotation
            with np.errstate(over="ignore"):
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
            t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.hypot(theta, 1.0))
            c = 1.0 / np.hypot(t, 1.0)
            s = t * c
            # columns: A <- A J
            ap, aq = a[:, p].copy(), a[:, q].copy()
            a[:, p] = c * ap - s * aq
            a[:, q] = s * ap + c * aq
            # rows: A <- J^T A
            ap, aq = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * ap - s[:, None] * aq
            a[q, :] = s[:, None] * ap + c[:, None] * aq
            a[p, q] = 0.0
            a[q, p] = 0.0
            if v is not None:
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
        a = 0.5 * (a + a.T)
        residual = _off_diagonal_max(a)
        sweeps += 1
    values = np.diag(a).copy()
    order = np.argsort(-values, kind="stable")
    return values[order], (v[:, order] if v is not None else None)


def eigen_symmetric(m, tol: float = DEFAULT_JACOBI_TOL) -> Spectrum:
    values, _ = jacobi_eigh(m, tol=tol, vectors=False)
    return Spectrum(values)


def _as_decreasing(seq, name: str) -> np.ndarray:
    x = np.asarray(seq, dtype=float).reshape(-1)
    if x.size > 1 and np.any(x[:-1] < x[1:]):
        raise ValueError(f"{name} must be sorted weakly decreasing")
    return x


def majorizes(a: Sequence[float], b: Sequence[float],
              tol: float = DEFAULT_MAJORIZATION_TOL) -> MajorizationReport:
    """Check whether ``a`` majorizes ``b`` (every prefix sum of ``a`` is at
    least the matching prefix sum of ``b``, up to ``tol``)."""
    x = _as_decreasing(a, "a")
    y = _as_decreasing(b, "b")
    if x.size != y.size:
        raise ValueError(f"length mismatch: {x.size} vs {y.size}")
    margins = np.cumsum(x) - np.cumsum(y)
    bad = np.flatnonzero(margins < -tol)
    first = int(bad[0]) + 1 if bad.size else None
    return MajorizationReport(first is None, tuple(margins.tolist()), first)


def det_diag_plus_ones(lambdas: Sequence[float]) -> float:
    """Determinant of ``diag(lambdas) + B`` with B all ones off the diagonal.

    Uses ``B + I`` being rank one:
    ``det = prod(l - 1) * (1 + sum(1 / (l - 1)))``, with the single-unit
    case read off by cancelling the vanishing factor and two or more unit
    entries giving zero.
    """
    lam = np.asarray(lambdas, dtype=float).reshape(-1)
    shifted = lam - 1.0
    unit = np.abs(shifted) < UNIT_CANCELLATION_TOL
    count = int(unit.sum())
    if count >= 2:
        return 0.0
    if count == 1:
        return float(np.prod(shifted[~unit]))
    return float(np.prod(shifted) * (1.0 + np.sum(1.0 / shifted)))


def sum_top_k(s: Spectrum, l: int) -> float:
    values = s.values if isinstance(s, Spectrum) else _as_decreasing(s, "spectrum")
    if not 1 <= l <= values.size:
        raise ValueError(f"l must lie in 1..{values.size}, got {l}")
    return float(values[:l].sum())
