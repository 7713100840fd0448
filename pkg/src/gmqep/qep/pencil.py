"""The polynomial F and secular function G of a 1-regular semi-bipartite
instance, the reduced Laplacian M, and the closed forms available for
equal pendant counts and for two attachment vertices.

An instance is a clique of size ``n`` whose first ``j`` vertices carry
``k_1 >= ... >= k_j`` pendant vertices.  With

    q_l(x) = (n + k_l - x)(1 - x) - k_l,

the secular function is ``G(x) = 1 + sum_l k_l / q_l(x)`` and
``F = G * prod_l q_l`` is a monic polynomial of degree ``2j``.  F is always
evaluated in the expanded product-sum form, so it stays finite at the
zeros of the ``q_l``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ..linalg import SymmetricMatrix

POLE_OFFSET = 1e-9        # relative to the instance scale n + k_1 + 1
ROOT_TOL = 1e-12          # bisection width, same scale
MERGE_TOL = 1e-9          # roots closer than this (scaled) are one root


class PoleError(ArithmeticError):
    """G evaluated too close to one of its poles."""

    def __init__(self, index: int, pole: float, lam: float):
        super().__init__(f"lambda={lam!r} is within the pole guard of q_{index} root {pole!r}")
        self.index = index
        self.pole = pole


@dataclass(frozen=True)
class PencilParams:
    """Clique size ``n`` and pendant counts ``k_1 >= ... >= k_j >= 1``."""

    n: int
    ks: tuple[int, ...]

    def __post_init__(self):
        ks = tuple(int(k) for k in self.ks)
        object.__setattr__(self, "ks", ks)
        object.__setattr__(self, "n", int(self.n))
        if not ks:
            raise ValueError("need at least one pendant group (j >= 1)")
        if len(ks) > self.n:
            raise ValueError(f"j={len(ks)} exceeds clique size n={self.n}")
        if any(k < 1 for k in ks):
            raise ValueError(f"pendant counts must be >= 1, got {ks}")
        if any(a < b for a, b in zip(ks, ks[1:])):
            raise ValueError(f"pendant counts must be weakly decreasing, got {ks}")

    @classmethod
    def of(cls, n: int, ks: Iterable[int]) -> "PencilParams":
        return cls(n, tuple(ks))

    @property
    def j(self) -> int:
        return len(self.ks)

    @property
    def degenerate(self) -> bool:
        return self.j == self.n

    @property
    def scale(self) -> float:
        return float(self.n + self.ks[0] + 1)

    @property
    def gm_bound(self) -> int:
        """``j*n + sum(k)``: the j-th conjugate-degree prefix sum."""
        return self.j * self.n + sum(self.ks)

    def label(self) -> str:
        return f"n={self.n};k={','.join(map(str, self.ks))}"


@dataclass(frozen=True)
class RootSet:
    """Distinct real roots, strictly decreasing, with multiplicities."""

    roots: tuple[float, ...]
    multiplicities: tuple[int, ...]

    def __post_init__(self):
        if len(self.roots) != len(self.multiplicities):
            raise ValueError("roots and multiplicities must align")
        if any(m < 1 for m in self.multiplicities):
            raise ValueError("multiplicities must be positive")
        if any(a <= b for a, b in zip(self.roots, self.roots[1:])):
            raise ValueError("roots must be strictly decreasing")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, int]], merge_tol: float = 0.0) -> "RootSet":
        """Group (value, multiplicity) pairs, merging values within ``merge_tol``.

        A merged group keeps the value of its highest-multiplicity member.
        """
        items = sorted(((float(v), int(m)) for v, m in pairs if m > 0), key=lambda vm: -vm[0])
        groups: list[list[tuple[float, int]]] = []
        for v, m in items:
            if groups and groups[-1][-1][0] - v <= merge_tol:
                groups[-1].append((v, m))
            else:
                groups.append([(v, m)])
        roots, mults = [], []
        for g in groups:
            rep = max(g, key=lambda vm: vm[1])[0]
            roots.append(rep)
            mults.append(sum(m for _, m in g))
        return cls(tuple(roots), tuple(mults))

    @classmethod
    def from_values(cls, values: Iterable[float], merge_tol: float = 0.0) -> "RootSet":
        return cls.from_pairs(((v, 1) for v in values), merge_tol)

    @property
    def degree(self) -> int:
        return sum(self.multiplicities)

    def expanded(self) -> np.ndarray:
        """All roots repeated by multiplicity, weakly decreasing."""
        return np.repeat(np.array(self.roots, dtype=float), self.multiplicities)

    def multiplicity_near(self, x: float, tol: float) -> int:
        return sum(m for r, m in zip(self.roots, self.multiplicities) if abs(r - x) <= tol)


def _quadratics(p: PencilParams, lam) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    ks = np.array(p.ks, dtype=float).reshape((-1,) + (1,) * lam.ndim)
    return (p.n + ks - lam) * (1.0 - lam) - ks


def product_sum(qs: np.ndarray, ks: Sequence[float]) -> np.ndarray:
    """``prod_l q_l + sum_l k_l prod_{m != l} q_m`` along the first axis,
    without dividing by any ``q_l``."""
    j = qs.shape[0]
    ones = np.ones(qs.shape[1:])
    prefix = [ones]
    for l in range(j):
        prefix.append(prefix[-1] * qs[l])
    suffix = ones
    total = prefix[j].copy()
    for l in range(j - 1, -1, -1):
        total = total + ks[l] * prefix[l] * suffix
        suffix = suffix * qs[l]
    return total


def q_factor(p: PencilParams, l: int, lam: float) -> float:
    """``(n + k_l - lam)(1 - lam) - k_l`` for 1-based ``l``."""
    if not 1 <= l <= p.j:
        raise ValueError(f"l must lie in 1..{p.j}, got {l}")
    k = p.ks[l - 1]
    return (p.n + k - lam) * (1.0 - lam) - k


def eval_F(p: PencilParams, lam):
    out = product_sum(_quadratics(p, lam), p.ks)
    return float(out) if np.ndim(out) == 0 else out


def quadratic_roots(p: PencilParams) -> tuple[np.ndarray, np.ndarray]:
    """Roots ``(r_minus, r_plus)`` of every ``q_l``, indexed by ``l - 1``."""
    ks = np.array(p.ks, dtype=float)
    s = p.n + ks + 1.0
    root = np.sqrt(s * s - 4.0 * p.n)
    r_plus = 0.5 * (s + root)
    # product of the roots is n; avoids cancelling s - root
    r_minus = p.n / r_plus
    return r_minus, r_plus


def secular(p: PencilParams, lam):
    """``G`` with no pole guard (internal use: bisection stays off the poles)."""
    qs = _quadratics(p, lam)
    ks = np.array(p.ks, dtype=float).reshape((-1,) + (1,) * np.ndim(lam))
    out = 1.0 + np.sum(ks / qs, axis=0)
    return float(out) if np.ndim(out) == 0 else out


def secular_deflated(p: PencilParams, lam):
    """``(G(lam) - G(n)) / (lam - n)``, evaluated without cancellation.

    Uses ``q_l(n) - q_l(x) = (n - x)(x - k_l - 1)`` and ``q_l(n) = -n k_l``,
    giving ``(1/n) sum_l (x - k_l - 1) / q_l(x)``.
    """
    qs = _quadratics(p, lam)
    ks = np.array(p.ks, dtype=float).reshape((-1,) + (1,) * np.ndim(lam))
    out = np.sum((np.asarray(lam, dtype=float) - ks - 1.0) / qs, axis=0) / p.n
    return float(out) if np.ndim(out) == 0 else out


def eval_G(p: PencilParams, lam: float, guard: float | None = None) -> float:
    """``1 + sum_l k_l / q_l(lam)``.

    Raises PoleError when ``lam`` is within ``guard`` of a root of some
    ``q_l`` (default ``1e-12 * (n + k_1 + 1)``).
    """
    if guard is None:
        guard = ROOT_TOL * p.scale
    r_minus, r_plus = quadratic_roots(p)
    for l in range(p.j):
        for r in (r_minus[l], r_plus[l]):
            if abs(lam - r) < guard:
                raise PoleError(l + 1, float(r), lam)
    return secular(p, float(lam))


def build_M(p: PencilParams) -> SymmetricMatrix:
    """Laplacian restricted to functions constant on the extra clique
    vertices and on each pendant group, in the orthonormal basis
    (attachment vertices, normalised extras, normalised pendant groups)."""
    n, j = p.n, p.j
    dim = 2 * j + 1
    m = np.zeros((dim, dim))
    extra = math.sqrt(n - j)
    m[:j, :j] = -1.0
    for l, k in enumerate(p.ks):
        m[l, l] = n + k - 1.0
        m[l, j] = m[j, l] = -extra
        m[l, j + 1 + l] = m[j + 1 + l, l] = -math.sqrt(k)
        m[j + 1 + l, j + 1 + l] = 1.0
    m[j, j] = float(j)
    return SymmetricMatrix(m)


def kernel_vector(p: PencilParams) -> np.ndarray:
    return np.concatenate([np.ones(p.j), [math.sqrt(p.n - p.j)], np.sqrt(np.array(p.ks, dtype=float))])


def pencil_matrix(p: PencilParams, lam: float) -> np.ndarray:
    """Symmetric j x j matrix whose determinant is ``F(lam)``: diagonal
    ``(n + k_l - lam)(1 - lam)`` and off-diagonal ``sqrt(k_l k_m)``."""
    ks = np.array(p.ks, dtype=float)
    w = np.sqrt(ks)
    out = np.outer(w, w)
    np.fill_diagonal(out, (p.n + ks - lam) * (1.0 - lam))
    return out


def equal_k_closed_form(n: int, k: int, j: int) -> RootSet:
    """All ``2j`` roots of F when every pendant count equals ``k``.

    F factors as ``q**(j-1) * (q + j*k)``, so the roots are those of ``q``
    (multiplicity ``j - 1``) and of ``q + j*k`` (multiplicity one).
    """
    if j < 1 or k < 1 or n < j:
        raise ValueError(f"need 1 <= j <= n and k >= 1, got n={n}, k={k}, j={j}")
    s = n + k + 1.0
    disc1 = s * s - 4.0 * n
    disc2 = disc1 - 4.0 * j * k
    if disc2 < 0:
        raise ValueError(f"negative discriminant {disc2} for n={n}, k={k}, j={j}")
    r1p = 0.5 * (s + math.sqrt(disc1))
    r1m = n / r1p
    r2p = 0.5 * (s + math.sqrt(disc2))
    r2m = (n + j * k) / r2p
    scale = float(n + k + 1)
    return RootSet.from_pairs([(r1p, j - 1), (r1m, j - 1), (r2p, 1), (r2m, 1)],
                              merge_tol=MERGE_TOL * scale)


@dataclass(frozen=True)
class J2Quadratics:
    """Roots (decreasing) of the two quadratics built from the large roots
    ``s1 > s2`` of F for ``j = 2``, with the residuals that tie them back."""

    q1_roots: tuple[float, float]
    q2_roots: tuple[float, float]
    q1_at_s1: float
    q2_at_s2: float
    q2_root_sum: float


def j2_quadratics(p: PencilParams, s1: float, s2: float) -> J2Quadratics:
    """``Q_i(x) = (n + k_1 - x)(n + k_2 - x) - k_1 k_2 / (1 - s_i)**2``.

    Both share the linear coefficient, so the roots of ``Q_2`` sum to
    ``2n + k_1 + k_2`` and bound ``s1 + s2`` from above.
    """
    if p.j != 2:
        raise ValueError(f"j2_quadratics needs j = 2, got j = {p.j}")
    n = p.n
    k1, k2 = p.ks
    b = 2.0 * n + k1 + k2
    c0 = (n + k1) * (n + k2)

    def roots(s):
        c = c0 - k1 * k2 / (1.0 - s) ** 2
        disc = b * b - 4.0 * c
        if disc <= 0:
            raise ValueError(f"Q has no distinct real roots for s={s}")
        hi = 0.5 * (b + math.sqrt(disc))
        return (hi, c / hi)

    def q(s, x):
        return (n + k1 - x) * (n + k2 - x) - k1 * k2 / (1.0 - s) ** 2

    r1, r2 = roots(s1), roots(s2)
    return J2Quadratics(r1, r2, q(s1, s1), q(s2, s2), r2[0] + r2[1])
