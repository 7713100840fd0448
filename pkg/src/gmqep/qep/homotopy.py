"""Homotopy from F to the degree-j polynomial F^a, and the companion matrix
whose spectrum is the roots of F^a.

Freezing the factor ``(1 - x)`` at a constant ``a < 1 - n`` gives

    q_l^{a,t}(x) = (n + k_l - x)(t a + (1 - t)(1 - x)) - k_l,

with ``t = 0`` recovering F and ``t = 1`` the linear factors of F^a.  For
every ``t`` the same pole argument as for F isolates the ``j`` roots above
``n``, so they can be followed in ``t`` without ever changing order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..linalg import SymmetricMatrix, eigen_symmetric
from .isolate import (BracketError, bisect_sign, find_roots, pole_groups, shrink,
                      upper_layout)
from .pencil import MERGE_TOL, POLE_OFFSET, ROOT_TOL, PencilParams, RootSet, product_sum

DEFAULT_STEPS = 64
DEFAULT_DELTA = 1e-3
MAX_HALVINGS = 40


class TrackingError(ArithmeticError):
    pass


@dataclass(frozen=True)
class HomotopyTrace:
    """The ``root_index``-th largest root of F^{a,t} along ``t_grid``
    (which stops short of 1), and its limit at ``t = 1``."""

    a: float
    root_index: int
    t_grid: tuple[float, ...]
    values: tuple[float, ...]
    endpoint: float


def _check_a(p: PencilParams, a: float) -> None:
    if not a < 1 - p.n:
        raise ValueError(f"homotopy parameter a must be < 1 - n = {1 - p.n}, got {a}")


def _check_t(t: float) -> None:
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")


def _homotopy_quadratics(p: PencilParams, a: float, t: float, lam) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    ks = np.array(p.ks, dtype=float).reshape((-1,) + (1,) * lam.ndim)
    return (p.n + ks - lam) * (t * a + (1.0 - t) * (1.0 - lam)) - ks


def eval_F_homotopy(p: PencilParams, a: float, t: float, lam):
    """F^{a,t}(lam) in expanded product-sum form.

    At ``t = 0`` this is F exactly; at ``t = 1`` it is F^a, which equals
    ``(-a)**j * det(lam I - C_a)`` for the companion matrix ``C_a``.
    """
    _check_a(p, a)
    _check_t(t)
    out = product_sum(_homotopy_quadratics(p, a, t, lam), p.ks)
    return float(out) if np.ndim(out) == 0 else out


def eval_G_homotopy(p: PencilParams, a: float, t: float, lam):
    """``1 + sum_l k_l / q_l^{a,t}(lam)`` (no pole guard)."""
    _check_a(p, a)
    _check_t(t)
    qs = _homotopy_quadratics(p, a, t, lam)
    ks = np.array(p.ks, dtype=float).reshape((-1,) + (1,) * np.ndim(lam))
    out = 1.0 + np.sum(ks / qs, axis=0)
    return float(out) if np.ndim(out) == 0 else out


def _upper_pole(n: int, k: int, a: float, t: float) -> float:
    """Largest root of ``q^{a,t}`` (the only root once ``t = 1``)."""
    u = t * a + (1.0 - t)
    lead = 1.0 - t
    b = -(u + lead * (n + k))
    c = (n + k) * u - k
    if lead == 0.0:
        return -c / b
    disc = b * b - 4.0 * lead * c
    if disc <= 0:
        raise BracketError(f"q^(a,t) for k={k} has no distinct real roots", (t, t))
    big = -0.5 * (b + math.copysign(math.sqrt(disc), b))
    return max(big / lead, c / big)


def _layout(p: PencilParams, a: float, t: float, groups):
    poles = np.array([_upper_pole(p.n, p.ks[g[0]], a, t) for g in groups])
    if not (np.all(np.diff(poles) < 0) and poles[-1] > p.n):
        raise BracketError(f"upper poles out of order at t={t}", (float(p.n), float(poles[0])))
    return poles, upper_layout(p.n, poles, [len(g) for g in groups])


def homotopy_top_roots(p: PencilParams, a: float, t: float) -> RootSet:
    """The ``j`` roots of F^{a,t} above ``n``, isolated between its poles.

    Works for ``t = 1`` too, where the poles are ``n + k_l - k_l / a``.
    """
    _check_a(p, a)
    _check_t(t)
    groups = pole_groups(p)
    poles, slots = _layout(p, a, t, groups)
    eps = POLE_OFFSET * p.scale
    tol = ROOT_TOL * p.scale

    def g_fn(x):
        return eval_G_homotopy(p, a, t, x)

    pairs = []
    for kind, item in slots:
        if kind == "pole":
            pairs.append((poles[item], 1))
        else:
            lo, hi = shrink(item, eps)
            pairs.append((bisect_sign(g_fn, lo, hi, item.signs, tol), 1))
    return RootSet.from_pairs(pairs, merge_tol=MERGE_TOL * p.scale)


def companion_matrix(p: PencilParams, a: float) -> SymmetricMatrix:
    """``diag(n + k_l)`` plus ``sqrt(k_l k_m) / a`` off the diagonal.

    Its characteristic polynomial is F^a up to the factor ``(-a)**j``, so
    the trace gives the root sum ``j n + sum k``.
    """
    if a == 0:
        raise ValueError("companion matrix needs a != 0")
    ks = np.array(p.ks, dtype=float)
    w = np.sqrt(ks)
    c = np.outer(w, w) / a
    np.fill_diagonal(c, p.n + ks)
    return SymmetricMatrix(c)


def companion_roots(p: PencilParams, a: float) -> RootSet:
    """Roots ``s_1(a) >= ... >= s_j(a)`` of F^a, as the companion spectrum."""
    if not a < 0:
        raise ValueError(f"companion roots need a < 0, got {a}")
    spectrum = eigen_symmetric(companion_matrix(p, a))
    return RootSet.from_values(spectrum.values, merge_tol=MERGE_TOL * p.scale)


def track_root(p: PencilParams, a: float, l: int, steps: int = DEFAULT_STEPS,
               delta: float = DEFAULT_DELTA, max_halvings: int = MAX_HALVINGS) -> HomotopyTrace:
    """Follow the ``l``-th largest root of F^{a,t} from ``t = 0`` to ``1 - delta``.

    Each step looks for a sign change of G^{a,t} in a window around the
    previous value, clipped to the interval the pole structure certifies
    for this root; if the window misses it the step is halved and retried.
    Roots sitting on a repeated pole are followed in closed form.  The
    ``t = 1`` value comes from the companion spectrum.
    """
    _check_a(p, a)
    if p.degenerate:
        raise ValueError("root tracking needs a nondegenerate instance (j < n)")
    if not 1 <= l <= p.j:
        raise ValueError(f"l must lie in 1..{p.j}, got {l}")
    if steps < 2:
        raise ValueError("need at least two grid points")
    groups = pole_groups(p)
    grid = np.linspace(0.0, 1.0 - delta, steps)
    eps = POLE_OFFSET * p.scale
    tol = ROOT_TOL * p.scale
    min_window = 1e-8 * p.scale

    _, slots0 = _layout(p, a, 0.0, groups)
    kind, item = slots0[l - 1]
    if kind == "pole":
        values = [_layout(p, a, t, groups)[0][item] for t in grid]
    else:
        slot = l - 1
        prev = float(homotopy_top_roots(p, a, 0.0).expanded()[slot])
        values = [prev]
        move = 0.0
        t_cur = 0.0
        for t_next in grid[1:]:
            dt = t_next - t_cur
            halvings = 0
            while t_cur < t_next:
                t_try = min(t_cur + dt, t_next)
                _, slots = _layout(p, a, t_try, groups)
                lo_c, hi_c = shrink(slots[slot][1], eps)
                width = max(4.0 * move, min_window)
                lo, hi = max(prev - width, lo_c), min(prev + width, hi_c)

                def g_fn(x, t_try=t_try):
                    return eval_G_homotopy(p, a, t_try, x)

                glo, ghi = (g_fn(lo), g_fn(hi)) if lo < hi else (0.0, 0.0)
                if lo < hi and np.sign(glo) * np.sign(ghi) < 0:
                    val = bisect_sign(g_fn, lo, hi, (int(np.sign(glo)), int(np.sign(ghi))), tol)
                    move = abs(val - prev)
                    prev = val
                    t_cur = t_try
                    dt = min(2.0 * dt, t_next - t_cur) if t_cur < t_next else dt
                else:
                    halvings += 1
                    if halvings > max_halvings:
                        raise TrackingError(
                            f"lost root {l} near t={t_cur:.6g} (window [{lo}, {hi}])")
                    dt *= 0.5
                    # a missed window means the root moved further than assumed
                    move = max(move, width)
            values.append(prev)
    if min(values) <= p.n:
        raise TrackingError(f"root {l} fell to n or below along the homotopy")
    endpoint = float(companion_roots(p, a).expanded()[l - 1])
    return HomotopyTrace(float(a), l, tuple(grid.tolist()), tuple(float(v) for v in values), endpoint)


def track_all(p: PencilParams, a: float, steps: int = DEFAULT_STEPS,
              delta: float = DEFAULT_DELTA) -> list[HomotopyTrace]:
    """Traces for every ``l = 1..j``; raises if two of them ever swap order."""
    traces = [track_root(p, a, l, steps, delta) for l in range(1, p.j + 1)]
    for upper, lower in zip(traces, traces[1:]):
        if any(u < v for u, v in zip(upper.values, lower.values)):
            raise TrackingError(f"roots {upper.root_index} and {lower.root_index} crossed")
    return traces
