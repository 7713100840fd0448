"""Root isolation for F by the pole structure of G.

Each ``q_l`` has roots ``r_l^- < 1 < n + k_l <= r_l^+``, which are poles
of G.  Across ``r^+`` the quadratic goes from negative to positive, so G
runs to -inf on the left and +inf on the right; across ``r^-`` it is the
other way round.  Together with ``G(n) = 1 - j/n > 0`` this pins down one
zero of G in every gap between consecutive distinct poles on each side of
n, plus one on either side of n.  A pendant count repeated ``m`` times
contributes its two poles as roots of F of multiplicity ``m - 1``.
Everything else is plain bisection on a certified sign change.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .pencil import (MERGE_TOL, POLE_OFFSET, ROOT_TOL, PencilParams, RootSet,
                     quadratic_roots, secular, secular_deflated)


class BracketError(ArithmeticError):
    """A certified sign pattern did not show up numerically."""

    def __init__(self, message: str, interval: tuple[float, float]):
        super().__init__(f"{message} on interval {interval}")
        self.interval = interval


@dataclass(frozen=True)
class Bracket:
    """Open interval holding ``zeros`` zeros of G.

    ``signs`` are the expected signs of G just inside each end and
    ``poles`` flags which ends are poles (and so get offset inwards).  For
    the single degenerate bracket (``zeros == 2``) one zero sits exactly at
    ``n`` and ``signs`` refer to ``G(x) / (x - n)`` instead.
    """

    lo: float
    hi: float
    zeros: int
    signs: tuple[int, int]
    poles: tuple[bool, bool]


@dataclass(frozen=True)
class BracketTable:
    r_minus: tuple[float, ...]
    r_plus: tuple[float, ...]
    intervals: tuple[Bracket, ...]
    groups: tuple[tuple[int, ...], ...]


def pole_groups(p: PencilParams) -> tuple[tuple[int, ...], ...]:
    """0-based indices of runs of equal pendant counts.

    Runs whose ``r^+`` differ by less than four pole offsets are merged too;
    with integer counts this never triggers.
    """
    _, r_plus = quadratic_roots(p)
    eps = POLE_OFFSET * p.scale
    groups = [[0]]
    for l in range(1, p.j):
        prev = groups[-1][-1]
        if p.ks[l] == p.ks[prev] or abs(r_plus[l] - r_plus[prev]) < 4 * eps:
            groups[-1].append(l)
        else:
            groups.append([l])
    return tuple(tuple(g) for g in groups)


def check_ordering(p: PencilParams, r_minus, r_plus) -> None:
    """``0 < r_1^- <= ... <= r_j^- < 1 < n + k_j <= r_j^+ <= ... <= r_1^+ < n + k_1 + 1``."""
    ok = (r_minus[0] > 0
          and np.all(np.diff(r_minus) >= 0)
          and r_minus[-1] < 1
          and p.n + p.ks[-1] <= r_plus[-1]
          and np.all(np.diff(r_plus) <= 0)
          and r_plus[0] < p.n + p.ks[0] + 1)
    if not ok:
        raise BracketError("pole ordering chain violated", (float(r_minus[0]), float(r_plus[0])))


def upper_layout(n: float, poles_desc, mults):
    """Slots for the roots above ``n``, largest first.

    ``poles_desc`` holds one upper pole per group in decreasing order.
    Returns a list of ``("pole", g)`` (a structural root sitting on pole g)
    and ``("zero", Bracket)`` entries.
    """
    slots = []
    count = len(poles_desc)
    for g in range(count):
        slots.extend(("pole", g) for _ in range(mults[g] - 1))
        if g + 1 < count:
            slots.append(("zero", Bracket(float(poles_desc[g + 1]), float(poles_desc[g]),
                                          1, (1, -1), (True, True))))
        else:
            slots.append(("zero", Bracket(float(n), float(poles_desc[g]), 1, (1, -1), (False, True))))
    return slots


def _lower_layout(n: float, poles_asc, mults):
    """Slots for the roots below ``n``, largest first; ``poles_asc`` holds
    one lower pole per group in increasing order (groups by decreasing k)."""
    slots = []
    count = len(poles_asc)
    for g in range(count - 1, -1, -1):
        if g + 1 < count:
            slots.append(("zero", Bracket(float(poles_asc[g]), float(poles_asc[g + 1]),
                                          1, (-1, 1), (True, True))))
        else:
            slots.append(("zero", Bracket(float(poles_asc[g]), float(n), 1, (-1, 1), (True, False))))
        slots.extend(("pole", g) for _ in range(mults[g] - 1))
    return slots


def brackets(p: PencilParams) -> BracketTable:
    """Poles of G and the intervals that certifiably hold its zeros.

    Intervals are listed from the top down.  In the degenerate case
    ``j = n`` the two intervals adjacent to ``n`` are replaced by one
    interval holding both the zero at ``n`` and one more.
    """
    r_minus, r_plus = quadratic_roots(p)
    check_ordering(p, r_minus, r_plus)
    groups = pole_groups(p)
    firsts = [g[0] for g in groups]
    mults = [len(g) for g in groups]
    upper = [s for s in upper_layout(p.n, r_plus[firsts], mults) if s[0] == "zero"]
    lower = [s for s in _lower_layout(p.n, r_minus[firsts], mults) if s[0] == "zero"]
    intervals = [b for _, b in upper] + [b for _, b in lower]
    if p.degenerate:
        top, bottom = intervals[len(upper) - 1], intervals[len(upper)]
        merged = Bracket(bottom.lo, top.hi, 2, (1, -1), (True, True))
        intervals = intervals[:len(upper) - 1] + [merged] + intervals[len(upper) + 1:]
    return BracketTable(tuple(r_minus.tolist()), tuple(r_plus.tolist()), tuple(intervals), groups)


def bisect_sign(f: Callable[[float], float], lo: float, hi: float,
                signs: tuple[int, int], tol: float) -> float:
    """Bisect ``f`` on ``[lo, hi]`` after asserting the expected end signs."""
    flo, fhi = f(lo), f(hi)
    if np.sign(flo) != signs[0] or np.sign(fhi) != signs[1]:
        raise BracketError(
            f"expected signs {signs}, found ({np.sign(flo):+.0f}, {np.sign(fhi):+.0f})", (lo, hi))
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if np.sign(fm) == signs[0]:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def shrink(b: Bracket, eps: float) -> tuple[float, float]:
    lo = b.lo + eps if b.poles[0] else b.lo
    hi = b.hi - eps if b.poles[1] else b.hi
    return lo, hi


def find_roots(p: PencilParams) -> RootSet:
    """All ``2j`` roots of F with multiplicity."""
    table = brackets(p)
    eps = POLE_OFFSET * p.scale
    tol = ROOT_TOL * p.scale
    pairs = []
    for g in table.groups:
        if len(g) > 1:
            pairs.append((table.r_plus[g[0]], len(g) - 1))
            pairs.append((table.r_minus[g[0]], len(g) - 1))

    def g_fn(x):
        return secular(p, x)

    def h_fn(x):
        return secular_deflated(p, x)

    for b in table.intervals:
        lo, hi = shrink(b, eps)
        if b.zeros == 2:
            pairs.append((float(p.n), 1))
            pairs.append((bisect_sign(h_fn, lo, hi, b.signs, tol), 1))
        else:
            pairs.append((bisect_sign(g_fn, lo, hi, b.signs, tol), 1))
    roots = RootSet.from_pairs(pairs, merge_tol=MERGE_TOL * p.scale)
    if roots.degree != 2 * p.j:
        raise BracketError(f"found {roots.degree} roots, expected {2 * p.j}", (0.0, p.scale))
    return roots
