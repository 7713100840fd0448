"""Grone-Merris reports: compare prefix sums of the sorted Laplacian
spectrum against those of the conjugate degree sequence.

Spectra come either from a dense eigensolve of the Laplacian or, for
1-regular semi-bipartite graphs, from the roots of F plus the eigenvalues
the invariant subspaces account for directly (``n`` on sum-zero functions
on the extra clique vertices, ``1`` on sum-zero functions on a pendant
group, and the kernel).
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from .graph import Graph, build_semibipartite, degree_data, laplacian
from .linalg import ConvergenceError, DEFAULT_JACOBI_TOL, Spectrum, eigen_symmetric
from .qep import (BracketError, PencilParams, RootSet, TrackingError, companion_roots,
                  find_roots)

GM_TOL = 1e-7
TIGHT_REL = 1e-6
DEGENERATE_ROOT_TOL = 1e-6
LEMMA_TOL = 1e-7

METHODS = ("direct-oracle", "qep-pipeline", "both")


class DegenerateRootError(ArithmeticError):
    """F_{j,k} has no root at j, so the degenerate spectrum cannot be formed."""


@dataclass(frozen=True)
class GMReport:
    """Prefix margins ``sum(conjugate[:m]) - sum(eigenvalues[:m])``.

    Indices in ``tight_indices`` are 1-based prefix lengths.
    """

    eigenvalues: Spectrum
    conjugate: tuple[int, ...]
    prefix_margins: tuple[float, ...]
    holds: bool
    tight_indices: tuple[int, ...]
    method: str
    cross_deviation: Optional[float] = None

    @property
    def min_margin(self) -> float:
        return min(self.prefix_margins, default=0.0)

    def leading_margin(self, count: int) -> tuple[float, int]:
        """Smallest margin among the first ``count`` prefixes and its index."""
        head = self.prefix_margins[:max(count, 1)]
        if not head:
            return 0.0, 0
        idx = int(np.argmin(head))
        return head[idx], idx + 1


@dataclass(frozen=True)
class AssembledSpectrum:
    """Labelled pieces (``f_roots``, ``n_copies``, ``one_copies``, ``zero``)
    and their merge.  For the degenerate case ``removed`` is the copy of
    ``j`` taken out of the F roots and ``multiplicity_at_j`` how many copies
    F had."""

    pieces: dict
    merged: Spectrum
    removed: Optional[float] = None
    multiplicity_at_j: Optional[int] = None


def _merge(pieces: dict) -> Spectrum:
    values = np.concatenate([np.asarray(v, dtype=float) for v in pieces.values()])
    return Spectrum(np.sort(values)[::-1])


def assemble_spectrum(p: PencilParams, roots: Optional[RootSet] = None) -> AssembledSpectrum:
    """Full Laplacian spectrum for ``j < n`` without a dense eigensolve."""
    if p.degenerate:
        raise ValueError("j = n: use assemble_spectrum_degenerate")
    roots = roots if roots is not None else find_roots(p)
    pieces = {
        "f_roots": tuple(roots.expanded().tolist()),
        "n_copies": (float(p.n),) * (p.n - p.j - 1),
        "one_copies": (1.0,) * (sum(p.ks) - p.j),
        "zero": (0.0,),
    }
    return AssembledSpectrum(pieces, _merge(pieces))


def assemble_spectrum_degenerate(ks: Sequence[int], roots: Optional[RootSet] = None) -> AssembledSpectrum:
    """Spectrum when every clique vertex carries pendants (``n = j``).

    The roots of ``F_{j,k}`` always include ``j`` itself (one copy comes
    from the decoupled extra-vertex row of M, which has no vertices behind
    it); that copy is removed.  ``multiplicity_at_j`` records whether ``j``
    was a double root.
    """
    p = PencilParams(len(ks), tuple(ks))
    roots = roots if roots is not None else find_roots(p)
    j = p.j
    tol = DEGENERATE_ROOT_TOL
    near = [i for i, r in enumerate(roots.roots) if abs(r - j) <= tol]
    if not near:
        raise DegenerateRootError(
            f"F_{{{j},{ks}}} has no root within {tol} of {j}; roots are {roots.roots}")
    idx = min(near, key=lambda i: abs(roots.roots[i] - j))
    mult = roots.multiplicities[idx]
    mults = list(roots.multiplicities)
    mults[idx] -= 1
    kept = np.repeat(np.array(roots.roots), mults)
    pieces = {
        "f_roots": tuple(kept.tolist()),
        "one_copies": (1.0,) * (sum(p.ks) - j),
        "zero": (0.0,),
    }
    return AssembledSpectrum(pieces, _merge(pieces), float(roots.roots[idx]), mult)


def _report(eigs: Spectrum, conjugate: Sequence[int], method: str, gm_tol: float,
            cross_deviation: Optional[float] = None) -> GMReport:
    conj = np.asarray(conjugate, dtype=float)
    if conj.size != len(eigs):
        raise ValueError(f"{len(eigs)} eigenvalues vs {conj.size} conjugate degrees")
    prefix = np.cumsum(conj)
    margins = prefix - np.cumsum(eigs.values)
    tight = np.flatnonzero(np.abs(margins) < TIGHT_REL * (1.0 + prefix)) + 1
    holds = bool(margins.size == 0 or margins.min() >= -gm_tol)
    return GMReport(eigs, tuple(int(c) for c in conjugate), tuple(margins.tolist()), holds,
                    tuple(tight.tolist()), method, cross_deviation)


def gm_report(g: Graph, gm_tol: float = GM_TOL, tol: float = DEFAULT_JACOBI_TOL) -> GMReport:
    """Check every prefix inequality using the dense Jacobi spectrum."""
    eigs = eigen_symmetric(laplacian(g), tol=tol)
    return _report(eigs, degree_data(g).conjugate, "direct-oracle", gm_tol)


def semibipartite_conjugate(p: PencilParams) -> tuple[int, ...]:
    """Conjugate degrees read off the construction: ``n + sum k`` vertices
    of degree >= 1, all ``n`` clique vertices up to degree ``n - 1``,
    the ``j`` attachment vertices at degree ``n``, and beyond that the
    attachment vertices with ``n - 1 + k_l >= m``."""
    total = p.n + sum(p.ks)
    out = []
    for m in range(1, total + 1):
        if m == 1:
            out.append(total)
        elif m <= p.n - 1:
            out.append(p.n)
        elif m == p.n:
            out.append(p.j)
        else:
            out.append(sum(1 for k in p.ks if p.n - 1 + k >= m))
    return tuple(out)


def gm_report_semibipartite(p: PencilParams, cross_check: bool = False, gm_tol: float = GM_TOL,
                            tol: float = DEFAULT_JACOBI_TOL) -> GMReport:
    """Grone-Merris report from the assembled spectrum.

    With ``cross_check`` the constructed graph is also solved densely and
    the largest entrywise deviation is stored.
    """
    assembled = assemble_spectrum_degenerate(p.ks) if p.degenerate else assemble_spectrum(p)
    eigs = assembled.merged
    deviation = None
    method = "qep-pipeline"
    if cross_check:
        g, _ = build_semibipartite(p.n, p.ks)
        oracle = eigen_symmetric(laplacian(g), tol=tol)
        deviation = float(np.max(np.abs(oracle.values - eigs.values)))
        method = "both"
    return _report(eigs, semibipartite_conjugate(p), method, gm_tol, deviation)


@dataclass(frozen=True)
class MainLemmaReport:
    """The chain bounding the sum of the ``j`` largest roots of F.

    With ``a_m = 1 - s_m`` and ``sigma(a)`` the decreasing roots of F^a,
    ``chain[i]`` is ``c_m = s_{m+1} + ... + s_j + sigma_1(a_m) + ... +
    sigma_m(a_m)`` for ``m = j, j-1, ..., 1``.  ``c_j`` is the companion
    trace ``j n + sum k`` and ``c_1`` is ``s_1 + ... + s_j``; ``steps[i]``
    is ``chain[i] - chain[i + 1]``.  ``fixed_point_residuals[m - 1]`` is
    ``|sigma_m(a_m) - s_m|``, which vanishes because ``s_m`` is a root of
    F^{a_m} sitting at position ``m``.
    """

    params: PencilParams
    top_roots: tuple[float, ...]
    a_values: tuple[float, ...]
    chain: tuple[float, ...]
    steps: tuple[float, ...]
    fixed_point_residuals: tuple[float, ...]
    bound: int
    top_sum: float
    slack: float
    holds: bool
    failed_step: Optional[int] = None


def verify_main_lemma(p: PencilParams, roots: Optional[RootSet] = None,
                      tol: float = LEMMA_TOL) -> MainLemmaReport:
    roots = roots if roots is not None else find_roots(p)
    s = roots.expanded()[:p.j]
    a_values = 1.0 - s
    sigmas = [companion_roots(p, float(a)).expanded() for a in a_values]
    residuals = tuple(float(abs(sigmas[m][m] - s[m])) for m in range(p.j))
    chain = []
    for m in range(p.j, 0, -1):
        chain.append(float(s[m:].sum() + sigmas[m - 1][:m].sum()))
    steps = tuple(chain[i] - chain[i + 1] for i in range(len(chain) - 1))
    failed = next((i + 1 for i, st in enumerate(steps) if st < -tol), None)
    top_sum = float(s.sum())
    bound = p.gm_bound
    slack = bound - top_sum
    holds = failed is None and slack >= -tol
    return MainLemmaReport(p, tuple(s.tolist()), tuple(a_values.tolist()), tuple(chain), steps,
                           residuals, bound, top_sum, slack, holds, failed)


def enumerate_params(n_max: int, k_max: int) -> Iterator[PencilParams]:
    """Every instance with ``n <= n_max``, ``1 <= j <= n``, ``k_l <= k_max``,
    in a fixed order: by ``n``, then ``j``, then pendant counts
    lexicographically from the largest."""
    if n_max < 1 or k_max < 1:
        raise ValueError("bounds must be >= 1")
    values = range(k_max, 0, -1)
    for n in range(1, n_max + 1):
        for j in range(1, n + 1):
            for ks in itertools.combinations_with_replacement(values, j):
                yield PencilParams(n, ks)


@dataclass(frozen=True)
class SweepRecord:
    """One swept instance.  ``min_margin``/``tight_index`` refer to the
    first ``j`` inequalities, the ones the root analysis has to work for."""

    params: PencilParams
    report: Optional[GMReport]
    lemma: Optional[MainLemmaReport]
    min_margin: float
    tight_index: int
    cross_dev: Optional[float]
    verdict: bool
    error: Optional[str] = None


@dataclass
class SweepSummary:
    instances: int = 0
    failures: int = 0
    errors: int = 0
    min_margin: float = math.inf
    argmin: Optional[PencilParams] = None
    max_cross_dev: Optional[float] = None
    failed: list = field(default_factory=list)

    @property
    def all_hold(self) -> bool:
        return self.failures == 0 and self.errors == 0

    def add(self, rec: SweepRecord) -> None:
        self.instances += 1
        if rec.error is not None:
            self.errors += 1
            self.failed.append(rec.params)
            return
        if not rec.verdict:
            self.failures += 1
            self.failed.append(rec.params)
        if rec.min_margin < self.min_margin:
            self.min_margin = rec.min_margin
            self.argmin = rec.params
        if rec.cross_dev is not None:
            self.max_cross_dev = max(self.max_cross_dev or 0.0, rec.cross_dev)


def evaluate_instance(p: PencilParams, mode: str = "pipeline", gm_tol: float = GM_TOL) -> SweepRecord:
    """Run one instance; numeric failures become a record with ``error`` set."""
    if mode not in ("pipeline", "oracle", "both"):
        raise ValueError(f"unknown mode {mode!r}")
    try:
        if mode == "oracle":
            g, _ = build_semibipartite(p.n, p.ks)
            report = gm_report(g, gm_tol=gm_tol)
            lemma = None
        else:
            roots = find_roots(p)
            report = gm_report_semibipartite(p, cross_check=(mode == "both"), gm_tol=gm_tol)
            lemma = verify_main_lemma(p, roots)
    except (ConvergenceError, BracketError, TrackingError, DegenerateRootError) as exc:
        return SweepRecord(p, None, None, math.nan, 0, None, False, f"{type(exc).__name__}: {exc}")
    margin, index = report.leading_margin(p.j)
    verdict = report.holds and (lemma is None or lemma.holds)
    return SweepRecord(p, report, lemma, margin, index, report.cross_deviation, verdict)


def _evaluate_packed(args):
    return evaluate_instance(*args)


def sweep(n_max: int, k_max: int, mode: str = "pipeline", workers: int = 1,
          gm_tol: float = GM_TOL) -> Iterator[SweepRecord]:
    """Records in enumeration order, whatever the number of workers."""
    jobs = [(p, mode, gm_tol) for p in enumerate_params(n_max, k_max)]
    if workers <= 1:
        for job in jobs:
            yield _evaluate_packed(job)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map() yields in submission order
        yield from pool.map(_evaluate_packed, jobs, chunksize=8)


def summarize(records) -> SweepSummary:
    summary = SweepSummary()
    for rec in records:
        summary.add(rec)
    return summary
