import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gmqep import checker
from gmqep.checker import (DegenerateRootError, assemble_spectrum, assemble_spectrum_degenerate,
                           enumerate_params, evaluate_instance, gm_report, gm_report_semibipartite,
                           semibipartite_conjugate, summarize, sweep, verify_main_lemma)
from gmqep.graph import Creation, Graph, build_graph, build_semibipartite, build_threshold, degree_data
from gmqep.qep import BracketError, PencilParams, RootSet, equal_k_closed_form, find_roots, secular
from conftest import lapack_eigs

SQ2 = math.sqrt(2)
params = st.integers(1, 7).flatmap(lambda n: st.tuples(
    st.just(n), st.lists(st.integers(1, 4), min_size=1, max_size=n)
    .map(lambda ks: tuple(sorted(ks, reverse=True)))))


def test_assemble_example():
    a = assemble_spectrum(PencilParams(3, (1, 1)))
    assert np.allclose(a.merged.values, [4.302776, 3.618034, 1.381966, 0.697224, 0], atol=1e-6)
    assert a.pieces["n_copies"] == () and a.pieces["one_copies"] == ()


def test_assemble_counts_n_copies():
    a = assemble_spectrum(PencilParams(4, (1, 1)))
    assert a.pieces["n_copies"] == (4.0,)
    assert len(a.merged) == 4 + 2


def test_assemble_rejects_degenerate():
    with pytest.raises(ValueError):
        assemble_spectrum(PencilParams(2, (1, 1)))


def test_assemble_degenerate_p4():
    a = assemble_spectrum_degenerate((1, 1))
    assert a.multiplicity_at_j == 2
    assert a.removed == pytest.approx(2.0, abs=1e-8)
    expected = [2 + SQ2, 2, 2 - SQ2, 0]
    assert np.allclose(a.merged.values, expected, atol=1e-8)
    assert np.allclose(lapack_eigs(checker.laplacian(build_semibipartite(2, (1, 1))[0])), expected, atol=1e-12)


def test_assemble_degenerate_simple_root():
    # n = j = 3, k = 1: the root at 3 is simple, and removing it is still right
    a = assemble_spectrum_degenerate((1, 1, 1))
    assert a.multiplicity_at_j == 1
    g, _ = build_semibipartite(3, (1, 1, 1))
    assert np.allclose(a.merged.values, lapack_eigs(checker.laplacian(g)), atol=1e-8)


def test_assemble_degenerate_missing_root():
    bogus = RootSet((5.0, 4.0, 0.5, 0.25), (1, 1, 1, 1))
    with pytest.raises(DegenerateRootError):
        assemble_spectrum_degenerate((1, 1), bogus)


@given(params)
@settings(max_examples=120, deadline=None)
def test_assembled_matches_dense(case):
    p = PencilParams(*case)
    g, _ = build_semibipartite(p.n, p.ks)
    rep = gm_report_semibipartite(p, cross_check=True)
    assert rep.cross_deviation <= 1e-8
    assert np.allclose(rep.eigenvalues.values, lapack_eigs(checker.laplacian(g)), atol=1e-8)
    assert len(rep.eigenvalues) == g.vertex_count
    assert sum(rep.eigenvalues.values) == pytest.approx(2 * g.edge_count, rel=1e-12)
    assert rep.conjugate == degree_data(g).conjugate == semibipartite_conjugate(p)
    assert rep.holds
    assert abs(rep.prefix_margins[-1]) <= 1e-9 * sum(rep.conjugate)


def test_gm_report_examples():
    p4 = gm_report(build_graph(4, [(0, 1), (1, 2), (2, 3)]))
    assert p4.holds
    assert np.allclose(p4.prefix_margins, [2 - SQ2, 2 - SQ2, 0, 0], atol=1e-12)
    assert p4.conjugate == (4, 2, 0, 0)
    k3 = gm_report(build_threshold(["isolated", "dominating", "dominating"]))
    assert np.allclose(k3.prefix_margins, 0, atol=1e-12) and k3.tight_indices == (1, 2, 3)
    empty = gm_report(Graph(3))
    assert empty.holds and empty.prefix_margins == (0.0, 0.0, 0.0)


def test_gm_report_detects_violation():
    # feed a conjugate sequence that is too small to see the failure path
    eigs = checker.eigen_symmetric(checker.laplacian(build_graph(2, [(0, 1)])))
    rep = checker._report(eigs, (1, 1), "direct-oracle", 1e-7)
    assert not rep.holds and rep.min_margin == pytest.approx(-1.0)


def test_semibipartite_report_example():
    rep = gm_report_semibipartite(PencilParams(3, (1, 1)))
    assert rep.conjugate == (5, 3, 2, 0, 0)
    assert rep.prefix_margins[1] == pytest.approx(8 - 7.920810, abs=1e-6)
    assert rep.leading_margin(2) == (rep.prefix_margins[1], 2)


def test_main_lemma_example():
    rep = verify_main_lemma(PencilParams(3, (1, 1)))
    assert rep.holds and rep.failed_step is None
    assert rep.chain[0] == pytest.approx(8.0, abs=1e-12)
    assert rep.chain[-1] == pytest.approx(rep.top_sum, abs=1e-12)
    assert rep.slack == pytest.approx(0.079190, abs=1e-6)


@pytest.mark.parametrize("n, k, j", [(3, 1, 2), (5, 2, 4), (8, 4, 7), (6, 3, 6)])
def test_main_lemma_equal_k_slack(n, k, j):
    rep = verify_main_lemma(PencilParams(n, (k,) * j))
    closed = equal_k_closed_form(n, k, j)
    # r1: the largest root of q (multiplicity j-1); r2: the largest root of q + jk
    r1 = closed.roots[0]
    x = closed.expanded()
    r2 = x[j - 1]
    assert rep.slack == pytest.approx(j * (n + k) - ((j - 1) * r1 + r2), abs=1e-8)


@given(params)
@settings(max_examples=80, deadline=None)
def test_main_lemma_chain_decreasing(case):
    p = PencilParams(*case)
    rep = verify_main_lemma(p)
    assert rep.holds
    assert rep.chain[0] == pytest.approx(p.gm_bound, rel=1e-12)
    assert all(step >= -1e-7 for step in rep.steps)
    assert max(rep.fixed_point_residuals) <= 1e-8


def test_main_lemma_reports_failed_step():
    # a wrong top root makes the chain break somewhere
    p = PencilParams(4, (3, 1))
    good = find_roots(p)
    bad = RootSet((good.roots[0] + 0.5,) + good.roots[1:], good.multiplicities)
    rep = verify_main_lemma(p, bad)
    assert not rep.holds


@given(params)
@settings(max_examples=80, deadline=None)
def test_ordering_facts(case):
    p = PencilParams(*case)
    if p.degenerate:
        return
    s = find_roots(p).expanded()
    assert np.all(s[:p.j] > p.n)
    if p.j >= 2:
        assert s[p.j] < p.j
    else:
        assert s[1] <= 1 + 1e-9
    # everything below the (j+1)-th root lies under 1
    assert np.all(s[p.j + 1:] <= 1 + 1e-9)


def test_enumerate_params():
    got = [(p.n, p.ks) for p in enumerate_params(3, 1)]
    assert got == [(1, (1,)), (2, (1,)), (2, (1, 1)), (3, (1,)), (3, (1, 1)), (3, (1, 1, 1))]
    assert [p.ks for p in enumerate_params(2, 2)][:3] == [(2,), (1,), (2,)]
    assert sum(1 for _ in enumerate_params(8, 4)) == 1278
    with pytest.raises(ValueError):
        list(enumerate_params(0, 1))


@pytest.mark.parametrize("mode", ["pipeline", "oracle", "both"])
def test_sweep_modes(mode):
    records = list(sweep(3, 2, mode=mode))
    summary = summarize(records)
    assert summary.instances == len(records) == sum(1 for _ in enumerate_params(3, 2))
    assert summary.all_hold
    if mode == "both":
        assert summary.max_cross_dev <= 1e-8
    assert (records[0].lemma is None) == (mode == "oracle")


def test_sweep_parallel_same_order():
    serial = [(r.params, r.min_margin, r.tight_index) for r in sweep(4, 2, workers=1)]
    parallel = [(r.params, r.min_margin, r.tight_index) for r in sweep(4, 2, workers=3)]
    assert serial == parallel


def test_evaluate_instance_captures_numeric_failure(monkeypatch):
    def boom(p):
        raise BracketError("forced", (0.0, 1.0))
    monkeypatch.setattr(checker, "find_roots", boom)
    rec = evaluate_instance(PencilParams(3, (1,)))
    assert not rec.verdict and rec.error.startswith("BracketError")
    summary = summarize([rec])
    assert summary.errors == 1 and not summary.all_hold
    with pytest.raises(ValueError):
        evaluate_instance(PencilParams(3, (1,)), mode="nope")


def test_lower_root_below_j_on_lattice(lattice):
    # s_{j+1} < j, via G(j) > 0; for j = 1 the second root is exactly 1
    for p in lattice:
        if p.degenerate:
            continue
        s = find_roots(p).expanded()
        if p.j == 1:
            assert s[1] == pytest.approx(1.0, abs=1e-9)
        else:
            assert secular(p, float(p.j)) > 0, p.label()
            assert s[p.j] < p.j, p.label()
