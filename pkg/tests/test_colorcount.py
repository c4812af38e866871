import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import treecount.colorcount as cc
from treecount.colorcount import (
    Coloring,
    Estimate,
    TableTracker,
    color_graph,
    dp_iteration,
    estimate,
    estimate_peak_memory,
    memory_profile,
)
from treecount.graph import Graph, rmat_generate
from treecount.oracle import brute_force_colorful, brute_force_embeddings
from treecount.template import TemplateTree, count_automorphisms, partition_template

from conftest import erdos_renyi, path_graph, random_tree, triangle


def coloring(values, k):
    return Coloring(np.asarray(values, dtype=np.int8), k)


# --- coloring ---


def test_k1_all_zero():
    c = color_graph(Graph.empty(50), 1, seed=4, iteration=2)
    assert not c.colors.any()


def test_coloring_deterministic_and_varies():
    g = Graph.empty(1000)
    a = color_graph(g, 5, 9, 3)
    assert np.array_equal(a.colors, color_graph(g, 5, 9, 3).colors)
    assert not np.array_equal(a.colors, color_graph(g, 5, 9, 4).colors)
    assert not np.array_equal(a.colors, color_graph(g, 5, 10, 3).colors)


def test_coloring_random_access():
    full = color_graph(Graph.empty(500), 7, 1, 1).colors
    picked = cc.vertex_hash(1, 1, np.array([3, 250, 499], dtype=np.uint64)) % np.uint64(7)
    assert picked.tolist() == full[[3, 250, 499]].tolist()


def test_color_frequencies_binomial():
    n, k = 100_000, 4
    counts = np.bincount(color_graph(Graph.empty(n), k, 123, 0).colors, minlength=k)
    sigma = math.sqrt(n * (1 / k) * (1 - 1 / k))
    assert np.all(np.abs(counts - n / k) <= 5 * sigma)


def test_color_k_range():
    with pytest.raises(ValueError):
        color_graph(Graph.empty(3), 17, 0, 0)


# --- oracle ---


def test_brute_force_embeddings_examples(k3):
    assert brute_force_embeddings(k3, TemplateTree.path(2)) == 6
    assert brute_force_embeddings(k3, TemplateTree.path(3)) == 6
    assert brute_force_embeddings(path_graph(3), TemplateTree.star(3)) == 0


def test_brute_force_colorful_examples(k3, p3):
    assert brute_force_colorful(k3, coloring([0, 1, 2], 3), p3) == 6
    assert brute_force_colorful(k3, coloring([0, 0, 1], 3), p3) == 0


def test_oracle_guard_rails():
    with pytest.raises(ValueError):
        brute_force_embeddings(Graph.empty(2001), TemplateTree.path(2))
    with pytest.raises(ValueError):
        brute_force_embeddings(Graph.empty(5), TemplateTree.path(9))


def test_colorful_bounded_by_embeddings():
    g = erdos_renyi(25, 0.2, seed=1)
    tpl = TemplateTree.star(3)
    emb = brute_force_embeddings(g, tpl)
    for it in range(5):
        assert brute_force_colorful(g, color_graph(g, 4, 0, it), tpl) <= emb


# --- DP ---


def test_dp_k3_p3(k3, p3):
    plan = partition_template(p3)
    assert dp_iteration(k3, coloring([0, 1, 2], 3), plan) == 6
    assert dp_iteration(k3, coloring([0, 0, 1], 3), plan) == 0


def test_dp_single_edge_p2():
    g = Graph.from_edges(2, [0], [1])
    assert dp_iteration(g, coloring([0, 1], 2), partition_template(TemplateTree.path(2))) == 2


def test_dp_k_mismatch(k3, p3):
    with pytest.raises(ValueError, match="k="):
        dp_iteration(k3, coloring([0, 1, 1], 2), partition_template(p3))


@settings(max_examples=40, deadline=None)
@given(
    n=st.integers(1, 30),
    density=st.floats(0.0, 0.5),
    t=st.integers(1, 6),
    seed=st.integers(0, 2**31),
)
def test_dp_matches_oracle(n, density, t, seed):
    rng = np.random.default_rng(seed)
    g = erdos_renyi(n, density, seed)
    tpl = random_tree(t, rng)
    c = color_graph(g, t, seed, 0)
    assert dp_iteration(g, c, partition_template(tpl)) == brute_force_colorful(g, c, tpl)


def test_tables_nonnegative_integral_each_step():
    g = rmat_generate(9, 3000, seed=3)
    tpl = TemplateTree.binary_tree(6)
    plan = partition_template(tpl)
    seen = []

    def check(idx, table):
        assert table.shape == (g.n, math.comb(tpl.t, plan[idx].size))
        assert (table >= 0).all()
        assert (table < 2**53).all()
        assert np.array_equal(table, np.round(table))
        if plan[idx].is_leaf:
            assert (table.sum(axis=1) == 1).all()
        seen.append(idx)

    dp_iteration(g, color_graph(g, tpl.t, 0, 0), plan, on_step=check)
    assert seen == list(plan.schedule)


@pytest.mark.parametrize("threads", [2, 3, 8])
def test_thread_count_does_not_change_total(monkeypatch, threads):
    monkeypatch.setattr(cc, "WORK_ELEMENTS", 64)  # force many row blocks
    g = rmat_generate(9, 3000, seed=4)
    plan = partition_template(TemplateTree.path(5))
    c = color_graph(g, 5, 1, 0)
    assert dp_iteration(g, c, plan, threads=threads) == dp_iteration(g, c, plan, threads=1)


# --- estimator ---


def test_single_vertex_template_exact():
    g = rmat_generate(6, 100, seed=0)
    est = estimate(g, TemplateTree(1, ()), iterations=7, seed=3)
    assert est.value == g.n and est.stderr == 0.0
    assert est.per_iteration == (float(g.n),) * 7


def test_estimate_k3_p3(k3, p3):
    est = estimate(k3, p3, iterations=2000, seed=11)
    assert est.stderr > 0
    assert abs(est.value - 3) <= 3 * est.stderr


def test_estimate_path_p3(p3):
    est = estimate(path_graph(3), p3, iterations=2000, seed=12)
    assert abs(est.value - 1) <= 3 * est.stderr


def test_estimate_fields_consistent(k3, p3):
    est = estimate(k3, p3, iterations=50, seed=1)
    per = np.array(est.per_iteration)
    assert est.value == pytest.approx(per.mean(), rel=1e-15)
    assert est.stderr == pytest.approx(per.std(ddof=1) / math.sqrt(50))
    assert est.iterations == 50 and est.seed == 1
    assert (per >= 0).all()
    factor = 3**3 / (math.factorial(3) * 2)
    assert per.tolist() == [t * factor for t in est.totals]


def test_estimate_rejects_zero_iterations(k3, p3):
    with pytest.raises(ValueError):
        estimate(k3, p3, iterations=0)


def test_estimate_roundtrip_dict(k3, p3):
    d = estimate(k3, p3, iterations=3, seed=2).as_dict()
    assert set(d) == {"value", "stderr", "iterations", "seed", "per_iteration"}


def test_estimate_from_totals_single():
    est = Estimate.from_totals([12.0], 3, 2, 0)
    assert est.stderr == 0.0 and est.value == 12.0 * 27 / 12


# --- memory model ---


def test_peak_memory_p3_hand_trace(p3):
    # {2},{1} then {1,2}: three 3-wide tables live at once
    assert estimate_peak_memory(Graph.empty(10), partition_template(p3)) == 720
    assert memory_profile(10, partition_template(p3)) == [240, 480, 720, 480, 560]


def test_peak_memory_single_vertex():
    assert estimate_peak_memory(Graph.empty(10), partition_template(TemplateTree(1, ()))) == 80


@pytest.mark.parametrize("tpl", [TemplateTree.path(4), TemplateTree.star(4), TemplateTree.binary_tree(6)])
def test_tracker_follows_memory_model(tpl):
    g = rmat_generate(8, 1000, seed=2)
    plan = partition_template(tpl)
    tracker = TableTracker()
    dp_iteration(g, color_graph(g, tpl.t, 0, 0), plan, tracker=tracker)
    assert tracker.history == memory_profile(g.n, plan)
    assert tracker.peak == estimate_peak_memory(g, plan)
    assert tracker.live == 0


def test_oracle_counts_scale_to_occurrences():
    g = erdos_renyi(40, 0.15, seed=5)
    tpl = TemplateTree.star(3)
    emb = brute_force_embeddings(g, tpl)
    assert emb % count_automorphisms(tpl) == 0
    deg = g.degrees()
    assert emb // 6 == sum(math.comb(int(d), 3) for d in deg)


def test_triangle_fixture_sanity():
    assert triangle().m == 3
