import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from trihit.branching import (BranchStats, both_branchings, bundle_branch, check_p, clique_branch,
                              instance_violations, remove_big_mu_star)
from trihit.gadgets import make_k_polygon
from trihit.geometry import build_graph, perturb_squares
from trihit.graph import (FVS, PSEUDOFOREST, TH, Graph, ProblemProfile, brute_min_hitting,
                          greedy_bundle_hitting, is_solution, list_triangles)
from trihit.pipeline import ceil_power, clique_threshold, solve_pipeline
from trihit.random_scenes import random_contact_scene, random_graph, random_square_scene


def complete(n, offset=0):
    return [(a + offset, b + offset) for a, b in itertools.combinations(range(n), 2)]


def windmill(blades):
    return Graph.from_edges(2 * blades + 1, [e for i in range(blades)
                                             for e in ((0, 2 * i + 1), (0, 2 * i + 2), (2 * i + 1, 2 * i + 2))])


def unique_cover(branches, sols):
    return all(sum(b.consistent(S) for b in branches) == 1 for S in sols)


# -- clique branching

def test_small_clique_needs_no_branching():
    g = random_graph(10, 0.3, 4)
    assert [(b.D, b.U) for b in clique_branch(g, 3, 6, TH)] == [((), ())]


def test_large_clique_children():
    g = Graph.from_edges(7, complete(7))
    pairs = clique_branch(g, 5, 6, TH)
    assert len(pairs) == 21
    assert all(len(b.U) == 2 and len(b.D) == 5 for b in pairs)
    assert unique_cover(pairs, oracles.all_solutions(g, "th", 5))


def test_two_cliques_multiply():
    g = Graph.from_edges(14, complete(7) + complete(7, 7))
    pairs = clique_branch(g, 10, 6, TH)
    assert len(pairs) == 21 * 21
    assert all(len(b.D) == 10 for b in pairs)


def test_clique_threshold_guard():
    with pytest.raises(ValueError):
        clique_branch(Graph.from_edges(3, complete(3)), 2, 5, TH)
    with pytest.raises(ValueError):
        check_p(13, 10, 2)
    check_p(12, 3, 2)


# -- bundle branching

def test_no_matching_means_no_branching():
    g = random_graph(8, 0.2, 1)
    X = greedy_bundle_hitting(g, 1)
    star = Graph.from_edges(6, [(0, i) for i in range(1, 6)])
    br = bundle_branch(star, 2, 2, TH, greedy_bundle_hitting(star, 1))
    assert [(b.D, b.U, b.Z, b.budget) for b in br] == [((), (), (), 2)]
    assert len(bundle_branch(g, 3, 2, TH, X)) >= 1


def test_hub_with_large_matching_splits():
    g = windmill(3)
    br = bundle_branch(g, 3, 2, TH, [0])
    assert [(b.D, b.U, b.budget) for b in br] == [((), (0,), 0), ((0,), (), 2)]
    assert br[0].Z == tuple(range(1, 7))
    assert unique_cover(br, oracles.all_solutions(g, "th", 3))


def test_bundle_branch_requires_hitting_set():
    with pytest.raises(ValueError):
        bundle_branch(windmill(2), 2, 2, TH, [1])


# -- combined

def test_triangle_free_single_instance():
    g = Graph.from_edges(6, [(i, (i + 1) % 6) for i in range(6)])
    insts = both_branchings(g, 2, 6, TH)
    assert len(insts) == 1 and insts[0].M == () and insts[0].graph == g


def test_single_triangle_instances():
    g = Graph.from_edges(3, complete(3))
    insts = both_branchings(g, 1, 6, TH)
    for inst in insts:
        assert all(len(set(inst.M) & set(t)) >= 2 for t in list_triangles(inst.graph))
    assert any(inst.k_residual >= len(brute_min_hitting(inst.graph, TH)) for inst in insts)


def test_dummy_no_counted():
    g = Graph.from_edges(12, [e for t in range(4) for e in complete(3, 3 * t)])
    stats = BranchStats()
    assert both_branchings(g, 1, 6, TH, stats=stats) == []
    assert stats.dummy_no == 1


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 12), st.floats(0.2, 0.7), st.integers(0, 10**6), st.integers(0, 4),
       st.sampled_from([(TH, "th"), (FVS, "fvs")]))
def test_combined_branching_matches_oracle(n, p, seed, k, prof_kind):
    prof, kind = prof_kind
    g = random_graph(n, p, seed)
    pp = clique_threshold(k, prof.c_pi)
    insts = both_branchings(g, k, pp, prof)
    sols = oracles.all_solutions(g, kind, k)
    assert unique_cover(insts, sols)
    for inst in insts:
        assert instance_violations(inst, pp, prof.c_pi) == []
    yes = any(len(brute_min_hitting(i.graph, prof)) <= i.k_residual for i in insts)
    assert yes == bool(sols)


# -- big matching removal

def test_big_mu_empty_when_matchings_small():
    g = random_graph(8, 0.4, 2)
    rep = remove_big_mu_star(g, g.vertices, {v: () for v in g.vertices}, 1, TH)
    assert rep.B == () and rep.mu_after == 0


def test_big_mu_hub():
    g = windmill(3)
    sub = {v: () for v in g.vertices}
    sub[0] = g.nbrs(0)
    rep = remove_big_mu_star(g, g.vertices, sub, 3, TH)
    assert rep.B == (0,) and rep.mu_after == 0
    assert len(rep.B) <= rep.bound == Fraction(7, 3)


def test_big_mu_preconditions():
    g = windmill(2)
    with pytest.raises(ValueError, match="tau >= c"):
        remove_big_mu_star(g, g.vertices, {}, 1, PSEUDOFOREST)
    with pytest.raises(ValueError, match="hits every bundle"):
        remove_big_mu_star(g, [1], {}, 1, TH)
    with pytest.raises(ValueError, match="inside N"):
        remove_big_mu_star(g, g.vertices, {1: [3]}, 1, TH)


# -- thresholds and full solver

@pytest.mark.parametrize("k,alpha,want", [(0, Fraction(1, 3), 0), (1, Fraction(1, 3), 1), (27, Fraction(1, 3), 3),
                                          (28, Fraction(1, 3), 4), (10**6, Fraction(1, 2), 1000),
                                          (10**6 + 1, Fraction(1, 2), 1001)])
def test_ceil_power(k, alpha, want):
    assert ceil_power(k, alpha) == want


def test_threshold_floor():
    assert clique_threshold(8, 1) == 6 and clique_threshold(8, 2) == 12
    assert clique_threshold(10**9, 1) == 1000


def test_pipeline_examples():
    tri = Graph.from_edges(3, complete(3))
    res = solve_pipeline(tri, 1, TH)
    assert res.answer and len(res.solution) == 1
    poly = make_k_polygon(3)
    assert solve_pipeline(poly, 3, TH).answer is True
    assert solve_pipeline(poly, 2, TH).answer is False
    assert solve_pipeline(poly, 3, TH, width_budget=0).answer is None
    assert solve_pipeline(tri, -1, TH).answer is False


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 11), st.integers(0, 10**6), st.integers(0, 4),
       st.sampled_from(["th", "fvs", "pseudoforest", "pt3"]))
def test_pipeline_on_graphs(n, seed, k, name):
    prof = ProblemProfile.parse(name)
    g = random_graph(n, 0.4, seed)
    opt = len(brute_min_hitting(g, prof))
    res = solve_pipeline(g, k, prof)
    assert res.answer == (opt <= k)
    if res.answer:
        assert len(res.solution) == opt and is_solution(g, res.solution, prof)


@pytest.mark.parametrize("seed", range(12))
def test_pipeline_on_geometric_scenes(seed):
    rng = random.Random(seed)
    scene = perturb_squares(random_square_scene(rng.randint(4, 12), seed)) if seed % 2 else \
        random_contact_scene(rng.randint(4, 14), seed)
    g = build_graph(scene)[0]
    for prof in (TH, FVS, PSEUDOFOREST):
        opt = len(brute_min_hitting(g, prof))
        for k in (opt - 1, opt):
            assert solve_pipeline(scene, k, prof).answer == (k >= opt)
