"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""
from __future__ import annotations

import csv
import itertools
import math
import random
import time
from fractions import Fraction

import pytest

import oracles
from trihit import cli
from trihit.arrangement import local_radius_stats
from trihit.branching import (both_branchings, bundle_branch, clique_branch, instance_violations,
                              remove_big_mu_star)
from trihit.gadgets import (CnfFormula, crenellate, make_k_polygon, min_triangle_hitting_milp,
                            polygon_violations, reduce_formula, verify_reduction)
from trihit.geometry import (Scene, Square, contact_max_clique, contact_report, count_maximal_cliques,
                             hix_decomposition, intersection_graph, mu_star, n_minus_map, n_star_map,
                             occurrence_bound, perturb_squares, slope_count, square_max_clique,
                             square_scene, write_scene)
from trihit.graph import (FVS, TH, Graph, brute_min_hitting, greedy_bundle_hitting, is_solution,
                          list_triangles, write_graph)
from trihit.pipeline import clique_threshold
from trihit.random_scenes import random_2dir_scene, random_cnf, random_contact_scene, random_graph
from trihit.reduce import WeightedInstance, neighborhood_complexity, twin_merge
from trihit.treewidth import heuristic_decomposition, triangle_locality, validate_decomposition, weighted_th_dp


def planted_graph(seed: int, n_lo: int = 8, n_hi: int = 13) -> Graph:
    r = random.Random(seed)
    n = r.randint(n_lo, n_hi)
    dens = r.uniform(0.1, 0.5)
    edges = {(u, v) for u in range(n) for v in range(u + 1, n) if r.random() < dens}
    clique = r.sample(range(n), r.randint(3, min(n, 9)))
    edges |= {(min(a, b), max(a, b)) for a, b in itertools.combinations(clique, 2)}
    return Graph.from_edges(n, edges)


# --------------------------------------------------------------- criterion 1

def test_solver_matches_oracle(tmp_path, record):
    start = time.perf_counter()
    wrong = []
    cases = 0
    for seed in range(200):
        r = random.Random(seed)
        scene = random_2dir_scene(r.randint(4, 18), seed, grid=r.randint(4, 8))
        path = tmp_path / f"s{seed}.scene"
        write_scene(scene, path)
        opt = len(oracles.min_hitting(intersection_graph(scene))) if len(scene) <= 12 else \
            len(brute_min_hitting(intersection_graph(scene)))
        for k in (opt, opt - 1):
            if k < 0:
                continue
            sol = tmp_path / "sol.txt"
            code = cli.main(["solve-th", "--scene", str(path), "--k", str(k), "--solution", str(sol),
                             "--out", str(tmp_path / "report.txt")])
            cases += 1
            if k == opt and (code != 0 or len(sol.read_text().split()) != opt):
                wrong.append(("scene", seed, k, code))
            if k < opt and code != 1:
                wrong.append(("scene", seed, k, code))
    for seed in range(200):
        r = random.Random(seed)
        g = random_graph(r.randint(3, 14), r.uniform(0.2, 0.8), seed)
        path = tmp_path / f"g{seed}.gr"
        write_graph(g, path)
        opt = len(oracles.min_hitting(g)) if g.n <= 11 else len(brute_min_hitting(g))
        for k in (opt, opt - 1):
            if k < 0:
                continue
            sol = tmp_path / "sol.txt"
            code = cli.main(["solve-th", "--graph", str(path), "--k", str(k), "--solution", str(sol),
                             "--out", str(tmp_path / "report.txt")])
            cases += 1
            if k == opt and (code != 0 or len(sol.read_text().split()) != opt):
                wrong.append(("graph", seed, k, code))
            if k < opt and code != 1:
                wrong.append(("graph", seed, k, code))
    elapsed = time.perf_counter() - start
    ok = not wrong and elapsed < 600
    record(1, ok, f"{cases} solve-th runs on 200 scenes + 200 graphs, {len(wrong)} mismatches, {elapsed:.1f}s")
    assert not wrong, wrong[:5]
    assert elapsed < 600


# --------------------------------------------------------------- criterion 2

def test_k_polygons(record):
    problems = []
    for k in range(2, 9):
        scene = make_k_polygon(k, anchor=(Fraction(3), Fraction(-2)), scale=Fraction(5, 2))
        g = intersection_graph(scene)
        tris = list_triangles(g)
        H, V = tuple(range(k)), tuple(range(k, 2 * k))
        if len(tris) != 2 * k:
            problems.append(f"k={k}: {len(tris)} triangles")
        # every vertex lies in at most two of the 2k triangles, so k is a lower bound
        per_vertex = max(sum(v in t for t in tris) for v in g.vertices)
        if per_vertex > 2:
            problems.append(f"k={k}: a vertex lies in {per_vertex} triangles")
        if not (is_solution(g, H, TH) and is_solution(g, V, TH)):
            problems.append(f"k={k}: horizontal or vertical set fails")
        if len(min_triangle_hitting_milp(g)) != k:
            problems.append(f"k={k}: integer program optimum differs from k")
        if k <= 6 and any(is_solution(g, S, TH) for S in itertools.combinations(g.vertices, k - 1)):
            problems.append(f"k={k}: hitting set of size k-1")
        if k <= 5:
            mins = [S for S in itertools.combinations(g.vertices, k) if oracles.triangle_free(
                oracles.to_nx(g.remove(S)))]
            if sorted(mins) != sorted([H, V]):
                problems.append(f"k={k}: minimum solutions {mins}")
    record(2, not problems, f"k=2..8, {len(problems)} problems")
    assert not problems, problems


# ---------------------------------------------------------- criteria 3 and 4

NV_CYCLE = (3, 3, 4, 4, 5, 6, 8, 10)


def sat_corpus():
    for i in range(50):
        nv = NV_CYCLE[i % len(NV_CYCLE)]
        yield CnfFormula.of(random_cnf(nv, 15, seed=1000 + i), nv)


@pytest.fixture(scope="module")
def reduction_runs():
    runs = []
    for f in sat_corpus():
        prep, r = reduce_formula(f)
        plain = verify_reduction(f, r, prep)
        rc = crenellate(r, 2)
        runs.append((f, r, rc, plain, verify_reduction(f, rc, prep)))
    return runs


def test_reduction_equivalence(reduction_runs, record):
    bad = []
    sat = 0
    for i, (f, r, _, rep, _) in enumerate(reduction_runs):
        sat += rep.satisfiable
        if not rep.agree or rep.assignment_ok is False or (rep.th_at_k and not f.satisfied_by(rep.assignment)):
            bad.append(i)
        if slope_count(r.scene) != 2 or polygon_violations(r):
            bad.append(i)
    record(3, not bad, f"50 formulas ({sat} satisfiable), {len(bad)} disagreements")
    assert not bad


def test_crenellation(reduction_runs, record):
    bad = []
    top = 0
    for i, (f, _, rc, _, rep) in enumerate(reduction_runs):
        top = max(top, rep.max_degree)
        if rep.max_degree > 6 or slope_count(rc.scene) != 2 or not rep.agree or rep.assignment_ok is False:
            bad.append(i)
        if polygon_violations(rc):
            bad.append(i)
    record(4, not bad, f"t=2, max degree {top}, {len(bad)} failures")
    assert not bad


# --------------------------------------------------------------- criterion 5

def test_branching_contracts(record):
    violations = []
    graphs = [planted_graph(s) for s in range(50)]
    graphs += [random_graph(random.Random(s).randint(5, 14), random.Random(s).uniform(0.2, 0.7), s)
               for s in range(50, 100)]
    checked = 0
    for idx, g in enumerate(graphs):
        for prof, kind in ((TH, "th"), (FVS, "fvs")):
            k = random.Random(idx * 7 + len(kind)).randint(0, 4)
            sols = oracles.all_solutions(g, kind, k)
            p = clique_threshold(k, prof.c_pi)
            pairs = clique_branch(g, k, p, prof)
            X = greedy_bundle_hitting(g, prof.c_pi)
            for S in sols:
                if sum(pp.consistent(S) for pp in pairs) != 1:
                    violations.append((idx, kind, "clique uniqueness", S))
            for pb in (2, 3):
                brs = bundle_branch(g, k, pb, prof, X)
                for S in sols:
                    if sum(b.consistent(S) for b in brs) != 1:
                        violations.append((idx, kind, "bundle uniqueness", S))
                for b in brs:
                    if len(b.Z) > 4 * (k + pb * len(set(X) - set(b.D))):
                        violations.append((idx, kind, "Z bound"))
            insts = both_branchings(g, k, p, prof)
            for S in sols:
                if sum(i.consistent(S) for i in insts) != 1:
                    violations.append((idx, kind, "combined uniqueness", S))
            for inst in insts:
                violations += [(idx, kind, v) for v in instance_violations(inst, p, prof.c_pi)]
                checked += 1
    record(5, not violations, f"200 graph/profile runs, {checked} instances, {len(violations)} violations")
    assert not violations, violations[:5]


# --------------------------------------------------------------- criterion 6

def pipeline_instances(count: int, max_n: int = 16):
    out = []
    seed = 0
    while len(out) < count:
        r = random.Random(seed)
        g = random_graph(r.randint(5, 12), r.uniform(0.25, 0.6), seed) if seed % 2 else \
            intersection_graph(random_2dir_scene(r.randint(6, 16), seed, grid=5))
        seed += 1
        k = r.randint(1, 4)
        for inst in both_branchings(g, k, clique_threshold(k, 1), TH):
            if inst.graph.n <= max_n and list_triangles(inst.graph) and len(out) < count:
                out.append(inst)
    return out


def test_twin_merge_fusion(record):
    bad = []
    for idx, inst in enumerate(pipeline_instances(100)):
        h = inst.graph
        merged = twin_merge(h, inst.M)
        opt = len(oracles.min_hitting(h))
        wopt = oracles.min_weight_triangle_hitting(merged.graph, merged.weights)
        if wopt != opt:
            bad.append((idx, "optimum", opt, wopt))
        # merged -> original: lift a weighted optimum
        sol = brute_min_hitting(merged.graph, TH, merged.weights)
        lifted = merged.lift(sol)
        if not is_solution(h, lifted, TH) or len(lifted) != sum(merged.weights[v] for v in sol):
            bad.append((idx, "lift"))
        # original -> merged: project a subset-minimal optimum
        S = set(oracles.min_hitting(h))
        proj = []
        for rep, members in merged.class_map.items():
            inside = S.intersection(members)
            if inside and len(inside) != len(members):
                bad.append((idx, "class split"))
            if inside:
                proj.append(rep)
        dropped = set(h.vertices) - {v for ms in merged.class_map.values() for v in ms}
        if not is_solution(merged.graph, proj, TH) or \
                sum(merged.weights[v] for v in proj) != len(S - dropped):
            bad.append((idx, "projection"))
    record(6, not bad, f"100 instances, {len(bad)} failures")
    assert not bad, bad[:5]


# --------------------------------------------------------------- criterion 7

def test_dp_against_exhaustive(record):
    bad = []
    done = 0
    seed = 0
    while done < 200:
        r = random.Random(seed)
        g = random_graph(r.randint(4, 16), r.uniform(0.15, 0.55), seed)
        seed += 1
        td = heuristic_decomposition(g)
        if td.width > 6:
            continue
        w = {v: r.randint(1, 9) for v in g.vertices}
        inst = WeightedInstance(g, w, sum(w.values()), {v: (v,) for v in g.vertices})
        found = weighted_th_dp(inst, td)
        best = oracles.min_weight_triangle_hitting(g, w) if g.n <= 12 else \
            sum(w[v] for v in brute_min_hitting(g, TH, w))
        if not validate_decomposition(g, td) or not triangle_locality(g, td):
            bad.append((seed, "decomposition"))
        if found is None or found[1] != best or not is_solution(g, found[0], TH):
            bad.append((seed, found, best))
        done += 1
    record(7, not bad, f"200 weighted graphs, {len(bad)} mismatches")
    assert not bad, bad[:5]


# --------------------------------------------------------------- criterion 8

def integer_squares(n: int, seed: int) -> Scene:
    """Squares on a coarse integer grid: aligned sides and repeated sizes."""
    r = random.Random(seed)
    return square_scene(Square(Fraction(r.randint(0, 30)), Fraction(r.randint(0, 30)), Fraction(r.randint(1, 8)))
                        for _ in range(n))


def test_square_bounds(record):
    bad = []
    worst = 0.0
    for seed in range(100):
        n = random.Random(seed).randint(10, 60)
        base = integer_squares(n, seed)
        scene = perturb_squares(base)
        g = intersection_graph(scene)
        if set(g.edges()) != oracles.square_edges(base):
            bad.append((seed, "perturbation changed the graph"))
        omega = len(square_max_clique(scene))
        sub = n_minus_map(scene, g)
        if occurrence_bound(sub) > 4 * omega:
            bad.append((seed, "occurrence"))
        mu, _ = mu_star(g, sub)
        _, _, rows = local_radius_stats(scene)
        for row in rows:
            worst = max(worst, row.radius / (16 * row.x_size + 4))
            if row.radius > 16 * row.x_size + 4:
                bad.append((seed, "radius", row))
        for v in g.vertices:
            hix = hix_decomposition(scene, g, v)
            if hix.X & hix.I or (hix.X | hix.I) != g.nbrs(v):
                bad.append((seed, v, "partition"))
            if any(g.has_edge(a, b) for a, b in itertools.combinations(hix.I, 2)):
                bad.append((seed, v, "I not independent"))
            if len(hix.H) > 2 * mu:
                bad.append((seed, v, "|H| above 2 mu*"))
    record(8, not bad, f"100 perturbed scenes, worst radius/(16|X|+4) = {worst:.3f}, {len(bad)} violations")
    assert not bad, bad[:5]


# --------------------------------------------------------------- criterion 9

def test_contact_bounds(record):
    bad = []
    clique_checks = 0
    for seed in range(100):
        n = 8 + (seed * 7) % 53
        scene = random_contact_scene(n, seed)
        g = intersection_graph(scene)
        star = n_star_map(scene, g)
        if occurrence_bound(star) > 2:
            bad.append((seed, "occurrence"))
        _, per = mu_star(g, star)
        rep = contact_report(scene, g)
        if any(len(rep[v].nontrivial) > per[v] for v in g.vertices):
            bad.append((seed, "NT above mu*"))
        r = random.Random(seed)
        for _ in range(20):
            M = r.sample(g.vertices, r.randint(0, g.n))
            if neighborhood_complexity(g, M) > 30 * len(M) + 1:
                bad.append((seed, "neighbourhood complexity"))
        if count_maximal_cliques(g) > 4 * max(1, g.n) ** 2:
            bad.append((seed, "maximal clique count"))
        small = random_contact_scene(4 + seed % 11, seed + 5000)
        gs = intersection_graph(small)
        clique_checks += 1
        if len(contact_max_clique(small, gs)) != oracles.clique_number(gs):
            bad.append((seed, "max clique"))
    record(9, not bad, f"100 contact scenes + {clique_checks} clique checks, {len(bad)} violations")
    assert not bad, bad[:5]


# -------------------------------------------------------------- criterion 10

def test_big_mu_removal(record):
    from trihit.graph import PSEUDOFOREST
    bad = []
    reports = 0
    nonempty = 0
    for seed in range(40):
        r = random.Random(seed)
        if seed % 2:
            scene = perturb_squares(integer_squares(r.randint(8, 16), seed))
            g = intersection_graph(scene)
            sub = n_minus_map(scene, g)
        else:
            scene = random_contact_scene(r.randint(8, 20), seed)
            g = intersection_graph(scene)
            sub = n_star_map(scene, g)
        for prof in (FVS, PSEUDOFOREST):
            k = r.randint(1, 4)
            p = clique_threshold(k, prof.c_pi)
            for inst in both_branchings(g, k, p, prof):
                for tau in range(prof.c_pi, max(prof.c_pi, p) + 1):
                    rep = remove_big_mu_star(inst.graph, inst.M, sub, tau, prof)
                    reports += 1
                    nonempty += bool(rep.B)
                    if len(rep.B) > Fraction(rep.occurrence * len(inst.M), tau - prof.c_pi + 1):
                        bad.append((seed, tau, "size"))
                    if rep.mu_after > tau:
                        bad.append((seed, tau, "mu after"))
    record(10, not bad, f"{reports} removals ({nonempty} non-empty), {len(bad)} violations")
    assert not bad, bad[:5]


# -------------------------------------------------------------- criterion 11

def test_ddir_sweep_report(tmp_path, record):
    out = tmp_path / "sweep.csv"
    code = cli.main(["analyze", "sweep", "--d", "2", "3", "4", "--seeds", "5", "--n", "60", "--out", str(out)])
    rows = list(csv.DictReader(out.open()))
    ratios = [float(r["ratio"]) for r in rows]
    norm = [float(r["ratio_over_shape"]) for r in rows]
    ok = (code == 0 and len(rows) == 15 and all(math.isfinite(x) and x > 0 for x in ratios + norm)
          and len(set(ratios)) > 1)
    record(11, ok, f"{len(rows)} rows, ratio range {min(ratios):.3f}..{max(ratios):.3f}")
    assert ok
