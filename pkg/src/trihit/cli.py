"""Command line front end: build, solve, generate, analyze, oracle."""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from fractions import Fraction

from . import gadgets, geometry, random_scenes
from .arrangement import local_radius_stats
from .graph import (Graph, GraphFormatError, OracleTooLarge, ProblemProfile, brute_min_hitting,
                    format_graph, is_solution, max_clique, max_matching, read_graph)
from .pipeline import DEFAULT_ALPHA, solve_pipeline
from .reduce import ddir_sweep, neighborhood_complexity
from .treewidth import exact_decomposition_small, format_td, heuristic_decomposition

EXIT_YES, EXIT_NO, EXIT_OVERFLOW, EXIT_ERROR = 0, 1, 2, 3


log = logging.getLogger("trihit")


class CliError(Exception):
    pass


def _emit(args, text: str, doc) -> None:
    out = json.dumps(doc, indent=2, sort_keys=True) + "\n" if args.json else text
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


def _alpha(text: str) -> Fraction:
    a = Fraction(text)
    if not 0 < a < 1:
        raise argparse.ArgumentTypeError("alpha must lie strictly between 0 and 1")
    return a


def _positive(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return v


def _load(args) -> tuple[Graph, geometry.Scene | None]:
    if getattr(args, "scene", None):
        scene = geometry.read_scene(args.scene)
        return geometry.intersection_graph(scene), scene
    if getattr(args, "graph", None):
        return read_graph(args.graph), None
    raise CliError("give --scene or --graph")


# ---------------------------------------------------------------- commands

def cmd_build_graph(args) -> int:
    scene = geometry.read_scene(args.scene)
    g, objs = geometry.build_graph(scene)
    with open(args.out, "w") as fh:
        fh.write(format_graph(g))
    mp = args.map or args.out + ".map"
    with open(mp, "w") as fh:
        for v in g.vertices:
            record = geometry.format_scene(geometry.Scene(scene.kind, (objs[v],))).splitlines()[1]
            fh.write(f"{v}\t{record}\n")
    if args.json:
        _emit(argparse.Namespace(json=True, out=None), "", {"vertices": g.n, "edges": g.m, "map": mp})
    return 0


def cmd_solve(args) -> int:
    g, scene = _load(args)
    profile = ProblemProfile.parse(args.profile)
    res = solve_pipeline(scene if scene is not None else g, args.k, profile, args.alpha, args.width_budget)
    doc = res.as_dict()
    doc.update(profile=profile.name, k=args.k, vertices=g.n)
    log.info("p=%d, %d instances, %d cut early, max width %d, %d over budget",
             res.p, res.instances, res.dummy_no, res.max_width, res.overflowed)
    if res.answer is True:
        if not is_solution(g, res.solution, profile):
            raise CliError("solver produced a set that does not verify")
        if args.solution:
            with open(args.solution, "w") as fh:
                fh.write("".join(f"{v}\n" for v in res.solution))
    text = f"{doc['answer']}\n"
    if res.answer:
        text += f"size {len(res.solution)}: " + " ".join(map(str, res.solution)) + "\n"
    _emit(args, text, doc)
    return {True: EXIT_YES, False: EXIT_NO, None: EXIT_OVERFLOW}[res.answer]


def cmd_gen_sat2dir(args) -> int:
    with open(args.cnf) as fh:
        f = gadgets.parse_dimacs(fh.read())
    prep, r = gadgets.reduce_formula(f, args.crenellate)
    geometry.write_scene(r.scene, args.out)
    g = geometry.intersection_graph(r.scene)
    doc = {
        "k": r.k, "objects": len(r.scene), "max_degree": g.max_degree(),
        "slopes": geometry.slope_count(r.scene), "trivially_unsat": prep.trivially_unsat,
        "forced": {str(v): b for v, b in sorted(prep.forced.items())},
        "polygons": {str(v): {"horizontal": list(h), "vertical": list(vv), "corners": list(c)}
                     for v, (h, vv, c) in r.polygon_map.items()},
        "clause_points": {str(c): [str(z[0]), str(z[1])] for c, z in r.clause_points.items()},
    }
    if args.verify:
        doc["verification"] = gadgets.verify_reduction(f, r, prep).as_dict()
    meta = args.meta or args.out + ".json"
    with open(meta, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
    text = f"k {r.k}\nobjects {len(r.scene)}\nmax_degree {doc['max_degree']}\n"
    if args.verify:
        v = doc["verification"]
        text += f"satisfiable {v['satisfiable']}\nth_at_k {v['th_at_k']}\nagree {v['agree']}\n"
    _emit(argparse.Namespace(json=args.json, out=None), text, doc)
    return 0


def cmd_gen_polygon(args) -> int:
    scene = gadgets.make_k_polygon(args.k, scale=Fraction(args.scale))
    geometry.write_scene(scene, args.out)
    return 0


def cmd_gen_random(args) -> int:
    kind, n, seed = args.kind, args.n, args.seed
    if kind == "graph":
        with open(args.out, "w") as fh:
            fh.write(format_graph(random_scenes.random_graph(n, args.p, seed)))
        return 0
    if kind == "cnf":
        f = gadgets.CnfFormula.of(random_scenes.random_cnf(n, args.clauses, seed), n)
        with open(args.out, "w") as fh:
            fh.write(gadgets.format_dimacs(f))
        return 0
    makers = {
        "2dir": lambda: random_scenes.random_2dir_scene(n, seed),
        "ddir": lambda: random_scenes.random_ddir_scene(n, args.d, seed),
        "squares": lambda: random_scenes.random_square_scene(n, seed),
        "contact": lambda: random_scenes.random_contact_scene(n, seed),
    }
    geometry.write_scene(makers[kind](), args.out)
    return 0


def cmd_decompose(args) -> int:
    g, _ = _load(args)
    if args.exact is not None:
        td = exact_decomposition_small(g, args.exact)
        if td is None:
            raise CliError(f"treewidth exceeds {args.exact}")
    else:
        td = heuristic_decomposition(g)
    if g.vertices != tuple(range(g.n)):
        raise CliError("decomposition output needs vertex ids 0..n-1")
    _emit(args, format_td(td, g.n), {"width": td.width, "bags": [sorted(b) for b in td.bags],
                                      "edges": [list(e) for e in td.edges]})
    return 0


def _subneighbourhoods(scene, g):
    if scene is not None and scene.kind == "squares":
        return "N-", geometry.n_minus_map(scene, g)
    if scene is not None and geometry.validate_contact(scene):
        return "N*", geometry.n_star_map(scene, g)
    return "N", {v: g.nbrs(v) for v in g.vertices}


def cmd_analyze(args) -> int:
    mode = args.mode
    if mode == "sweep":
        rows = ddir_sweep(tuple(args.d), range(args.seed, args.seed + args.seeds), n=args.n)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["d", "seed", "n", "t", "t_capped", "m", "classes", "ratio", "shape", "ratio_over_shape"])
        for r in rows:
            w.writerow([r.d, r.seed, r.n, r.t, int(r.t_capped), r.m_size, r.classes,
                        f"{r.ratio:.6f}", f"{r.shape:.6f}", f"{r.normalised:.6f}"])
        _emit(args, buf.getvalue(), [dict(r.__dict__, ratio_over_shape=r.normalised) for r in rows])
        return 0
    g, scene = _load(args)
    if mode == "lr":
        if scene is None or scene.kind != "squares":
            raise CliError("local radius needs a square scene")
        lo, hi, rows = local_radius_stats(scene)
        text = "".join(f"{r.vertex}\t{r.regions}\t{r.x_size}\t{r.radius}\n" for r in rows)
        text += f"min\t{lo}\tmax\t{hi}\n"
        _emit(args, text, {"rows": [r.__dict__ for r in rows], "min": lo, "max": hi})
    elif mode == "ncomplexity":
        with open(args.m_file) as fh:
            M = [int(tok) for tok in fh.read().split()]
        known = set(g.vertices)
        bad = [v for v in M if v not in known]
        if bad:
            raise CliError(f"M contains unknown vertex {bad[0]}")
        cnt = neighborhood_complexity(g, M)
        ratio = cnt / len(M) if M else float("inf")
        _emit(args, f"{len(M)}\t{cnt}\t{ratio:.6f}\n", {"m": len(M), "classes": cnt, "ratio": ratio})
    elif mode == "clique":
        if scene is not None and scene.kind == "squares":
            c, how = geometry.square_max_clique(scene), "stabbing"
        elif scene is not None and geometry.validate_contact(scene):
            c, how = geometry.contact_max_clique(scene, g), "enumeration"
        else:
            c, how = max_clique(g), "search"
        _emit(args, f"{len(c)}\t{' '.join(map(str, c))}\n", {"size": len(c), "clique": list(c), "method": how})
    elif mode in ("occurrence", "mustar"):
        name, sub = _subneighbourhoods(scene, g)
        if mode == "occurrence":
            b = geometry.occurrence_bound(sub)
            _emit(args, f"{name}\t{b}\n", {"subneighbourhood": name, "occurrence_bound": b})
        else:
            top, per = geometry.mu_star(g, sub)
            text = "".join(f"{v}\t{per[v]}\n" for v in g.vertices) + f"max\t{top}\n"
            _emit(args, text, {"subneighbourhood": name, "max": top, "per_vertex": {str(v): m for v, m in per.items()}})
    elif mode == "contact":
        if scene is None or not geometry.validate_contact(scene):
            raise CliError("contact analysis needs a contact-segment scene")
        rep = geometry.contact_report(scene, g)
        star = geometry.n_star_map(scene, g)
        top, per = geometry.mu_star(g, star)
        text = "".join(f"{v}\t{len(rep[v].nontrivial)}\t{len(rep[v].trivial)}\t{per[v]}\n" for v in g.vertices)
        _emit(args, text, {"rows": [{"vertex": v, "nontrivial": len(rep[v].nontrivial),
                                     "trivial": len(rep[v].trivial), "mu_star": per[v]} for v in g.vertices]})
    return 0


def cmd_oracle(args) -> int:
    g, _ = _load(args)
    what = args.what
    if what == "matching":
        m = max_matching(g)
        _emit(args, f"{len(m)}\n" + "".join(f"{a} {b}\n" for a, b in m), {"size": len(m), "matching": m})
    elif what == "treewidth":
        if g.n > 16:
            raise OracleTooLarge(f"oracle too large: {g.n} vertices > cap 16")
        td = next(td for w in range(max(g.n, 1)) if (td := exact_decomposition_small(g, w)) is not None)
        _emit(args, f"{td.width}\n", {"treewidth": td.width})
    else:
        profile = ProblemProfile.parse(what if what != "pt" else f"pt{args.t}")
        S = brute_min_hitting(g, profile, cap=args.cap)
        _emit(args, f"{len(S)}\t{' '.join(map(str, S))}\n", {"size": len(S), "solution": list(S),
                                                           "profile": profile.name})
    return 0


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="trihit", description="Triangle hitting on geometric intersection graphs")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def src(p, graph=True):
        p.add_argument("--scene")
        if graph:
            p.add_argument("--graph")

    p = sub.add_parser("build-graph", help="intersection graph of a scene")
    p.add_argument("--scene", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--map", help="vertex map sidecar (default OUT.map)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_build_graph)

    p = sub.add_parser("solve-th", help="decide a hitting problem at budget k (exit 0 yes, 1 no, 2 overflow)")
    src(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--alpha", type=_alpha, default=DEFAULT_ALPHA)
    p.add_argument("--profile", default="th")
    p.add_argument("--width-budget", type=int)
    p.add_argument("--solution", help="write the solution ids here")
    p.add_argument("--out")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("gen-sat2dir", help="3-SAT formula to a 2-DIR scene")
    p.add_argument("--cnf", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--crenellate", type=int, metavar="T")
    p.add_argument("--meta", help="polygon map and sizes (default OUT.json)")
    p.add_argument("--verify", action="store_true", help="check satisfiable <=> hitting set of size k")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_gen_sat2dir)

    p = sub.add_parser("gen-polygon", help="a k-polygon scene")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--scale", default="1")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_polygon)

    p = sub.add_parser("gen-random", help="seeded random instance")
    p.add_argument("kind", choices=["2dir", "ddir", "squares", "contact", "graph", "cnf"])
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--d", type=_positive, default=3)
    p.add_argument("--p", type=float, default=0.3)
    p.add_argument("--clauses", type=_positive, default=10)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_random)

    p = sub.add_parser("decompose", help="tree decomposition (heuristic, or exact up to a width)")
    src(p)
    p.add_argument("--exact", type=int, metavar="MAX_WIDTH")
    p.add_argument("--out")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("analyze", help="structural reports")
    p.add_argument("mode", choices=["lr", "ncomplexity", "clique", "occurrence", "mustar", "contact", "sweep"])
    src(p)
    p.add_argument("--m-file")
    p.add_argument("--d", type=int, nargs="+", default=[2, 3, 4])
    p.add_argument("--n", type=_positive, default=60)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--seeds", type=_positive, default=5)
    p.add_argument("--out")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("oracle", help="brute-force answers")
    p.add_argument("what", choices=["th", "fvs", "pseudoforest", "pt", "matching", "treewidth"])
    src(p)
    p.add_argument("--t", type=int, default=4, help="path length for pt")
    p.add_argument("--cap", type=_positive, default=20)
    p.add_argument("--out")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse uses 2, which here means overflow
        return EXIT_ERROR if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="trihit: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (CliError, OracleTooLarge, GraphFormatError, geometry.SceneFormatError, ValueError, OSError) as exc:
        print(f"trihit: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
