"""End-to-end solver: branch, shrink, decompose, solve the leaves, lift."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .branching import BranchStats, both_branchings, remove_big_mu_star
from .geometry import (Scene, build_graph, contact_max_clique, is_generic, n_minus_map, n_star_map,
                       square_max_clique, square_scene, validate_contact)
from .graph import Graph, Problem, ProblemProfile, brute_min_hitting, is_solution, max_clique
from .reduce import twin_merge
from .treewidth import TreeDecomposition, heuristic_decomposition, weighted_th_dp

DEFAULT_ALPHA = Fraction(1, 3)  # (1 - d) / (1 + d) with d = 1/2


def ceil_power(k: int, alpha: Fraction) -> int:
    """Smallest integer p with p >= k**alpha, computed exactly."""
    if k <= 0:
        return 0
    a, b = alpha.numerator, alpha.denominator
    target = k ** a
    p = max(1, int(round(k ** float(alpha))) - 2)
    while p ** b < target:
        p += 1
    while p > 1 and (p - 1) ** b >= target:
        p -= 1
    return p


def clique_threshold(k: int, c: int, alpha: Fraction = DEFAULT_ALPHA) -> int:
    return max(ceil_power(k, alpha), 6 * c)


@dataclass
class PipelineResult:
    answer: bool | None            # None: undecided because a width budget overflowed
    solution: tuple[int, ...] | None
    p: int
    instances: int = 0
    dummy_no: int = 0
    overflowed: int = 0
    max_width: int = -1
    big_mu: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "answer": {True: "yes", False: "no", None: "overflow"}[self.answer],
            "solution": list(self.solution) if self.solution is not None else None,
            "p": self.p, "instances": self.instances, "dummy_no": self.dummy_no,
            "width_overflows": self.overflowed, "max_width": self.max_width,
        }


def _scene_tools(scene: Scene | None, g: Graph):
    """Clique finder and subneighbourhood map appropriate for the input."""
    if scene is None:
        return max_clique, {v: g.nbrs(v) for v in g.vertices}
    if scene.kind == "squares" and is_generic(scene):
        def finder(h: Graph) -> tuple[int, ...]:
            ids = h.vertices
            best = square_max_clique(square_scene(scene[i] for i in ids))
            return tuple(ids[i] for i in best)
        return finder, n_minus_map(scene, g)
    if scene.kind == "segments" and validate_contact(scene):
        return (lambda h: contact_max_clique(None, h)), n_star_map(scene, g)
    return max_clique, {v: g.nbrs(v) for v in g.vertices}


def _with_extra(td: TreeDecomposition, extra) -> TreeDecomposition:
    extra = frozenset(extra)
    return TreeDecomposition(tuple(b | extra for b in td.bags), td.edges)


def solve_pipeline(source: Graph | Scene, k: int, profile: ProblemProfile,
                   alpha: Fraction = DEFAULT_ALPHA, width_budget: int | None = None) -> PipelineResult:
    """Return a minimum solution of size <= k if one exists.

    The minimum over branch instances is the global minimum whenever it is at
    most k, because every such solution survives in exactly one instance.
    """
    scene = source if isinstance(source, Scene) else None
    g = build_graph(scene)[0] if scene is not None else source
    c = profile.c_pi
    p = clique_threshold(k, c, alpha)
    if k < 0:
        return PipelineResult(False, None, p)
    finder, subnbhd = _scene_tools(scene, g)
    stats = BranchStats()
    insts = both_branchings(g, k, p, profile, finder, Fraction(1), stats)
    res = PipelineResult(False, None, p, instances=len(insts), dummy_no=stats.dummy_no)
    best: tuple[int, ...] | None = None
    for inst in insts:
        h = inst.graph
        if profile.problem is Problem.TH:
            merged = twin_merge(h, inst.M, None, inst.k_residual)
            td = heuristic_decomposition(merged.graph)
            res.max_width = max(res.max_width, td.width)
            if width_budget is not None and td.width > width_budget:
                res.overflowed += 1
                continue
            found = weighted_th_dp(merged, td)
            if found is None:
                continue
            local = merged.lift(found[0])
        else:
            tau = max(c, p)
            rep = remove_big_mu_star(h, inst.M, subnbhd, tau, profile)
            res.big_mu.append(rep)
            td = _with_extra(heuristic_decomposition(h.remove(rep.B)), rep.B)
            res.max_width = max(res.max_width, td.width)
            if width_budget is not None and td.width > width_budget:
                res.overflowed += 1
                continue
            local = brute_min_hitting(h, profile)
            if len(local) > inst.k_residual:
                continue
        S = tuple(sorted(set(inst.D_total) | set(local)))
        if len(S) > k or not is_solution(g, S, profile):
            raise AssertionError(f"lifted set {S} fails verification")
        if best is None or (len(S), S) < (len(best), best):
            best = S
    if best is not None:
        res.answer, res.solution = True, best
    elif res.overflowed:
        res.answer = None
    return res
