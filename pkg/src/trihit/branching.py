"""Clique branching, bundle branching, their composition, and removal of
vertices with a large matching inside their subneighbourhood."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

from .graph import (Graph, ProblemProfile, greedy_bundle_hitting, hits_all_bundles, max_clique,
                    max_matching, max_matching_size)

CliqueFinder = Callable[[Graph], tuple[int, ...]]


@dataclass(frozen=True, order=True)
class BranchPair:
    D: tuple[int, ...]  # forced into the solution
    U: tuple[int, ...]  # forbidden from the solution

    def consistent(self, S: Iterable[int]) -> bool:
        S = set(S)
        return S.issuperset(self.D) and S.isdisjoint(self.U)


@dataclass(frozen=True, order=True)
class BundleBranch:
    D: tuple[int, ...]
    U: tuple[int, ...]
    Z: tuple[int, ...]
    budget: int  # k minus |D| minus the certified lower bounds paid inside Z

    def consistent(self, S: Iterable[int]) -> bool:
        S = set(S)
        return S.issuperset(self.D) and S.isdisjoint(self.U)


@dataclass(frozen=True)
class BranchInstance:
    graph: Graph
    M: tuple[int, ...]
    k_residual: int
    D_total: tuple[int, ...]
    U_total: tuple[int, ...]
    X: tuple[int, ...] = ()
    Z: tuple[int, ...] = ()
    D_bundle: tuple[int, ...] = ()
    k_clique: int = 0  # budget handed to bundle branching

    def consistent(self, S: Iterable[int]) -> bool:
        S = set(S)
        return S.issuperset(self.D_total) and S.isdisjoint(self.U_total)


def _t(xs: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(set(xs)))


# ------------------------------------------------------------ clique branch

def clique_branch(g: Graph, k: int, p: int, profile: ProblemProfile,
                  clique_finder: CliqueFinder = max_clique, alpha: Fraction = Fraction(1)) -> list[BranchPair]:
    """Branch on which (at most 2c) vertices of a large clique survive."""
    c = profile.c_pi
    if p < 6 * alpha * c:
        raise ValueError(f"clique threshold p={p} below 6*alpha*c={6 * alpha * c}")
    out: list[BranchPair] = []
    stack = [((), (), k)]
    while stack:
        D, U, budget = stack.pop()
        clique = clique_finder(g.remove(D))
        if len(clique) <= p:
            out.append(BranchPair(D, U))
            continue
        fixed = set(clique) & set(U)
        free = [v for v in clique if v not in fixed]
        for extra in range(0, 2 * c - len(fixed) + 1):
            for keep in itertools.combinations(free, extra):
                kept = fixed | set(keep)
                drop = [v for v in clique if v not in kept]
                if budget - len(drop) < 0:
                    continue
                stack.append((_t([*D, *drop]), _t([*U, *kept]), budget - len(drop)))
    return sorted(out)


# ------------------------------------------------------------ bundle branch

def _outside_matching(g: Graph, v: int, blocked: set[int]) -> list[tuple[int, int]]:
    return max_matching(g.induced(u for u in g.nbrs(v) if u not in blocked))


def bundle_branch(g: Graph, k: int, p: int, profile: ProblemProfile,
                  X: Iterable[int]) -> list[BundleBranch]:
    """Make every neighbourhood outside X and Z matching-poor.

    The smallest vertex v of X - D whose neighbourhood outside X and Z still
    holds a c-matching is handled: with a matching of size at least p it is
    branched on (v deleted, or v kept and its matched vertices moved into Z,
    paying the number of them any solution must take); a smaller matching
    just moves its vertices into Z.
    """
    c = profile.c_pi
    X = set(X)
    if p < 2 * c:
        raise ValueError(f"bundle threshold p={p} below 2c={2 * c}")
    if not hits_all_bundles(g, X, c):
        raise ValueError("X does not hit every bundle")
    order = sorted(X)
    out: list[BundleBranch] = []
    stack = [((), (), (), k)]
    while stack:
        D, U, Z, budget = stack.pop()
        Zs = set(Z)
        while True:
            pick = None
            for v in order:
                if v in D:
                    continue
                mt = _outside_matching(g, v, X | Zs)
                if len(mt) >= c:
                    pick = (v, mt)
                    break
            if pick is None:
                out.append(BundleBranch(D, U, _t(Zs), budget))
                break
            v, mt = pick
            matched = {x for e in mt for x in e}
            if len(mt) >= p:
                paid = len(mt) - c + 1
                if v not in U and budget >= 1:
                    stack.append((_t([*D, v]), U, _t(Zs), budget - 1))
                if budget - paid >= 0:
                    stack.append((D, _t([*U, v]), _t(Zs | matched), budget - paid))
                break
            Zs |= matched
    return sorted(out)


# --------------------------------------------------------------- combined

@dataclass
class BranchStats:
    clique_pairs: int = 0
    dummy_no: int = 0
    instances: int = 0


def check_p(p: int, k: int, c: int, alpha: Fraction = Fraction(1)) -> None:
    lo = 6 * alpha * c
    if p < lo or p > max(k, lo):
        raise ValueError(f"p={p} outside [{lo}, max(k, {lo})]")


def both_branchings(g: Graph, k: int, p: int, profile: ProblemProfile,
                    clique_finder: CliqueFinder = max_clique, alpha: Fraction = Fraction(1),
                    stats: BranchStats | None = None) -> list[BranchInstance]:
    c = profile.c_pi
    check_p(p, k, c, alpha)
    stats = stats if stats is not None else BranchStats()
    out = []
    pairs = clique_branch(g, k, p, profile, clique_finder, alpha)
    stats.clique_pairs = len(pairs)
    for pair in pairs:
        g1 = g.remove(pair.D)
        k1 = k - len(pair.D)
        X = greedy_bundle_hitting(g1, c)
        if len(X) > (2 * c + 1) * k1:
            stats.dummy_no += 1  # no solution of size k1 can exist below this pair
            continue
        for br in bundle_branch(g1, k1, p, profile, X):
            M = _t((set(X) - set(br.D)) | set(br.Z))
            out.append(BranchInstance(
                graph=g1.remove(br.D), M=M, k_residual=k1 - len(br.D),
                D_total=_t([*pair.D, *br.D]), U_total=_t([*pair.U, *br.U]),
                X=tuple(X), Z=br.Z, D_bundle=br.D, k_clique=k1))
    out.sort(key=lambda b: (b.D_total, b.U_total))
    stats.instances = len(out)
    return out


def instance_violations(inst: BranchInstance, p: int, c: int) -> list[str]:
    """Every structural promise of a branch instance that fails."""
    bad = []
    h = inst.graph
    k1 = inst.k_clique
    X, M = set(inst.X), set(inst.M)
    if len(max_clique(h)) > p:
        bad.append("clique larger than p survives")
    if not hits_all_bundles(h, M, c):
        bad.append("M misses a bundle")
    for v in sorted(M):
        if max_matching_size(h.induced(u for u in h.nbrs(v) if u not in M)) >= c:
            bad.append(f"vertex {v} of M has a c-matching outside M")
    if len(inst.Z) > 4 * (k1 + p * len(X - set(inst.D_bundle))):
        bad.append("|Z| above 4(k + p|X - D|)")
    if len(M) > len(X) + 4 * (k1 + p * len(X)):
        bad.append("|M| above |X| + 4(k + p|X|)")
    if len(X) > (2 * c + 1) * k1:
        bad.append("|X| above (2c+1)k")
    return bad


# ---------------------------------------------------- big-matching removal

@dataclass(frozen=True)
class BigMuReport:
    B: tuple[int, ...]
    occurrence: int
    bound: Fraction
    mu_after: int
    per_vertex: dict[int, int] = field(repr=False, default_factory=dict)


def remove_big_mu_star(g: Graph, M: Iterable[int], subnbhd: dict[int, Iterable[int]],
                       tau: int, profile: ProblemProfile) -> BigMuReport:
    """B = vertices whose subneighbourhood holds a matching of size >= tau."""
    c = profile.c_pi
    M = set(M)
    if tau < c:
        raise ValueError(f"precondition tau >= c violated (tau={tau}, c={c})")
    if not hits_all_bundles(g, M, c):
        raise ValueError("precondition 'M hits every bundle' violated")
    for v in sorted(M):
        if v in g and max_matching_size(g.induced(u for u in g.nbrs(v) if u not in M)) >= c:
            raise ValueError(f"precondition 'matching outside M below c' violated at vertex {v}")
    sub = {v: frozenset(subnbhd.get(v, ())) & set(g.vertices) for v in g.vertices}
    for v, s in sub.items():
        if not s <= g.nbrs(v):
            raise ValueError(f"precondition 'subneighbourhood inside N(v)' violated at vertex {v}")
    count: dict[int, int] = {}
    for s in sub.values():
        for u in s:
            count[u] = count.get(u, 0) + 1
    occ = max(count.values(), default=0)
    per = {v: max_matching_size(g.induced(s)) for v, s in sub.items()}
    B = _t(v for v, m in per.items() if m >= tau)
    rest = g.remove(B)
    after = max((max_matching_size(rest.induced(sub[v] - set(B))) for v in rest.vertices), default=0)
    return BigMuReport(B, occ, Fraction(occ * len(M), tau - c + 1), after, per)
