"""Simple undirected graphs, matchings, bundles and brute-force oracles."""
from __future__ import annotations

import enum
import heapq
import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from . import kernels

ORACLE_CAP = 20


class OracleTooLarge(ValueError):
    """Raised when an exhaustive oracle is asked to handle too many vertices."""


class Graph:
    """Immutable simple graph.

    Vertex ids are arbitrary non-negative integers.  Graphs read from files
    or built from scenes use ``0..n-1``; induced subgraphs keep the ids of
    their parent so solutions can be lifted without relabelling.
    """

    __slots__ = ("_adj", "_vertices")

    def __init__(self, adjacency: dict[int, Iterable[int]]):
        adj = {int(v): frozenset(int(u) for u in nb) for v, nb in adjacency.items()}
        for v, nb in adj.items():
            if v in nb:
                raise ValueError(f"self-loop at vertex {v}")
            for u in nb:
                if u not in adj or v not in adj[u]:
                    raise ValueError(f"adjacency not symmetric on {{{u}, {v}}}")
        self._adj = adj
        self._vertices = tuple(sorted(adj))

    @classmethod
    def from_edges(cls, vertices: int | Iterable[int], edges: Iterable[tuple[int, int]]) -> "Graph":
        vs = range(vertices) if isinstance(vertices, int) else vertices
        adj: dict[int, set[int]] = {int(v): set() for v in vs}
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            adj[u].add(v)
            adj[v].add(u)
        return cls(adj)

    # -- basic queries -------------------------------------------------
    @property
    def vertices(self) -> tuple[int, ...]:
        return self._vertices

    @property
    def n(self) -> int:
        return len(self._vertices)

    @property
    def m(self) -> int:
        return sum(len(nb) for nb in self._adj.values()) // 2

    def __contains__(self, v: int) -> bool:
        return v in self._adj

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self._adj == other._adj

    def __hash__(self) -> int:
        return hash(frozenset(self._adj.items()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    def nbrs(self, v: int) -> frozenset[int]:
        return self._adj[v]

    def neighbors(self, v: int) -> tuple[int, ...]:
        return tuple(sorted(self._adj[v]))

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def max_degree(self) -> int:
        return max((len(nb) for nb in self._adj.values()), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj.get(u, ())

    def edges(self) -> Iterator[tuple[int, int]]:
        for u in self._vertices:
            for v in sorted(self._adj[u]):
                if u < v:
                    yield (u, v)

    # -- derived graphs ------------------------------------------------
    def induced(self, keep: Iterable[int]) -> "Graph":
        keep = set(keep) & self._adj.keys()
        return Graph({v: self._adj[v] & keep for v in keep})

    def remove(self, drop: Iterable[int]) -> "Graph":
        drop = set(drop)
        return self.induced(v for v in self._vertices if v not in drop)


# --------------------------------------------------------------- matchings

def max_matching(g: Graph) -> list[tuple[int, int]]:
    """Maximum cardinality matching (Edmonds' blossom algorithm), sorted pairs."""
    verts = g.vertices
    n = len(verts)
    index = {v: i for i, v in enumerate(verts)}
    adj = [[index[u] for u in g.neighbors(v)] for v in verts]
    match = [-1] * n

    # greedy start keeps the number of augmentations small
    for v in range(n):
        if match[v] < 0:
            for u in adj[v]:
                if match[u] < 0:
                    match[u], match[v] = v, u
                    break

    for root in range(n):
        if match[root] >= 0:
            continue
        end, parent = _augmenting_path(adj, match, root)
        while end >= 0:
            prev = parent[end]
            nxt = match[prev]
            match[end], match[prev] = prev, end
            end = nxt
    return sorted((verts[i], verts[j]) for i, j in enumerate(match) if i < j)


def _augmenting_path(adj, match, root):
    n = len(adj)
    used = [False] * n
    parent = [-1] * n
    base = list(range(n))
    used[root] = True
    queue = [root]
    head = 0

    def lca(a, b):
        seen = [False] * n
        while True:
            a = base[a]
            seen[a] = True
            if match[a] < 0:
                break
            a = parent[match[a]]
        while True:
            b = base[b]
            if seen[b]:
                return b
            b = parent[match[b]]

    def mark(v, b, child, blossom):
        while base[v] != b:
            blossom[base[v]] = blossom[base[match[v]]] = True
            parent[v] = child
            child = match[v]
            v = parent[match[v]]

    while head < len(queue):
        v = queue[head]
        head += 1
        for to in adj[v]:
            if base[v] == base[to] or match[v] == to:
                continue
            if to == root or (match[to] >= 0 and parent[match[to]] >= 0):
                cur = lca(v, to)
                blossom = [False] * n
                mark(v, cur, to, blossom)
                mark(to, cur, v, blossom)
                for i in range(n):
                    if blossom[base[i]]:
                        base[i] = cur
                        if not used[i]:
                            used[i] = True
                            queue.append(i)
            elif parent[to] < 0:
                parent[to] = v
                if match[to] < 0:
                    return to, parent
                used[match[to]] = True
                queue.append(match[to])
    return -1, parent


def max_matching_size(g: Graph) -> int:
    return len(max_matching(g))


# ----------------------------------------------------------------- bundles

@dataclass(frozen=True)
class Bundle:
    center: int
    matching: tuple[tuple[int, int], ...]

    @property
    def t(self) -> int:
        return len(self.matching)

    def vertices(self) -> tuple[int, ...]:
        return tuple(sorted({self.center, *itertools.chain.from_iterable(self.matching)}))

    def is_valid(self, g: Graph) -> bool:
        seen = {self.center}
        for u, v in self.matching:
            if not g.has_edge(u, v) or u in seen or v in seen:
                return False
            if not (g.has_edge(self.center, u) and g.has_edge(self.center, v)):
                return False
            seen.update((u, v))
        return True


def find_bundle(g: Graph, t: int) -> Bundle | None:
    """Some t-bundle of ``g`` (smallest center first), or None."""
    if t < 1:
        raise ValueError("bundle size t must be at least 1")
    for v in g.vertices:
        if g.degree(v) < 2 * t:
            continue
        mt = max_matching(g.induced(g.nbrs(v)))
        if len(mt) >= t:
            return Bundle(v, tuple(mt[:t]))
    return None


def greedy_bundle_hitting(g: Graph, t: int) -> tuple[int, ...]:
    """Vertices of a maximal vertex-disjoint packing of t-bundles."""
    if t < 1:
        raise ValueError("bundle size t must be at least 1")
    taken: set[int] = set()
    rest = g
    while True:
        b = find_bundle(rest, t)
        if b is None:
            return tuple(sorted(taken))
        taken.update(b.vertices())
        rest = rest.remove(b.vertices())


def hits_all_bundles(g: Graph, X: Iterable[int], t: int) -> bool:
    """True iff g - X has no t-bundle."""
    return find_bundle(g.remove(X), t) is None


# ---------------------------------------------------------------- profiles

class Problem(enum.Enum):
    TH = "th"
    FVS = "fvs"
    PSEUDOFOREST = "pseudoforest"
    PT = "pt"


@dataclass(frozen=True)
class ProblemProfile:
    problem: Problem
    path_length: int = 0  # only meaningful for PT

    def __post_init__(self):
        if self.problem is Problem.PT and not 1 <= self.path_length <= 5:
            raise ValueError("path hitting supports path lengths 1..5")

    @property
    def c_pi(self) -> int:
        return 1 if self.problem in (Problem.TH, Problem.FVS) else 2

    @property
    def name(self) -> str:
        if self.problem is Problem.PT:
            return f"pt{self.path_length}"
        return self.problem.value

    def leaf_solver(self):
        return brute_min_hitting

    @classmethod
    def parse(cls, name: str, path_length: int = 4) -> "ProblemProfile":
        name = name.lower()
        if name.startswith("pt") and name[2:].isdigit():
            return cls(Problem.PT, int(name[2:]))
        prob = Problem(name)
        return cls(prob, path_length if prob is Problem.PT else 0)


TH = ProblemProfile(Problem.TH)
FVS = ProblemProfile(Problem.FVS)
PSEUDOFOREST = ProblemProfile(Problem.PSEUDOFOREST)


# ------------------------------------------------------- target properties

def list_triangles(g: Graph) -> list[tuple[int, int, int]]:
    out = []
    for u in g.vertices:
        hi = sorted(w for w in g.nbrs(u) if w > u)
        for i, v in enumerate(hi):
            nv = g.nbrs(v)
            out.extend((u, v, w) for w in hi[i + 1:] if w in nv)
    return out


def _components(g: Graph) -> list[list[int]]:
    seen: set[int] = set()
    comps = []
    for s in g.vertices:
        if s in seen:
            continue
        seen.add(s)
        stack, comp = [s], []
        while stack:
            v = stack.pop()
            comp.append(v)
            for u in g.nbrs(v):
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        comps.append(comp)
    return comps


def paths_on(g: Graph, t: int) -> set[frozenset[int]]:
    """Vertex sets of all simple paths with exactly t vertices."""
    found: set[frozenset[int]] = set()

    def grow(path: list[int]) -> None:
        if len(path) == t:
            found.add(frozenset(path))
            return
        for u in g.nbrs(path[-1]):
            if u not in path:
                path.append(u)
                grow(path)
                path.pop()

    for v in g.vertices:
        grow([v])
    return found


def satisfies(g: Graph, profile: ProblemProfile) -> bool:
    """Does g itself have the profile's target property?"""
    p = profile.problem
    if p is Problem.TH:
        return not list_triangles(g)
    if p is Problem.PT:
        return not paths_on(g, profile.path_length)
    slack = 0 if p is Problem.FVS else 1
    for comp in _components(g):
        edges = sum(g.degree(v) for v in comp) // 2
        if edges > len(comp) - 1 + slack:
            return False
    return True


def is_solution(g: Graph, S: Iterable[int], profile: ProblemProfile) -> bool:
    return satisfies(g.remove(S), profile)


def brute_min_hitting(g: Graph, profile: ProblemProfile = TH,
                      weights: dict[int, int] | None = None,
                      cap: int = ORACLE_CAP) -> tuple[int, ...]:
    """Exhaustive minimum (weight) solution; ties go to the lex-smallest set."""
    verts = g.vertices
    n = len(verts)
    if n > cap:
        raise OracleTooLarge(f"oracle too large: {n} vertices > cap {cap}")
    if n == 0:
        return ()
    bit = {v: 1 << (n - 1 - i) for i, v in enumerate(verts)}
    w = np.array([1 if weights is None else weights[v] for v in verts], dtype=np.int64)
    p = profile.problem
    if p in (Problem.TH, Problem.PT):
        if p is Problem.TH:
            obstacles = [sum(bit[x] for x in tri) for tri in list_triangles(g)]
        else:
            obstacles = sorted(sum(bit[x] for x in path) for path in paths_on(g, profile.path_length))
        mask, _ = kernels.min_obstacle_hitting(n, np.array(obstacles, dtype=np.int64), w)
    else:
        adj = np.array([sum(bit[u] for u in g.nbrs(v)) for v in verts], dtype=np.int64)
        mode = 0 if p is Problem.FVS else 1
        mask, _ = kernels.min_peeling_hitting(n, adj, w, mode)
    return tuple(v for v in verts if mask & bit[v])


# ------------------------------------------------------------ bicliques

KTT_CAP = 4


def is_ktt_free(g: Graph, t: int) -> bool:
    """True iff g has no K_{t,t} subgraph (not necessarily induced)."""
    if t < 1:
        raise ValueError("t must be at least 1")
    if t > KTT_CAP:
        raise ValueError(f"K_{{t,t}} test capped at t <= {KTT_CAP}")
    cand = [v for v in g.vertices if g.degree(v) >= t]

    def extend(side: list[int], common: frozenset[int]) -> bool:
        if len(side) == t:
            return len(common - set(side)) >= t
        for v in cand:
            if v <= side[-1]:
                continue
            nxt = common & g.nbrs(v)
            if len(nxt - set(side) - {v}) >= t:
                side.append(v)
                if extend(side, nxt):
                    return True
                side.pop()
        return False

    for v in cand:
        if extend([v], g.nbrs(v)):
            return False
    return True


# ------------------------------------------------------------- text format

class GraphFormatError(ValueError):
    pass


def format_graph(g: Graph) -> str:
    """``p edge n m`` then ``e u v`` lines; requires dense ids 0..n-1."""
    if g.vertices != tuple(range(g.n)):
        raise ValueError("graph text format needs vertex ids 0..n-1")
    lines = [f"p edge {g.n} {g.m}"]
    lines += [f"e {u} {v}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph:
    n = None
    edges = []
    declared = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        try:
            if parts[0] == "p":
                if n is not None or len(parts) != 4 or parts[1] != "edge":
                    raise ValueError("bad header")
                n, declared = int(parts[2]), int(parts[3])
            elif parts[0] == "e":
                if n is None or len(parts) != 3:
                    raise ValueError("edge before header or wrong arity")
                u, v = int(parts[1]), int(parts[2])
                if not (0 <= u < n and 0 <= v < n) or u == v:
                    raise ValueError("vertex out of range or self-loop")
                edges.append((u, v))
            else:
                raise ValueError(f"unknown record {parts[0]!r}")
        except ValueError as exc:
            raise GraphFormatError(f"line {lineno}: {exc}") from None
    if n is None:
        raise GraphFormatError("missing 'p edge' header")
    g = Graph.from_edges(n, edges)
    if g.m != declared:
        raise GraphFormatError(f"header says {declared} edges, found {g.m}")
    return g


def read_graph(path) -> Graph:
    with open(path) as fh:
        return parse_graph(fh.read())


def write_graph(g: Graph, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_graph(g))


# ----------------------------------------------------------------- cliques

class CliqueOverflow(RuntimeError):
    """More maximal cliques than the configured limit."""


def _lex_first_clique(g: Graph, start: Iterable[int]) -> tuple[int, ...]:
    clique = set(start)
    common = set(g.vertices).difference(clique)
    for v in clique:
        common &= g.nbrs(v)
    while common:
        v = min(common)
        clique.add(v)
        common &= g.nbrs(v)
    return tuple(sorted(clique))


def maximal_cliques(g: Graph, limit: int | None = None) -> Iterator[tuple[int, ...]]:
    """All maximal cliques in lexicographic order, with polynomial delay.

    Lexicographic successor generation with a priority queue: from each
    output clique C and each vertex j outside it, the set of earlier members
    of C adjacent to j, plus j, is extended greedily when it is maximal among
    the vertices up to j.
    """

    if g.n == 0:
        return
    first = _lex_first_clique(g, ())
    heap = [first]
    queued = {first}
    emitted = 0
    while heap:
        clique = heapq.heappop(heap)
        emitted += 1
        if limit is not None and emitted > limit:
            raise CliqueOverflow(f"more than {limit} maximal cliques")
        yield clique
        members = set(clique)
        for j in g.vertices:
            if j in members:
                continue
            nj = g.nbrs(j)
            seed = {i for i in clique if i < j and i in nj}
            seed.add(j)
            common = None
            for v in seed:
                common = set(g.nbrs(v)) if common is None else common & g.nbrs(v)
            if any(i < j for i in common):
                continue  # seed is not maximal among vertices <= j
            nxt = _lex_first_clique(g, seed)
            if nxt not in queued:
                queued.add(nxt)
                heapq.heappush(heap, nxt)


def max_clique(g: Graph) -> tuple[int, ...]:
    """Exact maximum clique (Bron-Kerbosch with pivoting), lex-smallest on ties."""
    best: tuple[int, ...] = ()

    def expand(r: list[int], p: set[int], x: set[int]) -> None:
        nonlocal best
        if not p and not x:
            cand = tuple(sorted(r))
            if len(cand) > len(best) or (len(cand) == len(best) and cand < best):
                best = cand
            return
        if len(r) + len(p) < len(best):
            return
        pivot = max(p | x, key=lambda u: len(p & g.nbrs(u)))
        for v in sorted(p - g.nbrs(pivot)):
            expand(r + [v], p & g.nbrs(v), x & g.nbrs(v))
            p = p - {v}
            x = x | {v}

    if g.n:
        expand([], set(g.vertices), set())
    return best


def clique_number(g: Graph) -> int:
    return len(max_clique(g))


# ------------------------------------------------------------ vertex cover

def min_vertex_cover(g: Graph) -> tuple[int, ...]:
    """Exact minimum vertex cover: Koenig's theorem on bipartite graphs,
    bounded search between the matching lower bound and twice it otherwise."""
    if g.m == 0:
        return ()
    sides = _two_colouring(g)
    if sides is not None:
        return _koenig_cover(g, sides)
    lo = max_matching_size(g)
    for k in range(lo, 2 * lo + 1):
        found = _cover_search(g, k)
        if found is not None:
            return tuple(sorted(found))
    raise AssertionError("vertex cover exceeds twice the matching size")


def _two_colouring(g: Graph) -> dict[int, int] | None:
    colour: dict[int, int] = {}
    for s in g.vertices:
        if s in colour:
            continue
        colour[s] = 0
        stack = [s]
        while stack:
            v = stack.pop()
            for u in g.nbrs(v):
                if u not in colour:
                    colour[u] = 1 - colour[v]
                    stack.append(u)
                elif colour[u] == colour[v]:
                    return None
    return colour


def _koenig_cover(g: Graph, colour: dict[int, int]) -> tuple[int, ...]:
    mate: dict[int, int] = {}
    for u, v in max_matching(g):
        mate[u], mate[v] = v, u
    left = [v for v in g.vertices if colour[v] == 0]
    # alternating reachability from unmatched left vertices
    reach = set(v for v in left if v not in mate)
    stack = list(reach)
    while stack:
        v = stack.pop()
        for u in g.nbrs(v):
            if colour[v] == 0 and mate.get(v) != u and u not in reach:
                reach.add(u)
                stack.append(u)
            elif colour[v] == 1 and mate.get(v) == u and u not in reach:
                reach.add(u)
                stack.append(u)
    cover = [v for v in left if v not in reach and g.degree(v)]
    cover += [v for v in g.vertices if colour[v] == 1 and v in reach]
    return tuple(sorted(cover))


def _cover_search(g: Graph, k: int) -> set[int] | None:
    if g.m == 0:
        return set()
    if k <= 0:
        return None
    v = max(g.vertices, key=lambda x: (g.degree(x), -x))
    if g.degree(v) > k:
        sub = _cover_search(g.remove([v]), k - 1)
        return None if sub is None else sub | {v}
    sub = _cover_search(g.remove([v]), k - 1)
    if sub is not None:
        return sub | {v}
    nb = g.nbrs(v)
    sub = _cover_search(g.remove(nb | {v}), k - len(nb))
    return None if sub is None else sub | set(nb)
