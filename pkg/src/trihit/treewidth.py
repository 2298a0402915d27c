"""Tree decompositions and the weighted triangle-hitting DP."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graph import Graph, list_triangles

INF = np.int64(1) << 60
EXACT_CAP = 16


@dataclass(frozen=True)
class TreeDecomposition:
    bags: tuple[frozenset[int], ...]
    edges: tuple[tuple[int, int], ...]

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1


# ------------------------------------------------------------ validation

def validate_decomposition(g: Graph, td: TreeDecomposition) -> bool:
    nb = len(td.bags)
    if nb == 0:
        return g.n == 0
    # tree: nb - 1 edges and connected
    if len(td.edges) != nb - 1:
        return False
    tadj: dict[int, set[int]] = defaultdict(set)
    for a, b in td.edges:
        if not (0 <= a < nb and 0 <= b < nb) or a == b:
            return False
        tadj[a].add(b)
        tadj[b].add(a)
    if len(_reach(tadj, 0, lambda i: True)) != nb:
        return False
    where: dict[int, set[int]] = defaultdict(set)
    for i, bag in enumerate(td.bags):
        for v in bag:
            if v not in g:
                return False
            where[v].add(i)
    if any(not where[v] for v in g.vertices):
        return False
    for u, v in g.edges():
        if not where[u] & where[v]:
            return False
    for v, idx in where.items():
        start = next(iter(idx))
        if _reach(tadj, start, idx.__contains__) != idx:
            return False
    return True


def _reach(adj, start, allowed) -> set[int]:
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen and allowed(y):
                seen.add(y)
                stack.append(y)
    return seen


# ------------------------------------------------------ elimination orders

def decomposition_from_order(g: Graph, order: Sequence[int]) -> TreeDecomposition:
    """Bags of the fill-in graph along an elimination order."""
    if not order:
        return TreeDecomposition((frozenset(),), ())
    adj = {v: set(g.nbrs(v)) for v in g.vertices}
    pos = {v: i for i, v in enumerate(order)}
    bags = []
    for v in order:
        nb = adj[v]
        bags.append(frozenset(nb | {v}))
        for a in nb:
            adj[a] |= nb
            adj[a].discard(a)
            adj[a].discard(v)
        del adj[v]
    edges = []
    roots = []
    for i, v in enumerate(order):
        later = [pos[u] for u in bags[i] if u != v]
        if later:
            edges.append((i, min(later)))
        else:
            roots.append(i)
    edges += [(roots[j], roots[j + 1]) for j in range(len(roots) - 1)]
    return TreeDecomposition(tuple(bags), tuple(sorted(edges)))


def _greedy_order(g: Graph, score) -> list[int]:
    adj = {v: set(g.nbrs(v)) for v in g.vertices}
    order = []
    while adj:
        v = min(adj, key=lambda x: (score(adj, x), x))
        nb = adj.pop(v)
        for a in nb:
            adj[a] |= nb
            adj[a].discard(a)
            adj[a].discard(v)
        order.append(v)
    return order


def _fill(adj, v) -> int:
    nb = list(adj[v])
    return sum(1 for i, a in enumerate(nb) for b in nb[i + 1:] if b not in adj[a])


def _degree(adj, v) -> int:
    return len(adj[v])


def heuristic_decomposition(g: Graph) -> TreeDecomposition:
    """Best of min-fill and min-degree elimination."""
    best = None
    for score in (_fill, _degree):
        td = decomposition_from_order(g, _greedy_order(g, score))
        if best is None or td.width < best.width:
            best = td
    if not validate_decomposition(g, best):  # pragma: no cover - construction bug guard
        raise AssertionError("heuristic produced an invalid decomposition")
    return best


def exact_decomposition_small(g: Graph, max_width: int) -> TreeDecomposition | None:
    """A decomposition of width <= max_width if one exists (n <= 16).

    Search over sets of eliminated vertices: eliminating v after the set S
    creates a bag of v plus every vertex outside S reachable from v through S.
    """
    n = g.n
    if n > EXACT_CAP:
        raise ValueError(f"exact search capped at {EXACT_CAP} vertices, got {n}")
    verts = g.vertices
    idx = {v: i for i, v in enumerate(verts)}
    adj = [sum(1 << idx[u] for u in g.nbrs(v)) for v in verts]
    full = (1 << n) - 1
    parent = {0: (None, None)}
    frontier = [0]
    while frontier and full not in parent:
        nxt = []
        for S in frontier:
            for i in range(n):
                if S >> i & 1:
                    continue
                T = S | 1 << i
                if T in parent:
                    continue
                if _elim_degree(adj, S, i) <= max_width:
                    parent[T] = (S, i)
                    nxt.append(T)
        frontier = nxt
    if full not in parent:
        return None
    order = []
    S = full
    while S:
        S, i = parent[S]
        order.append(verts[i])
    order.reverse()
    td = decomposition_from_order(g, order)
    assert td.width <= max(max_width, 0) or n == 0
    return td


def _elim_degree(adj, S, i) -> int:
    comp = 1 << i
    frontier = comp
    while frontier:
        reach = 0
        f = frontier
        while f:
            low = f & -f
            reach |= adj[low.bit_length() - 1]
            f ^= low
        frontier = reach & S & ~comp
        comp |= frontier
    out = 0
    f = comp
    while f:
        low = f & -f
        out |= adj[low.bit_length() - 1]
        f ^= low
    return bin(out & ~comp & ~S).count("1")


def exact_treewidth(g: Graph) -> int:
    for w in range(0, max(g.n, 1)):
        if exact_decomposition_small(g, w) is not None:
            return w
    return max(g.n - 1, 0)


# ------------------------------------------------------------- text format

def format_td(td: TreeDecomposition, n: int) -> str:
    """``s td <bags> <width+1> <n>``, then ``b <id> <v...>`` (bag ids from 1),
    then one ``<i> <j>`` line per tree edge."""
    lines = [f"s td {len(td.bags)} {td.width + 1} {n}"]
    lines += [" ".join(["b", str(i + 1), *map(str, sorted(b))]) for i, b in enumerate(td.bags)]
    lines += [f"{a + 1} {b + 1}" for a, b in td.edges]
    return "\n".join(lines) + "\n"


def parse_td(text: str) -> TreeDecomposition:
    bags: dict[int, frozenset[int]] = {}
    edges = []
    count = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        if parts[0] == "s":
            count = int(parts[2])
        elif parts[0] == "b":
            bags[int(parts[1]) - 1] = frozenset(map(int, parts[2:]))
        elif len(parts) == 2:
            edges.append((int(parts[0]) - 1, int(parts[1]) - 1))
        else:
            raise ValueError(f"line {lineno}: unexpected record")
    if count is None or sorted(bags) != list(range(count)):
        raise ValueError("bag list does not match header")
    return TreeDecomposition(tuple(bags[i] for i in range(count)), tuple(edges))


# ------------------------------------------------------------------ nice form

LEAF, INTRODUCE, FORGET, JOIN = range(4)


@dataclass
class NiceNode:
    kind: int
    bag: tuple[int, ...]        # bit i of a DP state <-> bag[i]
    children: tuple[int, ...]
    vertex: int = -1


def nice_decomposition(td: TreeDecomposition) -> tuple[list[NiceNode], int]:
    """Leaf/introduce/forget/join form with empty leaves and an empty root."""
    nodes: list[NiceNode] = []

    def add(kind, bag, children=(), vertex=-1) -> int:
        nodes.append(NiceNode(kind, tuple(bag), tuple(children), vertex))
        return len(nodes) - 1

    def morph(node: int, target: frozenset[int]) -> int:
        bag = list(nodes[node].bag)
        for v in sorted(set(bag) - target):
            bag.remove(v)
            node = add(FORGET, bag, (node,), v)
        for v in sorted(target - set(bag)):
            bag.append(v)
            node = add(INTRODUCE, bag, (node,), v)
        return node

    tadj: dict[int, list[int]] = defaultdict(list)
    for a, b in td.edges:
        tadj[a].append(b)
        tadj[b].append(a)
    # iterative post-order from bag 0
    order, parent, stack = [], {0: None}, [0]
    while stack:
        x = stack.pop()
        order.append(x)
        for y in tadj[x]:
            if y not in parent:
                parent[y] = x
                stack.append(y)
    built: dict[int, int] = {}
    for x in reversed(order):
        target = td.bags[x]
        kids = [morph(built[y], target) for y in tadj[x] if parent.get(y) == x]
        if not kids:
            kids = [morph(add(LEAF, ()), target)]
        node = kids[0]
        for other in kids[1:]:
            node = add(JOIN, nodes[node].bag, (node, other))
        built[x] = node
    root = morph(built[0], frozenset())
    return nodes, root


# ---------------------------------------------------------------------- DP

def _bag_weight_table(bag, weights) -> np.ndarray:
    size = 1 << len(bag)
    s = np.arange(size, dtype=np.int64)
    out = np.zeros(size, dtype=np.int64)
    for i, v in enumerate(bag):
        out += ((s >> i) & 1) * weights[v]
    return out


def _remap(bag, other) -> np.ndarray:
    """States over ``bag`` rewritten in the bit order of ``other`` (same set)."""
    s = np.arange(1 << len(bag), dtype=np.int64)
    out = np.zeros_like(s)
    for i, v in enumerate(bag):
        out |= ((s >> i) & 1) << other.index(v)
    return out


def weighted_th_dp(inst, td: TreeDecomposition):
    """Minimum-weight triangle hitting set of ``inst.graph`` if its weight is
    at most ``inst.budget``; returns (sorted solution, weight) or None.

    ``inst`` needs ``graph``, ``weights`` (vertex -> positive int) and ``budget``.
    """
    g: Graph = inst.graph
    weights = inst.weights
    if not validate_decomposition(g, td):
        raise ValueError("invalid tree decomposition for this graph")
    where: dict[int, set[int]] = defaultdict(set)
    for i, bag in enumerate(td.bags):
        for v in bag:
            where[v].add(i)
    for a, b, c in list_triangles(g):
        if not where[a] & where[b] & where[c]:
            raise AssertionError(f"triangle {(a, b, c)} lies in no bag")

    nodes, root = nice_decomposition(td)
    tables: list[np.ndarray | None] = [None] * len(nodes)
    for i, nd in enumerate(nodes):  # children always precede parents
        if nd.kind == LEAF:
            tables[i] = np.zeros(1, dtype=np.int64)
        elif nd.kind == INTRODUCE:
            child = tables[nd.children[0]]
            b = len(nd.bag) - 1
            v = nd.vertex
            t = np.concatenate([child, child + weights[v]])
            states = np.arange(t.shape[0], dtype=np.int64)
            nv = g.nbrs(v)
            for x in range(b):
                if nd.bag[x] not in nv:
                    continue
                for y in range(x + 1, b):
                    if nd.bag[y] in nv and g.has_edge(nd.bag[x], nd.bag[y]):
                        tri = (1 << x) | (1 << y) | (1 << b)
                        t[(states & tri) == 0] = INF
            tables[i] = np.minimum(t, INF)
        elif nd.kind == FORGET:
            child_node = nodes[nd.children[0]]
            pos = child_node.bag.index(nd.vertex)
            child = tables[nd.children[0]]
            r = child.reshape(-1, 2, 1 << pos)
            tables[i] = np.minimum(r[:, 0, :], r[:, 1, :]).reshape(-1)
        else:
            l = tables[nd.children[0]]
            r = tables[nd.children[1]][_remap(nd.bag, nodes[nd.children[1]].bag)]
            both = l + r - _bag_weight_table(nd.bag, weights)
            tables[i] = np.minimum(both, INF)
    best = int(tables[root][0])
    if best >= INF or best > inst.budget:
        return None

    # walk back down, reading off forgotten vertices that were deleted
    chosen: list[int] = []
    todo = [(root, 0)]
    while todo:
        i, s = todo.pop()
        nd = nodes[i]
        if nd.kind == INTRODUCE:
            todo.append((nd.children[0], s & ~(1 << (len(nd.bag) - 1))))
        elif nd.kind == FORGET:
            c = nd.children[0]
            pos = nodes[c].bag.index(nd.vertex)
            lo_bits = s & ((1 << pos) - 1)
            base = ((s >> pos) << (pos + 1)) | lo_bits
            keep, drop = base, base | (1 << pos)
            if tables[c][keep] <= tables[c][drop]:
                todo.append((c, keep))
            else:
                chosen.append(nd.vertex)
                todo.append((c, drop))
        elif nd.kind == JOIN:
            a, b = nd.children
            todo.append((a, s))
            todo.append((b, int(_remap(nd.bag, nodes[b].bag)[s])))
    sol = tuple(sorted(chosen))
    assert sum(weights[v] for v in sol) == best, (sol, best)
    return sol, best


def triangle_locality(g: Graph, td: TreeDecomposition) -> bool:
    bags = [set(b) for b in td.bags]
    return all(any({a, b, c} <= bag for bag in bags) for a, b, c in list_triangles(g))


