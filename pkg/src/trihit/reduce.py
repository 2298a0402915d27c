"""Twin merging into weighted instances, and neighbourhood complexity."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Iterable

from .geometry import intersection_graph
from .graph import Graph, is_ktt_free, list_triangles
from .random_scenes import random_ddir_scene


@dataclass(frozen=True)
class WeightedInstance:
    graph: Graph
    weights: dict[int, int]
    budget: int
    class_map: dict[int, tuple[int, ...]]  # kept vertex -> original vertices it stands for

    def lift(self, solution: Iterable[int]) -> tuple[int, ...]:
        """Replace each chosen representative by its whole class."""
        out: set[int] = set()
        for v in solution:
            out.update(self.class_map[v])
        return tuple(sorted(out))


class MergePreconditionError(ValueError):
    pass


def twin_merge(g: Graph, M: Iterable[int], weights: dict[int, int] | None = None,
               budget: int = 0) -> WeightedInstance:
    """Drop vertices outside M with no neighbour in M, then collapse the rest
    by their trace on M into one representative (the smallest id) whose
    weight is the class total.

    Requires every triangle to have at least two vertices in M.
    """
    M = frozenset(M)
    if not M <= set(g.vertices):
        raise MergePreconditionError("marker set contains vertices outside the graph")
    weights = weights if weights is not None else {v: 1 for v in g.vertices}
    left = list_triangles(g.remove(M))
    if left:
        raise MergePreconditionError(f"vertex {left[0][0]}: triangle {left[0]} avoids the marker set")
    for v in sorted(M):
        outside = [u for u in g.nbrs(v) if u not in M]
        for i, a in enumerate(outside):
            for b in outside[i + 1:]:
                if g.has_edge(a, b):
                    raise MergePreconditionError(
                        f"vertex {v}: neighbours {min(a, b)} and {max(a, b)} outside the marker set are adjacent")
    classes: dict[frozenset[int], list[int]] = {}
    for v in g.vertices:
        if v in M:
            continue
        trace = g.nbrs(v) & M
        if trace:
            classes.setdefault(trace, []).append(v)
    class_map = {v: (v,) for v in sorted(M)}
    new_w = {v: weights[v] for v in M}
    for members in classes.values():
        rep = min(members)
        class_map[rep] = tuple(sorted(members))
        new_w[rep] = sum(weights[u] for u in members)
    merged = g.induced(class_map)
    return WeightedInstance(merged, new_w, budget, dict(sorted(class_map.items())))


def every_triangle_doubly_marked(g: Graph, M: Iterable[int]) -> bool:
    M = set(M)
    return all(len(M.intersection(t)) >= 2 for t in list_triangles(g))


def neighborhood_complexity(g: Graph, M: Iterable[int]) -> int:
    """Number of distinct traces N(v) & M over vertices v outside M."""
    M = frozenset(M)
    return len({g.nbrs(v) & M for v in g.vertices if v not in M})


@dataclass(frozen=True)
class SweepRow:
    d: int
    seed: int
    n: int
    t: int          # smallest t with the graph K_{t,t}-free, at most t_cap
    t_capped: bool  # the graph still had K_{t,t} at t_cap
    m_size: int
    classes: int
    ratio: float
    shape: float    # d * t^3 * log t

    @property
    def normalised(self) -> float:
        return self.ratio / self.shape


def ddir_sweep(ds=(2, 3, 4), seeds=range(5), n: int = 60, m_share: float = 0.25,
               t_cap: int = 4, grid: int = 14) -> list[SweepRow]:
    """Neighbourhood complexity of random M in random d-DIR scenes, set
    against the d t^3 log t growth shape."""
    rows = []
    for d in ds:
        for seed in seeds:
            g = intersection_graph(random_ddir_scene(n, d, seed, grid=grid))
            t = next((t for t in range(2, t_cap + 1) if is_ktt_free(g, t)), None)
            capped = t is None
            t = t_cap if capped else t
            rng = random.Random(seed * 1009 + d)
            M = rng.sample(g.vertices, max(1, int(m_share * g.n)))
            cls = neighborhood_complexity(g, M)
            shape = d * t ** 3 * math.log(t)
            rows.append(SweepRow(d, seed, g.n, t, capped, len(M), cls, cls / len(M), shape))
    return rows
