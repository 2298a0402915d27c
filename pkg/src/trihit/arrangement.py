"""Arrangement graphs of square scenes and local radius."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .geometry import Scene, _require_generic, hix_decomposition, intersection_graph


class DisconnectedRegionSet(ValueError):
    """The regions inside one square do not form a connected graph."""


@dataclass(frozen=True)
class ArrangementGraph:
    regions: tuple[tuple[Fraction, Fraction, Fraction, Fraction], ...]  # one grid cell each
    adjacency: dict[int, frozenset[int]]
    membership: dict[int, frozenset[int]]

    @property
    def size(self) -> int:
        return len(self.regions)

    def edges(self):
        return sorted((a, b) for a, nb in self.adjacency.items() for b in nb if a < b)


def build_square_arrangement(scene: Scene) -> ArrangementGraph:
    """Regions of the plane cut by square boundaries, kept when covered.

    All sides lie on the grid spanned by the side coordinates, so every grid
    cell sits inside one region; neighbouring cells merge unless a square
    side runs between them.
    """
    _require_generic(scene)
    sq = scene.objects
    xs = sorted({c for s in sq for c in (s.x, s.x1)})
    ys = sorted({c for s in sq for c in (s.y, s.y1)})
    xi = {c: i for i, c in enumerate(xs)}
    yi = {c: i for i, c in enumerate(ys)}
    nx, ny = len(xs) - 1, len(ys) - 1
    cover = np.zeros((len(sq), max(nx, 0), max(ny, 0)), dtype=bool)
    vwall = np.zeros((len(xs), max(ny, 0)), dtype=bool)  # vertical line i, row j
    hwall = np.zeros((max(nx, 0), len(ys)), dtype=bool)  # column i, horizontal line j
    for q, s in enumerate(sq):
        x0, x1, y0, y1 = xi[s.x], xi[s.x1], yi[s.y], yi[s.y1]
        cover[q, x0:x1, y0:y1] = True
        vwall[[x0, x1], y0:y1] = True
        hwall[x0:x1, [y0, y1]] = True
    covered = cover.any(axis=0)
    cell_id = -np.ones((nx, ny), dtype=np.int64)
    cell_id[covered] = np.arange(int(covered.sum()))
    ncell = int(covered.sum())

    # horizontal neighbours (i, j) ~ (i+1, j) across vertical line i+1
    both_x = covered[:-1, :] & covered[1:, :]
    open_x = both_x & ~vwall[1:-1, :]
    wall_x = both_x & vwall[1:-1, :]
    both_y = covered[:, :-1] & covered[:, 1:]
    open_y = both_y & ~hwall[:, 1:-1]
    wall_y = both_y & hwall[:, 1:-1]

    a = np.concatenate([cell_id[:-1, :][open_x], cell_id[:, :-1][open_y]])
    b = np.concatenate([cell_id[1:, :][open_x], cell_id[:, 1:][open_y]])
    merge = coo_matrix((np.ones(a.shape[0]), (a, b)), shape=(ncell, ncell))
    nreg, label = connected_components(merge, directed=False)
    # renumber regions by their first cell so ids are deterministic
    order = {}
    for lab in label.tolist():
        order.setdefault(lab, len(order))
    label = np.array([order[lab] for lab in label.tolist()], dtype=np.int64)

    region_of = -np.ones((nx, ny), dtype=np.int64)
    region_of[covered] = label
    adj: dict[int, set[int]] = {r: set() for r in range(nreg)}
    ra = np.concatenate([region_of[:-1, :][wall_x], region_of[:, :-1][wall_y]])
    rb = np.concatenate([region_of[1:, :][wall_x], region_of[:, 1:][wall_y]])
    for u, v in zip(ra.tolist(), rb.tolist()):
        if u != v:
            adj[u].add(v)
            adj[v].add(u)

    reps: list = [None] * nreg
    for (i, j) in zip(*np.nonzero(covered)):
        r = int(region_of[i, j])
        if reps[r] is None:
            reps[r] = (xs[i], ys[j], xs[i + 1], ys[j + 1])
    membership = {q: frozenset(np.unique(region_of[cover[q]]).tolist()) for q in range(len(sq))}
    return ArrangementGraph(tuple(reps), {r: frozenset(nb) for r, nb in adj.items()}, membership)


def _eccentricities(arr: ArrangementGraph, regions: frozenset[int]) -> list[int]:
    ecc = []
    for src in sorted(regions):
        dist = {src: 0}
        todo = deque([src])
        while todo:
            r = todo.popleft()
            for s in arr.adjacency[r]:
                if s in regions and s not in dist:
                    dist[s] = dist[r] + 1
                    todo.append(s)
        if len(dist) != len(regions):
            raise DisconnectedRegionSet(f"regions {sorted(regions)} are not connected")
        ecc.append(max(dist.values()))
    return ecc


def local_radius_vertex(arr: ArrangementGraph, v: int) -> int:
    regions = arr.membership[v]
    if not regions:
        raise ValueError(f"vertex {v} covers no region")
    return min(_eccentricities(arr, regions))


def local_diameter_vertex(arr: ArrangementGraph, v: int) -> int:
    return max(_eccentricities(arr, arr.membership[v]))


@dataclass(frozen=True)
class RadiusRow:
    vertex: int
    regions: int
    x_size: int
    radius: int


def local_radius_stats(scene: Scene) -> tuple[int, int, list[RadiusRow]]:
    """(min radius, max radius, per-vertex rows)."""
    g = intersection_graph(scene)
    arr = build_square_arrangement(scene)
    rows = []
    for v in g.vertices:
        X = hix_decomposition(scene, g, v).X
        rows.append(RadiusRow(v, len(arr.membership[v]), len(X), local_radius_vertex(arr, v)))
    radii = [r.radius for r in rows]
    return min(radii, default=0), max(radii, default=0), rows
