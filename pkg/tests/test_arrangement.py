import random

import networkx as nx
import numpy as np
import pytest
from scipy import ndimage

from trihit.arrangement import (build_square_arrangement, local_diameter_vertex, local_radius_stats,
                                local_radius_vertex)
from trihit.geometry import Square, build_graph, hix_decomposition, square_scene


def generic_scene(n, seed, span=40):
    """Integer squares with distinct sides and no shared side lines."""
    rng = random.Random(seed)
    while True:
        sq, xs, ys, sides = [], set(), set(), set()
        for _ in range(n):
            for _ in range(200):
                s = rng.randint(2, 14)
                x, y = rng.randint(0, span), rng.randint(0, span)
                if s in sides or {x, x + s} & xs or {y, y + s} & ys:
                    continue
                sq.append(Square.of(x, y, s))
                sides.add(s)
                xs |= {x, x + s}
                ys |= {y, y + s}
                break
        if len(sq) == n:
            return square_scene(sq)


def raster_regions(scene):
    """Regions and side-sharing adjacency by rasterising at half-unit steps."""
    sq = [(int(s.x), int(s.y), int(s.x1), int(s.y1)) for s in scene.objects]
    W = 2 * max(max(x1, y1) for _, _, x1, y1 in sq) + 3
    cover = np.zeros((W, W), bool)
    wall = np.zeros((W, W), bool)
    for x0, y0, x1, y1 in sq:
        cover[2 * x0:2 * x1 + 1, 2 * y0:2 * y1 + 1] = True
        wall[[2 * x0, 2 * x1], 2 * y0:2 * y1 + 1] = True
        wall[2 * x0:2 * x1 + 1, [2 * y0, 2 * y1]] = True
    labels, count = ndimage.label(cover & ~wall)
    adj = nx.Graph()
    adj.add_nodes_from(range(1, count + 1))
    for i, j in zip(*np.nonzero(wall)):
        if i % 2 == 0 and j % 2 == 1:
            a, b = labels[i - 1, j], labels[i + 1, j]
        elif j % 2 == 0 and i % 2 == 1:
            a, b = labels[i, j - 1], labels[i, j + 1]
        else:
            continue
        if a and b and a != b:
            adj.add_edge(a, b)
    member = {q: {labels[2 * x0 + 1, 2 * y0 + 1]} for q, (x0, y0, _, _) in enumerate(sq)}
    for q, (x0, y0, x1, y1) in enumerate(sq):
        member[q] = set(np.unique(labels[2 * x0 + 1:2 * x1:2, 2 * y0 + 1:2 * y1:2]).tolist())
    return adj, member


def test_single_square():
    arr = build_square_arrangement(square_scene([Square.of(0, 0, 1)]))
    assert arr.size == 1 and arr.edges() == []
    assert local_radius_vertex(arr, 0) == 0
    assert local_radius_stats(square_scene([Square.of(0, 0, 1)]))[:2] == (0, 0)


def test_two_overlapping_squares():
    arr = build_square_arrangement(square_scene([Square.of(0, 0, 4), Square.of(2, 1, 5)]))
    assert arr.size == 3
    g = nx.Graph(arr.edges())
    assert nx.is_isomorphic(g, nx.path_graph(3))
    assert local_radius_vertex(arr, 0) == 1 and local_diameter_vertex(arr, 0) == 1


def test_disjoint_squares():
    scene = square_scene([Square.of(0, 0, 1), Square.of(5, 6, 2)])
    assert local_radius_stats(scene)[:2] == (0, 0)


def test_rejects_non_generic():
    with pytest.raises(ValueError):
        build_square_arrangement(square_scene([Square.of(0, 0, 1), Square.of(0, 3, 1)]))


@pytest.mark.parametrize("seed", range(40))
def test_regions_match_raster(seed):
    scene = generic_scene(1 + seed % 7, seed)
    arr = build_square_arrangement(scene)
    adj, member = raster_regions(scene)
    assert arr.size == adj.number_of_nodes()
    ours = nx.Graph()
    ours.add_nodes_from(range(arr.size))
    ours.add_edges_from(arr.edges())
    assert nx.is_isomorphic(ours, adj)
    assert sorted(len(m) for m in arr.membership.values()) == sorted(len(m) for m in member.values())
    for q, regs in member.items():
        sub = adj.subgraph(regs)
        want = min(nx.eccentricity(sub).values())
        assert local_radius_vertex(arr, q) == want
        assert local_diameter_vertex(arr, q) == nx.diameter(sub)


@pytest.mark.parametrize("seed", range(30))
def test_radius_bounded_by_cover_size(seed):
    scene = generic_scene(2 + seed % 8, 100 + seed)
    g = build_graph(scene)[0]
    lo, hi, rows = local_radius_stats(scene)
    assert lo == min(r.radius for r in rows) and hi == max(r.radius for r in rows)
    for r in rows:
        assert r.x_size == len(hix_decomposition(scene, g, r.vertex).X)
        assert r.radius <= 16 * r.x_size + 4
