"""Seeded random instance generators used by tests, sweeps and the CLI."""
from __future__ import annotations

import random
from fractions import Fraction

from .geometry import (Scene, Segment, Square, segment_intersection, segment_scene,
                       segments_intersect, square_scene)
from .graph import Graph


def random_graph(n: int, p: float, seed: int) -> Graph:
    rng = random.Random(seed)
    return Graph.from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p])


def random_2dir_scene(n: int, seed: int, grid: int = 8, point_share: float = 0.25) -> Scene:
    """Axis-parallel segments on a small integer grid; some are points."""
    rng = random.Random(seed)
    segs = []
    for _ in range(n):
        x, y = rng.randrange(grid), rng.randrange(grid)
        r = rng.random()
        if r < point_share:
            segs.append(Segment.of(x, y, x, y))
        elif r < (1 + point_share) / 2:
            segs.append(Segment.of(x, y, min(grid, x + rng.randint(1, grid // 2)), y))
        else:
            segs.append(Segment.of(x, y, x, min(grid, y + rng.randint(1, grid // 2))))
    return segment_scene(segs)


DIRECTIONS = [(1, 0), (0, 1), (1, 1), (1, -1), (2, 1), (1, 2), (2, -1), (1, -2)]


def random_ddir_scene(n: int, d: int, seed: int, grid: int = 24) -> Scene:
    """Segments using the first d directions of :data:`DIRECTIONS`."""
    if not 1 <= d <= len(DIRECTIONS):
        raise ValueError(f"d must lie in 1..{len(DIRECTIONS)}")
    rng = random.Random(seed)
    segs = []
    for _ in range(n):
        dx, dy = DIRECTIONS[rng.randrange(d)]
        x, y = rng.randrange(grid), rng.randrange(grid)
        ln = rng.randint(1, 4)
        segs.append(Segment.of(x, y, x + ln * dx, y + ln * dy))
    return segment_scene(segs)


def random_square_scene(n: int, seed: int, span: int = 40, max_side: int = 14) -> Scene:
    """Squares with distinct rational sides and unaligned sides (generic)."""
    rng = random.Random(seed)
    out = []
    used_x: set[Fraction] = set()
    used_y: set[Fraction] = set()
    sides: set[Fraction] = set()
    while len(out) < n:
        side = Fraction(rng.randint(20, max_side * 20), 20) + Fraction(len(out) + 1, 997)
        x = Fraction(rng.randint(0, span * 10), 10) + Fraction(rng.randint(1, 96), 997)
        y = Fraction(rng.randint(0, span * 10), 10) + Fraction(rng.randint(1, 96), 997)
        xs, ys = {x, x + side}, {y, y + side}
        if side in sides or xs & used_x or ys & used_y:
            continue
        sides.add(side)
        used_x |= xs
        used_y |= ys
        out.append(Square(x, y, side))
    return square_scene(out)


def _touch_ok(a: Segment, b: Segment) -> bool:
    hit = segment_intersection(a, b)
    if hit is None:
        return True
    if isinstance(hit, Segment):
        return False
    return hit in a.endpoints or hit in b.endpoints


def random_contact_scene(n: int, seed: int, grid: int = 10, tries: int = 20000) -> Scene:
    """Rejection-sampled segments with endpoints on a grid; any shared
    point is an endpoint of one of the two segments."""
    rng = random.Random(seed)
    segs: list[Segment] = []
    pts: list[tuple[int, int]] = []
    for _ in range(tries):
        if len(segs) == n:
            break
        if pts and rng.random() < 0.6:
            x1, y1 = rng.choice(pts)  # reuse an endpoint to create contacts
        else:
            x1, y1 = rng.randrange(grid), rng.randrange(grid)
        x2, y2 = rng.randrange(grid), rng.randrange(grid)
        if rng.random() < 0.08:
            x2, y2 = x1, y1
        cand = Segment.of(x1, y1, x2, y2)
        if cand in segs or not all(_touch_ok(cand, s) for s in segs if segments_intersect(cand, s)):
            continue
        segs.append(cand)
        pts += [(x1, y1), (x2, y2)]
    return segment_scene(segs)


def random_cnf(num_vars: int, num_clauses: int, seed: int, width: int = 3) -> list[list[int]]:
    rng = random.Random(seed)
    clauses = []
    for _ in range(num_clauses):
        size = rng.randint(2, width) if rng.random() < 0.3 else width
        vs = rng.sample(range(1, num_vars + 1), min(size, num_vars))
        clauses.append([v if rng.random() < 0.5 else -v for v in vs])
    return clauses
