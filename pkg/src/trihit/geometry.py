"""Exact rational geometry for segment and square scenes.

Coordinates are :class:`fractions.Fraction`.  Nothing here ever touches a
float, because the scenes we care about are degenerate on purpose: shared
endpoints, T-junctions, zero-length segments.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

import numpy as np

from . import kernels
from .graph import Graph, max_matching_size, maximal_cliques, min_vertex_cover

Point = tuple[Fraction, Fraction]


def _q(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def point(x, y) -> Point:
    return (_q(x), _q(y))


@dataclass(frozen=True)
class Segment:
    p: Point
    q: Point

    @classmethod
    def of(cls, x1, y1, x2, y2) -> "Segment":
        return cls(point(x1, y1), point(x2, y2))

    @property
    def is_point(self) -> bool:
        return self.p == self.q

    @property
    def endpoints(self) -> frozenset[Point]:
        return frozenset((self.p, self.q))

    @property
    def is_horizontal(self) -> bool:
        return not self.is_point and self.p[1] == self.q[1]

    @property
    def is_vertical(self) -> bool:
        return not self.is_point and self.p[0] == self.q[0]

    def bbox(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        (x1, y1), (x2, y2) = self.p, self.q
        return min(x1, x2), min(y1, y2), max(x1, x2), max(y1, y2)

    def slope(self):
        """Direction class: None for a point, 'inf' for vertical, else dy/dx."""
        if self.is_point:
            return None
        dx = self.q[0] - self.p[0]
        if dx == 0:
            return "inf"
        return (self.q[1] - self.p[1]) / dx


@dataclass(frozen=True)
class Square:
    x: Fraction
    y: Fraction
    side: Fraction

    def __post_init__(self):
        if self.side <= 0:
            raise ValueError("square side must be positive")

    @classmethod
    def of(cls, x, y, side) -> "Square":
        return cls(_q(x), _q(y), _q(side))

    @property
    def x1(self) -> Fraction:
        return self.x + self.side

    @property
    def y1(self) -> Fraction:
        return self.y + self.side

    def bbox(self):
        return self.x, self.y, self.x1, self.y1

    def contains(self, pt: Point) -> bool:
        return self.x <= pt[0] <= self.x1 and self.y <= pt[1] <= self.y1


Obj = Union[Segment, Square]


@dataclass(frozen=True)
class Scene:
    kind: str  # "segments" or "squares"
    objects: tuple

    def __post_init__(self):
        want = Segment if self.kind == "segments" else Square if self.kind == "squares" else None
        if want is None:
            raise ValueError(f"unknown scene kind {self.kind!r}")
        if any(not isinstance(o, want) for o in self.objects):
            raise ValueError(f"scene of {self.kind} holds a foreign object")

    def __len__(self) -> int:
        return len(self.objects)

    def __getitem__(self, i: int) -> Obj:
        return self.objects[i]


def segment_scene(segs: Iterable[Segment]) -> Scene:
    return Scene("segments", tuple(segs))


def square_scene(sqs: Iterable[Square]) -> Scene:
    return Scene("squares", tuple(sqs))


# ----------------------------------------------------------------- predicates

def orient(a: Point, b: Point, c: Point) -> int:
    d = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    return (d > 0) - (d < 0)


def _in_box(pt: Point, a: Point, b: Point) -> bool:
    return (min(a[0], b[0]) <= pt[0] <= max(a[0], b[0])
            and min(a[1], b[1]) <= pt[1] <= max(a[1], b[1]))


def on_segment(pt: Point, s: Segment) -> bool:
    return orient(s.p, s.q, pt) == 0 and _in_box(pt, s.p, s.q)


def in_interior(pt: Point, s: Segment) -> bool:
    return pt != s.p and pt != s.q and on_segment(pt, s)


def segments_intersect(a: Segment, b: Segment) -> bool:
    if a.is_point:
        return on_segment(a.p, b)
    if b.is_point:
        return on_segment(b.p, a)
    o1 = orient(a.p, a.q, b.p)
    o2 = orient(a.p, a.q, b.q)
    o3 = orient(b.p, b.q, a.p)
    o4 = orient(b.p, b.q, a.q)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    return ((o1 == 0 and _in_box(b.p, a.p, a.q)) or (o2 == 0 and _in_box(b.q, a.p, a.q))
            or (o3 == 0 and _in_box(a.p, b.p, b.q)) or (o4 == 0 and _in_box(a.q, b.p, b.q)))


def segment_intersection(a: Segment, b: Segment):
    """None, a Point, or a Segment (collinear overlap of positive length)."""
    if not segments_intersect(a, b):
        return None
    if a.is_point:
        return a.p
    if b.is_point:
        return b.p
    dax, day = a.q[0] - a.p[0], a.q[1] - a.p[1]
    dbx, dby = b.q[0] - b.p[0], b.q[1] - b.p[1]
    den = dax * dby - day * dbx
    if den != 0:
        t = ((b.p[0] - a.p[0]) * dby - (b.p[1] - a.p[1]) * dbx) / den
        return (a.p[0] + t * dax, a.p[1] + t * day)
    # collinear: order the four points along the common line
    key = (lambda pt: pt[0]) if dax != 0 else (lambda pt: pt[1])
    lo = max(min(a.p, a.q, key=key), min(b.p, b.q, key=key), key=key)
    hi = min(max(a.p, a.q, key=key), max(b.p, b.q, key=key), key=key)
    return lo if lo == hi else Segment(lo, hi)


def squares_intersect(a: Square, b: Square) -> bool:
    return a.x <= b.x1 and b.x <= a.x1 and a.y <= b.y1 and b.y <= a.y1


def objects_intersect(a: Obj, b: Obj) -> bool:
    if isinstance(a, Square):
        return squares_intersect(a, b)
    return segments_intersect(a, b)


# ------------------------------------------------------------ graph building

def _integer_boxes(boxes):
    """Scale rational boxes to a common integer grid, or None if it overflows."""
    den = 1
    for bx in boxes:
        for c in bx:
            den = math.lcm(den, c.denominator)
    ints = [[int(c * den) for c in bx] for bx in boxes]
    if ints and max(abs(c) for bx in ints for c in bx) >= 1 << 62:
        return None
    return np.array(ints, dtype=np.int64).reshape(-1, 4)


def _box_pairs_sweep(boxes):
    order = sorted(range(len(boxes)), key=lambda i: boxes[i][0])
    for a, i in enumerate(order):
        x0, y0, x1, y1 = boxes[i]
        for j in order[a + 1:]:
            if boxes[j][0] > x1:
                break
            if y0 <= boxes[j][3] and boxes[j][1] <= y1:
                yield (i, j) if i < j else (j, i)


def intersecting_pairs(scene: Scene) -> list[tuple[int, int]]:
    objs = scene.objects
    boxes = [o.bbox() for o in objs]
    boxy = scene.kind == "squares" or all(o.is_point or o.is_horizontal or o.is_vertical for o in objs)
    if boxy:
        # an axis-parallel segment or a square *is* its bounding box
        arr = _integer_boxes(boxes)
        if arr is not None:
            pairs = kernels.box_overlap_pairs(arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3])
            return sorted((min(a, b), max(a, b)) for a, b in pairs.tolist())
        return sorted(_box_pairs_sweep(boxes))
    return sorted(p for p in _box_pairs_sweep(boxes) if objects_intersect(objs[p[0]], objs[p[1]]))


def build_graph(scene: Scene) -> tuple[Graph, dict[int, Obj]]:
    """Intersection graph; vertex ``i`` is object ``i``."""
    g = Graph.from_edges(len(scene), intersecting_pairs(scene))
    return g, dict(enumerate(scene.objects))


def intersection_graph(scene: Scene) -> Graph:
    return build_graph(scene)[0]


def validate_contact(scene: Scene) -> bool:
    """Every shared point of two segments is an endpoint of one of them."""
    if scene.kind != "segments":
        raise ValueError("contact validation needs a segment scene")
    objs = scene.objects
    for i, j in intersecting_pairs(scene):
        hit = segment_intersection(objs[i], objs[j])
        if isinstance(hit, Segment):
            return False
        if hit not in objs[i].endpoints and hit not in objs[j].endpoints:
            return False
    return True


def slope_count(scene: Scene) -> int:
    if scene.kind != "segments":
        raise ValueError("slopes are defined for segment scenes")
    return len({s.slope() for s in scene.objects if not s.is_point})


# ---------------------------------------------------------------- squares

def is_generic(scene: Scene) -> bool:
    """Distinct side lengths and no two squares with collinear sides."""
    sq = scene.objects
    sides = [s.side for s in sq]
    xs = [c for s in sq for c in (s.x, s.x1)]
    ys = [c for s in sq for c in (s.y, s.y1)]
    return len(set(sides)) == len(sides) and len(set(xs)) == len(xs) and len(set(ys)) == len(ys)


def _require_generic(scene: Scene) -> None:
    if scene.kind != "squares":
        raise ValueError("expected a square scene")
    if not is_generic(scene):
        raise ValueError("square scene is not perturbed (repeated side length or aligned sides)")


def perturb_squares(scene: Scene, budget: int = 64) -> Scene:
    """Grow every square by a distinct tiny rational so that sides become
    pairwise distinct and unaligned, keeping the intersection graph."""
    if scene.kind != "squares":
        raise ValueError("expected a square scene")
    if is_generic(scene):
        return scene
    sq = scene.objects
    edges = set(intersecting_pairs(scene))
    gap = None
    for i in range(len(sq)):
        for j in range(i + 1, len(sq)):
            if (i, j) in edges:
                continue
            a, b = sq[i], sq[j]
            sep = max(a.x - b.x1, b.x - a.x1, a.y - b.y1, b.y - a.y1)
            gap = sep if gap is None else min(gap, sep)
    if gap is None:
        gap = min(s.side for s in sq)
    for q in range(2, budget + 2):
        rng = random.Random(q)
        delta = gap / (4 * q)
        out = []
        for s in sq:
            # grow left by a, down by b, side by c >= max(a, b): old box stays inside
            a = Fraction(rng.randint(1, 499), 1009)
            b = Fraction(rng.randint(1, 499), 1009)
            c = Fraction(rng.randint(505, 1008), 1009)
            out.append(Square(s.x - delta * a, s.y - delta * b, s.side + delta * c))
        cand = square_scene(out)
        if is_generic(cand) and set(intersecting_pairs(cand)) == edges:
            return cand
    raise RuntimeError("no graph-preserving perturbation found within the search budget")


def n_minus(scene: Scene, g: Graph, v: int) -> frozenset[int]:
    """Neighbours whose square is strictly smaller."""
    _require_generic(scene)
    side = scene[v].side
    return frozenset(u for u in g.nbrs(v) if scene[u].side < side)


def n_plus(scene: Scene, g: Graph, v: int) -> frozenset[int]:
    side = scene[v].side
    return frozenset(u for u in g.nbrs(v) if scene[u].side > side)


def n_minus_map(scene: Scene, g: Graph) -> dict[int, frozenset[int]]:
    _require_generic(scene)
    return {v: frozenset(u for u in g.nbrs(v) if scene[u].side < scene[v].side) for v in g.vertices}


def occurrence_bound(subnbhd: dict[int, Iterable[int]]) -> int:
    """Largest number of subneighbourhoods any single vertex belongs to."""
    count: dict[int, int] = {}
    for members in subnbhd.values():
        for u in members:
            count[u] = count.get(u, 0) + 1
    return max(count.values(), default=0)


def mu_star(g: Graph, subnbhd: dict[int, Iterable[int]]) -> tuple[int, dict[int, int]]:
    per = {v: max_matching_size(g.induced(subnbhd.get(v, ()))) for v in g.vertices}
    return max(per.values(), default=0), per


@dataclass(frozen=True)
class HIX:
    H: frozenset[int]
    I: frozenset[int]
    X: frozenset[int]


def hix_decomposition(scene: Scene, g: Graph, v: int) -> HIX:
    """H = minimum vertex cover of the smaller-neighbour graph, I its
    complement there (independent), X = H plus the larger neighbours."""
    low = n_minus(scene, g, v)
    H = frozenset(min_vertex_cover(g.induced(low)))
    return HIX(H, low - H, H | n_plus(scene, g, v))


def square_max_clique(scene: Scene) -> tuple[int, ...]:
    """Maximum clique as the deepest point: pairwise-meeting boxes share a point."""
    sq = scene.objects
    if not sq:
        return ()
    best: tuple[int, ...] = ()
    for x in sorted({c for s in sq for c in (s.x, s.x1)}):
        live = [i for i, s in enumerate(sq) if s.x <= x <= s.x1]
        if len(live) <= len(best):
            continue
        # sweep y: openings before closings so touching squares count together
        events = sorted([(sq[i].y, 0, i) for i in live] + [(sq[i].y1, 1, i) for i in live])
        cur: set[int] = set()
        for _, kind, i in events:
            if kind == 0:
                cur.add(i)
                if len(cur) > len(best):
                    best = tuple(sorted(cur))
            else:
                cur.discard(i)
    return best


# ------------------------------------------------------------ contact scenes

@dataclass(frozen=True)
class ContactPoints:
    endpoints: frozenset[Point]
    interior: frozenset[Point]   # interior points where another segment ends
    nontrivial: frozenset[Point]  # ... with enders on both sides
    trivial: frozenset[Point]


def contact_report(scene: Scene, g: Graph | None = None) -> dict[int, ContactPoints]:
    if not validate_contact(scene):
        raise ValueError("scene is not a contact scene")
    g = g if g is not None else intersection_graph(scene)
    objs = scene.objects
    out = {}
    for v, s in enumerate(objs):
        sides: dict[Point, set[int]] = {}
        for u in g.nbrs(v):
            t = objs[u]
            for e in t.endpoints:
                if s.is_point or not in_interior(e, s):
                    continue
                other = t.q if e == t.p else t.p
                sides.setdefault(e, set()).add(orient(s.p, s.q, other))
        nt = frozenset(p for p, ss in sides.items() if 1 in ss and -1 in ss)
        icp = frozenset(sides)
        out[v] = ContactPoints(s.endpoints, icp, nt, icp - nt)
    return out


def n_star_contact(scene: Scene, g: Graph, v: int, report=None) -> frozenset[int]:
    """Neighbours having an endpoint at a two-sided contact point of v."""
    report = report if report is not None else contact_report(scene, g)
    nt = report[v].nontrivial
    return frozenset(u for u in g.nbrs(v) if scene[u].endpoints & nt)


def n_star_map(scene: Scene, g: Graph) -> dict[int, frozenset[int]]:
    rep = contact_report(scene, g)
    return {v: n_star_contact(scene, g, v, rep) for v in g.vertices}


CLIQUE_COUNT_FACTOR = 4


def contact_max_clique(scene: Scene, g: Graph | None = None,
                       factor: int = CLIQUE_COUNT_FACTOR) -> tuple[int, ...]:
    """Exact maximum clique by enumerating maximal cliques; a contact scene
    has O(n^2) of them, so more than ``factor * n^2`` signals bad input."""
    g = g if g is not None else intersection_graph(scene)
    limit = factor * max(1, g.n) ** 2
    best: tuple[int, ...] = ()
    for c in maximal_cliques(g, limit=limit):
        if len(c) > len(best):
            best = c
    return best


def count_maximal_cliques(g: Graph, limit: int | None = None) -> int:
    return sum(1 for _ in maximal_cliques(g, limit=limit))


# ------------------------------------------------------------------- I/O

class SceneFormatError(ValueError):
    pass


def _fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _parse_q(tok: str) -> Fraction:
    num, sep, den = tok.partition("/")
    if not num.lstrip("-").isdigit() or (sep and not den.isdigit()):
        raise ValueError(f"malformed rational {tok!r}")
    if sep and int(den) == 0:
        raise ValueError(f"zero denominator in {tok!r}")
    return Fraction(int(num), int(den) if sep else 1)


def format_scene(scene: Scene) -> str:
    lines = [f"scene {scene.kind} {len(scene)}"]
    for o in scene.objects:
        if isinstance(o, Segment):
            lines.append("SEG " + " ".join(_fmt(c) for c in (*o.p, *o.q)))
        else:
            lines.append("SQR " + " ".join(_fmt(c) for c in (o.x, o.y, o.side)))
    return "\n".join(lines) + "\n"


def parse_scene(text: str) -> Scene:
    kind = None
    count = 0
    objs: list = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].split()
        if not line:
            continue
        try:
            if kind is None:
                if len(line) != 3 or line[0] != "scene" or line[1] not in ("segments", "squares"):
                    raise ValueError("expected 'scene segments|squares <n>'")
                kind, count = line[1], int(line[2])
            elif line[0] == "SEG" and kind == "segments" and len(line) == 5:
                x1, y1, x2, y2 = map(_parse_q, line[1:])
                objs.append(Segment((x1, y1), (x2, y2)))
            elif line[0] == "SQR" and kind == "squares" and len(line) == 4:
                x, y, s = map(_parse_q, line[1:])
                objs.append(Square(x, y, s))
            else:
                raise ValueError(f"unexpected record {' '.join(line)!r}")
        except ValueError as exc:
            raise SceneFormatError(f"line {lineno}: {exc}") from None
    if kind is None:
        raise SceneFormatError("missing scene header")
    if len(objs) != count:
        raise SceneFormatError(f"header announces {count} objects, found {len(objs)}")
    return Scene(kind, tuple(objs))


def read_scene(path) -> Scene:
    with open(path) as fh:
        return parse_scene(fh.read())


def write_scene(scene: Scene, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_scene(scene))

