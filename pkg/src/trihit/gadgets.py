"""Hardness gadgets: k-polygons, the 3-SAT to 2-DIR reduction, crenellation
and an exact checker for the reduction."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import coo_matrix

from .geometry import Point, Scene, Segment, build_graph, on_segment, point, segment_scene
from .graph import Graph, list_triangles

SAT_VAR_CAP = 16


# ---------------------------------------------------------------- formulas

@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for c in self.clauses:
            if not c:
                raise ValueError("empty clause")
            if any(lit == 0 or abs(lit) > self.num_vars for lit in c):
                raise ValueError(f"literal out of range in clause {c}")

    @classmethod
    def of(cls, clauses: Iterable[Iterable[int]], num_vars: int | None = None) -> "CnfFormula":
        cl = tuple(tuple(c) for c in clauses)
        n = num_vars if num_vars is not None else max((abs(x) for c in cl for x in c), default=0)
        return cls(n, cl)

    def satisfied_by(self, assignment: dict[int, bool]) -> bool:
        return all(any(assignment.get(abs(x), False) == (x > 0) for x in c) for c in self.clauses)


def brute_sat(f: CnfFormula) -> dict[int, bool] | None:
    """First satisfying assignment in binary counting order, or None."""
    if f.num_vars > SAT_VAR_CAP:
        raise ValueError(f"exhaustive SAT capped at {SAT_VAR_CAP} variables")
    for bits in itertools.product((False, True), repeat=f.num_vars):
        a = {i + 1: b for i, b in enumerate(bits)}
        if f.satisfied_by(a):
            return a
    return None


def parse_dimacs(text: str) -> CnfFormula:
    n = m = None
    clauses: list[tuple[int, ...]] = []
    cur: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0] in ("c", "%"):
            continue
        if parts[0] == "p":
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"line {lineno}: bad header")
            n, m = int(parts[2]), int(parts[3])
            continue
        if n is None:
            raise ValueError(f"line {lineno}: clause before header")
        for tok in parts:
            lit = int(tok)
            if lit == 0:
                clauses.append(tuple(cur))
                cur = []
            else:
                cur.append(lit)
    if cur:
        clauses.append(tuple(cur))
    if n is None:
        raise ValueError("missing 'p cnf' header")
    if m != len(clauses):
        raise ValueError(f"header announces {m} clauses, found {len(clauses)}")
    return CnfFormula(n, tuple(clauses))


def format_dimacs(f: CnfFormula) -> str:
    lines = [f"p cnf {f.num_vars} {len(f.clauses)}"]
    lines += [" ".join(map(str, c)) + " 0" for c in f.clauses]
    return "\n".join(lines) + "\n"


UNSAT_CORE = ((1, 2), (1, -2), (-1, 2), (-1, -2))


@dataclass(frozen=True)
class Preprocessed:
    formula: CnfFormula
    forced: dict[int, bool]          # variables fixed by unit propagation
    source_vars: int                 # variables 1..source_vars are the input's
    trivially_unsat: bool = False


def preprocess_formula(f: CnfFormula) -> Preprocessed:
    """Drop tautologies and repeated literals, propagate unit clauses, then
    split all-positive / all-negative 3-clauses with a fresh variable.

    A contradiction during propagation yields the four-clause unsatisfiable
    2-CNF on two fresh variables, flagged as trivially unsatisfiable.
    """
    for c in f.clauses:
        if not 1 <= len(c) <= 3:
            raise ValueError(f"clause {c} has size outside 1..3")
    clauses = []
    for c in f.clauses:
        lits = tuple(dict.fromkeys(c))
        if any(-x in lits for x in lits):
            continue
        clauses.append(lits)
    forced: dict[int, bool] = {}
    while True:
        unit = next((c[0] for c in clauses if len(c) == 1), None)
        if unit is None:
            break
        forced[abs(unit)] = unit > 0
        nxt = []
        for c in clauses:
            if unit in c:
                continue
            c = tuple(x for x in c if x != -unit)
            if not c:
                n = f.num_vars
                core = tuple(tuple((abs(x) + n) * (1 if x > 0 else -1) for x in cl) for cl in UNSAT_CORE)
                return Preprocessed(CnfFormula(n + 2, core), forced, f.num_vars, True)
            nxt.append(c)
        clauses = nxt
    out = []
    n = f.num_vars
    for c in clauses:
        if len(c) == 3 and (all(x > 0 for x in c) or all(x < 0 for x in c)):
            n += 1
            sgn = 1 if c[0] > 0 else -1
            out.append((c[0], c[1], -sgn * n))
            out.append((c[2], sgn * n))
        else:
            out.append(c)
    return Preprocessed(CnfFormula(n, tuple(out)), forced, f.num_vars)


def is_preprocessed(f: CnfFormula) -> bool:
    for c in f.clauses:
        if not 2 <= len(c) <= 3 or len({abs(x) for x in c}) != len(c):
            return False
        if len(c) == 3 and (all(x > 0 for x in c) or all(x < 0 for x in c)):
            return False
    return True


# ---------------------------------------------------------------- polygons

@dataclass
class Polygon:
    """Closed rectilinear loop given by its corners; consecutive corners
    alternate horizontal and vertical moves.  ``extensions`` maps a corner to
    a point beyond it on the line of the incident segment collinear with it
    (the free end that reaches a clause point)."""
    corners: list[Point]
    extensions: dict[Point, Point] = field(default_factory=dict)

    def segments(self) -> list[Segment]:
        out = []
        L = len(self.corners)
        for j in range(L):
            a, b = self.corners[j], self.corners[(j + 1) % L]
            out.append(Segment(*self._extend(a, b)))
        return out

    def _extend(self, a: Point, b: Point) -> tuple[Point, Point]:
        for end, other in ((a, b), (b, a)):
            z = self.extensions.get(end)
            if z is not None and _beyond(other, end, z):
                if end is a:
                    a = z
                else:
                    b = z
        return a, b

    def check_shape(self) -> None:
        L = len(self.corners)
        if L < 4 or L % 2:
            raise ValueError("polygon needs an even number (>= 4) of corners")
        for j in range(L):
            a, b = self.corners[j], self.corners[(j + 1) % L]
            horiz = a[1] == b[1] and a[0] != b[0]
            vert = a[0] == b[0] and a[1] != b[1]
            if not (horiz or vert) or horiz != (j % 2 == 0):
                raise ValueError(f"move {j} of polygon is not alternating axis-parallel")


def _beyond(a: Point, b: Point, z: Point) -> bool:
    """Is z on the ray from a through b, strictly past b?"""
    if a[0] == b[0] == z[0]:
        return (b[1] - a[1]) * (z[1] - b[1]) > 0
    if a[1] == b[1] == z[1]:
        return (b[0] - a[0]) * (z[0] - b[0]) > 0
    return False


@dataclass
class ReductionOutput:
    scene: Scene
    k: int
    polygon_map: dict[int, tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]]
    clause_points: dict[int, Point]
    clause_literals: dict[int, tuple[int, ...]]
    extra_points: tuple[int, ...]
    polygons: dict[int, Polygon] = field(repr=False, default_factory=dict)

    @property
    def k_sizes(self) -> dict[int, int]:
        return {v: len(h) for v, (h, _, _) in self.polygon_map.items()}


def _assemble(polygons: dict[int, Polygon], clause_points: dict[int, Point],
              clause_literals: dict[int, tuple[int, ...]]) -> ReductionOutput:
    objs: list[Segment] = []
    pmap = {}
    for var in sorted(polygons):
        poly = polygons[var]
        poly.check_shape()
        segs = poly.segments()
        hs = [s for j, s in enumerate(segs) if j % 2 == 0]
        vs = [s for j, s in enumerate(segs) if j % 2 == 1]
        base = len(objs)
        objs += hs + vs + [Segment(c, c) for c in poly.corners]
        kk = len(hs)
        pmap[var] = (tuple(range(base, base + kk)), tuple(range(base + kk, base + 2 * kk)),
                     tuple(range(base + 2 * kk, base + 4 * kk)))
    extra = []
    for c in sorted(clause_points):
        if len(clause_literals[c]) == 2:
            extra.append(len(objs))
            z = clause_points[c]
            objs.append(Segment(z, z))
    k = sum(len(h) for h, _, _ in pmap.values())
    return ReductionOutput(segment_scene(objs), k, pmap, dict(clause_points), dict(clause_literals),
                           tuple(extra), polygons)


def make_k_polygon(k: int, anchor: Point = (Fraction(0), Fraction(0)), scale=1) -> Scene:
    """A staircase k-polygon: objects are the k horizontal segments, then the
    k vertical ones, then the 2k corner points."""
    if k < 2:
        raise ValueError("k-polygons need k >= 2")
    w = k - 1
    raw = [(0, 0), (w, 0)]
    for j in range(1, k - 1):
        raw += [(w - j + 1, j), (w - j, j)]
    raw += [(1, k - 1), (0, k - 1)]
    sc = Fraction(scale)
    corners = [point(anchor[0] + sc * x, anchor[1] + sc * y) for x, y in raw]
    return _assemble({1: Polygon(corners)}, {}, {}).scene


# ----------------------------------------------------------- the reduction

# local port shapes around z = (X, Y): (lower offset, upper offset, corners, extended corner)
# corners run from the lower corridor's end to the upper corridor's start.
_PORTS = {
    "L": (-2, 0, [(-1, -2), (-1, 0)], (-1, 0)),
    "B": (-6, -4, [(2, -6), (2, -1), (0, -1), (0, -4)], (0, -1)),
    "A": (4, 6, [(0, 4), (0, 1), (3, 1), (3, 6)], (0, 1)),
    "R": (8, 10, [(1, 8), (1, 0), (4, 0), (4, 10)], (1, 0)),
}


def _ports_for(clause: Sequence[int]) -> dict[int, str]:
    pos = [x for x in clause if x > 0]
    neg = [x for x in clause if x < 0]
    out = {}
    for x, name in zip(pos, "BA"):
        out[abs(x)] = name
    for x, name in zip(neg, "LR"):
        out[abs(x)] = name
    return out


def sat_to_2dir(f: CnfFormula) -> ReductionOutput:
    """Concentric rectangles, one per variable, with rectilinear tabs
    running from their right sides to one point per clause.

    A positive literal's tab ends in a vertical segment at the clause point,
    a negative literal's in a horizontal one.  Tab attach heights increase and
    tab columns move left with (clause, variable), which keeps tabs from
    crossing each other; the only crossings are tab attach lines against the
    right sides of outer rectangles and corridors against columns of other
    tabs of the same clause.
    """
    if not is_preprocessed(f):
        raise ValueError("formula is not preprocessed (sizes 2..3, mixed 3-clauses, distinct variables)")
    n = f.num_vars
    tabs = []  # (clause, var, port)
    for c, clause in enumerate(f.clauses):
        ports = _ports_for(clause)
        for var in sorted(ports):
            tabs.append((c, var, ports[var]))
    T = len(tabs)
    top_attach = 2 * (2 * T - 1)

    def R(i):
        return 2 * (i + 1)

    rect = {}
    for var in range(1, n + 1):
        i = var - 1
        rect[var] = (-R(i), -R(i) - 2, R(i), top_attach + R(i) + 2)
    fmax = R(n - 1) + 4 * T + 4
    ybase = top_attach + R(n - 1) + 24
    cells = {c: (fmax + 10 + 12 * c, ybase + 24 * c) for c in range(len(f.clauses))}

    by_var: dict[int, list] = {v: [] for v in range(1, n + 1)}
    for j, (c, var, port) in enumerate(tabs):
        by_var[var].append((j, c, port))

    polygons = {}
    for var in range(1, n + 1):
        x0, y0, x1, y1 = rect[var]
        corners = [(x0, y0), (x1, y0)]
        ext = {}
        for j, c, port in by_var[var]:
            a_lo, a_hi = 4 * j, 4 * j + 2
            f_out = fmax - 4 * j
            f_in = f_out - 2
            X, Y = cells[c]
            lo, hi, local, ext_at = _PORTS[port]
            corners += [(x1, a_lo), (f_out, a_lo), (f_out, Y + lo)]
            corners += [(X + dx, Y + dy) for dx, dy in local]
            corners += [(f_in, Y + hi), (f_in, a_hi), (x1, a_hi)]
            ext[point(X + ext_at[0], Y + ext_at[1])] = point(X, Y)
        corners += [(x1, y1), (x0, y1)]
        polygons[var] = Polygon([point(*p) for p in corners], ext)
    clause_points = {c: point(*cells[c]) for c in cells}
    return _assemble(polygons, clause_points, {c: tuple(cl) for c, cl in enumerate(f.clauses)})


# ------------------------------------------------------------- crenellation

def _coordinate_gap(values: Iterable[Fraction]) -> Fraction:
    vs = sorted(set(values))
    gaps = [b - a for a, b in zip(vs, vs[1:])]
    return min(gaps) if gaps else Fraction(1)


def _crossers(scene: Scene, g: Graph, sid: int, own_corners: set[Point]) -> list[Fraction]:
    """Positions (along the segment) where perpendicular segments cross it
    away from its own corners."""
    s = scene[sid]
    horiz = s.is_horizontal
    out = []
    for u in g.nbrs(sid):
        o = scene[u]
        if o.is_point or o.is_horizontal == horiz:
            continue
        q = (o.p[0], s.p[1]) if horiz else (s.p[0], o.p[1])
        if q in own_corners or q in (s.p, s.q):
            continue
        out.append(q[0] if horiz else q[1])
    return sorted(out)


def _crenellate_phase(r: ReductionOutput, t: int, horizontal: bool) -> ReductionOutput:
    scene = r.scene
    g = build_graph(scene)[0]
    coord = 1 if horizontal else 0  # the coordinate offset by the bumps
    eps = _coordinate_gap(c for s in scene.objects for pt in (s.p, s.q) for c in (pt[coord],)) / 4
    # segment ids per polygon in corner order: move j is H ids[j//2] or V ids[j//2]
    new_polys = {}
    for var, poly in r.polygons.items():
        hs, vs, _ = r.polygon_map[var]
        own = set(poly.corners)
        L = len(poly.corners)
        corners: list[Point] = []
        for j in range(L):
            a, b = poly.corners[j], poly.corners[(j + 1) % L]
            corners.append(a)
            if (j % 2 == 0) != horizontal:
                continue
            sid = (hs if j % 2 == 0 else vs)[j // 2]
            along = 0 if horizontal else 1
            pos = _crossers(scene, g, sid, own)
            ext_a = poly.extensions.get(a) is not None and _beyond(b, a, poly.extensions[a])
            ext_b = poly.extensions.get(b) is not None and _beyond(a, b, poly.extensions[b])
            if len(pos) <= t and not ((ext_a or ext_b) and pos):
                continue
            sgn = 1 if b[along] > a[along] else -1
            lo, hi = a[along], b[along]
            seq = sorted(pos, key=lambda x: sgn * x)
            if any(not (min(lo, hi) < x < max(lo, hi)) for x in seq):
                raise RuntimeError(f"crossing outside the corners of segment {sid}")
            events = [lo] + seq + [hi]
            legs: list[int] = []  # gap index i sits between events[i] and events[i+1]
            if ext_a:
                legs.append(0)
            count = 0
            for i in range(len(seq)):
                count += 1
                if count == t and i < len(seq) - 1:
                    legs.append(i + 1)
                    count = 0
            if ext_b:
                legs.append(len(seq))
            legs = sorted(set(legs))
            spots: list[Fraction] = []
            doubled = len(legs) % 2 == 1
            for gi in legs:
                e0, e1 = events[gi], events[gi + 1]
                if doubled:
                    spots += [e0 + (e1 - e0) / 3, e0 + 2 * (e1 - e0) / 3]
                    doubled = False
                else:
                    spots.append((e0 + e1) / 2)
            fixed = a[coord]
            up = fixed + eps
            level = [fixed, up]
            for n_leg, x in enumerate(spots):
                y_from, y_to = level[n_leg % 2], level[(n_leg + 1) % 2]
                for yy in (y_from, y_to):
                    corners.append((x, yy) if horizontal else (yy, x))
        new_polys[var] = Polygon(corners, dict(poly.extensions))
    return _assemble(new_polys, r.clause_points, r.clause_literals)


def crenellate(r: ReductionOutput, t: int = 2) -> ReductionOutput:
    """Add rectilinear bumps so that no polygon segment is crossed more than
    t times and segments reaching a clause point are not crossed next to it."""
    if t < 2:
        raise ValueError("crenellation needs t >= 2")
    out = _crenellate_phase(r, t, horizontal=True)
    out = _crenellate_phase(out, t, horizontal=False)
    return _integralise(out)


def _integralise(r: ReductionOutput) -> ReductionOutput:
    den = 1
    for s in r.scene.objects:
        for c in (*s.p, *s.q):
            den = math.lcm(den, c.denominator)
    if den == 1:
        return r

    def sc(p: Point) -> Point:
        return (p[0] * den, p[1] * den)

    polys = {v: Polygon([sc(c) for c in p.corners], {sc(a): sc(b) for a, b in p.extensions.items()})
             for v, p in r.polygons.items()}
    return _assemble(polys, {c: sc(z) for c, z in r.clause_points.items()}, r.clause_literals)


# ------------------------------------------------------------ verification

def polygon_violations(r: ReductionOutput, g: Graph | None = None) -> list[str]:
    """Structural checks: every gadget is a k-polygon, and the only
    triangles are polygon corners and one per clause point."""
    g = g if g is not None else build_graph(r.scene)[0]
    bad = []
    owner = {}
    for var, (hs, vs, cs) in r.polygon_map.items():
        for x in (*hs, *vs, *cs):
            owner[x] = var
        h = g.induced((*hs, *vs, *cs))
        for group in (hs, vs):
            for a, b in itertools.combinations(group, 2):
                if h.has_edge(a, b):
                    bad.append(f"variable {var}: parallel segments {a},{b} meet")
        for x in hs:
            if len([u for u in h.nbrs(x) if u in set(vs)]) != 2:
                bad.append(f"variable {var}: horizontal {x} does not meet exactly two verticals")
        for x in vs:
            if len([u for u in h.nbrs(x) if u in set(hs)]) != 2:
                bad.append(f"variable {var}: vertical {x} does not meet exactly two horizontals")
        for x in cs:
            nb = h.nbrs(x)
            if len(nb) != 2 or not (nb & set(hs) and nb & set(vs)):
                bad.append(f"variable {var}: corner {x} is not on one horizontal and one vertical")
    tri = list_triangles(g)
    zs = set(r.clause_points.values())
    per_clause = {c: 0 for c in r.clause_points}
    corner_tris = 0
    for t3 in tri:
        owners = {owner.get(x) for x in t3}
        pts = [r.scene[x] for x in t3 if r.scene[x].is_point]
        if len(owners) == 1 and None not in owners and len(pts) == 1 and pts[0].p not in zs:
            corner_tris += 1
            continue
        common = _common_point(r.scene, t3)
        if common in zs:
            c = next(c for c, z in r.clause_points.items() if z == common)
            per_clause[c] += 1
            continue
        bad.append(f"unexpected triangle {t3}")
    if corner_tris != 2 * r.k:
        bad.append(f"{corner_tris} corner triangles, expected {2 * r.k}")
    for c, cnt in per_clause.items():
        if cnt != 1:
            bad.append(f"clause {c}: {cnt} triangles at its point")
    return bad


def _common_point(scene: Scene, ids) -> Point | None:
    cands = set()
    for i in ids:
        s = scene[i]
        cands |= {s.p, s.q}
    for p in cands:
        if all(on_segment(p, scene[i]) for i in ids):
            return p
    return None


def min_triangle_hitting_milp(g: Graph, time_limit: float = 600.0) -> tuple[int, ...]:
    """Exact minimum triangle hitting set via an integer program (HiGHS)."""

    verts = g.vertices
    idx = {v: i for i, v in enumerate(verts)}
    tris = list_triangles(g)
    if not tris:
        return ()
    rows = np.repeat(np.arange(len(tris)), 3)
    cols = np.array([idx[v] for t in tris for v in t])
    A = coo_matrix((np.ones(len(cols)), (rows, cols)), shape=(len(tris), len(verts))).tocsr()
    res = milp(c=np.ones(len(verts)), constraints=LinearConstraint(A, lb=1, ub=np.inf),
               integrality=np.ones(len(verts)), bounds=Bounds(0, 1),
               options={"time_limit": time_limit, "mip_rel_gap": 0})
    if res.status != 0:
        raise RuntimeError(f"integer program did not finish: {res.message}")
    sol = tuple(v for v, x in zip(verts, res.x) if x > 0.5)
    if list_triangles(g.remove(sol)):
        raise RuntimeError("integer program returned a set that misses a triangle")
    return sol


@dataclass
class ReductionReport:
    satisfiable: bool
    th_at_k: bool
    agree: bool
    k: int
    optimum: int
    assignment: dict[int, bool] | None
    assignment_ok: bool | None
    vertices: int
    max_degree: int

    def as_dict(self) -> dict:
        d = dict(self.__dict__)
        if self.assignment is not None:
            d["assignment"] = {str(k): v for k, v in self.assignment.items()}
        return d


def decode_assignment(r: ReductionOutput, solution: Iterable[int]) -> dict[int, bool]:
    """Vertical segments in the solution mean true, horizontal mean false."""
    S = set(solution)
    out = {}
    for var, (hs, vs, _) in r.polygon_map.items():
        if set(vs) <= S and not S & set(hs):
            out[var] = True
        elif set(hs) <= S and not S & set(vs):
            out[var] = False
        else:
            raise ValueError(f"solution mixes orientations on variable {var}")
    return out


def verify_reduction(f: CnfFormula, r: ReductionOutput, prep: Preprocessed | None = None,
                     var_cap: int = 10, clause_cap: int = 15) -> ReductionReport:
    if f.num_vars > var_cap or len(f.clauses) > clause_cap:
        raise ValueError(f"verification capped at {var_cap} variables / {clause_cap} clauses")
    sat = brute_sat(f) is not None
    g = build_graph(r.scene)[0]
    sol = min_triangle_hitting_milp(g)
    yes = len(sol) <= r.k
    assignment = ok = None
    if yes:
        decoded = decode_assignment(r, sol)
        assignment = {v: decoded.get(v, False) for v in range(1, f.num_vars + 1)}
        if prep is not None:
            assignment.update(prep.forced)
        ok = f.satisfied_by(assignment)
    return ReductionReport(sat, yes, sat == yes, r.k, len(sol), assignment, ok, g.n, g.max_degree())


def reduce_formula(f: CnfFormula, crenellation: int | None = None) -> tuple[Preprocessed, ReductionOutput]:
    prep = preprocess_formula(f)
    r = sat_to_2dir(prep.formula)
    if crenellation is not None:
        r = crenellate(r, crenellation)
    return prep, r
