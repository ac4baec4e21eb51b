"""Triple and double ratios of flags and the coordinate charts of a triangulated polygon."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .errors import DimensionError, GenericityError, PositivityError, SchemaError
from .linalg import (
    Flag,
    FlagTuple,
    cofactor_functional,
    coordinate_flag,
    flag_from_basis,
    format_rational,
    as_scalar,
    nullspace,
    rank,
    wedge_det,
    wedge_of_levels,
)


def triple_indices(m: int):
    """All ``(a, b, c)`` with positive entries summing to ``m``, in lexicographic order."""
    return [(a, b, m - a - b) for a in range(1, m - 1) for b in range(1, m - a)]


def _w(flags, levels):
    return wedge_of_levels(flags, levels)


def _quotient(num, den):
    if den == 0 or num == 0:
        raise GenericityError("vanishing wedge: flags are not generic")
    return num / den


def triple_ratio(f1: Flag, f2: Flag, f3: Flag, a: int, b: int, c: int):
    m = f1.m
    if min(a, b, c) < 1 or a + b + c != m:
        raise DimensionError(f"({a},{b},{c}) is not a positive splitting of {m}")
    fl = (f1, f2, f3)
    return (
        _quotient(_w(fl, (a + 1, b, c - 1)), _w(fl, (a - 1, b, c + 1)))
        * _quotient(_w(fl, (a, b - 1, c + 1)), _w(fl, (a, b + 1, c - 1)))
        * _quotient(_w(fl, (a - 1, b + 1, c)), _w(fl, (a + 1, b - 1, c)))
    )


def double_ratio(f1: Flag, f2: Flag, f3: Flag, f4: Flag, a: int):
    m = f1.m
    if not 1 <= a <= m - 1:
        raise DimensionError(f"double ratio index {a} outside 1..{m - 1}")
    return -(
        _quotient(_w((f1, f3, f2), (m - a - 1, a, 1)), _w((f1, f3, f4), (m - a - 1, a, 1)))
        * _quotient(_w((f1, f3, f4), (m - a, a - 1, 1)), _w((f1, f3, f2), (m - a, a - 1, 1)))
    )


# -- polygons ---------------------------------------------------------------


def _crosses(d1, d2) -> bool:
    a, b = sorted(d1)
    c, d = sorted(d2)
    if len({a, b, c, d}) < 4:
        return False
    return (a < c < b) != (a < d < b)


@dataclass(frozen=True)
class TriangulatedPolygon:
    """Convex polygon with vertices ``0..k-1`` counter-clockwise and oriented diagonals ``(tail, head)``.

    ``preferred`` maps each triangle (sorted vertex triple) to the vertex from
    which its triple ratios are read. Missing entries are filled by
    :func:`default_preferred`.
    """

    k: int
    diagonals: tuple
    preferred: tuple = ()

    def __post_init__(self):
        diags = tuple((int(t), int(h)) for t, h in self.diagonals)
        object.__setattr__(self, "diagonals", diags)
        if self.k < 3:
            raise DimensionError("a polygon needs at least three vertices")
        if len(diags) != self.k - 3:
            raise DimensionError(f"a triangulation of a {self.k}-gon has {self.k - 3} diagonals, got {len(diags)}")
        seen = set()
        for t, h in diags:
            if not (0 <= t < self.k and 0 <= h < self.k) or t == h:
                raise DimensionError(f"bad diagonal {(t, h)}")
            if (h - t) % self.k in (1, self.k - 1):
                raise DimensionError(f"{(t, h)} is a side, not a diagonal")
            key = frozenset((t, h))
            if key in seen:
                raise DimensionError(f"repeated diagonal {(t, h)}")
            seen.add(key)
        for i, d1 in enumerate(diags):
            for d2 in diags[i + 1:]:
                if _crosses(d1, d2):
                    raise DimensionError(f"diagonals {d1} and {d2} cross")
        prefs = dict(default_preferred(self.k, diags))
        for tri, v in dict(self.preferred).items():
            tri = tuple(sorted(tri))
            if tri not in prefs or v not in tri:
                raise DimensionError(f"preferred vertex {v} does not fit triangle {tri}")
            prefs[tri] = v
        object.__setattr__(self, "preferred", tuple(sorted(prefs.items())))

    @property
    def triangles(self) -> list:
        return [tri for tri, _ in self.preferred]

    def preferred_vertex(self, tri) -> int:
        return dict(self.preferred)[tuple(sorted(tri))]

    def oriented_triangle(self, tri) -> tuple:
        """Vertices of ``tri`` in counter-clockwise order starting at its preferred vertex."""
        tri = tuple(sorted(tri))
        p = self.preferred_vertex(tri)
        i = tri.index(p)
        return tri[i:] + tri[:i]

    def quadruple(self, e: int) -> tuple:
        """``(e+, e^l, e-, e^r)`` for diagonal index ``e``."""
        tail, head = self.diagonals[e]
        return diagonal_quadruple(self.k, self.diagonals, tail, head)

    def triangle_index(self, tri) -> int:
        return self.triangles.index(tuple(sorted(tri)))

    def with_preferred(self, updates: Mapping) -> "TriangulatedPolygon":
        prefs = dict(self.preferred)
        for tri, v in updates.items():
            prefs[tuple(sorted(tri))] = v
        return TriangulatedPolygon(self.k, self.diagonals, tuple(prefs.items()))

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "diagonals": [list(d) for d in self.diagonals],
            "preferred": [list(tri) + [v] for tri, v in self.preferred],
        }

    @classmethod
    def from_json(cls, doc) -> "TriangulatedPolygon":
        try:
            k = int(doc["k"])
            diags = tuple(tuple(d) for d in doc["diagonals"])
            prefs = tuple((tuple(p[:3]), p[3]) for p in doc.get("preferred", []))
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise SchemaError("polygon needs 'k' and 'diagonals'", "polygon") from exc
        try:
            return cls(k, diags, prefs)
        except DimensionError as exc:
            raise SchemaError(str(exc), "polygon") from exc


def _edges(k, diagonals):
    edges = {frozenset((i, (i + 1) % k)) for i in range(k)}
    edges.update(frozenset(d) for d in diagonals)
    return edges


def _faces(k, diagonals):
    edges = _edges(k, diagonals)
    out = []
    for i in range(k):
        for j in range(i + 1, k):
            if frozenset((i, j)) not in edges:
                continue
            for l in range(j + 1, k):
                if frozenset((i, l)) in edges and frozenset((j, l)) in edges:
                    out.append((i, j, l))
    return out


def diagonal_quadruple(k, diagonals, tail, head) -> tuple:
    def arc(start, stop):
        out, v = [], (start + 1) % k
        while v != stop:
            out.append(v)
            v = (v + 1) % k
        return set(out)

    left_side, right_side = arc(head, tail), arc(tail, head)
    left = right = None
    for tri in _faces(k, diagonals):
        if head in tri and tail in tri:
            (third,) = set(tri) - {head, tail}
            if third in left_side:
                left = third
            elif third in right_side:
                right = third
    if left is None or right is None:
        raise DimensionError(f"({tail},{head}) is not a diagonal of the triangulation")
    return head, left, tail, right


def default_preferred(k, diagonals):
    """Preferred vertex per triangle: head of the first listed diagonal bounding it, else vertex 0."""
    out = []
    for tri in _faces(k, diagonals):
        choice = None
        for t, h in diagonals:
            if t in tri and h in tri:
                choice = h
                break
        out.append((tri, tri[0] if choice is None else choice))
    return out


def flip_polygon(poly: TriangulatedPolygon, e: int) -> TriangulatedPolygon:
    """Replace diagonal ``e`` by ``f`` with ``(f+, f^l, f-, f^r) = (e^l, e-, e^r, e+)``.

    Both new triangles read their triple ratios from ``f+``; other markers are kept.
    """
    ep, el, em, er = poly.quadruple(e)
    diags = list(poly.diagonals)
    diags[e] = (er, el)
    old = {tri: v for tri, v in poly.preferred if not ({ep, em} <= set(tri) and (el in tri or er in tri))}
    old[tuple(sorted((el, em, er)))] = el
    old[tuple(sorted((el, er, ep)))] = el
    return TriangulatedPolygon(poly.k, tuple(diags), tuple(old.items()))


# -- charts -----------------------------------------------------------------


@dataclass(frozen=True)
class ChartCoordinates:
    """Double ratios per diagonal and triple ratios per triangle of one triangulation."""

    polygon: TriangulatedPolygon
    m: int
    edges: Mapping = field(default_factory=dict)  # diagonal index -> (D^1, ..., D^{m-1})
    triangles: Mapping = field(default_factory=dict)  # triangle index -> {(a,b,c): T}

    def values(self):
        for ds in self.edges.values():
            yield from ds
        for ts in self.triangles.values():
            yield from ts.values()

    def is_positive(self) -> bool:
        return all(v > 0 for v in self.values())

    def __eq__(self, other):
        if not isinstance(other, ChartCoordinates):
            return NotImplemented
        return (
            self.polygon == other.polygon
            and self.m == other.m
            and {i: tuple(v) for i, v in self.edges.items()} == {i: tuple(v) for i, v in other.edges.items()}
            and {i: dict(v) for i, v in self.triangles.items()} == {i: dict(v) for i, v in other.triangles.items()}
        )

    def __hash__(self):
        return hash((self.polygon, self.m))

    def triple(self, tri, abc, preferred=None):
        """Triple ratio of ``tri`` read from ``preferred`` (rotating indices if needed)."""
        tri = tuple(sorted(tri))
        stored_from = self.polygon.preferred_vertex(tri)
        table = self.triangles[self.polygon.triangle_index(tri)]
        if preferred is None or preferred == stored_from:
            return table[abc]
        shift = (self.polygon.oriented_triangle(tri).index(preferred)) % 3
        return table[rotate_index(abc, shift)]

    def to_json(self) -> dict:
        edges = {}
        for i, ds in sorted(self.edges.items()):
            for a, d in enumerate(ds, start=1):
                edges[f"e{i}.a{a}"] = format_rational(d)
        tris = {}
        for i, ts in sorted(self.triangles.items()):
            for (a, b, c), t in sorted(ts.items()):
                tris[f"t{i}.{a}{b}{c}"] = format_rational(t)
        return {"m": self.m, "polygon": self.polygon.to_json(), "coordinates": {"edges": edges, "triangles": tris}}

    @classmethod
    def from_json(cls, doc) -> "ChartCoordinates":
        if not isinstance(doc, dict):
            raise SchemaError("chart must be an object")
        poly = TriangulatedPolygon.from_json(doc.get("polygon", {}))
        try:
            m = int(doc["m"])
            coords = doc["coordinates"]
            raw_edges, raw_tris = coords.get("edges", {}), coords.get("triangles", {})
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise SchemaError("chart needs 'm' and 'coordinates'") from exc
        if m > 9:
            raise SchemaError("triangle keys are single-digit; m <= 9 supported", "m")
        edges = {}
        for i in range(len(poly.diagonals)):
            vals = []
            for a in range(1, m):
                key = f"e{i}.a{a}"
                if key not in raw_edges:
                    raise SchemaError(f"missing {key}", "coordinates.edges")
                vals.append(as_scalar(raw_edges[key]))
            edges[i] = tuple(vals)
        tris = {}
        for i in range(len(poly.triangles)):
            table = {}
            for abc in triple_indices(m):
                key = f"t{i}." + "".join(map(str, abc))
                if key not in raw_tris:
                    raise SchemaError(f"missing {key}", "coordinates.triangles")
                table[abc] = as_scalar(raw_tris[key])
            tris[i] = table
        return cls(poly, m, edges, tris)


def rotate_index(abc, shift):
    """Index under which a triple ratio is stored when read from a rotated vertex.

    ``T^{abc}(F1,F2,F3) = T^{bca}(F2,F3,F1)``: reading from the next vertex
    (``shift=1``) the value ``T^{xyz}(F2,F3,F1)`` equals ``T^{zxy}(F1,F2,F3)``.
    """
    out = tuple(abc)
    for _ in range(shift % 3):
        x, y, z = out
        out = (z, x, y)
    return out


def chart_coordinates(t: FlagTuple, poly: TriangulatedPolygon) -> ChartCoordinates:
    if t.k != poly.k:
        raise DimensionError(f"{t.k} flags for a {poly.k}-gon")
    m = t.m
    edges = {}
    for i in range(len(poly.diagonals)):
        ep, el, em, er = poly.quadruple(i)
        edges[i] = tuple(double_ratio(t[ep], t[el], t[em], t[er], a) for a in range(1, m))
    tris = {}
    for i, tri in enumerate(poly.triangles):
        x, y, z = poly.oriented_triangle(tri)
        tris[i] = {abc: triple_ratio(t[x], t[y], t[z], *abc) for abc in triple_indices(m)}
    return ChartCoordinates(poly, m, edges, tris)


def is_positive_tuple(t: FlagTuple, poly: TriangulatedPolygon) -> bool:
    try:
        return chart_coordinates(t, poly).is_positive()
    except GenericityError:
        return False


def direct_flip_coordinates(t: FlagTuple, poly: TriangulatedPolygon, e: int) -> ChartCoordinates:
    """Coordinates of the flipped triangulation, recomputed from the flags."""
    return chart_coordinates(t, flip_polygon(poly, e))


# -- reconstruction ---------------------------------------------------------


def _linear_wedge(flags, levels, new_index, prefix, m):
    """Wedge with the top vector of flag ``new_index`` left free: returns a functional."""
    vecs = []
    for j, (f, a) in enumerate(zip(flags, levels)):
        if j == new_index:
            vecs.extend(prefix[: a - 1])
            vecs_new_pos = len(vecs)
        else:
            vecs.extend(f.vectors(a))
    # move the free slot to the end; the sign change is common to both sides of
    # every equation only if tracked, so compute it explicitly
    sign = (-1) ** (len(vecs) - vecs_new_pos)
    coeffs = cofactor_functional(vecs, m)
    return tuple(sign * c for c in coeffs)


def _extend(prefix, equations, m):
    """Pick the vector completing ``prefix`` that satisfies the homogeneous equations."""
    space = nullspace(equations, m)
    for v in space:
        if rank(list(prefix) + [v]) == len(prefix) + 1:
            candidates = [v]
            break
    else:
        raise GenericityError("no admissible direction: coordinates are degenerate")
    if rank(list(prefix) + space) != len(prefix) + 1:
        raise GenericityError("direction not unique: coordinates are degenerate")
    return candidates[0]


def _triangle_equations(flags, slot, level, values, m, prefix):
    """Equations fixing level ``level`` of ``flags[slot]`` from the triple ratios ``values``.

    ``values`` maps ``(a,b,c)`` to ``T^{abc}(flags[0], flags[1], flags[2])``.
    """
    eqs = []
    x = level - 1  # index of the unknown flag in the triple ratio
    for abc, value in values.items():
        if abc[slot] != x:
            continue
        a, b, c = abc
        # T = (N1/D1) (N2/D2) (N3/D3); the unknown top vector appears in exactly
        # one numerator and one denominator, each linearly
        factors = [((a + 1, b, c - 1), (a - 1, b, c + 1)), ((a, b - 1, c + 1), (a, b + 1, c - 1)), ((a - 1, b + 1, c), (a + 1, b - 1, c))]
        const = value
        lin_num = lin_den = None
        for num, den in factors:
            for levels, is_num in ((num, True), (den, False)):
                if levels[slot] == level:
                    lin = _linear_wedge(flags, levels, slot, prefix, m)
                    if is_num:
                        lin_num = lin
                    else:
                        lin_den = lin
                else:
                    w = _w_partial(flags, levels, slot, prefix)
                    if w == 0:
                        raise GenericityError("degenerate partial configuration")
                    const = const * w if not is_num else const / w
        # T * (known dens) / (known nums) * D_lin(w) = N_lin(w)
        eqs.append(tuple(const * d - n for n, d in zip(lin_num, lin_den)))
    return eqs


def _w_partial(flags, levels, slot, prefix):
    vecs = []
    for j, (f, a) in enumerate(zip(flags, levels)):
        vecs.extend(prefix[:a] if j == slot else f.vectors(a))
    return wedge_det(vecs, len(vecs))


def _build_vertex_flag(flags, slot, values, m, first_vector):
    """Complete a flag at position ``slot`` of a triangle from its triple ratios."""
    prefix = [first_vector]
    for level in range(2, m):
        eqs = _triangle_equations(flags, slot, level, values, m, prefix)
        prefix.append(_extend(prefix, eqs, m))
    # top vector: anything completing the basis
    for i in range(m):
        unit = tuple(Fraction(int(i == j)) for j in range(m))
        if rank(prefix + [unit]) == m:
            prefix.append(unit)
            break
    return flag_from_basis(prefix)


def _double_ratio_line(fp, fl, fm, fr, unknown, ds, m):
    """First basis vector of the unknown flag (position ``'l'`` or ``'r'``) from double ratios."""
    eqs = []
    for a in range(1, m):
        d = ds[a - 1]
        # D = -(A2/A4)(B4/B2) with A_x = f+^{m-a-1} ^ f-^a ^ x, B_x = f+^{m-a} ^ f-^{a-1} ^ x
        a_fun = cofactor_functional(list(fp.vectors(m - a - 1)) + list(fm.vectors(a)), m)
        b_fun = cofactor_functional(list(fp.vectors(m - a)) + list(fm.vectors(a - 1)), m)
        dot = lambda fun, v: sum(x * y for x, y in zip(fun, v))
        if unknown == "r":
            x2 = fl.basis[0]
            a2, b2 = dot(a_fun, x2), dot(b_fun, x2)
            # d * A4 * B2 = -A2 * B4
            eqs.append(tuple(d * b2 * p + a2 * q for p, q in zip(a_fun, b_fun)))
        else:
            x4 = fr.basis[0]
            a4, b4 = dot(a_fun, x4), dot(b_fun, x4)
            # d * A4 * B2 = -A2 * B4
            eqs.append(tuple(d * a4 * q + b4 * p for p, q in zip(a_fun, b_fun)))
    space = nullspace(eqs, m)
    if len(space) != 1:
        raise GenericityError("double ratios do not determine a unique line")
    return space[0]


def reconstruct_configuration(c: ChartCoordinates) -> FlagTuple:
    """Build flags realising the chart exactly, starting from a normalised first triangle.

    The first triangle ``(x, y, z)`` (read from its preferred vertex) is placed
    with ``F_x`` the ascending coordinate flag, ``F_z`` the descending one and
    ``F_y`` through ``(1, -1, 1, ...)``. Every further flag is found level by
    level: each level is cut out by equations that are linear in the new basis
    vector, so the construction stays inside the rationals.
    """
    if not c.is_positive():
        raise PositivityError("reconstruction requires positive coordinates")
    poly, m = c.polygon, c.m
    flags: dict[int, Flag] = {}
    tris = poly.triangles
    first = tris[0]
    x, y, z = poly.oriented_triangle(first)
    flags[x] = coordinate_flag(m)
    flags[z] = coordinate_flag(m, descending=True)
    alt = tuple(Fraction((-1) ** i) for i in range(m))
    values = c.triangles[0]
    flags[y] = _build_vertex_flag((flags[x], None, flags[z]), 1, values, m, alt)
    done = {first}
    while len(done) < len(tris):
        progressed = False
        for i, (tail, head) in enumerate(poly.diagonals):
            ep, el, em, er = poly.quadruple(i)
            t_left = tuple(sorted((ep, el, em)))
            t_right = tuple(sorted((ep, em, er)))
            if (t_left in done) == (t_right in done):
                continue
            new_tri = t_right if t_left in done else t_left
            new_vertex = er if t_left in done else el
            line = _double_ratio_line(
                flags[ep], flags.get(el), flags[em], flags.get(er), "r" if t_left in done else "l", c.edges[i], m
            )
            rot = poly.oriented_triangle(new_tri)
            slot = rot.index(new_vertex)
            triple = tuple(flags.get(v) for v in rot)
            values = c.triangles[poly.triangle_index(new_tri)]
            flags[new_vertex] = _build_vertex_flag(triple, slot, values, m, line)
            done.add(new_tri)
            progressed = True
        if not progressed:
            raise DimensionError("triangulation is not connected")
    return FlagTuple(tuple(flags[v] for v in range(poly.k)))
