"""The quiver Q0(e) of a diagonal, its mutations, and flips realised as mutation sequences.

Vertices are 4-tuples ``(a, b, c, d)`` with ``a + b + c + d = m`` and
``c == 0 or d == 0``. The first triangle ``(e+, e^l, e-)`` carries the points
with ``d == 0``, the second ``(e+, e-, e^r)`` those with ``c == 0``, and the
diagonal is ``c == d == 0``.

It is often easier to think of the parallelogram as the square grid
``{0..m}^2`` through ``(u, v) = (a + c, a + d)``. Its corners are ``e-`` at
``(0, 0)``, ``e^l`` at ``(m, 0)``, ``e+`` at ``(m, m)`` and ``e^r`` at ``(0, m)``.

Weights may be any type supporting ``1 + x``, ``*``, ``/`` and integer powers,
so the same engine runs on Fractions, mpmath floats and the symbolic
exponential sums of :mod:`flagforge.tropical`.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from .charts import ChartCoordinates, TriangulatedPolygon, flip_polygon, triple_indices
from .errors import DimensionError, NotMutableError, PositivityError, SchemaError
from .linalg import as_scalar, format_rational

CORNERS = ("+", "l", "-", "r")


# -- vertices ---------------------------------------------------------------


def quiver_vertices(m: int) -> list:
    out = set()
    for a in range(m + 1):
        for b in range(m + 1 - a):
            r = m - a - b
            out.add((a, b, r, 0))
            out.add((a, b, 0, r))
    return sorted(out)


def is_interior(v) -> bool:
    return v[0] > 0 and v[1] > 0


def is_diagonal(v) -> bool:
    return v[2] == 0 and v[3] == 0


def interior_vertices(m: int) -> list:
    return [v for v in quiver_vertices(m) if is_interior(v)]


def stratum(v) -> int:
    return v[2] + v[3]


def to_square(v) -> tuple:
    a, b, c, d = v
    return a + c, a + d


def from_square(u: int, v: int, m: int) -> tuple:
    c, d, a = max(u - v, 0), max(v - u, 0), min(u, v)
    return a, m - a - c - d, c, d


def corner_square(name: str, m: int) -> tuple:
    return {"-": (0, 0), "l": (m, 0), "+": (m, m), "r": (0, m)}[name]


def side_vertices(m: int, tail: str, head: str) -> list:
    """Lattice points strictly inside the side from corner ``tail`` to ``head``, tail first."""
    (u0, v0), (u1, v1) = corner_square(tail, m), corner_square(head, m)
    if abs(u1 - u0) + abs(v1 - v0) != m:
        raise DimensionError(f"{tail}{head} is not a side of the quadrilateral")
    return [from_square(u0 + (u1 - u0) * j // m, v0 + (v1 - v0) * j // m, m) for j in range(1, m)]


def rotate_label(v, m: int) -> tuple:
    """Label of ``v`` with respect to the flipped diagonal (a quarter turn of the square)."""
    u, w = to_square(v)
    return from_square(m - w, u, m)


def parse_vertex(key: str) -> tuple:
    try:
        v = tuple(int(x) for x in key.split(","))
    except ValueError as exc:
        raise SchemaError(f"bad vertex key {key!r}") from exc
    if len(v) != 4:
        raise SchemaError(f"bad vertex key {key!r}")
    return v


def vertex_key(v) -> str:
    return ",".join(map(str, v))


# -- arrows -----------------------------------------------------------------


def initial_arrows(m: int) -> dict:
    """Skew-symmetric arrow counts of the initial quiver, keyed ``(v, w)`` with positive values.

    Every upward unit triangle of each triangle lattice contributes a cyclic
    triple of arrows. Arrows along the diagonal cancel between the two
    triangles and are dropped, as are arrows joining two frozen vertices.
    """

    def t1(i, j, k):
        return (i, k, j, 0)

    def t2(i, j, k):
        return (i, j, 0, k)

    b: dict = {}
    for conv in (t1, t2):
        for i in range(m):
            for j in range(m - i):
                k = m - 1 - i - j
                p = (conv(i + 1, j, k), conv(i, j + 1, k), conv(i, j, k + 1))
                for x, y in ((p[0], p[1]), (p[1], p[2]), (p[2], p[0])):
                    if is_diagonal(x) and is_diagonal(y):
                        continue
                    if not (is_interior(x) or is_interior(y)):
                        continue
                    b[(x, y)] = b.get((x, y), 0) + 1
                    b[(y, x)] = b.get((y, x), 0) - 1
    return {k: n for k, n in b.items() if n > 0}


def _skew(arrows: Mapping) -> dict:
    b = {}
    for (x, y), n in arrows.items():
        b[(x, y)] = b.get((x, y), 0) + n
        b[(y, x)] = b.get((y, x), 0) - n
    return b


def mutate_arrows(arrows: Mapping, v) -> dict:
    """Arrow update of a mutation at ``v``; 2-loops cancel immediately."""
    b = _skew(arrows)
    nbrs = {x for (x, y) in b if y == v and b[(x, v)] != 0}
    out = {}
    for (x, y), n in b.items():
        if x == v or y == v:
            out[(x, y)] = -n
        else:
            out[(x, y)] = n
    for x in nbrs:
        for y in nbrs:
            if x == y:
                continue
            bxv, bvy = b.get((x, v), 0), b.get((v, y), 0)
            delta = (abs(bxv) * bvy + bxv * abs(bvy)) // 2
            if delta:
                out[(x, y)] = out.get((x, y), 0) + delta
    return {k: n for k, n in out.items() if n > 0}


# -- quiver -----------------------------------------------------------------


@dataclass(frozen=True)
class Quiver:
    """Weighted quiver on the vertices of Q0 for dimension ``m``.

    ``weights`` holds every interior vertex and, optionally, frozen vertices on
    the sides; ``arrows`` maps ``(v, w)`` to a positive multiplicity.
    """

    m: int
    weights: tuple
    arrows: tuple

    @classmethod
    def make(cls, m: int, weights: Mapping, arrows: Mapping) -> "Quiver":
        return cls(m, tuple(sorted(weights.items())), tuple(sorted((k, n) for k, n in arrows.items() if n > 0)))

    @property
    def weight_map(self) -> dict:
        return dict(self.weights)

    @property
    def arrow_map(self) -> dict:
        return dict(self.arrows)

    def weight(self, v):
        return self.weight_map[v]

    def b(self, v, w) -> int:
        arr = self.arrow_map
        return arr.get((v, w), 0) - arr.get((w, v), 0)

    def vertices(self) -> list:
        return quiver_vertices(self.m)

    def to_json(self) -> dict:
        return {
            "schema": "flagforge/v1",
            "m": self.m,
            "weights": {vertex_key(v): _fmt(x) for v, x in self.weights},
            "arrows": [[vertex_key(x), vertex_key(y), n] for (x, y), n in self.arrows],
        }

    @classmethod
    def from_json(cls, doc) -> "Quiver":
        try:
            m = int(doc["m"])
            weights = {parse_vertex(k): as_scalar(x) for k, x in doc["weights"].items()}
            arrows = {(parse_vertex(x), parse_vertex(y)): int(n) for x, y, n in doc["arrows"]}
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise SchemaError("quiver needs 'm', 'weights' and 'arrows'") from exc
        return cls.make(m, weights, arrows)


def _fmt(x) -> str:
    try:
        return format_rational(x)
    except (TypeError, ValueError):
        return str(x)


def _check_positive(x, what):
    try:
        bad = not x > 0
    except TypeError:
        return
    if bad:
        raise PositivityError(f"{what} must be positive, got {x}")


def quadrilateral_weights(c: ChartCoordinates, e: int) -> dict:
    """Interior weights of Q0(e) read off a chart containing diagonal ``e``."""
    m, poly = c.m, c.polygon
    ep, el, em, er = poly.quadruple(e)
    t1 = (ep, el, em)
    t2 = (ep, em, er)
    out = {}
    for v in interior_vertices(m):
        a, b, cc, d = v
        if cc == 0 and d == 0:
            x = c.edges[e][b - 1]
        elif d == 0:
            x = c.triple(t1, (a, cc, b), preferred=ep)
        else:
            x = c.triple(t2, (a, b, d), preferred=ep)
        _check_positive(x, f"weight at {v}")
        out[v] = x
    return out


def boundary_sides(poly: TriangulatedPolygon, e: int) -> list:
    """Sides of the quadrilateral around ``e`` that are diagonals of ``poly``.

    Returns ``(diagonal index, tail corner, head corner)`` triples.
    """
    ep, el, em, er = poly.quadruple(e)
    name = {ep: "+", el: "l", em: "-", er: "r"}
    out = []
    for i, (t, h) in enumerate(poly.diagonals):
        if i != e and t in name and h in name:
            out.append((i, name[t], name[h]))
    return out


def side_weights(m: int, tail: str, head: str, doubles) -> dict:
    """Frozen weights for a side carrying ``D^1..D^{m-1}``: the point j steps from the tail gets ``D^{m-j}``."""
    return {v: doubles[m - j - 1] for j, v in enumerate(side_vertices(m, tail, head), start=1)}


def read_side(q: Quiver, tail: str, head: str) -> tuple:
    """Inverse of :func:`side_weights`: the tuple ``(D^1, ..., D^{m-1})`` stored on a side."""
    w = q.weight_map
    pts = side_vertices(q.m, tail, head)
    return tuple(w[pts[q.m - a - 1]] for a in range(1, q.m))


def build_quiver(c: ChartCoordinates, e: int = 0, boundary: bool = True) -> Quiver:
    """Q0(e) weighted by the chart; sides that are diagonals get frozen weights."""
    m = c.m
    weights = quadrilateral_weights(c, e)
    if boundary:
        for i, tail, head in boundary_sides(c.polygon, e):
            for v, x in side_weights(m, tail, head, c.edges[i]).items():
                _check_positive(x, f"boundary weight at {v}")
                weights[v] = x
    return Quiver.make(m, weights, initial_arrows(m))


# -- mutation ---------------------------------------------------------------


def _require_mutable(q: Quiver, v):
    if len(v) != 4 or sum(v) != q.m or not is_interior(v) or (v[2] and v[3]):
        raise NotMutableError(f"{v} is not an interior vertex for m={q.m}")


def mutate_vertex(q: Quiver, v) -> Quiver:
    """Mutation at an interior vertex: weights by the ``(1 + X)`` rule, then arrows."""
    v = tuple(v)
    _require_mutable(q, v)
    w = q.weight_map
    x = w[v]
    new = dict(w)
    for u in w:
        if u == v:
            continue
        n = q.b(v, u)
        if n > 0:
            new[u] = w[u] * (1 + x) ** n
        elif n < 0:
            new[u] = w[u] * (x / (1 + x)) ** (-n)
    new[v] = 1 / x
    return Quiver.make(q.m, new, mutate_arrows(q.arrow_map, v))


def stratum_members(q: Quiver, s: int, level: int = 0) -> list:
    """Interior vertices with ``c + d == s`` and ``a, b > level``."""
    return [v for v in interior_vertices(q.m) if stratum(v) == s and v[0] > level and v[1] > level]


def stratum_mutation(q: Quiver, s: int, level: int = 0, order=None, mutate: Callable = mutate_vertex) -> Quiver:
    """Mutate at every vertex of a stratum. ``order`` may permute them; the result does not depend on it."""
    members = stratum_members(q, s, level)
    if order is not None:
        if sorted(order) != members:
            raise DimensionError("order must be a permutation of the stratum")
        members = list(order)
    for v in members:
        q = mutate(q, v)
    return q


def shuffled_stratum(q: Quiver, s: int, rng: random.Random, level: int = 0) -> list:
    members = stratum_members(q, s, level)
    rng.shuffle(members)
    return members


def flip_sequence(q: Quiver, mutate: Callable = mutate_vertex, prune: bool = True) -> Quiver:
    """Run the nested stratum mutations of a flip, labels still relative to ``e``.

    Round ``r`` (1-based) mutates the vertices with ``a, b >= r`` stratum by
    stratum, ``s = 0..m-2r``, and then drops arrows with neither end in the
    next, smaller region.
    """
    m = q.m
    for r in range(1, m // 2 + 1):
        for s in range(0, m - 2 * r + 1):
            q = stratum_mutation(q, s, level=r - 1, mutate=mutate)
        if prune:
            kept = {
                (x, y): n
                for (x, y), n in q.arrow_map.items()
                if (x[0] > r and x[1] > r) or (y[0] > r and y[1] > r)
            }
            q = Quiver.make(m, q.weight_map, kept)
    return q


def flip_transform(q: Quiver, mutate: Callable = mutate_vertex) -> Quiver:
    """Flip the diagonal: mutate, then relabel with respect to the new diagonal.

    The arrows of the result are the initial pattern of the new quiver, which
    is what the unpruned mutation sequence produces after relabelling.
    """
    out = flip_sequence(q, mutate)
    m = q.m
    weights = {rotate_label(v, m): x for v, x in out.weight_map.items()}
    return Quiver.make(m, weights, initial_arrows(m))


def boundary_propagation(q: Quiver, sides: Mapping, mutate: Callable = mutate_vertex) -> dict:
    """New double ratios of quadrilateral sides after flipping the diagonal.

    ``sides`` maps ``(tail, head)`` corner names to ``(D^1, ..., D^{m-1})`` of
    that polygon edge. The result has the same keys. Sides not listed are
    untouched and do not appear.
    """
    m = q.m
    weights = q.weight_map
    for (tail, head), doubles in sides.items():
        weights.update(side_weights(m, tail, head, doubles))
    out = flip_sequence(Quiver.make(m, weights, q.arrow_map), mutate)
    return {key: read_side(out, *key) for key in sides}


def chart_from_flipped(c: ChartCoordinates, e: int, flipped: Quiver) -> ChartCoordinates:
    """Assemble the flipped chart from the flipped quiver and the untouched coordinates."""
    m, poly = c.m, c.polygon
    new_poly = flip_polygon(poly, e)
    fp, fl, fm, fr = new_poly.quadruple(e)
    w = flipped.weight_map
    edges = dict(c.edges)
    edges[e] = tuple(w[(m - a, a, 0, 0)] for a in range(1, m))
    # sides are read in the new frame, whose corners are the flipped quadruple
    name = {fp: "+", fl: "l", fm: "-", fr: "r"}
    for i, (t, h) in enumerate(new_poly.diagonals):
        if i != e and t in name and h in name:
            edges[i] = read_side(flipped, name[t], name[h])
    t1 = tuple(sorted((fp, fl, fm)))
    t2 = tuple(sorted((fp, fm, fr)))
    tris = {}
    for i, tri in enumerate(new_poly.triangles):
        if tri == t1:
            tris[i] = {(a, b, cc): w[(a, cc, b, 0)] for a, b, cc in triple_indices(m)}
        elif tri == t2:
            tris[i] = {(a, b, d): w[(a, b, 0, d)] for a, b, d in triple_indices(m)}
        else:
            tris[i] = dict(c.triangles[poly.triangle_index(tri)])
    for tri in (t1, t2):
        if new_poly.preferred_vertex(tri) != fp:
            raise DimensionError("flipped triangles must read from the new diagonal's head")
    return ChartCoordinates(new_poly, m, edges, tris)


def flip_via_mutations(c: ChartCoordinates, e: int) -> ChartCoordinates:
    """Chart of the flipped triangulation computed by cluster mutations only."""
    return chart_from_flipped(c, e, flip_transform(build_quiver(c, e)))


def random_positive_quiver(m: int, rng: random.Random, hi: int = 9) -> Quiver:
    from fractions import Fraction

    weights = {v: Fraction(rng.randint(1, hi), rng.randint(1, hi)) for v in interior_vertices(m)}
    return Quiver.make(m, weights, initial_arrows(m))


def arrows_equal(a: Mapping, b: Mapping) -> bool:
    return {k: n for k, n in a.items() if n} == {k: n for k, n in b.items() if n}


def relabel_arrows(arrows: Mapping, m: int, only: Iterable | None = None) -> dict:
    keep = set(only) if only is not None else None
    out = {}
    for (x, y), n in arrows.items():
        if keep is not None and not (x in keep and y in keep):
            continue
        out[(rotate_label(x, m), rotate_label(y, m))] = n
    return out
