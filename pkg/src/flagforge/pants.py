"""Pants decompositions, the standard lamination, length relations and tree-type verdicts.

Each pair of pants has boundaries ``(g_1, g_2, g_3)`` oriented with the pants
on their left, and open leaves ``(e_1, e_2, e_3)`` where ``e_i`` spirals
around ``g_{i-1}`` and ``g_{i+1}`` and is oriented towards ``g_{i+1}``.
Coordinates are sequences given by their exponents (:class:`GrowthPoly`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from . import cluster
from .charts import triple_indices
from .errors import HypothesisError, SchemaError, TopologyError
from .tropical import GrowthPoly, ScaledLimit, ScalingSequence, ZERO, edge_correction, limit_of, tropical_flip

SCHEMA = "flagforge/v1"


@dataclass(frozen=True)
class Pants:
    name: str
    boundaries: tuple  # (g1, g2, g3)
    leaves: tuple  # (e1, e2, e3)
    triangles: tuple = ("t", "t'")


@dataclass(frozen=True)
class PantsDecomposition:
    genus: int
    pants: tuple
    gluing: tuple  # pairs (g, h) with h = g^-1

    def __post_init__(self):
        g = self.genus
        if g < 2:
            raise TopologyError("pants decompositions need genus at least 2")
        if len(self.pants) != 2 * g - 2:
            raise TopologyError(f"genus {g} needs {2 * g - 2} pants, got {len(self.pants)}")
        if len(self.gluing) != 3 * g - 3:
            raise TopologyError(f"genus {g} needs {3 * g - 3} closed curves, got {len(self.gluing)}")
        labels = [b for p in self.pants for b in p.boundaries]
        if len(set(labels)) != len(labels):
            raise TopologyError("boundary labels must be distinct")
        glued = [b for pair in self.gluing for b in pair]
        if sorted(glued) != sorted(labels):
            raise TopologyError("every boundary must be glued to exactly one other boundary")
        leaves = [e for p in self.pants for e in p.leaves]
        if len(set(leaves)) != len(leaves):
            raise TopologyError("leaf names must be distinct")

    def pants_named(self, name: str) -> Pants:
        for p in self.pants:
            if p.name == name:
                return p
        raise TopologyError(f"no pants named {name!r}")

    def owner(self, boundary: str) -> Pants:
        for p in self.pants:
            if boundary in p.boundaries:
                return p
        raise TopologyError(f"no boundary named {boundary!r}")

    def partner(self, boundary: str) -> str:
        for g, h in self.gluing:
            if boundary == g:
                return h
            if boundary == h:
                return g
        raise TopologyError(f"boundary {boundary!r} is not glued")

    def self_glued(self) -> list:
        """Closed curves whose two sides lie in the same pants."""
        return [(g, h) for g, h in self.gluing if self.owner(g).name == self.owner(h).name]


@dataclass(frozen=True)
class Leaf:
    name: str
    pants: str
    index: int  # 0-based i of e_{i+1}
    towards: str
    spirals: tuple


def standard_lamination(pd: PantsDecomposition) -> dict:
    """Open leaves of the standard lamination, keyed by name, plus the closed leaves."""
    leaves = {}
    for p in pd.pants:
        g = p.boundaries
        for i, name in enumerate(p.leaves):
            leaves[name] = Leaf(name, p.name, i, g[(i + 1) % 3], (g[(i - 1) % 3], g[(i + 1) % 3]))
    return {"open": leaves, "closed": tuple(pd.gluing)}


@dataclass(frozen=True)
class PantsCoordinateSystem:
    pd: PantsDecomposition
    m: int
    shears: Mapping  # leaf name -> (sigma^1, ..., sigma^{m-1})
    triangles: Mapping  # pants name -> ({abc: tau} for t, {abc: tau} for t')
    closed: Mapping = field(default_factory=dict)  # boundary label -> (sigma^1, ...)
    scaling: ScalingSequence = ScalingSequence(1)

    def __post_init__(self):
        for p in self.pd.pants:
            for e in p.leaves:
                if len(self.shears.get(e, ())) != self.m - 1:
                    raise SchemaError(f"leaf {e} needs {self.m - 1} shears", f"shears.{e}")
            tris = self.triangles.get(p.name)
            if tris is None or len(tris) != 2:
                raise SchemaError(f"pants {p.name} needs two triangle tables", f"pants.{p.name}")
            for tab in tris:
                if set(tab) != set(triple_indices(self.m)):
                    raise SchemaError(f"pants {p.name}: triangle table keys must be {triple_indices(self.m)}")

    def with_scaling(self, k: int) -> "PantsCoordinateSystem":
        return PantsCoordinateSystem(self.pd, self.m, self.shears, self.triangles, self.closed, ScalingSequence(k))

    def with_shear(self, leaf: str, a: int, p: GrowthPoly) -> "PantsCoordinateSystem":
        shears = dict(self.shears)
        row = list(shears[leaf])
        row[a - 1] = p
        shears[leaf] = tuple(row)
        return PantsCoordinateSystem(self.pd, self.m, shears, self.triangles, self.closed, self.scaling)


def boundary_gap_poly(pcs: PantsCoordinateSystem, pants: str, g: str, a: int) -> GrowthPoly:
    """``log(lambda_a / lambda_{a+1})`` of boundary ``g`` from the coordinates of ``pants``."""
    p = pcs.pd.pants_named(pants)
    if g not in p.boundaries:
        raise TopologyError(f"{g} is not a boundary of {pants}")
    m = pcs.m
    if not 1 <= a <= m - 1:
        raise TopologyError(f"index {a} outside 1..{m - 1}")
    j = p.boundaries.index(g)
    towards = p.leaves[(j - 1) % 3]
    away = p.leaves[(j + 1) % 3]
    total = pcs.shears[towards][a - 1] + pcs.shears[away][m - a - 1]
    for tab in pcs.triangles[p.name]:
        for b in range(1, a):
            total = total + tab[(m - a, b, a - b)]
    return total


def gap_table(pcs: PantsCoordinateSystem) -> dict:
    """``{(boundary, a): GrowthPoly}`` for every boundary label."""
    out = {}
    for p in pcs.pd.pants:
        for g in p.boundaries:
            for a in range(1, pcs.m):
                out[(g, a)] = boundary_gap_poly(pcs, p.name, g, a)
    return out


@dataclass(frozen=True)
class Violation:
    kind: str  # "mismatch" or "not-positive"
    boundary: str
    a: int
    detail: str

    def to_json(self) -> dict:
        return {"kind": self.kind, "boundary": self.boundary, "a": self.a, "detail": self.detail}


def validate_length_relations(pcs: PantsCoordinateSystem) -> list:
    gaps = gap_table(pcs)
    out = []
    m = pcs.m
    for g, h in pcs.pd.gluing:
        for a in range(1, m):
            left, right = gaps[(g, a)], gaps[(h, m - a)]
            if left != right:
                out.append(Violation("mismatch", g, a, f"{g}[{a}] = {left!r} but {h}[{m - a}] = {right!r}"))
    for (g, a), p in sorted(gaps.items()):
        if p.sign() <= 0:
            out.append(Violation("not-positive", g, a, f"{g}[{a}] = {p!r} is not eventually positive"))
    return out


@dataclass(frozen=True)
class TreeTypeVerdict:
    is_tree_type: bool
    flip_set: tuple
    limits: dict  # "leaf" -> tuple of limits; "pants/t" -> {abc: limit}
    trivial_scaling: bool
    diagnostics: tuple = ()
    classes: dict = field(default_factory=dict)  # leaf -> "B1" | "B2" | "mixed"

    def to_json(self) -> dict:
        lims = {}
        for k, v in self.limits.items():
            if isinstance(v, dict):
                lims[k] = {"".join(map(str, abc)): repr(x) for abc, x in sorted(v.items())}
            else:
                lims[k] = [repr(x) for x in v]
        return {
            "schema": SCHEMA,
            "is_tree_type": self.is_tree_type,
            "flip_set": list(self.flip_set),
            "trivial_scaling": self.trivial_scaling,
            "classes": dict(self.classes),
            "limits": lims,
            "diagnostics": list(self.diagnostics),
        }


def leaf_limits(pcs: PantsCoordinateSystem) -> dict:
    return {e: tuple(limit_of(p, pcs.scaling) for p in ps) for e, ps in pcs.shears.items()}


def check_tree_type(pcs: PantsCoordinateSystem) -> TreeTypeVerdict:
    r = pcs.scaling
    limits: dict = {}
    diags = []
    ok = True
    all_zero = True
    for p in pcs.pd.pants:
        for name, tab in zip(p.triangles, pcs.triangles[p.name]):
            lims = {abc: limit_of(x, r) for abc, x in tab.items()}
            limits[f"{p.name}/{name}"] = lims
            for abc, x in lims.items():
                if x != ZERO:
                    ok = False
                    all_zero = False
                    diags.append(f"(A) fails: triangle {p.name}/{name} index {abc} has limit {x!r}")
    classes = {}
    flip_set = []
    shear_limits = leaf_limits(pcs)
    for p in pcs.pd.pants:
        for e in p.leaves:
            lims = shear_limits[e]
            limits[e] = lims
            if any(x != ZERO for x in lims):
                all_zero = False
            if all(x >= ZERO for x in lims):
                classes[e] = "B1"
            elif all(x <= ZERO for x in lims):
                classes[e] = "B2"
                flip_set.append(e)
            else:
                classes[e] = "mixed"
                ok = False
                diags.append(f"(B) fails: leaf {e} has mixed-sign limits {lims!r}")
    if ok:
        for p in pcs.pd.pants:
            flipped = [e for e in p.leaves if e in flip_set]
            if len(flipped) > 1:
                diags.append(f"internal: pants {p.name} has {len(flipped)} non-positive leaves {flipped}")
    for g, h in pcs.pd.self_glued():
        diags.append(f"note: closed curve {g}/{h} bounds the same pants on both sides")
    return TreeTypeVerdict(ok, tuple(flip_set), limits, all_zero, tuple(diags), classes)


def one_flip_per_pants(v: TreeTypeVerdict, pd: PantsDecomposition) -> bool:
    """At most one leaf per pants in the flip set."""
    for p in pd.pants:
        if sum(e in v.flip_set for e in p.leaves) > 1:
            return False
    return True


@dataclass(frozen=True)
class PreferredLamination:
    flipped: tuple
    shear_limits: dict  # leaf -> corrected limits (flipped leaves: limits of the new leaf)
    triangle_limits: dict  # "pants/t" -> {abc: limit} after the flips
    corrections: tuple  # (leaf, flipped leaf, shared boundary, gap boundary, "a" | "m-a")
    notes: tuple = ()

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "flipped": list(self.flipped),
            "shear_limits": {e: [repr(x) for x in v] for e, v in sorted(self.shear_limits.items())},
            "triangle_limits": {
                k: {"".join(map(str, abc)): repr(x) for abc, x in sorted(v.items())} for k, v in sorted(self.triangle_limits.items())
            },
            "corrections": [list(c) for c in self.corrections],
            "notes": list(self.notes),
        }


def local_tropical_flip(diag_limits, tri_limits: tuple, m: int) -> cluster.Quiver:
    """Tropical flip of one quadrilateral with the given diagonal and triangle limits."""
    weights = {}
    t1, t2 = tri_limits
    for v in cluster.interior_vertices(m):
        a, b, c, d = v
        if c == 0 and d == 0:
            weights[v] = diag_limits[b - 1]
        elif d == 0:
            weights[v] = t1[(a, c, b)]
        else:
            weights[v] = t2[(a, b, d)]
    return tropical_flip(cluster.Quiver.make(m, weights, cluster.initial_arrows(m)))


def preferred_lamination(pcs: PantsCoordinateSystem, v: TreeTypeVerdict) -> PreferredLamination:
    if not v.is_tree_type:
        raise HypothesisError("preferred lamination needs a tree-type sequence")
    if v.trivial_scaling:
        raise HypothesisError("scaling is trivial: every limit vanishes")
    m = pcs.m
    lam = standard_lamination(pcs.pd)["open"]
    gaps = gap_table(pcs)
    shear = {e: tuple(x) for e, x in leaf_limits(pcs).items()}
    corrected = dict(shear)
    tri_out = {k: dict(x) for k, x in v.limits.items() if "/" in k}
    corrections = []
    notes = []
    for e in v.flip_set:
        leaf = lam[e]
        p = pcs.pd.pants_named(leaf.pants)
        tris = tuple(tri_out[f"{p.name}/{t}"] for t in p.triangles)
        flipped = local_tropical_flip(shear[e], tris, m)
        w = flipped.weight_map
        corrected[e] = tuple(w[(m - a, a, 0, 0)] for a in range(1, m))
        for name, tri_key in zip(p.triangles, ((1, 0), (0, 1))):
            lims = {}
            for abc in triple_indices(m):
                a, b, c = abc
                lims[abc] = w[(a, c, b, 0)] if tri_key == (1, 0) else w[(a, b, 0, c)]
            tri_out[f"{p.name}/{name}"] = lims
        spiral = set(leaf.spirals)
        if pcs.pd.partner(leaf.spirals[0]) == leaf.spirals[1]:
            notes.append(f"{e}: both spiraling boundaries are glued to each other; correction applied per boundary")
        for other in p.leaves:
            if other == e:
                continue
            shared = spiral & set(lam[other].spirals)
            for g in sorted(shared):
                corrected[other] = edge_correction(corrected[other], shear[e])
                corrections.append((other, e) + _matching_gap(corrected[other], gaps, pcs, g))
    for g, h in pcs.pd.self_glued():
        notes.append(f"closed curve {g}/{h} bounds the same pants on both sides")
    return PreferredLamination(tuple(v.flip_set), corrected, tri_out, tuple(corrections), tuple(notes))


def _matching_gap(values, gaps, pcs, g) -> tuple:
    """Which boundary gap limits the corrected values equal: index ``a`` or ``m - a``."""
    m = pcs.m
    r = pcs.scaling
    direct = tuple(limit_of(gaps[(g, a)], r) for a in range(1, m))
    flipped = tuple(limit_of(gaps[(g, m - a)], r) for a in range(1, m))
    if tuple(values) == direct:
        return (g, "a")
    if tuple(values) == flipped:
        return (g, "m-a")
    return (g, "none")


# -- JSON ----------------------------------------------------------------------


def _poly(doc, path):
    try:
        return GrowthPoly.from_json(doc)
    except SchemaError as exc:
        raise SchemaError(str(exc), path) from exc


def surface_from_json(doc) -> PantsCoordinateSystem:
    if not isinstance(doc, dict):
        raise SchemaError("surface document must be an object")
    if doc.get("schema") not in (None, SCHEMA):
        raise SchemaError(f"unknown schema {doc.get('schema')!r}", "schema")
    try:
        m = int(doc["m"])
        genus = int(doc["genus"])
        k = int(doc.get("scaling", {}).get("k", 1))
        pants_docs = doc["pants"]
        gluing = tuple(tuple(pair) for pair in doc["gluing"])
        shear_docs = doc["shears"]
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise SchemaError(f"surface needs m, genus, pants, gluing and shears ({exc})") from exc
    pants = []
    tris = {}
    for i, pdoc in enumerate(pants_docs):
        path = f"pants[{i}]"
        try:
            name = pdoc["name"]
            bds = tuple(pdoc["boundaries"])
            leaves = tuple(pdoc["leaves"])
            tdoc = pdoc["triangles"]
            tnames = tuple(tdoc)
        except (KeyError, TypeError) as exc:
            raise SchemaError("pants need name, boundaries, leaves and triangles", path) from exc
        if len(bds) != 3 or len(leaves) != 3 or len(tnames) != 2:
            raise SchemaError("pants have three boundaries, three leaves and two triangles", path)
        pants.append(Pants(name, bds, leaves, tnames))
        tables = []
        for t in tnames:
            tab = {}
            for key, val in tdoc[t].items():
                abc = tuple(int(ch) for ch in key)
                tab[abc] = _poly(val, f"{path}.triangles.{t}.{key}")
            tables.append(tab)
        tris[name] = tuple(tables)
    try:
        pd = PantsDecomposition(genus, tuple(pants), gluing)
    except TopologyError as exc:
        raise SchemaError(str(exc), "pants") from exc
    shears = {}
    for e, vals in shear_docs.items():
        shears[e] = tuple(_poly(x, f"shears.{e}[{j}]") for j, x in enumerate(vals))
    closed = {g: tuple(_poly(x, f"closed.{g}") for x in vals) for g, vals in doc.get("closed", {}).items()}
    try:
        return PantsCoordinateSystem(pd, m, shears, tris, closed, ScalingSequence(k))
    except TopologyError as exc:
        raise SchemaError(str(exc)) from exc


def surface_to_json(pcs: PantsCoordinateSystem) -> dict:
    return {
        "schema": SCHEMA,
        "m": pcs.m,
        "genus": pcs.pd.genus,
        "scaling": pcs.scaling.to_json(),
        "pants": [
            {
                "name": p.name,
                "boundaries": list(p.boundaries),
                "leaves": list(p.leaves),
                "triangles": {
                    t: {"".join(map(str, abc)): x.to_json() for abc, x in sorted(tab.items())}
                    for t, tab in zip(p.triangles, pcs.triangles[p.name])
                },
            }
            for p in pcs.pd.pants
        ],
        "gluing": [list(pair) for pair in pcs.pd.gluing],
        "shears": {e: [x.to_json() for x in v] for e, v in pcs.shears.items()},
        "closed": {g: [x.to_json() for x in v] for g, v in pcs.closed.items()},
    }
