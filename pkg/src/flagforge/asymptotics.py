"""Holonomies along crossing words for sequences with polynomial log-coordinates.

A crossing word lists the edges and triangles met by a closed curve in
order.  Each edge carries its shears ``sigma^a(n)`` and each triangle its
triangle parameters ``tau^{abc}(n)``, all as :class:`GrowthPoly`.  At a given
``n`` the word is exponentiated and multiplied out in big-float arithmetic.
The report compares ``r_n log Tr A_n`` with ``r_n sum_e sigma(e)(n)``, where
``sigma(e) = sum_a sigma^a(e)``.

Which crossings to keep for a curve (and which lifts of transverse arcs to
use) is a geometric choice made by the caller; words are taken as given.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import mpmath

from .charts import triple_indices
from .errors import HypothesisError, PrecisionError, SchemaError, StructureError
from .holonomy import (
    WordFactor,
    conjugated_inverse_product,
    frame_steps,
    holonomy_product,
    total_positivity_check,
    triangle_matrix,
    edge_matrix,
)
from .linalg import trace
from .tropical import ZERO, GrowthPoly, ScaledLimit, ScalingSequence, limit_of

SCHEMA = "flagforge/v1"
DEFAULT_BITS = 512
MAX_BITS = 1 << 16


@dataclass(frozen=True)
class EdgeRecord:
    shears: tuple  # sigma^1 .. sigma^{m-1}
    side: str = "left"

    @property
    def total(self) -> GrowthPoly:
        return sum(self.shears, GrowthPoly())


@dataclass(frozen=True)
class TriangleRecord:
    triples: tuple  # sorted ((a, b, c), tau) pairs
    case: str = "upper"
    preferred: int | None = None
    closed_leaf: bool = False

    @property
    def table(self) -> dict:
        return dict(self.triples)


@dataclass(frozen=True)
class CrossingWord:
    """Closed alternating word ``e_1 t_1 ... e_k t_k`` in dimension ``m``."""

    m: int
    edges: tuple
    triangles: tuple

    def __len__(self):
        return len(self.edges)

    def target_poly(self) -> GrowthPoly:
        return sum((e.total for e in self.edges), GrowthPoly())

    def closed_leaf_indices(self) -> tuple:
        return tuple(i for i, t in enumerate(self.triangles) if t.closed_leaf)

    def to_json(self) -> dict:
        items = []
        for e, t in zip(self.edges, self.triangles):
            items.append({"edge": {"shears": [p.to_json() for p in e.shears], "side": e.side}})
            tri = {
                "triples": {"".join(map(str, abc)): p.to_json() for abc, p in t.triples},
                "case": t.case,
                "closed_leaf": t.closed_leaf,
            }
            if t.preferred is not None:
                tri["preferred"] = t.preferred
            items.append({"triangle": tri})
        return {"schema": SCHEMA, "m": self.m, "word": items}


def _poly(x, path):
    try:
        return GrowthPoly.from_json(x)
    except SchemaError as exc:
        raise SchemaError(str(exc), path) from exc


def build_crossing_word(doc) -> CrossingWord:
    """Validate a word description.

    ``doc`` is ``{"m": m, "word": [{"edge": ...}, {"triangle": ...}, ...]}``.
    An edge gives ``"shears"`` (``m-1`` polynomials) and optionally
    ``"side"``; a triangle gives ``"triples"`` keyed by ``"abc"`` digits and
    optionally ``"case"``, ``"preferred"`` and ``"closed_leaf"``.  With a
    ``"path"`` of vertex triples (``t_0`` first, one more entry than there are
    triangles) and edges given by oriented ``"endpoints"``, sides and cases
    are computed from the path: an edge is on the left when it is oriented
    like the crossed diagonal of the running frame.
    """
    if not isinstance(doc, Mapping):
        raise SchemaError("crossing word must be an object")
    if doc.get("schema") not in (None, SCHEMA):
        raise SchemaError(f"unknown schema {doc.get('schema')!r}", "schema")
    try:
        m = int(doc["m"])
        items = list(doc["word"])
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError("crossing word needs 'm' and 'word'") from exc
    if m < 2:
        raise SchemaError("dimension must be at least 2", "m")
    kinds = []
    for i, item in enumerate(items):
        if not isinstance(item, Mapping) or len(item) != 1 or next(iter(item)) not in ("edge", "triangle"):
            raise SchemaError("each item is {'edge': ...} or {'triangle': ...}", f"word[{i}]")
        kinds.append(next(iter(item)))
    if not kinds:
        raise StructureError("empty crossing word")
    for i, kind in enumerate(kinds):
        expected = "edge" if i % 2 == 0 else "triangle"
        if kind != expected:
            raise StructureError(f"word[{i}] is a {kind} where a {expected} is expected (items must alternate, edge first)")
    if len(kinds) % 2:
        raise StructureError("a closed word ends with a triangle")

    steps = None
    if "path" in doc:
        path = [tuple(int(v) for v in tri) for tri in doc["path"]]
        if len(path) != len(kinds) // 2 + 1:
            raise StructureError("path needs one more triangle than the word")
        steps = frame_steps(path)

    edges, triangles = [], []
    for k in range(len(kinds) // 2):
        e, t = items[2 * k]["edge"], items[2 * k + 1]["triangle"]
        where = f"word[{2 * k}]"
        shears = tuple(_poly(p, f"{where}.shears") for p in e.get("shears", []))
        if len(shears) != m - 1:
            raise SchemaError(f"need {m - 1} shears", f"{where}.shears")
        side = e.get("side")
        case = t.get("case")
        if steps is not None:
            diagonal, computed_case, _ = steps[k]
            ends = tuple(e.get("endpoints", ()))
            if ends == diagonal:
                computed_side = "left"
            elif ends == diagonal[::-1]:
                computed_side = "right"
            else:
                raise StructureError(f"{where} endpoints {ends} are not the crossed diagonal {diagonal}")
            if side not in (None, computed_side) or case not in (None, computed_case):
                raise StructureError(f"{where}: explicit side or case disagrees with the path")
            side, case = computed_side, computed_case
        side = side or "left"
        case = case or "upper"
        if side not in ("left", "right"):
            raise SchemaError(f"bad side {side!r}", f"{where}.side")
        if case not in ("upper", "lower"):
            raise SchemaError(f"bad case {case!r}", f"word[{2 * k + 1}].case")
        raw = t.get("triples", {})
        table = {}
        for abc in triple_indices(m):
            key = "".join(map(str, abc))
            if key not in raw:
                raise SchemaError(f"missing triple {key}", f"word[{2 * k + 1}].triples")
            table[abc] = _poly(raw[key], f"word[{2 * k + 1}].triples.{key}")
        edges.append(EdgeRecord(shears, side))
        triangles.append(
            TriangleRecord(tuple(sorted(table.items())), case, t.get("preferred"), bool(t.get("closed_leaf", False)))
        )
    return CrossingWord(m, tuple(edges), tuple(triangles))


def synthetic_word(m: int, edges: int, shear=None, tau=None, cases=None) -> CrossingWord:
    """Word with the same shear on every edge and index and the same triangle parameter everywhere."""
    shear = GrowthPoly.monomial(1, 1) if shear is None else shear
    tau = GrowthPoly() if tau is None else tau
    cases = cases or ["upper"] * edges
    es = tuple(EdgeRecord(tuple(shear for _ in range(m - 1))) for _ in range(edges))
    ts = tuple(TriangleRecord(tuple((abc, tau) for abc in triple_indices(m)), c) for c in cases)
    return CrossingWord(m, es, ts)


def pants_boundary_word(m: int, towards: Sequence, away: Sequence, t: Mapping, t_prime: Mapping) -> CrossingWord:
    """Word of a curve crossing the two spiralling leaves of a pants, towards and away from one boundary.

    Both leaves spiral to the same end, so the triangles form a fan and both
    steps are upper.  The product is upper triangular, and the ratio of its
    diagonal entries ``m-a+1`` and ``m-a`` is
    ``exp(sigma^a(towards) + sigma^{m-a}(away) + sum_b tau^{(m-a) b (a-b)}(t, t'))``.
    """
    es = (EdgeRecord(tuple(towards)), EdgeRecord(tuple(away), "right"))
    ts = (TriangleRecord(tuple(sorted(t.items()))), TriangleRecord(tuple(sorted(t_prime.items()))))
    return CrossingWord(m, es, ts)


# -- evaluation --------------------------------------------------------------


def required_bits(w: CrossingWord, n: int) -> int:
    """Significand size that keeps every product of coordinates resolvable at ``n``."""
    spread = sum(abs(p(n)) for e in w.edges for p in e.shears)
    spread += sum(abs(p(n)) for t in w.triangles for _, p in t.triples)
    return math.ceil(spread / math.log(2)) + 64


def _mpf(x):
    return mpmath.mpf(x.numerator) / x.denominator if hasattr(x, "denominator") else mpmath.mpf(x)


def word_at(w: CrossingWord, n: int) -> list:
    """Word factors at ``n``; call inside the working precision."""
    word = []
    for e, t in zip(w.edges, w.triangles):
        doubles = [mpmath.exp(_mpf(p(n))) for p in e.shears]
        triples = {abc: mpmath.exp(_mpf(p(n))) for abc, p in t.triples}
        word.append(WordFactor.make(doubles, triples, e.side, t.case))
    return word


def evaluate_sequence_holonomy(w: CrossingWord, n: int, precision_bits: int = DEFAULT_BITS):
    """``A_n`` in ``precision_bits``-bit arithmetic (entries are mpmath floats)."""
    if n < 1:
        raise ValueError("n must be positive")
    need = required_bits(w, n)
    if precision_bits < need:
        raise PrecisionError(f"{precision_bits} bits cannot resolve the word at n={n}", suggested_bits=need)
    with mpmath.workprec(precision_bits):
        a = holonomy_product(word_at(w, n))
    if not all(mpmath.isfinite(x) for row in a for x in row):
        raise PrecisionError(f"non-finite entries at n={n}", suggested_bits=2 * precision_bits)
    return a


# -- reports -----------------------------------------------------------------


@dataclass(frozen=True)
class Sample:
    n: int
    scaled_log_tr: object
    scaled_log_tr_inv: object
    scaled_target: object
    delta: object
    positive: bool
    sandwich: bool
    bits: int


@dataclass
class AsymptoticReport:
    m: int
    scaling: ScalingSequence
    target: ScaledLimit
    samples: list = field(default_factory=list)
    closed_leaf: tuple = ()
    tolerance: float = 0.05

    @property
    def deltas(self) -> list:
        return [s.delta for s in self.samples]

    def tail_decreasing(self) -> bool:
        d = self.deltas
        return all(x >= y for x, y in zip(d, d[1:]))

    def within_tolerance(self) -> bool:
        if not self.samples:
            return True
        last = self.samples[-1]
        return last.delta < self.tolerance and abs(last.scaled_log_tr_inv) < self.tolerance

    def rows(self, digits: int = 12) -> list:
        """``(n, scaled_log_tr, scaled_log_tr_inv, target, delta)`` as strings."""
        out = []
        for s in self.samples:
            vals = (s.scaled_log_tr, s.scaled_log_tr_inv, s.scaled_target, s.delta)
            out.append((str(s.n),) + tuple(mpmath.nstr(v, digits, min_fixed=-1, max_fixed=1) for v in vals))
        return out

    def to_json(self, digits: int = 12) -> dict:
        return {
            "schema": SCHEMA,
            "m": self.m,
            "scaling": self.scaling.to_json(),
            "target": repr(self.target),
            "closed_leaf_insertions": list(self.closed_leaf),
            "tolerance": self.tolerance,
            "tail_decreasing": self.tail_decreasing(),
            "within_tolerance": self.within_tolerance(),
            "samples": [
                dict(zip(("n", "scaled_log_tr", "scaled_log_tr_inv", "target", "delta"), row), positive=s.positive, sandwich=s.sandwich, bits=s.bits)
                for row, s in zip(self.rows(digits), self.samples)
            ],
        }


def check_hypotheses(w: CrossingWord, r: ScalingSequence) -> list:
    """Failing limits, as strings; empty when the word qualifies."""
    problems = []
    for i, e in enumerate(w.edges):
        for a, p in enumerate(e.shears, start=1):
            lim = limit_of(p, r)
            if lim < ZERO:
                problems.append(f"edge {i}: limit of sigma^{a} is {lim!r} < 0")
    for i, t in enumerate(w.triangles):
        if t.closed_leaf and w.m != 3:
            problems.append(f"triangle {i}: closed-leaf crossings need m = 3")
        for abc, p in t.triples:
            lim = limit_of(p, r)
            if lim != ZERO:
                what = "closed-leaf triple ratio" if t.closed_leaf else "triangle parameter"
                problems.append(f"triangle {i}: limit of {what} tau^{''.join(map(str, abc))} is {lim!r}, not 0")
    return problems


def _diagonal_bound(word, m):
    out = mpmath.mpf(1)
    for f in word:
        out *= edge_matrix(f.doubles, f.side)[m - 1][m - 1]
        out *= triangle_matrix(dict(f.triples), f.case, f.m)[m - 1][m - 1]
    return out


def _sample(w: CrossingWord, r: ScalingSequence, n: int, bits: int, check_positivity: bool) -> Sample:
    a = evaluate_sequence_holonomy(w, n, bits)
    with mpmath.workprec(bits):
        word = word_at(w, n)
        rn = _mpf(r(n))
        inv = conjugated_inverse_product(word)
        slt = rn * mpmath.log(trace(a))
        sli = rn * mpmath.log(trace(inv))
        st = rn * _mpf(w.target_poly()(n))
        delta = abs(slt - st)
        slack = mpmath.mpf(2) ** (-bits // 2)
        sandwich = a[-1][-1] >= _diagonal_bound(word, w.m) * (1 - slack)
        positive = True
        if check_positivity:
            positive = total_positivity_check(a, "triangular") and total_positivity_check(inv, "triangular")
    return Sample(n, slt, sli, st, delta, positive, bool(sandwich), bits)


def asymptotic_report(
    w: CrossingWord,
    r: ScalingSequence,
    ns: Sequence[int],
    precision_bits: int = DEFAULT_BITS,
    tolerance: float = 0.05,
    check_positivity: bool = True,
) -> AsymptoticReport:
    """Sample ``r_n log Tr A_n`` and ``r_n log Tr A_n^-1`` along ``ns``.

    Raises :class:`HypothesisError` when a triangle parameter does not scale
    to 0 or a shear scales to a negative limit.  Samples needing more
    precision are retried with doubled significands.
    """
    problems = check_hypotheses(w, r)
    if problems:
        raise HypothesisError("; ".join(problems))
    ns = list(ns)
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("samples must be strictly increasing")
    target = sum((limit_of(p, r) for e in w.edges for p in e.shears), ZERO)
    report = AsymptoticReport(w.m, r, target, closed_leaf=w.closed_leaf_indices(), tolerance=tolerance)
    for n in ns:
        bits = precision_bits
        while True:
            try:
                report.samples.append(_sample(w, r, n, bits, check_positivity))
                break
            except PrecisionError as exc:
                bits = max(2 * bits, exc.suggested_bits or 0)
                if bits > MAX_BITS:
                    raise
    return report
