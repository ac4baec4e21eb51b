"""Scaled limits of polynomial coordinate sequences and their tropical calculus.

A chart weight ``X_n = exp(p(n))`` is recorded by its exponent, a
:class:`GrowthPoly`. With ``r_n = n^-k`` the scaled limit
``lim r_n log X_n`` is read off ``p`` by :func:`limit_of`. Flips then act on
limits through max-plus versions of the mutation rule.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from . import cluster
from .errors import DimensionError, IndeterminateError, SchemaError
from .linalg import as_scalar, format_rational


# -- growth polynomials ------------------------------------------------------


@functools.total_ordering
@dataclass(frozen=True)
class GrowthPoly:
    """Polynomial in ``n`` with rational coefficients, stored without zero terms.

    Ordering is eventual ordering: ``p < q`` iff ``p(n) < q(n)`` for all large ``n``.
    """

    terms: tuple = ()  # ((degree, coefficient), ...) sorted by degree

    def __post_init__(self):
        merged: dict = {}
        for d, c in self.terms:
            d = int(d)
            if d < 0:
                raise DimensionError("negative degree")
            merged[d] = merged.get(d, Fraction(0)) + as_scalar(c)
        object.__setattr__(self, "terms", tuple(sorted((d, c) for d, c in merged.items() if c != 0)))

    @classmethod
    def of(cls, coeffs: Mapping | None = None) -> "GrowthPoly":
        return cls(tuple((coeffs or {}).items()))

    @classmethod
    def constant(cls, c) -> "GrowthPoly":
        return cls(((0, c),))

    @classmethod
    def monomial(cls, c, d: int) -> "GrowthPoly":
        return cls(((d, c),))

    @property
    def coeffs(self) -> dict:
        return dict(self.terms)

    @property
    def degree(self) -> int:
        """Degree, with ``-1`` for the zero polynomial."""
        return self.terms[-1][0] if self.terms else -1

    @property
    def leading(self) -> Fraction:
        return self.terms[-1][1] if self.terms else Fraction(0)

    def coefficient(self, d: int) -> Fraction:
        return self.coeffs.get(d, Fraction(0))

    def sign(self) -> int:
        """Eventual sign of ``p(n)``."""
        lc = self.leading
        return (lc > 0) - (lc < 0)

    def __call__(self, n):
        return sum((c * n**d for d, c in self.terms), start=Fraction(0) * n)

    def __add__(self, other):
        other = _as_poly(other)
        return GrowthPoly(self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self):
        return GrowthPoly(tuple((d, -c) for d, c in self.terms))

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        if isinstance(other, GrowthPoly):
            return GrowthPoly(tuple((d1 + d2, c1 * c2) for d1, c1 in self.terms for d2, c2 in other.terms))
        return GrowthPoly(tuple((d, c * as_scalar(other)) for d, c in self.terms))

    __rmul__ = __mul__

    def __lt__(self, other):
        return (self - _as_poly(other)).sign() < 0

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = GrowthPoly.constant(other)
        if not isinstance(other, GrowthPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for d, c in reversed(self.terms):
            mono = "" if d == 0 else ("n" if d == 1 else f"n^{d}")
            coef = format_rational(c)
            if mono and c == 1:
                coef = ""
            elif mono and c == -1:
                coef = "-"
            parts.append(f"{coef}{mono}" if mono else coef)
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self) -> dict:
        return {"poly": {str(d): format_rational(c) for d, c in self.terms}}

    @classmethod
    def from_json(cls, doc) -> "GrowthPoly":
        if isinstance(doc, (int, str)):
            return cls.constant(as_scalar(doc))
        try:
            raw = doc["poly"] if "poly" in doc else doc
            return cls(tuple((int(d), as_scalar(c)) for d, c in raw.items()))
        except (TypeError, ValueError, AttributeError) as exc:
            raise SchemaError(f"bad growth polynomial {doc!r}") from exc


def _as_poly(x) -> GrowthPoly:
    if isinstance(x, GrowthPoly):
        return x
    return GrowthPoly.constant(x)


N = GrowthPoly.monomial(1, 1)


@dataclass(frozen=True)
class ScalingSequence:
    """``r_n = n^-k``."""

    k: int

    def __post_init__(self):
        if int(self.k) < 1:
            raise DimensionError("scaling exponent must be at least 1")

    def __call__(self, n):
        return Fraction(1, n**self.k) if isinstance(n, int) else n ** (-self.k)

    def to_json(self) -> dict:
        return {"k": self.k}


# -- extended rationals ------------------------------------------------------


@functools.total_ordering
@dataclass(frozen=True)
class ScaledLimit:
    """A rational number or a signed infinity (``inf`` is +1, -1 or 0)."""

    value: Fraction = Fraction(0)
    inf: int = 0

    @classmethod
    def of(cls, x) -> "ScaledLimit":
        if isinstance(x, ScaledLimit):
            return x
        return cls(as_scalar(x))

    @property
    def is_finite(self) -> bool:
        return self.inf == 0

    def _key(self):
        return (self.inf, self.value if self.inf == 0 else Fraction(0))

    def __lt__(self, other):
        return self._key() < ScaledLimit.of(other)._key()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, str)):
            other = ScaledLimit.of(other)
        if not isinstance(other, ScaledLimit):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __add__(self, other):
        other = ScaledLimit.of(other)
        if self.inf and other.inf and self.inf != other.inf:
            raise IndeterminateError("sum of opposite infinite limits")
        if self.inf or other.inf:
            return ScaledLimit(Fraction(0), self.inf or other.inf)
        return ScaledLimit(self.value + other.value)

    __radd__ = __add__

    def __neg__(self):
        return ScaledLimit(-self.value if self.inf == 0 else Fraction(0), -self.inf)

    def __sub__(self, other):
        return self + (-ScaledLimit.of(other))

    def __mul__(self, n):
        n = as_scalar(n)
        if n == 0:
            return ScaledLimit()
        if self.inf:
            return ScaledLimit(Fraction(0), self.inf * (1 if n > 0 else -1))
        return ScaledLimit(self.value * n)

    __rmul__ = __mul__

    def sign(self) -> int:
        if self.inf:
            return self.inf
        return (self.value > 0) - (self.value < 0)

    def __repr__(self):
        if self.inf:
            return "+inf" if self.inf > 0 else "-inf"
        return format_rational(self.value)

    def to_json(self) -> str:
        return repr(self)

    @classmethod
    def from_json(cls, s) -> "ScaledLimit":
        if s in ("+inf", "inf"):
            return cls(Fraction(0), 1)
        if s == "-inf":
            return cls(Fraction(0), -1)
        return cls.of(s)


ZERO = ScaledLimit()
PLUS_INF = ScaledLimit(Fraction(0), 1)
MINUS_INF = ScaledLimit(Fraction(0), -1)


def limit_of(p: GrowthPoly, r) -> ScaledLimit:
    """``lim n^-k p(n)`` for ``r = ScalingSequence(k)`` (an int ``k`` is accepted too)."""
    k = r.k if isinstance(r, ScalingSequence) else int(r)
    p = _as_poly(p)
    if p.degree > k:
        return ScaledLimit(Fraction(0), p.sign())
    return ScaledLimit(p.coefficient(k))


def tlog1p(x) -> ScaledLimit:
    """Scaled limit of ``log(1 + X_n)`` given the scaled limit of ``log X_n``."""
    return max(ZERO, ScaledLimit.of(x))


# -- tropical quivers --------------------------------------------------------


def asymptotic_mutate(q: cluster.Quiver, v) -> cluster.Quiver:
    """Max-plus mutation of a quiver weighted by scaled limits."""
    v = tuple(v)
    cluster._require_mutable(q, v)
    w = q.weight_map
    x = ScaledLimit.of(w[v])
    new = dict(w)
    for u in w:
        if u == v:
            continue
        n = q.b(v, u)
        if n > 0:
            new[u] = ScaledLimit.of(w[u]) + n * max(ZERO, x)
        elif n < 0:
            new[u] = ScaledLimit.of(w[u]) + (-n) * min(ZERO, x)
    new[v] = -x
    return cluster.Quiver.make(q.m, new, cluster.mutate_arrows(q.arrow_map, v))


def tropical_flip(q: cluster.Quiver) -> cluster.Quiver:
    return cluster.flip_transform(q, mutate=asymptotic_mutate)


def tropicalize(q: cluster.Quiver, r) -> cluster.Quiver:
    """Replace every GrowthPoly weight by its scaled limit."""
    return cluster.Quiver.make(q.m, {v: limit_of(p, r) for v, p in q.weights}, q.arrow_map)


def edge_correction(l_eprime, l_e) -> tuple:
    """Corrected limits ``l(e')_a + l(e)_{m-a}`` for a leaf next to a flipped leaf."""
    l_eprime = tuple(ScaledLimit.of(x) for x in l_eprime)
    l_e = tuple(ScaledLimit.of(x) for x in l_e)
    if len(l_eprime) != len(l_e):
        raise DimensionError("limit tables of different lengths")
    m = len(l_e) + 1
    return tuple(l_eprime[a - 1] + l_e[m - a - 1] for a in range(1, m))


# -- exact asymptotics of subtraction-free expressions -----------------------


@dataclass(frozen=True)
class DominantExp:
    """A ratio of positive sums ``sum c_i exp(p_i(n))`` tracked by its dominant exponents.

    Positive sums never cancel, so ``num`` and ``den`` (the eventual maxima of
    the exponents in numerator and denominator) determine
    ``log X_n = num(n) - den(n) + O(1)`` exactly. Mutation formulas are
    subtraction free, so this is an exact symbolic model of the flip
    asymptotics that does not pass through scaled limits.
    """

    num: GrowthPoly
    den: GrowthPoly = GrowthPoly()

    @classmethod
    def exp(cls, p: GrowthPoly) -> "DominantExp":
        return cls(_as_poly(p))

    @property
    def log_growth(self) -> GrowthPoly:
        return self.num - self.den

    def __mul__(self, other):
        other = _lift(other)
        return DominantExp(self.num + other.num, self.den + other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _lift(other)
        return DominantExp(self.num + other.den, self.den + other.num)

    def __rtruediv__(self, other):
        return _lift(other) / self

    def __add__(self, other):
        other = _lift(other)
        return DominantExp(max(self.num + other.den, other.num + self.den), self.den + other.den)

    __radd__ = __add__

    def __pow__(self, k: int):
        if k < 0:
            return (1 / self) ** (-k)
        return DominantExp(self.num * k, self.den * k)

    def __gt__(self, other):
        return True if other == 0 else NotImplemented

    def __eq__(self, other):
        if not isinstance(other, DominantExp):
            return NotImplemented
        return self.log_growth == other.log_growth

    def __hash__(self):
        return hash(self.log_growth)


def _lift(x) -> DominantExp:
    if isinstance(x, DominantExp):
        return x
    if x == 1:
        return DominantExp(GrowthPoly())
    raise TypeError(f"only positive exponential sums and 1 are supported, got {x!r}")


def dominant_quiver(q: cluster.Quiver) -> cluster.Quiver:
    """Weights ``exp(p)`` for the GrowthPoly weights of ``q``."""
    return cluster.Quiver.make(q.m, {v: DominantExp.exp(p) for v, p in q.weights}, q.arrow_map)


def exact_flip_limits(q: cluster.Quiver, r) -> cluster.Quiver:
    """Scaled limits after an exact (symbolic) flip of a GrowthPoly-weighted quiver."""
    flipped = cluster.flip_transform(dominant_quiver(q))
    return cluster.Quiver.make(q.m, {v: limit_of(x.log_growth, r) for v, x in flipped.weights}, flipped.arrow_map)


def same_sign_diagonal(q: cluster.Quiver, r) -> bool:
    """Diagonal limits all >= 0 or all <= 0, triangle limits all 0."""
    diag, tri = [], []
    for v, p in q.weights:
        if not cluster.is_interior(v):
            continue
        (diag if cluster.is_diagonal(v) else tri).append(limit_of(p, r))
    if any(t != ZERO for t in tri):
        return False
    return all(d >= ZERO for d in diag) or all(d <= ZERO for d in diag)
