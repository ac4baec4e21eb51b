"""Small dense linear algebra over exact rationals or mpmath floats, and flags.

Matrices are tuples of row tuples. Every routine only uses field operations
and ``abs`` for pivoting, so the same code runs on :class:`fractions.Fraction`
(the default, exact) and on :class:`mpmath.mpf` (used for sequence evaluation
at large ``n``).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath

from .errors import DimensionError, SchemaError, SingularBasisError, SingularError

Matrix = tuple  # tuple[tuple[Scalar, ...], ...]
Vector = tuple


def as_scalar(x):
    """Coerce ints, strings like ``"3/4"`` and Fractions to Fraction.

    mpmath floats pass through untouched. Python floats are rejected since
    they would silently break exactness.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"not a rational string: {x!r}") from exc
    if isinstance(x, mpmath.mpf):
        return x
    raise TypeError(f"unsupported scalar {x!r} of type {type(x).__name__}")


def format_rational(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def is_exact(x) -> bool:
    return isinstance(x, (Fraction, int))


def _is_zero(x) -> bool:
    return x == 0


# -- matrices ---------------------------------------------------------------


def matrix(rows: Iterable[Iterable]) -> Matrix:
    return tuple(tuple(as_scalar(v) for v in row) for row in rows)


def identity(m: int, one=Fraction(1)) -> Matrix:
    zero = one - one
    return tuple(tuple(one if i == j else zero for j in range(m)) for i in range(m))


def diag(values: Sequence) -> Matrix:
    m = len(values)
    zero = values[0] - values[0]
    return tuple(tuple(values[i] if i == j else zero for j in range(m)) for i in range(m))


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a))


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return tuple(tuple(sum((x * y for x, y in zip(row, col)), start=row[0] * 0) for col in bt) for row in a)


def matvec(a: Matrix, v: Vector) -> Vector:
    return tuple(sum((x * y for x, y in zip(row, v)), start=row[0] * 0) for row in a)


def matprod(factors: Sequence[Matrix]) -> Matrix:
    out = factors[0]
    for f in factors[1:]:
        out = matmul(out, f)
    return out


def columns(vectors: Sequence[Vector]) -> Matrix:
    """Assemble the matrix whose columns are ``vectors``."""
    return transpose(tuple(tuple(v) for v in vectors))


def _lift_ints(a: Matrix) -> list:
    """Rows as lists, with Python ints promoted to Fraction so that division stays exact."""
    return [[Fraction(x) if isinstance(x, int) else x for x in row] for row in a]


def det(a: Matrix):
    """Determinant by Gaussian elimination with largest-modulus pivoting."""
    n = len(a)
    if n == 0:
        return Fraction(1)
    if any(len(row) != n for row in a):
        raise DimensionError("determinant of a non-square matrix")
    rows = _lift_ints(a)
    sign = 1
    result = None
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(rows[r][col]))
        if _is_zero(rows[piv][col]):
            return rows[0][0] * 0
        if piv != col:
            rows[col], rows[piv] = rows[piv], rows[col]
            sign = -sign
        p = rows[col][col]
        result = p if result is None else result * p
        for r in range(col + 1, n):
            f = rows[r][col] / p
            if not _is_zero(f):
                rr, rc = rows[r], rows[col]
                for c in range(col + 1, n):
                    rr[c] -= f * rc[c]
    return result if sign > 0 else -result


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    a = _lift_ints(a)
    one = a[0][0] ** 0
    zero = one - one
    aug = [row + [one if i == j else zero for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(aug[r][col]))
        if _is_zero(aug[piv][col]):
            raise SingularError("matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and not _is_zero(aug[r][col]):
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return tuple(tuple(row[n:]) for row in aug)


def trace(a: Matrix):
    return sum((a[i][i] for i in range(1, len(a))), start=a[0][0])


def rank(vectors: Sequence[Vector]) -> int:
    """Rank of a list of vectors (rows), exact for Fractions."""
    rows = _lift_ints(vectors)
    if not rows:
        return 0
    ncols = len(rows[0])
    r = 0
    for col in range(ncols):
        piv = None
        for i in range(r, len(rows)):
            if not _is_zero(rows[i][col]):
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][col]
        for i in range(r + 1, len(rows)):
            f = rows[i][col] / p
            if not _is_zero(f):
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        r += 1
        if r == len(rows):
            break
    return r


def nullspace(eqs: Sequence[Vector], n: int) -> list[Vector]:
    """Basis of ``{x : e . x = 0 for e in eqs}`` (exact arithmetic only)."""
    rows = [list(e) for e in eqs]
    pivots = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][col]
        rows[r] = [x / p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -rows[i][fc]
        basis.append(tuple(v))
    return basis


def cofactor_functional(vectors: Sequence[Vector], m: int) -> Vector:
    """Linear functional ``w -> det(vectors..., w)`` as a coefficient vector."""
    if len(vectors) != m - 1:
        raise DimensionError(f"need {m - 1} vectors, got {len(vectors)}")
    out = []
    for i in range(m):
        unit = tuple(Fraction(int(i == j)) for j in range(m))
        out.append(det(columns(list(vectors) + [unit])))
    return tuple(out)


# -- flags ------------------------------------------------------------------


@dataclass(frozen=True)
class Flag:
    """Complete flag stored by an adapted basis: level ``a`` is the span of the first ``a`` vectors."""

    basis: tuple

    @property
    def m(self) -> int:
        return len(self.basis)

    def vectors(self, a: int) -> tuple:
        """The first ``a`` basis vectors; their wedge represents the a-th subspace."""
        if not 0 <= a <= self.m:
            raise DimensionError(f"flag level {a} outside 0..{self.m}")
        return self.basis[:a]

    def transform(self, g: Matrix) -> "Flag":
        return Flag(tuple(matvec(g, v) for v in self.basis))

    def same_as(self, other: "Flag") -> bool:
        """Span equality at every level."""
        if self.m != other.m:
            return False
        for a in range(1, self.m):
            mine = self.vectors(a)
            if rank(list(mine) + list(other.vectors(a))) != a:
                return False
        return True


def flag_from_basis(vectors: Sequence[Sequence]) -> Flag:
    vecs = tuple(tuple(as_scalar(x) for x in v) for v in vectors)
    m = len(vecs)
    if m == 0 or any(len(v) != m for v in vecs):
        raise DimensionError("a flag basis needs m vectors of length m")
    if det(columns(vecs)) == 0:
        raise SingularBasisError("flag basis vectors are linearly dependent")
    return Flag(vecs)


def coordinate_flag(m: int, descending: bool = False) -> Flag:
    order = range(m - 1, -1, -1) if descending else range(m)
    return flag_from_basis([[1 if i == j else 0 for i in range(m)] for j in order])


@dataclass(frozen=True)
class FlagTuple:
    flags: tuple
    cyclic: bool = True

    def __post_init__(self):
        if len(self.flags) < 2:
            raise DimensionError("a flag tuple needs at least two flags")
        if len({f.m for f in self.flags}) != 1:
            raise DimensionError("flags of different dimensions")

    @property
    def m(self) -> int:
        return self.flags[0].m

    @property
    def k(self) -> int:
        return len(self.flags)

    def __getitem__(self, i) -> Flag:
        return self.flags[i]

    def transform(self, g: Matrix) -> "FlagTuple":
        return FlagTuple(tuple(f.transform(g) for f in self.flags), self.cyclic)


def wedge_det(vectors: Sequence[Vector], m: int | None = None):
    """Identify a top wedge of vectors in R^m with a scalar (the determinant)."""
    vectors = list(vectors)
    if m is None:
        m = len(vectors[0]) if vectors else 0
    if len(vectors) != m or any(len(v) != m for v in vectors):
        raise DimensionError(f"wedge of {len(vectors)} vectors is not a top form in dimension {m}")
    return det(columns(vectors))


def wedge_of_levels(flags: Sequence[Flag], levels: Sequence[int]):
    """``f_1^{a_1} ^ ... ^ f_k^{a_k}`` for the given flags and levels."""
    m = flags[0].m
    if sum(levels) != m:
        raise DimensionError(f"levels {tuple(levels)} do not add up to {m}")
    vecs = []
    for f, a in zip(flags, levels):
        vecs.extend(f.vectors(a))
    return wedge_det(vecs, m)


def _compositions(total: int, parts: int, cap: int):
    if parts == 1:
        if total <= cap:
            yield (total,)
        return
    for first in range(min(total, cap) + 1):
        for rest in _compositions(total - first, parts - 1, cap):
            yield (first,) + rest


def is_generic_tuple(t: FlagTuple) -> bool:
    """Check that every sum of flag subspaces has the maximal possible dimension.

    It suffices to test index vectors with ``sum(a_i) == m``: if those sums are
    direct, smaller choices are direct too, and larger ones fill the space.
    """
    m = t.m
    for levels in _compositions(m, t.k, m):
        if wedge_of_levels(t.flags, levels) == 0:
            return False
    return True


def flag_to_json(f: Flag) -> dict:
    return {"m": f.m, "basis": [[format_rational(x) for x in v] for v in f.basis]}


def flag_from_json(doc: dict) -> Flag:
    try:
        m = int(doc["m"])
        basis = doc["basis"]
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError("flag needs integer 'm' and list 'basis'") from exc
    f = flag_from_basis(basis)
    if f.m != m:
        raise SchemaError(f"declared m={m} but basis has {f.m} vectors")
    return f


def minors(a: Matrix, size: int):
    """Yield ``(rows, cols, value)`` for all square minors of the given size."""
    n = len(a)
    for rows in itertools.combinations(range(n), size):
        for cols in itertools.combinations(range(n), size):
            yield rows, cols, det(tuple(tuple(a[r][c] for c in cols) for r in rows))
