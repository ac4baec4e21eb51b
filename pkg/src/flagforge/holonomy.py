"""Totally positive holonomy matrices built from edge and triangle factors.

Indices of the elementary factors are 1-based as in the usual notation:
``U(m, a) = I + E_{a,a+1}``, ``L(m, a)`` its transpose,
``Hu(m, a, y) = diag(y I_a, I_{m-a})`` and ``Hl(m, a, y) = diag(I_a, y I_{m-a})``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import mpmath

from .charts import double_ratio, triple_indices, triple_ratio
from .errors import DimensionError, EmptyWordError, PositivityError, SingularError
from .linalg import det, diag, identity, inverse, matmul, matprod, trace


def unipotent_upper(m: int, a: int):
    return tuple(tuple(Fraction(int(i == j or (i == a - 1 and j == a))) for j in range(m)) for i in range(m))


def unipotent_lower(m: int, a: int):
    return tuple(zip(*unipotent_upper(m, a)))


def h_upper(m: int, a: int, y):
    one = y ** 0
    return diag([y if i < a else one for i in range(m)])


def h_lower(m: int, a: int, y):
    one = y ** 0
    return diag([one if i < a else y for i in range(m)])


def _positive(values, what):
    for v in values:
        if not v > 0:
            raise PositivityError(f"{what} must be positive, got {v}")


def s_upper_factors(m: int, c: int, triples: Mapping) -> list:
    """Factors of ``U_1 prod_a Hu_a(1/T^{abc}) U_{a+1}`` over ``a = 1..m-c-1``."""
    factors = [unipotent_upper(m, 1)]
    for a in range(1, m - c):
        b = m - a - c
        factors.append(h_upper(m, a, 1 / triples[(a, b, c)]))
        factors.append(unipotent_upper(m, a + 1))
    return factors


def s_lower_factors(m: int, c: int, triples: Mapping) -> list:
    """Factors of ``L_{m-1} prod_b Hl_{m-b}(T^{abc}) L_{m-b-1}`` over ``b = 1..m-c-1``."""
    factors = [unipotent_lower(m, m - 1)]
    for b in range(1, m - c):
        a = m - b - c
        factors.append(h_lower(m, m - b, triples[(a, b, c)]))
        factors.append(unipotent_lower(m, m - b - 1))
    return factors


def s_upper(m: int, c: int, triples: Mapping):
    return matprod(s_upper_factors(m, c, triples))


def s_lower(m: int, c: int, triples: Mapping):
    return matprod(s_lower_factors(m, c, triples))


def triangle_factors(triples: Mapping, side: str, m: int) -> list:
    make = s_upper_factors if side == "upper" else s_lower_factors
    return [f for c in range(1, m) for f in make(m, c, triples)]


def triangle_matrix(triples: Mapping, side: str = "upper", m: int | None = None):
    """Product of the ``S_c`` factors, ``c = 1..m-1``; ``side`` is ``"upper"`` or ``"lower"``."""
    if m is None:
        if not triples:
            raise DimensionError("dimension must be given when there are no triple ratios")
        m = sum(next(iter(triples)))
    if set(triples) != set(triple_indices(m)):
        raise DimensionError(f"need triple ratios indexed by {triple_indices(m)}")
    _positive(triples.values(), "triple ratios")
    if side not in ("upper", "lower"):
        raise DimensionError(f"side must be upper or lower, got {side!r}")
    return matprod(triangle_factors(triples, side, m))


def edge_matrix(doubles: Sequence, side: str = "left"):
    """``diag(1, D^{m-1}, D^{m-2} D^{m-1}, ...)`` on the left side, ``diag(1, D^1, D^1 D^2, ...)`` otherwise."""
    doubles = list(doubles)
    _positive(doubles, "double ratios")
    if side not in ("left", "right"):
        raise DimensionError(f"side must be left or right, got {side!r}")
    order = doubles[::-1] if side == "left" else doubles
    entries = [Fraction(1) if not doubles else doubles[0] ** 0]
    for d in order:
        entries.append(entries[-1] * d)
    return diag(entries)


@dataclass(frozen=True)
class WordFactor:
    """One edge factor followed by one triangle factor."""

    doubles: tuple
    triples: tuple  # sorted ((a, b, c), T) pairs
    side: str = "left"
    case: str = "upper"

    @classmethod
    def make(cls, doubles, triples: Mapping, side="left", case="upper") -> "WordFactor":
        return cls(tuple(doubles), tuple(sorted(triples.items())), side, case)

    @property
    def m(self) -> int:
        return len(self.doubles) + 1

    def matrices(self):
        return edge_matrix(self.doubles, self.side), triangle_matrix(dict(self.triples), self.case, self.m)


def frame_steps(path: Sequence) -> list:
    """Combinatorics of a path of triangles, as ``(diagonal, case, frame)`` per step.

    The frame starts as ``path[0]`` in the given order ``(Y1, Y2, Y3)``.  Each
    step crosses the diagonal ``Y3 -> Y1`` into the triangle ``(Y1, Y3, Z)``.
    The step is upper when the next triangle still contains ``Y1`` (new frame
    ``(Y1, Y3, Z)``) and lower otherwise (new frame ``(Z, Y1, Y3)``); the last
    step is upper.  ``diagonal`` is the oriented pair ``(Y3, Y1)``.
    """
    if len(path) < 2:
        raise EmptyWordError("a path needs at least two triangles")
    frame = tuple(path[0])
    steps = []
    for i in range(1, len(path)):
        y1, _, y3 = frame
        rest = set(path[i]) - {y1, y3}
        if len(rest) != 1 or len(set(path[i])) != 3:
            raise DimensionError(f"triangle {tuple(path[i])} is not adjacent to {frame} across ({y3}, {y1})")
        (z,) = rest
        upper = i + 1 == len(path) or {y1, z} <= set(path[i + 1])
        steps.append(((y3, y1), "upper" if upper else "lower", frame))
        frame = (y1, y3, z) if upper else (z, y1, y3)
    return steps


def frame_word(flags: Sequence, path: Sequence) -> tuple[list, tuple]:
    """Word of a path of triangles through a configuration of flags.

    Each step of :func:`frame_steps` contributes the double ratios
    ``D^a(Y1, Y2, Y3, Z)`` and the triple ratios ``T^{abc}(Y1, Y3, Z)``.
    Returns the word and the final frame.  The product maps the standard
    triangle carrying the triple ratios of the final frame onto the final
    frame, in the basis normalized at ``path[0]``.
    """
    m = flags[path[0][0]].m
    word = []
    frame = tuple(path[0])
    for i, ((y3, y1), case, (_, y2, _)) in enumerate(frame_steps(path), start=1):
        (z,) = set(path[i]) - {y1, y3}
        doubles = [double_ratio(flags[y1], flags[y2], flags[y3], flags[z], a) for a in range(1, m)]
        triples = {abc: triple_ratio(flags[y1], flags[y3], flags[z], *abc) for abc in triple_indices(m)}
        word.append(WordFactor.make(doubles, triples, "left", case))
        frame = (y1, y3, z) if case == "upper" else (z, y1, y3)
    return word, frame


def holonomy_product(word: Sequence[WordFactor]):
    """``D_1 T_1 ... D_p T_p``."""
    if not word:
        raise EmptyWordError("holonomy of an empty word")
    if len({f.m for f in word}) != 1:
        raise DimensionError("factors of different dimensions")
    mats = []
    for f in word:
        mats.extend(f.matrices())
    return matprod(mats)


# -- total positivity --------------------------------------------------------


def _shape(a) -> str:
    n = len(a)
    upper = all(a[i][j] == 0 for i in range(n) for j in range(i))
    lower = all(a[i][j] == 0 for i in range(n) for j in range(i + 1, n))
    if upper and not lower:
        return "upper"
    if lower and not upper:
        return "lower"
    return "diagonal" if upper else "full"


def required_minor(rows, cols, shape: str) -> bool:
    """Whether a minor can be nonzero for a triangular matrix of the given shape."""
    if shape == "upper":
        return all(i <= j for i, j in zip(rows, cols))
    if shape == "lower":
        return all(i >= j for i, j in zip(rows, cols))
    if shape == "diagonal":
        return tuple(rows) == tuple(cols)
    return True


def failing_minors(a, mode: str = "full"):
    n = len(a)
    shape = "full" if mode == "full" else _shape(a)
    for size in range(1, n + 1):
        for rows in itertools.combinations(range(n), size):
            for cols in itertools.combinations(range(n), size):
                if not required_minor(rows, cols, shape):
                    continue
                value = det(tuple(tuple(a[r][c] for c in cols) for r in rows))
                if not value > 0:
                    yield rows, cols, value


def total_positivity_check(a, mode: str = "full") -> bool:
    """Every minor positive (``full``) or every minor allowed by the triangular shape (``triangular``)."""
    if mode not in ("full", "triangular"):
        raise DimensionError(f"mode must be full or triangular, got {mode!r}")
    for _ in failing_minors(a, mode):
        return False
    return True


def conjugated_inverse_product(word: Sequence[WordFactor]):
    """``P A^-1 P`` for ``A = holonomy_product(word)``, as a product of positive factors.

    Conjugating the inverse of an elementary unipotent by ``P`` gives it back,
    and inverting a diagonal factor inverts its entries, so no cancellation occurs.
    """
    if not word:
        raise EmptyWordError("holonomy of an empty word")
    mats = []
    for f in reversed(word):
        tri = triangle_factors(dict(f.triples), f.case, f.m)
        mats.extend(_conj_inv(x) for x in reversed(tri))
        mats.append(_conj_inv(edge_matrix(f.doubles, f.side)))
    return matprod(mats)


def _conj_inv(x):
    n = len(x)
    if all(x[i][j] == 0 for i in range(n) for j in range(n) if i != j):
        return diag([1 / x[i][i] for i in range(n)])
    return x


def sign_matrix(m: int):
    return diag([Fraction((-1) ** i) for i in range(m)])


def conjugated_inverse(a):
    """``P A^-1 P`` with ``P = diag(1, -1, 1, ...)``."""
    p = sign_matrix(len(a))
    return matprod([p, inverse(a), p])


# -- spectra -----------------------------------------------------------------


def charpoly(a) -> list:
    """Coefficients of ``det(x I - A)``, leading first (Faddeev-LeVerrier, exact)."""
    n = len(a)
    one = a[0][0] ** 0 if not isinstance(a[0][0], int) else Fraction(1)
    coeffs = [one]
    mk = tuple(tuple(one * 0 for _ in range(n)) for _ in range(n))
    ident = identity(n, one)
    for k in range(1, n + 1):
        mk = matmul(a, tuple(tuple(mk[i][j] + coeffs[-1] * ident[i][j] for j in range(n)) for i in range(n)))
        coeffs.append(-trace(mk) / k)
    return coeffs


def eigenvalue_moduli(a, prec_bits: int = 256) -> list:
    """Moduli of the eigenvalues, largest first, via root isolation of the characteristic polynomial."""
    coeffs = charpoly(a)
    with mpmath.workprec(prec_bits):
        roots = mpmath.polyroots([mpmath.mpf(c.numerator) / c.denominator if isinstance(c, Fraction) else mpmath.mpf(c) for c in coeffs], maxsteps=200, extraprec=prec_bits)
        return sorted((abs(r) for r in roots), reverse=True)


def hilbert_length(moduli: Sequence):
    """``log(lambda_1 / lambda_m)`` for moduli sorted or not."""
    vals = [mpmath.mpf(v.numerator) / v.denominator if isinstance(v, Fraction) else mpmath.mpf(v) for v in moduli]
    if min(vals) <= 0:
        raise PositivityError("eigenvalue moduli must be positive")
    return mpmath.log(max(vals) / min(vals))


def trace_invariant(a):
    """``Tr(A) Tr(A^-1)``."""
    if det(a) == 0:
        raise SingularError("trace invariant of a singular matrix")
    return trace(a) * trace(inverse(a))


def trace_bound_ratio(a, prec_bits: int = 256):
    """``T_H(A) / (lambda_1 / lambda_m)``; lies in ``[1, m^2]`` for positive spectra."""
    moduli = eigenvalue_moduli(a, prec_bits)
    with mpmath.workprec(prec_bits):
        th = trace_invariant(a)
        th = mpmath.mpf(th.numerator) / th.denominator if isinstance(th, Fraction) else mpmath.mpf(th)
        return th / (moduli[0] / moduli[-1])


# -- the closed-leaf relation in dimension three -----------------------------


def d3_forward(x, mu1, mu2):
    """``Y`` from ``X`` and the eigenvalue gaps ``mu1, mu2``."""
    den = (1 - mu1) * x - mu1 * (mu2 - 1)
    if den == 0:
        raise SingularError("vanishing denominator")
    return ((1 - mu2) - (mu1 - 1) * mu2 * x) / den


def d3_inverse(y, mu1, mu2):
    """Exact inverse of :func:`d3_forward`."""
    den = (mu1 - 1) * (mu2 - y)
    if den == 0:
        raise SingularError("vanishing denominator")
    return (mu2 - 1) * (mu1 * y - 1) / den


def d3_printed_inverse(y, mu1, mu2):
    """The alternative closed form ``(1-1/mu2)(Y+1/mu1) / ((1-1/mu1)(1+Y/mu2))``.

    It is not the inverse of :func:`d3_forward`, but it is the form whose
    bounds in terms of ``Y`` drive the scaled-limit argument.
    """
    return (1 - 1 / mu2) * (y + 1 / mu1) / ((1 - 1 / mu1) * (1 + y / mu2))


def d3_sandwich(y, dd):
    """Lower and upper bounds on ``X`` implied by ``1 - 1/mu in (D/(1+D), 1)``."""
    k = dd / (1 + dd)
    return k * y / (1 + y), (1 + y) / k
