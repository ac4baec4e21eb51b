from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flagforge.errors import DimensionError, SchemaError, SingularBasisError
from flagforge.linalg import (
    FlagTuple,
    coordinate_flag,
    det,
    flag_from_basis,
    flag_from_json,
    flag_to_json,
    identity,
    inverse,
    is_generic_tuple,
    matmul,
    rank,
    wedge_det,
)

from conftest import QUAD, positive_tuple

small_ints = st.integers(-5, 5)


def square(n):
    return st.lists(st.lists(small_ints, min_size=n, max_size=n), min_size=n, max_size=n)


def test_wedge_det_identity():
    assert wedge_det([(1, 0, 0), (0, 1, 0), (0, 0, 1)]) == 1


def test_wedge_det_hand_example():
    assert wedge_det([(1, -1, 1), (0, 0, 1), (0, 1, 0)]) == -1


def test_wedge_det_repeated_column():
    assert wedge_det([(1, 2, 3), (1, 2, 3), (0, 0, 1)]) == 0


def test_wedge_det_degree_mismatch():
    with pytest.raises(DimensionError):
        wedge_det([(1, 0, 0), (0, 1, 0)])


@given(square(3), st.integers(-4, 4), st.integers(0, 2))
def test_wedge_det_multilinear_alternating(vs, s, i):
    vs = [tuple(v) for v in vs]
    swapped = list(vs)
    swapped[0], swapped[1] = swapped[1], swapped[0]
    assert wedge_det(swapped) == -wedge_det(vs)
    scaled = list(vs)
    scaled[i] = tuple(s * x for x in vs[i])
    assert wedge_det(scaled) == s * wedge_det(vs)


@given(square(3))
def test_inverse_round_trip(rows):
    a = tuple(tuple(Fraction(x) for x in r) for r in rows)
    if det(a) == 0:
        return
    assert matmul(a, inverse(a)) == identity(3)


def test_generic_transverse_pair():
    assert is_generic_tuple(FlagTuple((coordinate_flag(3), coordinate_flag(3, descending=True))))


def test_identical_flags_not_generic():
    f = coordinate_flag(3)
    assert not is_generic_tuple(FlagTuple((f, f, coordinate_flag(3, descending=True))))


@pytest.mark.parametrize("m", [2, 3, 4])
def test_sampled_tuples_generic(rng, m):
    assert is_generic_tuple(positive_tuple(rng, QUAD, m))


@settings(max_examples=20, deadline=None)
@given(square(3))
def test_genericity_invariant_under_linear_maps(rows):
    import random

    g = tuple(tuple(Fraction(x) for x in r) for r in rows)
    if det(g) == 0:
        return
    t = positive_tuple(random.Random(sum(map(sum, rows))), QUAD, 3)
    assert is_generic_tuple(t.transform(g)) == is_generic_tuple(t)


def test_flag_from_standard_basis_is_coordinate_flag():
    f = flag_from_basis([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert f.same_as(coordinate_flag(3))


def test_reversed_basis_gives_descending_flag():
    f = flag_from_basis([[0, 0, 1], [0, 1, 0], [1, 0, 0]])
    assert f.same_as(coordinate_flag(3, descending=True))
    assert not f.same_as(coordinate_flag(3))


def test_dependent_basis_rejected():
    with pytest.raises(SingularBasisError):
        flag_from_basis([[1, 2], [2, 4]])


@given(square(3))
def test_flag_spans_match_basis(rows):
    vecs = [tuple(r) for r in rows]
    if det(tuple(zip(*vecs))) == 0:
        return
    f = flag_from_basis(vecs)
    for a in range(1, 3):
        assert rank(list(f.vectors(a)) + vecs[:a]) == a


def test_flag_json_round_trip():
    f = flag_from_basis([["1/2", 0, 0], [1, 1, 0], [0, "-3/4", 1]])
    assert flag_from_json(flag_to_json(f)) == f
    assert flag_to_json(f)["basis"][0] == ["1/2", "0", "0"]


def test_flag_json_schema_error():
    with pytest.raises(SchemaError):
        flag_from_json({"basis": [[1]]})
