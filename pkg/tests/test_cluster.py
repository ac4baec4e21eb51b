import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flagforge.charts import ChartCoordinates, TriangulatedPolygon, direct_flip_coordinates, reconstruct_configuration
from flagforge.cluster import (
    Quiver,
    arrows_equal,
    boundary_propagation,
    boundary_sides,
    build_quiver,
    flip_transform,
    flip_via_mutations,
    initial_arrows,
    interior_vertices,
    is_diagonal,
    mutate_vertex,
    quiver_vertices,
    random_positive_quiver,
    stratum_members,
    stratum_mutation,
    shuffled_stratum,
)
from flagforge.errors import NotMutableError, PositivityError

from conftest import PENTAGON, QUAD, random_chart


def test_vertex_counts():
    for m in range(2, 6):
        assert len(interior_vertices(m)) == (m - 1) ** 2
        assert all(v[2] == 0 or v[3] == 0 for v in quiver_vertices(m))
        assert all(sum(v) == m for v in quiver_vertices(m))


def test_build_quiver_m2_single_vertex():
    c = ChartCoordinates(QUAD, 2, {0: (Fraction(3),)}, {0: {}, 1: {}})
    q = build_quiver(c)
    assert q.weight_map == {(1, 1, 0, 0): 3}


def test_build_quiver_m3_case_split():
    x, y, w, z = map(Fraction, (2, 3, 5, 7))
    c = ChartCoordinates(QUAD, 3, {0: (w, z)}, {0: {(1, 1, 1): x}, 1: {(1, 1, 1): y}})
    q = build_quiver(c)
    assert q.weight_map == {(2, 1, 0, 0): w, (1, 2, 0, 0): z, (1, 1, 1, 0): x, (1, 1, 0, 1): y}


def test_build_quiver_m4_count(rng):
    assert len(build_quiver(random_chart(rng, QUAD, 4)).weights) == 9


def test_build_quiver_rejects_non_positive():
    c = ChartCoordinates(QUAD, 2, {0: (Fraction(-3),)}, {0: {}, 1: {}})
    with pytest.raises(PositivityError):
        build_quiver(c)


def test_initial_arrows_have_no_two_loops():
    for m in range(2, 6):
        arr = initial_arrows(m)
        assert not any((y, x) in arr for (x, y) in arr)
        assert not any(is_diagonal(x) and is_diagonal(y) for x, y in arr)


def test_mutation_rule_instance():
    v, w = (1, 1, 1, 0), (2, 1, 0, 0)
    q = Quiver.make(3, {v: Fraction(2), w: Fraction(3)}, {(v, w): 1})
    out = mutate_vertex(q, v).weight_map
    assert out[v] == Fraction(1, 2)
    assert out[w] == 9


def test_mutation_incoming_arrow():
    v, w = (1, 1, 1, 0), (2, 1, 0, 0)
    q = Quiver.make(3, {v: Fraction(2), w: Fraction(3)}, {(w, v): 1})
    assert mutate_vertex(q, v).weight_map[w] == 3 * Fraction(2, 3)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 5), st.integers(0, 10**6), st.data())
def test_mutation_is_involution(m, seed, data):
    q = random_positive_quiver(m, random.Random(seed))
    v = data.draw(st.sampled_from(interior_vertices(m)))
    twice = mutate_vertex(mutate_vertex(q, v), v)
    assert twice.weight_map == q.weight_map
    assert arrows_equal(twice.arrow_map, q.arrow_map)


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 5), st.integers(0, 10**6), st.lists(st.integers(0, 100), min_size=1, max_size=8))
def test_weights_stay_positive(m, seed, picks):
    q = random_positive_quiver(m, random.Random(seed))
    verts = interior_vertices(m)
    for p in picks:
        q = mutate_vertex(q, verts[p % len(verts)])
        assert all(x > 0 for _, x in q.weights)


def test_boundary_vertex_not_mutable(rng):
    q = random_positive_quiver(3, rng)
    with pytest.raises(NotMutableError):
        mutate_vertex(q, (3, 0, 0, 0))
    with pytest.raises(NotMutableError):
        mutate_vertex(q, (0, 1, 2, 0))


def test_stratum_members_m3():
    q = random_positive_quiver(3, random.Random(0))
    assert stratum_members(q, 0) == [(1, 2, 0, 0), (2, 1, 0, 0)]
    assert stratum_members(q, 1) == [(1, 1, 0, 1), (1, 1, 1, 0)]


def test_empty_stratum_is_identity(rng):
    q = random_positive_quiver(4, rng)
    assert stratum_mutation(q, 3) == q


def _members_independent(q, s, level):
    members = set(stratum_members(q, s, level))
    return not any(n and x in members and y in members for (x, y), n in q.arrow_map.items())


@pytest.mark.parametrize("m", [3, 4, 5])
def test_stratum_order_independent(rng, m):
    # strata are reached in order during the first flip round; at that point
    # the members are pairwise unlinked and their mutations commute
    q = random_positive_quiver(m, rng)
    for s in range(0, m - 1):
        assert _members_independent(q, s, 0)
        base = stratum_mutation(q, s)
        for _ in range(20):
            other = stratum_mutation(q, s, order=shuffled_stratum(q, s, rng))
            assert other.weight_map == base.weight_map
            assert arrows_equal(other.arrow_map, base.arrow_map)
        q = base


def test_flip_m2_inverts_weight():
    c = ChartCoordinates(QUAD, 2, {0: (Fraction(3),)}, {0: {}, 1: {}})
    assert flip_transform(build_quiver(c)).weight_map == {(1, 1, 0, 0): Fraction(1, 3)}


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_flip_matches_direct_quadrilateral(rng, m):
    for _ in range(5):
        c = random_chart(rng, QUAD, m)
        assert flip_via_mutations(c, 0) == direct_flip_coordinates(reconstruct_configuration(c), QUAD, 0)


@pytest.mark.parametrize("m", [2, 3])
@pytest.mark.parametrize("e", [0, 1])
def test_flip_matches_direct_pentagon(rng, m, e):
    c = random_chart(rng, PENTAGON, m)
    assert flip_via_mutations(c, e) == direct_flip_coordinates(reconstruct_configuration(c), PENTAGON, e)


def test_boundary_propagation_m2_factor():
    c = ChartCoordinates(PENTAGON, 2, {0: (Fraction(3),), 1: (Fraction(5),)}, {0: {}, 1: {}, 2: {}})
    assert boundary_sides(PENTAGON, 0) == [(1, "r", "+")]
    q = build_quiver(c, 0, boundary=False)
    assert boundary_propagation(q, {("r", "+"): (Fraction(5),)}) == {("r", "+"): (5 * (1 + Fraction(3)),)}
    assert flip_via_mutations(c, 0).edges[1] == (20,)


def test_boundary_propagation_untouched_side(rng):
    q = build_quiver(random_chart(rng, QUAD, 3))
    assert boundary_propagation(q, {}) == {}


def test_boundary_propagation_matches_direct_m3(rng):
    c = random_chart(rng, PENTAGON, 3)
    direct = direct_flip_coordinates(reconstruct_configuration(c), PENTAGON, 0)
    q = build_quiver(c, 0, boundary=False)
    out = boundary_propagation(q, {("r", "+"): c.edges[1]})
    assert out[("r", "+")] == direct.edges[1]


def test_quiver_json_round_trip(rng):
    q = build_quiver(random_chart(rng, QUAD, 4))
    assert Quiver.from_json(q.to_json()) == q
