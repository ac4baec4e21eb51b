import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flagforge import cluster
from flagforge.errors import DimensionError, IndeterminateError
from flagforge.tropical import (
    MINUS_INF,
    PLUS_INF,
    ZERO,
    DominantExp,
    GrowthPoly,
    ScaledLimit,
    ScalingSequence,
    asymptotic_mutate,
    edge_correction,
    exact_flip_limits,
    limit_of,
    same_sign_diagonal,
    tlog1p,
    tropical_flip,
    tropicalize,
)

N = GrowthPoly.monomial(1, 1)


def random_growth_quiver(m, rng, k=2):
    ws = {v: GrowthPoly(tuple((d, rng.randint(-4, 4)) for d in range(k + 1))) for v in cluster.interior_vertices(m)}
    return cluster.Quiver.make(m, ws, cluster.initial_arrows(m))


def test_limit_examples():
    assert limit_of(GrowthPoly.monomial(-1, 2), ScalingSequence(2)) == -1
    assert limit_of(2 * N, ScalingSequence(2)) == 0
    assert limit_of(GrowthPoly.monomial(1, 3), ScalingSequence(2)) == PLUS_INF
    assert limit_of(GrowthPoly.monomial(-1, 3), 2) == MINUS_INF
    assert limit_of(GrowthPoly.of({1: 3, 0: 5}), 1) == 3


def test_scaling_sequence():
    r = ScalingSequence(2)
    assert r(10) == Fraction(1, 100)
    with pytest.raises(DimensionError):
        ScalingSequence(0)


def test_growth_poly_arithmetic_and_order():
    p = GrowthPoly.of({2: 1, 0: -5})
    assert p(3) == 4
    assert (p - p) == 0
    assert p * N == GrowthPoly.of({3: 1, 1: -5})
    assert N < p and GrowthPoly.constant(7) < N
    assert repr(GrowthPoly.of({2: 2, 1: -1})) == "2n^2 - n"
    assert GrowthPoly.from_json(p.to_json()) == p


def test_tlog1p():
    assert tlog1p(Fraction(3)) == 3
    assert tlog1p(Fraction(-2)) == ZERO
    assert tlog1p(PLUS_INF) == PLUS_INF
    assert tlog1p(MINUS_INF) == ZERO


def test_scaled_limit_indeterminate():
    with pytest.raises(IndeterminateError):
        PLUS_INF + MINUS_INF
    assert ScaledLimit.from_json(PLUS_INF.to_json()) == PLUS_INF
    assert ScaledLimit.from_json("3/2") == Fraction(3, 2)


def test_asymptotic_mutate_instance():
    v, w, u = (1, 1, 1, 0), (2, 1, 0, 0), (1, 2, 0, 0)
    q = cluster.Quiver.make(3, {v: ScaledLimit.of(2), w: ScaledLimit.of(3), u: ScaledLimit.of(1)}, {(v, w): 1, (u, v): 1})
    out = asymptotic_mutate(q, v).weight_map
    assert out[v] == -2
    assert out[w] == 3 + 2
    assert out[u] == 1


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), st.integers(0, 10**6), st.data())
def test_asymptotic_mutate_involution(m, seed, data):
    q = tropicalize(random_growth_quiver(m, random.Random(seed)), 2)
    v = data.draw(st.sampled_from(cluster.interior_vertices(m)))
    assert asymptotic_mutate(asymptotic_mutate(q, v), v).weight_map == q.weight_map


def test_flip_example_tropical():
    # the flipped triangle coordinate of W = e^n, Z = e^-n, X = Y = 1 is W itself
    W, Z = N, -N
    q = cluster.Quiver.make(
        3, {(2, 1, 0, 0): W, (1, 2, 0, 0): Z, (1, 1, 1, 0): GrowthPoly(), (1, 1, 0, 1): GrowthPoly()}, cluster.initial_arrows(3)
    )
    trop = tropical_flip(tropicalize(q, 1)).weight_map
    assert trop[(1, 1, 1, 0)] == 1
    assert exact_flip_limits(q, 1).weight_map == trop


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_zero_triangles_stay_zero(m):
    rng = random.Random(m)
    for _ in range(10):
        sign = rng.choice((1, -1))
        ws = {}
        for v in cluster.interior_vertices(m):
            if cluster.is_diagonal(v):
                ws[v] = GrowthPoly.of({1: sign * rng.randint(0, 5), 0: rng.randint(-3, 3)})
            else:
                ws[v] = GrowthPoly.constant(rng.randint(-3, 3))
        q = cluster.Quiver.make(m, ws, cluster.initial_arrows(m))
        assert same_sign_diagonal(q, 1)
        out = tropical_flip(tropicalize(q, 1)).weight_map
        assert all(x == ZERO for v, x in out.items() if not cluster.is_diagonal(v))


def test_mixed_sign_is_not_same_sign():
    q = cluster.Quiver.make(
        3, {(2, 1, 0, 0): N, (1, 2, 0, 0): -N, (1, 1, 1, 0): GrowthPoly(), (1, 1, 0, 1): GrowthPoly()}, cluster.initial_arrows(3)
    )
    assert not same_sign_diagonal(q, 1)


@pytest.mark.parametrize("m", [2, 3, 4])
def test_flip_commutes_with_limits(m):
    rng = random.Random(100 + m)
    for _ in range(40):
        q = random_growth_quiver(m, rng)
        assert exact_flip_limits(q, 2).weight_map == tropical_flip(tropicalize(q, 2)).weight_map


def test_flip_limits_numeric_cross_check():
    # evaluate an actual flip at large n and compare r_n log X_n to the tropical prediction
    rng = random.Random(7)
    q = random_growth_quiver(3, rng, k=1)
    predicted = tropical_flip(tropicalize(q, 1)).weight_map
    with mpmath.workprec(2000):
        n = 400
        numeric = cluster.Quiver.make(3, {v: mpmath.exp(p(n)) for v, p in q.weights}, q.arrow_map)
        out = cluster.flip_transform(numeric).weight_map
        for v, x in out.items():
            assert abs(mpmath.log(x) / n - predicted[v].value) < 0.05


def test_dominant_exp_rules():
    a, b = DominantExp.exp(N), DominantExp.exp(2 * N)
    assert (a + b).log_growth == 2 * N
    assert (a * b).log_growth == 3 * N
    assert (1 / a).log_growth == -N
    assert ((1 + a) / a).log_growth == 0


def test_edge_correction():
    assert edge_correction((1, 2), (-1, 0)) == (1, 1)
    assert edge_correction((3,), (-3,)) == (0,)
    with pytest.raises(DimensionError):
        edge_correction((1, 2), (1,))
