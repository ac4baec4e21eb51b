import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from flagforge.charts import ChartCoordinates, TriangulatedPolygon, reconstruct_configuration, triple_indices


def rand_fraction(rng: random.Random, hi: int = 9) -> Fraction:
    return Fraction(rng.randint(1, hi), rng.randint(1, hi))


def random_chart(rng: random.Random, poly: TriangulatedPolygon, m: int, hi: int = 9) -> ChartCoordinates:
    edges = {i: tuple(rand_fraction(rng, hi) for _ in range(m - 1)) for i in range(len(poly.diagonals))}
    tris = {i: {abc: rand_fraction(rng, hi) for abc in triple_indices(m)} for i in range(len(poly.triangles))}
    return ChartCoordinates(poly, m, edges, tris)


def positive_tuple(rng: random.Random, poly: TriangulatedPolygon, m: int):
    """A positive flag tuple, sampled through random positive coordinates."""
    return reconstruct_configuration(random_chart(rng, poly, m))


QUAD = TriangulatedPolygon(4, ((2, 0),))
PENTAGON = TriangulatedPolygon(5, ((2, 0), (3, 0)))
HEXAGON_FAN = TriangulatedPolygon(6, ((2, 0), (3, 0), (4, 0)))
HEXAGON_ZIGZAG = TriangulatedPolygon(6, ((2, 0), (5, 2), (5, 3)))

positive_fractions = st.builds(Fraction, st.integers(1, 30), st.integers(1, 30))


@pytest.fixture
def rng():
    return random.Random(20240601)


ACCEPTANCE_LINES: list = []


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line for an acceptance criterion; shown in the terminal summary."""

    def record(number: int, ok: bool, detail: str):
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
