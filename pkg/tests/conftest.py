import os
import sys
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from isoforge.metric import FiniteMetricSpace, validate  # noqa: E402

settings.register_profile(
    "isoforge",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large, HealthCheck.function_scoped_fixture],
)
settings.load_profile("isoforge")


def make_space(points, rows):
    return validate(list(points), [[str(v) for v in row] for row in rows])


def equilateral(n=3, value=1):
    labels = "abcdefgh"[:n]
    return make_space(labels, [[0 if i == j else value for j in range(n)] for i in range(n)])


def isosceles():
    # d(a,b) = d(a,c) = 2, d(b,c) = 3: only the swap of b and c
    return make_space("abc", [[0, 2, 2], [2, 0, 3], [2, 3, 0]])


def generic4():
    # six distinct distances in [1, 2): every triangle holds, no symmetry
    return make_space(
        "abcd",
        [
            [0, Fraction(1), Fraction(11, 10), Fraction(6, 5)],
            [Fraction(1), 0, Fraction(13, 10), Fraction(7, 5)],
            [Fraction(11, 10), Fraction(13, 10), 0, Fraction(3, 2)],
            [Fraction(6, 5), Fraction(7, 5), Fraction(3, 2), 0],
        ],
    )


def square():
    # 4-cycle path metric: isometry group is the dihedral group of order 8
    return make_space("abcd", [[0, 1, 2, 1], [1, 0, 1, 2], [2, 1, 0, 1], [1, 2, 1, 0]])


def three_four_five():
    return make_space("abc", [[0, 3, 4], [3, 0, 5], [4, 5, 0]])


@st.composite
def metric_rows(draw, min_n=1, max_n=7, den=6):
    """Random rational metric: shortest-path closure of random positive weights.

    Weights are drawn from a small grid so ties (and hence symmetries) occur.
    """
    n = draw(st.integers(min_n, max_n))
    w = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            v = Fraction(draw(st.integers(1, 3 * den)), den)
            w[i][j] = w[j][i] = v
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if w[i][k] + w[k][j] < w[i][j]:
                    w[i][j] = w[i][k] + w[k][j]
    return w


@st.composite
def metric_spaces(draw, min_n=1, max_n=7, den=6):
    rows = draw(metric_rows(min_n, max_n, den))
    return make_space([f"p{i}" for i in range(len(rows))], rows)


@st.composite
def strict_spaces(draw, min_n=2, max_n=4):
    """Distances in (1, 2) with distinct triples strictly subadditive."""
    n = draw(st.integers(min_n, max_n))
    rows = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            rows[i][j] = rows[j][i] = Fraction(draw(st.integers(11, 19)), 10)
    return make_space([f"p{i}" for i in range(n)], rows)


@pytest.fixture(params=["numba", "numpy"])
def backend(request, monkeypatch):
    monkeypatch.setenv("ISOFORGE_BACKEND", request.param)
    return request.param
