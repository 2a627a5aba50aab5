import itertools
from fractions import Fraction

import pytest

from oracles import brute_isometries, dist_rows
from isoforge.errors import BadRatio, TooSmall
from isoforge.groups import isometries
from isoforge.rigidity import RigidSpec, neighbours, rigid_metric, rigid_metric_path


def test_rigid_six_points_trivial():
    s = rigid_metric(RigidSpec(6, 1, 2))
    assert len(s) == 6 and s.points == ("1", "2", "3", "4", "5", "6")
    assert isometries(s).order == 1
    assert brute_isometries(dist_rows(s)) == [tuple(range(6))]


def test_six_points_is_minimal():
    # every two-valued labelling of the pairs on <= 5 points has a nontrivial isometry
    for n in range(2, 6):
        pairs = list(itertools.combinations(range(n), 2))
        for bits in itertools.product((1, 2), repeat=len(pairs)):
            D = [[0] * n for _ in range(n)]
            for (i, j), v in zip(pairs, bits):
                D[i][j] = D[j][i] = v
            assert len(brute_isometries(D)) > 1


def test_rigid_bad_inputs():
    with pytest.raises(BadRatio):
        RigidSpec(6, 1, 3)
    with pytest.raises(BadRatio):
        RigidSpec(6, 2, 2)
    with pytest.raises(TooSmall):
        RigidSpec(5, 1, 2)
    with pytest.raises(TooSmall):
        rigid_metric_path(2)


def test_rigid_twelve_points_s_symmetric():
    s = rigid_metric(RigidSpec(12, 2, 3))
    S = neighbours(12)
    for x in S:
        for y in S[x]:
            assert x in S[y]
    for x in range(1, 13):
        for y in range(1, 13):
            if x != y:
                assert s.distance(str(x), str(y)) == (2 if y in S[x] else 3)
    assert isometries(s, prune=False).order == 1


@pytest.mark.parametrize("n", [6, 7, 9, 20])
def test_anchor_deductions(n):
    S = neighbours(n)
    # point 2 is the only one with four neighbours; point 1 the only one whose set is {2}
    assert [x for x in S if len(S[x]) == 4] == [2]
    assert [x for x in S if S[x] == {2}] == [1]
    # 3 is the unique common neighbour of 2 with exactly two neighbours
    assert [x for x in S[2] if len(S[x]) == 2] == [3]
    # 4 is the neighbour of 2 and 3 besides each other
    assert (S[2] & S[3]) == {4}
    # 5 is the remaining neighbour of 2
    assert S[2] - {1, 3, 4} == {5}


@pytest.mark.parametrize("a,b", [(1, 2), (2, 3), (3, 5), (Fraction(1, 2), Fraction(3, 4))])
def test_rigid_values(a, b):
    s = rigid_metric(RigidSpec(8, a, b))
    assert set(s.distinct_values()) == {0, Fraction(a), Fraction(b)}


@pytest.mark.parametrize("N", [3, 4, 5, 6, 7])
def test_path_reflection_bruteforce(N):
    s = rigid_metric_path(N)
    expected = [tuple(range(N)), tuple(N - 1 - i for i in range(N))]
    assert brute_isometries(dist_rows(s)) == sorted(expected)
    assert sorted(isometries(s).elements) == sorted(expected)


def test_path_three_points():
    s = rigid_metric_path(3)
    assert sorted(s.d(i, j) for i in range(3) for j in range(i + 1, 3)) == [1, 1, 2]
