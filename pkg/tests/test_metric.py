import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import equilateral, make_space, metric_spaces
from oracles import bisect_sqrt, brute_amalgam_cross, dist_rows
from isoforge.errors import (
    AxiomViolation,
    EmptyCommon,
    InconsistentOverlap,
    MarginTooTight,
    NotKatetov,
    ParseError,
    ScaleTooSmall,
    ZeroDistance,
)
from isoforge.metric import (
    KatetovMap,
    amalgamate,
    discrete_space,
    extend_by_katetov,
    format_rational,
    parse_rational,
    power,
    respects_check,
    scale,
    snowflake,
    validate,
)


# --- parsing -----------------------------------------------------------------

@pytest.mark.parametrize("text,value", [("0", 0), ("3", 3), ("2/4", Fraction(1, 2)), ("-5/10", Fraction(-1, 2))])
def test_parse_rational(text, value):
    assert parse_rational(text) == value


@pytest.mark.parametrize("bad", ["1/0", "abc", "0.5", 0.5, True, None, "1/2/3"])
def test_parse_rational_rejects(bad):
    with pytest.raises(ParseError):
        parse_rational(bad)


@given(st.fractions())
def test_rational_round_trip(q):
    assert parse_rational(format_rational(q)) == q
    assert format_rational(parse_rational(format_rational(q))) == format_rational(q)


# --- validate ----------------------------------------------------------------

def test_validate_discrete():
    s = validate(["a", "b", "c"], [["0", "1", "1"], ["1", "0", "1"], ["1", "1", "0"]])
    assert len(s) == 3 and s.distance("a", "c") == 1


def test_validate_triangle_witness():
    with pytest.raises(AxiomViolation) as info:
        validate(["a", "b", "c"], [["0", "1", "3"], ["1", "0", "1"], ["3", "1", "0"]])
    assert info.value.kind == "triangle"
    assert info.value.names == ("a", "b", "c")


def test_validate_symmetry():
    with pytest.raises(AxiomViolation) as info:
        validate(["a", "b"], [["0", "1"], ["2", "0"]])
    assert info.value.kind == "symmetry"


@pytest.mark.parametrize(
    "rows,kind",
    [([["1", "1"], ["1", "0"]], "diagonal"), ([["0", "0"], ["0", "0"]], "positivity")],
)
def test_validate_diagonal_and_positivity(rows, kind):
    with pytest.raises(AxiomViolation) as info:
        validate(["a", "b"], rows)
    assert info.value.kind == kind


def test_validate_rejects_duplicate_labels_and_ragged():
    with pytest.raises(ParseError):
        validate(["a", "a"], [["0", "1"], ["1", "0"]])
    with pytest.raises(ParseError):
        validate(["a", "b"], [["0", "1"], ["1"]])


@given(metric_spaces())
def test_validate_accepts_generated(space):
    rows = dist_rows(space)
    n = len(rows)
    for i, j, k in itertools.product(range(n), repeat=3):
        assert rows[i][k] <= rows[i][j] + rows[j][k]
    assert validate(space.points, [[format_rational(v) for v in r] for r in rows]) == space


# --- scale / power -----------------------------------------------------------

def test_scale_examples():
    s = discrete_space(["a", "b", "c"])
    half, r = scale(s, 2)
    assert r == 2 and half.distinct_values() == [0, Fraction(1, 2)]
    auto, r = scale(s)
    assert r == 2 and auto == half
    with pytest.raises(ScaleTooSmall):
        scale(s, 1)


@given(metric_spaces(min_n=2))
def test_scale_bounded_below_one(space):
    scaled, r = scale(space)
    assert scaled.max_distance() < 1
    assert all(scaled.d(i, j) * r == space.d(i, j) for i in range(len(space)) for j in range(len(space)))


def test_power_small_examples():
    s = discrete_space(["a", "b"])
    p1 = power(s, 1)
    assert len(p1) == 2 and p1.distinct_values() == [0, 1]
    p2 = power(s, 2)
    assert len(p2) == 4
    assert p2.distance("t:a,a", "t:b,b") == 1 and p2.distance("t:a,a", "t:a,b") == 1


def test_power_max_rule_exhaustive():
    s = make_space("abc", [[0, Fraction(1, 2), Fraction(1, 3)], [Fraction(1, 2), 0, Fraction(1, 4)], [Fraction(1, 3), Fraction(1, 4), 0]])
    p = power(s, 2)
    assert len(p) == 9
    for x, y in itertools.product(itertools.product("abc", repeat=2), repeat=2):
        expected = max(s.distance(x[0], y[0]), s.distance(x[1], y[1]))
        assert p.distance(f"t:{x[0]},{x[1]}", f"t:{y[0]},{y[1]}") == expected


# --- amalgamation ------------------------------------------------------------

def test_amalgam_single_path():
    x1 = make_space(["A", "x"], [[0, 1], [1, 0]])
    x2 = make_space(["A", "y"], [[0, 2], [2, 0]])
    out = amalgamate([x1, x2], ["A"])
    assert out.distance("x", "y") == 3


def test_amalgam_one_member_unchanged():
    s = equilateral()
    assert amalgamate([s], ["a"]) is s


def test_amalgam_errors():
    x1 = make_space(["A", "B", "x"], [[0, 1, 1], [1, 0, 1], [1, 1, 0]])
    x2 = make_space(["A", "B", "y"], [[0, 2, 1], [2, 0, 1], [1, 1, 0]])
    with pytest.raises(InconsistentOverlap):
        amalgamate([x1, x2], ["A", "B"])
    x3 = make_space(["A", "x"], [[0, 1], [1, 0]])
    with pytest.raises(InconsistentOverlap):
        amalgamate([x1, x3], ["A"])
    with pytest.raises(EmptyCommon):
        amalgamate([x1, x3], [])


@given(st.data())
def test_amalgam_three_members_vs_bruteforce(data):
    # common part: two points at distance 1; each member adds one point.
    members = []
    for name in ("x", "y", "z"):
        da = Fraction(data.draw(st.integers(1, 8)), 4)
        lo = max(abs(1 - da), Fraction(1, 4))
        db = Fraction(data.draw(st.integers(int(lo * 4), int((1 + da) * 4))), 4)
        members.append(make_space(["A", "B", name], [[0, 1, da], [1, 0, db], [da, db, 0]]))
    out = amalgamate(members, ["A", "B"])
    for m in members:
        assert out.restrict(m.points) == m
    for u, v in itertools.combinations("xyz", 2):
        assert out.distance(u, v) == brute_amalgam_cross(members, ["A", "B"], u, v)
    validate(out.points, [[format_rational(x) for x in r] for r in dist_rows(out)])


def test_amalgam_union_of_isometries():
    # two equilateral triangles glued over one point: swapping within each side, and
    # swapping the sides, both preserve the amalgam metric.
    s1 = make_space(["A", "b", "c"], [[0, 1, 1], [1, 0, 1], [1, 1, 0]])
    s2 = make_space(["A", "d", "e"], [[0, 1, 1], [1, 0, 1], [1, 1, 0]])
    out = amalgamate([s1, s2], ["A"])
    idx = out.index
    for f1 in ({"b": "b", "c": "c"}, {"b": "c", "c": "b"}):
        for f2 in ({"d": "d", "e": "e"}, {"d": "e", "e": "d"}):
            f = {"A": "A", **f1, **f2}
            assert out.preserves(tuple(idx(f[p]) for p in out.points))


# --- respects ----------------------------------------------------------------

def test_respects_check_witnesses():
    s = discrete_space(["a", "b"], Fraction(1, 2))
    big = make_space(["a", "b", "c"], [[0, Fraction(1, 2), 1], [Fraction(1, 2), 0, 1], [1, 1, 0]])
    assert respects_check(big, [(["a", "b"], s), (["c"], None)])
    cross = make_space(["a", "b", "c"], [[0, Fraction(1, 2), Fraction(1, 2)], [Fraction(1, 2), 0, 1], [Fraction(1, 2), 1, 0]])
    res = respects_check(cross, [(["a", "b"], s), (["c"], None)])
    assert not res and set(res.witness) == {"a", "c"}
    intra = make_space(["a", "b", "c"], [[0, Fraction(3, 4), 1], [Fraction(3, 4), 0, 1], [1, 1, 0]])
    res = respects_check(intra, [(["a", "b"], s), (["c"], None)])
    assert not res


# --- Katetov -----------------------------------------------------------------

def test_katetov_constant_map():
    s = equilateral(3, 2)
    out = extend_by_katetov(KatetovMap(s, (1, 1, 1)), "w")
    assert out.restrict(s.points) == s
    assert {out.distance("w", p) for p in s.points} == {1}


def test_katetov_shifted_distance():
    s = make_space("abc", [[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    c = Fraction(1, 3)
    out = extend_by_katetov(KatetovMap(s, tuple(s.distance(x, "a") + c for x in s.points)), "w")
    assert out.distance("w", "a") == c


def test_katetov_violations():
    s = make_space("ab", [[0, 4], [4, 0]])
    with pytest.raises(NotKatetov):
        extend_by_katetov(KatetovMap(s, (1, 1)), "w")
    with pytest.raises(ZeroDistance):
        extend_by_katetov(KatetovMap(s, (0, 4)), "w")


@given(metric_spaces(max_n=5), st.data())
def test_katetov_extension_is_metric(space, data):
    # distance to a fixed point plus a positive shift is always Katetov
    a = data.draw(st.integers(0, len(space) - 1))
    c = Fraction(data.draw(st.integers(1, 10)), 5)
    values = tuple(space.d(x, a) + c for x in range(len(space)))
    out = extend_by_katetov(KatetovMap(space, values), "new")
    assert out.restrict(space.points) == space


# --- snowflake ---------------------------------------------------------------

def test_snowflake_exact_squares():
    assert snowflake(equilateral(), "1/1000") == equilateral()
    four = make_space("ab", [[0, 4], [4, 0]])
    assert snowflake(four, "1/10").distance("a", "b") == 2


def test_snowflake_sqrt2_against_bisection():
    s = make_space("ab", [[0, 2], [2, 0]])
    v = snowflake(s, "1/1000").distance("a", "b")
    lo, hi = bisect_sqrt(Fraction(2), Fraction(1, 10**6))
    assert Fraction(1413, 1000) <= v <= Fraction(1415, 1000)
    assert abs(v - lo) <= Fraction(1, 1000)


@given(metric_spaces(min_n=2, max_n=5), st.sampled_from(["1/100", "1/1000", "1/4096"]))
def test_snowflake_within_eps(space, eps):
    e = parse_rational(eps)
    try:
        out = snowflake(space, e)
    except MarginTooTight:
        return
    for i in range(len(space)):
        for j in range(i + 1, len(space)):
            v, q = out.d(i, j), space.d(i, j)
            # |v - sqrt q| <= e  <=>  (v - e)^2 <= q <= (v + e)^2 when v >= e
            assert max(v - e, 0) ** 2 <= q <= (v + e) ** 2


def test_snowflake_margin_too_tight():
    # sqrt turns 1,1,2 into 1,1,1.41..; a unit-width bracket cannot prove that strict
    flat = make_space("abc", [[0, 1, 1], [1, 0, 2], [1, 2, 0]])
    with pytest.raises(MarginTooTight):
        snowflake(flat, "1")
    assert snowflake(flat, "1/8").distance("b", "c") < 2
