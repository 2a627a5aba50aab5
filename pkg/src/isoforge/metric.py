"""Finite metric spaces with exact rational distances.

A space stores its distances as an ``int64`` numerator matrix over one shared
positive denominator, kept in lowest terms. Kernels in :mod:`isoforge.kernels`
work directly on the numerators.
"""

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

import numpy as np

from . import kernels
from .errors import (
    AxiomViolation,
    EmptyCommon,
    InconsistentOverlap,
    InputError,
    MarginTooTight,
    NotKatetov,
    ParseError,
    PreconditionError,
    ScaleTooSmall,
    ZeroDistance,
)

# Sums of two entries must stay inside int64.
MAX_ENTRY = 1 << 61


def parse_rational(value):
    """Exact rational from an int, a Fraction, or a string like ``"3"``/``"-1/2"``."""
    if isinstance(value, bool):
        raise ParseError(f"not a rational: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            p, _, q = text.partition("/")
            try:
                p, q = int(p), int(q)
            except ValueError:
                raise ParseError(f"not a rational: {value!r}") from None
            if q == 0:
                raise ParseError(f"zero denominator in {value!r}")
            return Fraction(p, q)
        try:
            return Fraction(int(text))
        except ValueError:
            raise ParseError(f"not a rational: {value!r}") from None
    raise ParseError(f"not a rational: {value!r}")


def format_rational(q):
    """Canonical lowest-terms string, ``"p/q"`` or an integer string."""
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _to_integer_matrix(rows):
    """Common-denominator encoding of a rational matrix."""
    den = 1
    for row in rows:
        for v in row:
            den = math.lcm(den, v.denominator)
    n = len(rows)
    num = np.zeros((n, n), dtype=np.int64)
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            x = v.numerator * (den // v.denominator)
            if abs(x) >= MAX_ENTRY:
                raise OverflowError("distance numerator exceeds the int64 working range")
            num[i, j] = x
    return num, den


def _reduce(num, den):
    g = math.gcd(int(np.gcd.reduce(num, axis=None)) if num.size else 0, den)
    if g > 1:
        return num // g, den // g
    return num, den


class FiniteMetricSpace:
    """Named points with an exact rational distance matrix.

    Instances are immutable. Build them with :func:`validate` (checks every
    axiom) or :meth:`from_trusted` (internal, callers guarantee the axioms).
    """

    __slots__ = ("points", "num", "den", "_index")

    def __init__(self, points, num, den):
        num, den = _reduce(np.asarray(num, dtype=np.int64), int(den))
        num = num.copy()
        num.setflags(write=False)
        object.__setattr__(self, "points", tuple(points))
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        object.__setattr__(self, "_index", {p: i for i, p in enumerate(self.points)})

    def __setattr__(self, name, value):
        raise AttributeError("FiniteMetricSpace is immutable")

    @classmethod
    def from_trusted(cls, points, rows):
        num, den = _to_integer_matrix([[Fraction(v) for v in row] for row in rows])
        return cls(points, num, den)

    def __len__(self):
        return len(self.points)

    def __repr__(self):
        return f"FiniteMetricSpace({len(self)} points, den={self.den})"

    def __eq__(self, other):
        if not isinstance(other, FiniteMetricSpace):
            return NotImplemented
        return (
            self.points == other.points
            and self.den == other.den
            and np.array_equal(self.num, other.num)
        )

    def __hash__(self):
        return hash((self.points, self.den, self.num.tobytes()))

    def index(self, label):
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"no point labelled {label!r}") from None

    def d(self, i, j):
        return Fraction(int(self.num[i, j]), self.den)

    def distance(self, a, b):
        return self.d(self.index(a), self.index(b))

    def matrix(self):
        return self.map_entries(lambda v: Fraction(v, self.den))

    def map_entries(self, func):
        """Nested lists of ``func(numerator)``; ``func`` runs once per distinct value."""
        values, inv = np.unique(self.num, return_inverse=True)
        table = np.empty(len(values), dtype=object)
        table[:] = [func(int(v)) for v in values]
        return table[inv.reshape(self.num.shape)].tolist()

    def max_distance(self):
        return Fraction(int(self.num.max()), self.den) if len(self) else Fraction(0)

    def distinct_values(self):
        return sorted(Fraction(int(v), self.den) for v in np.unique(self.num))

    def restrict(self, labels):
        idx = [self.index(a) for a in labels]
        return FiniteMetricSpace(labels, self.num[np.ix_(idx, idx)], self.den)

    def relabel(self, labels):
        if len(labels) != len(self) or len(set(labels)) != len(labels):
            raise InputError("relabelling needs one unique label per point")
        return FiniteMetricSpace(labels, self.num, self.den)

    def reorder(self, labels):
        """Same space with points listed in the given order."""
        if sorted(labels) != sorted(self.points):
            raise InputError("reorder must list every point exactly once")
        return self.restrict(labels)

    def scaled(self, factor):
        """Every distance multiplied by a positive rational."""
        factor = Fraction(factor)
        if factor <= 0:
            raise PreconditionError("scale factor must be positive")
        a, den = factor.numerator, self.den * factor.denominator
        g = math.gcd(a, den)
        a, den = a // g, den // g
        num = self.num
        g = math.gcd(int(np.gcd.reduce(num, axis=None)) if num.size else 0, den)
        if g > 1:
            num, den = num // g, den // g
        # both cancellations done, so the result is in lowest terms already
        if num.size and int(num.max()) * a >= MAX_ENTRY:
            raise OverflowError("distance numerator exceeds the int64 working range")
        return FiniteMetricSpace(self.points, num * a, den)

    def preserves(self, perm):
        """True iff the point permutation (image array) keeps every distance."""
        p = np.asarray(perm, dtype=np.int64)
        return bool(np.array_equal(self.num[np.ix_(p, p)], self.num))


def check_axioms(points, num, strict=False):
    """Raise :class:`AxiomViolation` on the first failing metric axiom."""
    n = num.shape[0]
    diag = np.flatnonzero(np.diagonal(num) != 0)
    if diag.size:
        i = int(diag[0])
        raise AxiomViolation("diagonal", (i, i), points)
    off = num + np.eye(n, dtype=np.int64)
    bad = np.argwhere(off <= 0)
    if bad.size:
        i, j = bad[0]
        raise AxiomViolation("positivity", (int(i), int(j)), points)
    bad = np.argwhere(num != num.T)
    if bad.size:
        i, j = bad[0]
        raise AxiomViolation("symmetry", (int(i), int(j)), points)
    w = kernels.triangle_witness(num, strict=strict)
    if w is not None:
        raise AxiomViolation("strict-triangle" if strict else "triangle", w, points)


def validate(points, matrix):
    """Build a space from labels and a rational matrix, checking every axiom exactly.

    Entries may be ints, Fractions or rational strings. Raises
    :class:`AxiomViolation` with the offending indices, or :class:`ParseError`.
    """
    points = [str(p) for p in points]
    if len(set(points)) != len(points):
        raise ParseError("point labels must be unique")
    n = len(points)
    if len(matrix) != n or any(len(row) != n for row in matrix):
        raise ParseError(f"distance matrix must be {n}x{n}")
    rows = [[parse_rational(v) for v in row] for row in matrix]
    num, den = _to_integer_matrix(rows)
    check_axioms(points, num)
    return FiniteMetricSpace(points, num, den)


def discrete_space(labels, value=1):
    n = len(labels)
    v = Fraction(value)
    return FiniteMetricSpace.from_trusted(
        labels, [[Fraction(0) if i == j else v for j in range(n)] for i in range(n)]
    )


def scale(space, r=None):
    """Divide all distances by ``r`` so that the result is below 1.

    ``r=None`` picks ``2 * max distance``. Returns ``(scaled_space, r)``.
    """
    top = space.max_distance()
    if r is None:
        r = 2 * top if top > 0 else Fraction(1)
    r = Fraction(r)
    if r <= 0 or r <= top:
        raise ScaleTooSmall(f"need r > max distance {format_rational(top)}, got {format_rational(r)}")
    return space.scaled(1 / r), r


def tuple_label(labels):
    return "t:" + ",".join(labels)


def power(space, n):
    """Maximum metric on the n-fold Cartesian power, tuples in lexicographic order."""
    if n < 1:
        raise PreconditionError("power needs n >= 1")
    k = len(space)
    tuples = list(itertools.product(range(k), repeat=n))
    labels = [tuple_label([space.points[i] for i in t]) for t in tuples]
    idx = np.array(tuples, dtype=np.int64).reshape(len(tuples), n)
    num = np.zeros((len(tuples), len(tuples)), dtype=np.int64)
    for j in range(n):
        np.maximum(num, space.num[np.ix_(idx[:, j], idx[:, j])], out=num)
    return FiniteMetricSpace(labels, num, space.den)


def amalgamate(family, common, check=True):
    """Glue spaces along a shared subspace.

    Distances inside one member are kept; across members they are the
    shortest route through the common part. The union lists the first
    member's points, then every later member's private points in order.
    """
    family = list(family)
    common = list(dict.fromkeys(common))
    if not family:
        raise PreconditionError("amalgamate needs at least one space")
    if not common:
        raise EmptyCommon("the common subspace must be nonempty")
    cset = set(common)
    for s, X in enumerate(family):
        missing = [a for a in common if a not in X._index]
        if missing:
            raise InconsistentOverlap(f"member {s} lacks common points {missing}")
    ref = family[0].restrict(common)
    for s, X in enumerate(family[1:], start=1):
        if X.restrict(common) != ref:
            raise InconsistentOverlap(f"member {s} disagrees with member 0 on the common part")
    seen = {}
    for s, X in enumerate(family):
        for p in X.points:
            if p in cset:
                continue
            if p in seen:
                raise InconsistentOverlap(f"label {p!r} shared by members {seen[p]} and {s} outside the common part")
            seen[p] = s
    if len(family) == 1:
        return family[0]

    den = 1
    for X in family:
        den = math.lcm(den, X.den)
    scaled = [X.num * (den // X.den) for X in family]
    labels = list(family[0].points)
    for X in family[1:]:
        labels.extend(p for p in X.points if p not in cset)
    pos = {p: i for i, p in enumerate(labels)}
    N = len(labels)
    num = np.zeros((N, N), dtype=np.int64)
    private = []
    for X, M in zip(family, scaled):
        idx = np.array([pos[p] for p in X.points], dtype=np.int64)
        num[np.ix_(idx, idx)] = M
        own = [i for i, p in enumerate(X.points) if p not in cset]
        a_loc = [X.index(a) for a in common]
        private.append((own, [pos[X.points[i]] for i in own], a_loc))
    for s in range(len(family)):
        own_s, glob_s, a_s = private[s]
        if not own_s:
            continue
        for t in range(s + 1, len(family)):
            own_t, glob_t, a_t = private[t]
            if not own_t:
                continue
            P = scaled[s][np.ix_(own_s, a_s)]
            Q = scaled[t][np.ix_(a_t, own_t)]
            cross = kernels.minplus(P, Q)
            num[np.ix_(glob_s, glob_t)] = cross
            num[np.ix_(glob_t, glob_s)] = cross.T
    if check:
        check_axioms(labels, num)
    return FiniteMetricSpace(labels, num, den)


@dataclass(frozen=True)
class CheckResult:
    """Boolean verdict with the first failure witness, if any."""

    ok: bool
    reason: str = ""
    witness: tuple = ()

    def __bool__(self):
        return self.ok


def respects_check(big, blocks):
    """Check the block axioms: each block carries its expected metric, distinct blocks are >= 1 apart.

    ``blocks`` is a sequence of ``(labels, expected)`` where ``expected`` is a
    :class:`FiniteMetricSpace` listed in the same order as ``labels`` (its own
    labels are ignored), or ``None`` for a single-point block.
    """
    covered = [lab for labels, _ in blocks for lab in labels]
    if sorted(covered) != sorted(big.points):
        raise PreconditionError("blocks must partition the points of the space")
    block_of = np.empty(len(big), dtype=np.int64)
    for b, (labels, expected) in enumerate(blocks):
        idx = [big.index(a) for a in labels]
        block_of[idx] = b
        if expected is None:
            if len(labels) != 1:
                raise PreconditionError("only single-point blocks may omit the expected metric")
            continue
        if len(expected) != len(labels):
            raise PreconditionError("expected block metric has the wrong size")
        got = big.num[np.ix_(idx, idx)] * expected.den
        want = expected.num * big.den
        bad = np.argwhere(got != want)
        if bad.size:
            i, j = bad[0]
            return CheckResult(False, "block metric differs", (labels[i], labels[j]))
    cross = block_of[:, None] != block_of[None, :]
    bad = np.argwhere(cross & (big.num < big.den))
    if bad.size:
        i, j = bad[0]
        return CheckResult(False, "cross-block distance below 1", (big.points[i], big.points[j]))
    return CheckResult(True)


@dataclass(frozen=True)
class KatetovMap:
    base: FiniteMetricSpace
    values: tuple

    def __post_init__(self):
        vals = tuple(parse_rational(v) for v in self.values)
        if len(vals) != len(self.base):
            raise InputError("one value per base point required")
        object.__setattr__(self, "values", vals)

    def violation(self):
        """First pair breaking the Katetov inequalities, or ``None``."""
        n = len(self.base)
        for i in range(n):
            for j in range(n):
                dij = self.base.d(i, j)
                a, b = self.values[i], self.values[j]
                if abs(a - b) > dij or dij > a + b:
                    return i, j
        return None


def extend_by_katetov(f, new_label):
    """One-point extension: the new point sits at distance ``f(x)`` from each ``x``."""
    base = f.base
    if new_label in base._index:
        raise PreconditionError(f"label {new_label!r} already used")
    zero = [i for i, v in enumerate(f.values) if v <= 0]
    if zero:
        raise ZeroDistance(f"value at {base.points[zero[0]]!r} is not positive")
    w = f.violation()
    if w is not None:
        raise NotKatetov(w, base.points)
    rows = base.matrix()
    for row, v in zip(rows, f.values):
        row.append(v)
    rows.append(list(f.values) + [Fraction(0)])
    return FiniteMetricSpace.from_trusted(base.points + (new_label,), rows)


def _is_square(k):
    return k >= 0 and isqrt(k) ** 2 == k


def sqrt_bracket(q, k):
    """Dyadic bracket ``(lo, hi)`` of width ``2**-k`` with ``lo <= sqrt(q) <= hi``.

    Perfect squares get a zero-width bracket.
    """
    a, b = q.numerator, q.denominator
    if _is_square(a) and _is_square(b):
        root = Fraction(isqrt(a), isqrt(b))
        return root, root
    s = isqrt((a << (2 * k)) // b)
    lo, hi = Fraction(s, 1 << k), Fraction(s + 1, 1 << k)
    assert lo * lo < q < hi * hi
    return lo, hi


def snowflake(space, eps):
    """Rational approximation of the square-root metric within ``eps``.

    Each distance becomes the midpoint of a certified dyadic bracket around
    its square root (exact for perfect squares). Raises :class:`MarginTooTight`
    unless the brackets prove every strict triangle inequality of the
    approximant.
    """
    eps = parse_rational(eps)
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    # bracket width <= eps keeps the midpoint within eps/2 of the root
    k = 0
    while Fraction(1, 1 << k) > eps:
        k += 1
    n = len(space)
    lo = [[Fraction(0)] * n for _ in range(n)]
    hi = [[Fraction(0)] * n for _ in range(n)]
    mid = [[Fraction(0)] * n for _ in range(n)]
    cache = {}
    for i in range(n):
        for j in range(i + 1, n):
            q = space.d(i, j)
            if q not in cache:
                cache[q] = sqrt_bracket(q, k)
            a, b = cache[q]
            lo[i][j] = lo[j][i] = a
            hi[i][j] = hi[j][i] = b
            mid[i][j] = mid[j][i] = (a + b) / 2
    # The approximant is within eps of sqrt(d); its strictness is certified when
    # the bracketed margin of sqrt(d) beats the accumulated rounding of three entries.
    for i, j, l in itertools.permutations(range(n), 3):
        margin = lo[i][j] + lo[j][l] - hi[i][l]
        slack = (hi[i][j] - lo[i][j] + hi[j][l] - lo[j][l] + hi[i][l] - lo[i][l]) / 2
        if margin <= slack:
            raise MarginTooTight(
                f"eps={format_rational(eps)} cannot certify the triangle "
                f"({space.points[i]}, {space.points[j]}, {space.points[l]})"
            )
    out = FiniteMetricSpace.from_trusted(space.points, mid)
    check_axioms(out.points, out.num, strict=n >= 3)
    return out
