"""Two-valued rigid metrics, plus a finite truncation that is not rigid."""

from dataclasses import dataclass
from fractions import Fraction

from .errors import BadRatio, TooSmall
from .metric import FiniteMetricSpace, parse_rational


@dataclass(frozen=True)
class RigidSpec:
    n: int
    a: Fraction = Fraction(1)
    b: Fraction = Fraction(2)

    def __post_init__(self):
        object.__setattr__(self, "a", parse_rational(self.a))
        object.__setattr__(self, "b", parse_rational(self.b))
        if self.n < 6:
            raise TooSmall(f"rigid {{0,a,b}} metrics need at least 6 points, got {self.n}")
        if not 0 < self.a < self.b <= 2 * self.a:
            raise BadRatio(f"need 0 < a < b <= 2a, got a={self.a}, b={self.b}")


def neighbours(n):
    """The short-distance relation S on points 1..n."""
    S = {1: {2}, 2: {1, 3, 4, 5}, 3: {2, 4}, 4: {2, 3, 5}, 5: {2, 4, 6}}
    for j in range(6, n):
        S[j] = {j - 1, j + 1}
    S[n] = {n - 1}
    return S


def rigid_metric(spec):
    """Points ``"1".."n"``: distance ``a`` along S, ``b`` elsewhere. Its only isometry is the identity."""
    if not isinstance(spec, RigidSpec):
        spec = RigidSpec(*spec)
    n = spec.n
    S = neighbours(n)
    rows = [
        [Fraction(0) if x == y else (spec.a if y in S[x] else spec.b) for y in range(1, n + 1)]
        for x in range(1, n + 1)
    ]
    return FiniteMetricSpace.from_trusted([str(i) for i in range(1, n + 1)], rows)


def rigid_metric_path(N):
    """``d(n, m) = min(|n - m|, 2)`` on ``0..N-1``.

    On the naturals this metric is rigid; truncated to N points the reflection
    ``n -> N-1-n`` survives, so the isometry group has order 2.
    """
    if N < 3:
        raise TooSmall("path truncation needs N >= 3")
    rows = [[Fraction(min(abs(i - j), 2)) for j in range(N)] for i in range(N)]
    return FiniteMetricSpace.from_trusted([str(i) for i in range(N)], rows)
