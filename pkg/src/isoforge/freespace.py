"""Lipschitz-free (Arens-Eells) geometry over a finite metric space.

Molecule norms are computed as minimum-cost transport over the complete
metric graph with exact rationals, and every norm comes with a 1-Lipschitz
potential proving optimality.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from . import lp
from .errors import DiameterTooLarge, InputError, NotIsometry, NotStrict, PreconditionError
from .groups import compose, identity
from .metric import AxiomViolation, FiniteMetricSpace, check_axioms, parse_rational


@dataclass(frozen=True)
class Molecule:
    base: FiniteMetricSpace
    coeffs: tuple

    def __post_init__(self):
        c = tuple(parse_rational(v) for v in self.coeffs)
        if len(c) != len(self.base):
            raise InputError("one coefficient per point required")
        if sum(c) != 0:
            raise InputError(f"molecule coefficients sum to {sum(c)}, not 0")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def elementary(cls, base, p, q, weight=1):
        c = [Fraction(0)] * len(base)
        c[p] += weight
        c[q] -= weight
        return cls(base, tuple(c))

    @classmethod
    def from_labels(cls, base, mapping):
        c = [Fraction(0)] * len(base)
        for label, v in mapping.items():
            c[base.index(label)] = parse_rational(v)
        return cls(base, tuple(c))

    def is_zero(self):
        return not any(self.coeffs)

    def _same_base(self, other):
        if other.base is not self.base and other.base != self.base:
            raise InputError("molecules live on different spaces")

    def __add__(self, other):
        self._same_base(other)
        return Molecule(self.base, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return Molecule(self.base, tuple(-a for a in self.coeffs))

    def __mul__(self, k):
        k = Fraction(k)
        return Molecule(self.base, tuple(k * a for a in self.coeffs))

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, Molecule) and self.coeffs == other.coeffs and self.base == other.base

    def __hash__(self):
        return hash(self.coeffs)


@dataclass(frozen=True)
class TransportCertificate:
    """Optimal plan, optimal 1-Lipschitz potential, and their common value."""

    plan: tuple  # ((from, to, amount), ...) sorted, amounts > 0
    potential: tuple
    value: Fraction

    def check(self, m):
        """Exact verification of feasibility, Lipschitz bound and zero duality gap."""
        X = m.base
        n = len(X)
        net = [Fraction(0)] * n
        for p, q, f in self.plan:
            if f <= 0:
                return False
            net[p] += f
            net[q] -= f
        if tuple(net) != m.coeffs:
            return False
        phi = self.potential
        for p in range(n):
            for q in range(n):
                if phi[p] - phi[q] > X.d(p, q):
                    return False
        primal = sum((f * X.d(p, q) for p, q, f in self.plan), Fraction(0))
        dual = sum((c * v for c, v in zip(m.coeffs, phi)), Fraction(0))
        return primal == dual == self.value


def _residual_arcs(X, flow):
    """Residual arcs ``(u, v, cost, capacity or None)``; reverse arcs cancel flow."""
    n = len(X)
    arcs = []
    for u in range(n):
        for v in range(n):
            if u != v:
                arcs.append((u, v, X.d(u, v), None))
    for (p, q), f in flow.items():
        if f > 0:
            arcs.append((q, p, -X.d(p, q), f))
    return arcs


def _bellman_ford(n, arcs, sources):
    dist = [None] * n
    pred = [None] * n
    for s in sources:
        dist[s] = Fraction(0)
    for _ in range(n):
        changed = False
        for a in arcs:
            u, v, c, _ = a
            if dist[u] is None:
                continue
            nd = dist[u] + c
            if dist[v] is None or nd < dist[v]:
                dist[v] = nd
                pred[v] = a
                changed = True
        if not changed:
            return dist, pred
    raise AssertionError("negative residual cycle: flow is not optimal")


def ae_norm(m):
    """Arens-Eells norm of a molecule with a transport/potential certificate.

    Successive shortest paths ship the positive part onto the negative part.
    The potential is the residual distance to the original sinks, which is
    1-Lipschitz and tight on every used arc.
    """
    X = m.base
    n = len(X)
    if m.is_zero():
        return TransportCertificate((), tuple([Fraction(0)] * n), Fraction(0))
    supply = {p: c for p, c in enumerate(m.coeffs) if c > 0}
    demand = {q: -c for q, c in enumerate(m.coeffs) if c < 0}
    flow = {}
    while supply:
        arcs = _residual_arcs(X, flow)
        dist, pred = _bellman_ford(n, arcs, sorted(supply))
        t = min(demand, key=lambda q: (dist[q], q))
        path = []
        v = t
        while v not in supply or (pred[v] is not None and dist[v] != 0):
            a = pred[v]
            if a is None:
                break
            path.append(a)
            v = a[0]
        s = v
        amount = min(supply[s], demand[t])
        for _, _, _, cap in path:
            if cap is not None:
                amount = min(amount, cap)
        for u, w, c, cap in path:
            if cap is None:
                flow[(u, w)] = flow.get((u, w), Fraction(0)) + amount
            else:
                flow[(w, u)] -= amount
        supply[s] -= amount
        demand[t] -= amount
        if supply[s] == 0:
            del supply[s]
        if demand[t] == 0:
            del demand[t]

    plan = tuple(sorted((p, q, f) for (p, q), f in flow.items() if f > 0))
    # Potential: shortest residual distance to the sink set, via reversed arcs.
    sinks = [q for q, c in enumerate(m.coeffs) if c < 0]
    rev = [(v, u, c, cap) for u, v, c, cap in _residual_arcs(X, dict((p_q, f) for p_q, f in flow.items() if f > 0))]
    phi, _ = _bellman_ford(n, rev, sinks)
    value = sum((f * X.d(p, q) for p, q, f in plan), Fraction(0))
    cert = TransportCertificate(plan, tuple(phi), value)
    assert cert.check(m), "transport certificate failed its own check"
    return cert


def ae_map(u, m):
    """Push a molecule forward along an isometry: coefficient at p moves to u(p)."""
    X = m.base
    u = tuple(int(v) for v in u)
    if sorted(u) != list(range(len(X))) or not X.preserves(u):
        raise NotIsometry("map is not an isometry of the base space")
    c = [Fraction(0)] * len(X)
    for p, v in enumerate(m.coeffs):
        c[u[p]] = v
    return Molecule(X, tuple(c))


def require_strict(space):
    if len(space) < 3:
        return
    try:
        check_axioms(space.points, space.num, strict=True)
    except AxiomViolation as exc:
        raise NotStrict(exc.witness, space.points) from None


def _vertex_list(space):
    out = []
    for p, q in combinations(range(len(space)), 2):
        v = Molecule.elementary(space, p, q, 1 / space.d(p, q))
        out.append(v)
        out.append(-v)
    return out


def is_ball_vertex(v, others):
    """True iff ``v`` is not a convex combination of ``others`` (exact LP)."""
    if not others:
        return True
    k = len(v.coeffs)
    A = [[w.coeffs[i] for w in others] for i in range(k)]
    A.append([Fraction(1)] * len(others))
    b = list(v.coeffs) + [Fraction(1)]
    return lp.feasible_point(A, b) is None


def ball_vertices(space, verify=True):
    """Normalized elementary molecules ``±(χp − χq)/d(p,q)``, each checked to be extreme.

    Ordered pair by pair (p < q), positive before negative.
    """
    require_strict(space)
    verts = _vertex_list(space)
    if verify:
        for i, v in enumerate(verts):
            if not is_ball_vertex(v, verts[:i] + verts[i + 1:]):
                raise PreconditionError(f"molecule {i} is not an extreme point of the unit ball")
    return verts


@dataclass(frozen=True)
class BallSymmetry:
    """A linear self-map of the molecule space that permutes the ball vertices.

    ``matrix[i][j]`` is coordinate i of the image of ``χ_{j+1} − χ_0`` in the
    basis ``χ_{i+1} − χ_0``.
    """

    vertex_perm: tuple
    matrix: tuple


def _coords(coeffs):
    return tuple(coeffs[1:])


def linear_ball_symmetries(space, verify_vertices=True):
    """Every linear map of the molecule space permuting the unit-ball vertices.

    Backtracks over images of the basis vertices ``(χ_i − χ_0)/d(i,0)``; as
    soon as two basis images are fixed, the image of the vertex spanned by
    that pair is determined and must itself be a vertex.
    """
    verts = ball_vertices(space, verify=verify_vertices)
    k = len(space)
    if k <= 1:
        return [BallSymmetry((), ())]
    lookup = {v.coeffs: i for i, v in enumerate(verts)}
    vecs = [v.coeffs for v in verts]
    d0 = [space.d(i, 0) if i else None for i in range(k)]

    def comb(terms):
        out = [Fraction(0)] * k
        for c, vec in terms:
            for i in range(k):
                out[i] += c * vec[i]
        return tuple(out)

    basis = [lookup[Molecule.elementary(space, i, 0, 1 / d0[i]).coeffs] for i in range(1, k)]
    results = []
    images = []

    def pair_image(s, t):
        # (χ_s − χ_t)/d(s,t) = (d(s,0) b_s − d(t,0) b_t)/d(s,t), with s, t >= 1
        dst = space.d(s, t)
        return comb([(d0[s] / dst, vecs[images[s - 1]]), (-d0[t] / dst, vecs[images[t - 1]])])

    def extend(depth):
        if depth == k - 1:
            perm = []
            for v in verts:
                c = v.coeffs
                img = comb([(c[i], [a * d0[i] for a in vecs[images[i - 1]]]) for i in range(1, k) if c[i]])
                j = lookup.get(img)
                if j is None:
                    return
                perm.append(j)
            if len(set(perm)) != len(perm):
                return
            cols = [[a * d0[j] for a in vecs[images[j - 1]]] for j in range(1, k)]
            matrix = tuple(tuple(cols[j][i] for j in range(k - 1)) for i in range(1, k))
            results.append(BallSymmetry(tuple(perm), matrix))
            return
        s = depth + 1
        for w in range(len(verts)):
            if w in images:
                continue
            images.append(w)
            if all(pair_image(t, s) in lookup for t in range(1, s)):
                extend(depth + 1)
            images.pop()

    extend(0)
    results.sort(key=lambda g: g.vertex_perm)
    return results


def signed_isometry_perms(space, iso):
    """Vertex permutations of ``±AE(u)`` for every isometry ``u``."""
    verts = _vertex_list(space)
    lookup = {v.coeffs: i for i, v in enumerate(verts)}
    out = set()
    for u in iso.elements:
        for sign in (1, -1):
            perm = tuple(lookup[(sign * ae_map(u, v)).coeffs] for v in verts)
            out.add(perm)
    return out


CHAIN = (("0", Fraction(0)), ("1/4", Fraction(1, 4)), ("3/4", Fraction(3, 4)), ("1", Fraction(1)))


def attach_anchor_chain(y_space):
    """Append chain points 0, 1/4, 3/4, 1 with ``|s − t|`` among them and ``1 + t`` to each y-point.

    Every isometry of the result fixes the chain, and isometries of the
    y-space extend by fixing it.
    """
    if len(y_space) and y_space.max_distance() >= Fraction(1, 2):
        raise DiameterTooLarge("y-space diameter must be below 1/2")
    clash = [lab for lab, _ in CHAIN if lab in y_space._index]
    if clash:
        raise InputError(f"labels {clash} are reserved for the chain")
    rows = [list(r) for r in y_space.matrix()]
    for row in rows:
        row.extend(1 + t for _, t in CHAIN)
    for _, s in CHAIN:
        rows.append([1 + s] * len(y_space) + [abs(s - t) for _, t in CHAIN])
    labels = y_space.points + tuple(lab for lab, _ in CHAIN)
    out = FiniteMetricSpace.from_trusted(labels, rows)
    check_axioms(out.points, out.num)
    return out


def anchor_vector(space):
    """Index of the ball vertex ``(χ_"1" − χ_"0")/d("1","0")``."""
    if "0" not in space.points or "1" not in space.points:
        raise PreconditionError('anchor points "0" and "1" are required')
    one, zero = space.index("1"), space.index("0")
    target = Molecule.elementary(space, one, zero, 1 / space.d(one, zero)).coeffs
    for i, v in enumerate(_vertex_list(space)):
        if v.coeffs == target:
            return i
    raise AssertionError("anchor vertex missing")


def fixed_vector_subgroup(space, symmetries=None):
    """Ball symmetries fixing the normalized anchor molecule ``χ_"1" − χ_"0"``."""
    if symmetries is None:
        symmetries = linear_ball_symmetries(space)
    e = anchor_vector(space)
    return [g for g in symmetries if g.vertex_perm[e] == e]


def compose_symmetries(g, h):
    return compose(g.vertex_perm, h.vertex_perm)


def is_identity_symmetry(g):
    return g.vertex_perm == identity(len(g.vertex_perm))
