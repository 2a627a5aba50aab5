"""Realizing a prescribed isometry subgroup as a full isometry group.

The construction glues copies of a scaled base space ``X x {0..n}``, the
max-metric power ``X^n`` and one tag point. The copy/tuple distances pin every
isometry of the glued space to the form "act by one u in every block", and
the tag distances single out the orbit of a base tuple, which cuts the
acceptable u down to the prescribed subgroup.
"""

import os
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from .errors import BadArity, InputError, NotAGroup, NotScaled, NotSubgroup, SizeBound
from .groups import (
    PermutationGroup,
    compose,
    identity,
    is_subgroup,
    isometries,
    minimal_base,
    orbit,
)
from .metric import (
    CheckResult,
    FiniteMetricSpace,
    amalgamate,
    check_axioms,
    power,
    respects_check,
    scale,
    tuple_label,
)

DEFAULT_POINT_CAP = 5000
TAG = "tag"


def point_cap():
    raw = os.environ.get("ISOFORGE_POINT_CAP")
    return int(raw) if raw else DEFAULT_POINT_CAP


def copy_label(x, j):
    return f"b:{j}:{x}"


@dataclass(frozen=True)
class PointLabel:
    kind: str  # "base" | "tuple" | "tag"
    x: int = -1
    j: int = -1
    xs: tuple = ()


@dataclass(frozen=True)
class BlockSpace:
    """A gadget space whose points remember which block they came from.

    ``labels[i]`` describes point ``i`` of ``space`` in terms of indices into
    ``base``. ``params`` holds ``n``, ``J``, the tag constants ``c`` (when a
    tag is present) and the rescaling factor ``r``.
    """

    space: FiniteMetricSpace
    labels: tuple
    base: FiniteMetricSpace
    params: dict = field(default_factory=dict)

    def indices(self, kind):
        return [i for i, lab in enumerate(self.labels) if lab.kind == kind]

    def copy_indices(self, j):
        return [i for i, lab in enumerate(self.labels) if lab.kind == "base" and lab.j == j]

    def tag_index(self):
        tags = self.indices("tag")
        return tags[0] if tags else None

    def blocks(self, unit_base=None):
        """``(labels, expected metric)`` pairs for the block axioms.

        ``unit_base`` is the base metric the blocks should carry; by default
        the stored base scaled by ``1/r``.
        """
        p = unit_base if unit_base is not None else self.unit_base()
        n = self.params.get("n", 0)
        out = []
        for j in [0] + list(self.params.get("J", ())):
            idx = self.copy_indices(j)
            out.append(([self.space.points[i] for i in idx], p))
        tup = self.indices("tuple")
        if tup:
            out.append(([self.space.points[i] for i in tup], power(p, n)))
        t = self.tag_index()
        if t is not None:
            out.append(([self.space.points[t]], None))
        return out

    def unit_base(self):
        r = self.params.get("r", Fraction(1))
        return self.base.scaled(1 / r)

    def unscaled(self):
        """The gadget metric before the final multiplication by ``r``."""
        r = self.params.get("r", Fraction(1))
        return self.space.scaled(1 / r)


@dataclass(frozen=True)
class Embedding:
    """The hat map u -> u-hat from base permutations to gadget permutations."""

    source: PermutationGroup
    image: PermutationGroup
    pairs: tuple  # ((u, u_hat), ...) sorted by u

    def as_dict(self):
        return dict(self.pairs)


def _check_gadget_input(p_space, n):
    if n < 2:
        raise BadArity(f"tuple length must be at least 2, got {n}")
    if len(p_space) and p_space.max_distance() >= 1:
        raise NotScaled("all distances must be strictly below 1")


def _gadget_labels(p_space, n, with_tag):
    X = p_space.points
    names, labels = [], []
    for j in range(n + 1):
        for i, x in enumerate(X):
            names.append(copy_label(x, j))
            labels.append(PointLabel("base", x=i, j=j))
    for t in product(range(len(X)), repeat=n):
        names.append(tuple_label([X[i] for i in t]))
        labels.append(PointLabel("tuple", xs=t))
    if with_tag:
        names.append(TAG)
        labels.append(PointLabel("tag"))
    return names, tuple(labels)


def gadget_lemma24(p_space, n):
    """Copies ``X x {0..n}`` glued to ``X^n`` with unit-offset attachment distances.

    Copy 0 is attached to the diagonal tuples at ``1 + p(x, a)``; copy ``j``
    is attached to every tuple at ``1 + p(x, x_j)``. Both attachments are
    merged by amalgamation over ``X^n``. The result respects ``p`` and is
    bounded by 5.
    """
    _check_gadget_input(p_space, n)
    X = p_space.points
    m = len(X)
    P = power(p_space, n)
    tuples = list(product(range(m), repeat=n))
    one = Fraction(1)

    diag = [tuple_label([x] * n) for x in X]
    rows = []
    for i in range(m):
        rows.append([p_space.d(i, k) for k in range(m)] + [one + p_space.d(i, a) for a in range(m)])
    for a in range(m):
        rows.append([one + p_space.d(i, a) for i in range(m)] + [p_space.d(a, b) for b in range(m)])
    X0 = FiniteMetricSpace.from_trusted([copy_label(x, 0) for x in X] + diag, rows)
    lam0 = amalgamate([X0, P], diag, check=False)

    members = [lam0]
    for j in range(1, n + 1):
        N = m + len(tuples)
        num = np.zeros((N, N), dtype=object)
        den = p_space.den
        num[:m, :m] = p_space.num
        num[m:, m:] = P.num
        for i in range(m):
            for k, t in enumerate(tuples):
                v = den + int(p_space.num[i, t[j - 1]])
                num[i, m + k] = num[m + k, i] = v
        members.append(
            FiniteMetricSpace([copy_label(x, j) for x in X] + list(P.points), num.astype(np.int64), den)
        )
    lam = amalgamate(members, list(P.points), check=False)
    names, labels = _gadget_labels(p_space, n, with_tag=False)
    lam = lam.reorder(names)
    return BlockSpace(lam, labels, p_space, {"n": n, "J": tuple(range(1, n + 1))})


def tag_constants(n):
    """Strictly increasing constants in (5, 6), one per copy plus one for the orbit."""
    return tuple(5 + Fraction(i + 1, n + 3) for i in range(n + 2))


def gadget_lemma25(p_space, g, z):
    """Tuple gadget plus a tag point that marks the orbit of ``z`` under ``g``.

    The tag sits at ``c_j`` from copy ``j`` and at ``c_{n+1}`` from the orbit
    tuples; all other tag distances come from amalgamation, which places
    every other tuple strictly farther than ``c_{n+1}``.
    """
    z = tuple(int(v) for v in z)
    n = len(z)
    _check_gadget_input(p_space, n)
    if g.degree != len(p_space):
        raise NotSubgroup("group degree differs from the number of points")
    if not is_subgroup(g, isometries(p_space)):
        raise NotSubgroup("group contains a non-isometry")
    lam = gadget_lemma24(p_space, n).space
    X = p_space.points
    c = tag_constants(n)
    D = sorted(orbit(g, z))

    A = [copy_label(x, j) for j in range(n + 1) for x in X] + [tuple_label([X[i] for i in t]) for t in D]
    sub = lam.restrict(A)
    rows = sub.matrix()
    tag_row = [c[j] for j in range(n + 1) for _ in X] + [c[n + 1]] * len(D)
    for row, v in zip(rows, tag_row):
        row.append(v)
    rows.append(tag_row + [Fraction(0)])
    mu0 = FiniteMetricSpace.from_trusted(A + [TAG], rows)
    check_axioms(mu0.points, mu0.num)
    mu = amalgamate([mu0, lam], A, check=False)
    names, labels = _gadget_labels(p_space, n, with_tag=True)
    mu = mu.reorder(names)
    params = {"n": n, "J": tuple(range(1, n + 1)), "c": c, "z": z, "orbit": tuple(D)}
    return BlockSpace(mu, labels, p_space, params)


def hat(block, u):
    """Lift a base permutation to the gadget: u on every copy, u^n on tuples, tag fixed."""
    m = len(block.base)
    n = block.params.get("n", 0)
    out = []
    for lab in block.labels:
        if lab.kind == "base":
            out.append(lab.j * m + u[lab.x])
        elif lab.kind == "tuple":
            k = 0
            for x in lab.xs:
                k = k * m + u[x]
            out.append((n + 1) * m + k)
        else:
            out.append(len(block.labels) - 1)
    return tuple(out)


def _embedding(block, g):
    pairs = tuple((u, hat(block, u)) for u in g.elements)
    image = PermutationGroup.from_elements(len(block.space), [h for _, h in pairs])
    return Embedding(g, image, pairs)


def realize(space, g, mode="base", cap=None):
    """Finite metric space whose full isometry group is exactly the lift of ``g``.

    ``mode="full"`` marks the orbit of the tuple of all points; ``"base"``
    marks the orbit of a base of the full isometry group, which is enough
    because the stabilizer of a base is trivial. Returns
    ``(BlockSpace, Embedding)``.
    """
    if mode not in ("full", "base"):
        raise InputError(f"mode must be 'full' or 'base', got {mode!r}")
    if g.degree != len(space):
        raise NotSubgroup("group degree differs from the number of points")
    iso = isometries(space)
    if not is_subgroup(g, iso):
        raise NotSubgroup("group contains a non-isometry")
    m = len(space)
    if m == 1:
        block = BlockSpace(space, (PointLabel("base", x=0, j=0),), space, {"n": 0, "J": (), "r": Fraction(1)})
        return block, Embedding(g, g, tuple((u, u) for u in g.elements))
    z = tuple(range(m)) if mode == "full" else minimal_base(iso)
    n = len(z)
    cap = point_cap() if cap is None else cap
    size = m * (n + 1) + m**n + 1
    if size > cap:
        raise SizeBound(f"realization needs {size} points, cap is {cap}")
    p, r = scale(space)
    mu = gadget_lemma25(p, g, z)
    rho = mu.space.scaled(r)
    params = dict(mu.params, r=r, mode=mode)
    block = BlockSpace(rho, mu.labels, space, params)
    return block, _embedding(block, g)


def verify_realization(block, emb, iso=None):
    """Recompute the isometry group from scratch and compare with the embedding image.

    Also checks the embedding is a bijective homomorphism that acts blockwise.
    ``iso`` may pass in a precomputed isometry group of ``block.space``.
    """
    report = {"oracle": "isometry backtracking search on the realized space"}
    src = emb.source
    mapping = emb.as_dict()
    if set(mapping) != src.as_set():
        return CheckResult(False, "embedding domain differs from the source group"), report
    if set(mapping.values()) != emb.image.as_set() or len(set(mapping.values())) != src.order:
        return CheckResult(False, "embedding is not a bijection onto its image"), report
    for a in src.elements:
        if mapping[a] != hat(block, a):
            return CheckResult(False, "embedding does not act blockwise", (a,)), report
        for b in src.elements:
            if mapping[compose(a, b)] != compose(mapping[a], mapping[b]):
                return CheckResult(False, "embedding is not a homomorphism", (a, b)), report
    try:
        check_axioms(block.space.points, block.space.num)
    except InputError as exc:
        return CheckResult(False, f"not a metric: {exc}"), report
    found = iso if iso is not None else isometries(block.space)
    report["found_order"] = found.order
    report["expected_order"] = emb.image.order
    extra = sorted(found.as_set() - emb.image.as_set())
    if extra:
        return CheckResult(False, "unexpected isometry", (extra[0],)), report
    missing = sorted(emb.image.as_set() - found.as_set())
    if missing:
        return CheckResult(False, "lifted element is not an isometry", (missing[0],)), report
    return CheckResult(True), report


def certify_gadget(block):
    """Exact checks of the gadget properties on the unscaled metric.

    Returns a dict of named :class:`CheckResult` verdicts: block axioms, the
    bounds 5 (before the tag) and 11 (with it), the unit-distance
    characterizations for copy 0 and copies j >= 1, tag uniqueness and the
    orbit characterization of the tag distance.
    """
    mu = block.unscaled()
    p = block.unit_base()
    n = block.params["n"]
    c = block.params["c"]
    m = len(p)
    den = mu.den
    M = mu.num
    t = block.tag_index()
    out = {}
    out["respects"] = respects_check(mu, block.blocks(p))
    body = [i for i in range(len(mu)) if i != t]
    lam_max = Fraction(int(M[np.ix_(body, body)].max()), den)
    out["lambda<=5"] = CheckResult(lam_max <= 5, "" if lam_max <= 5 else f"max {lam_max}")
    mu_max = Fraction(int(M.max()), den)
    out["mu<=11"] = CheckResult(mu_max <= 11, "" if mu_max <= 11 else f"max {mu_max}")

    tuples = block.indices("tuple")
    ok = CheckResult(True)
    for i in block.copy_indices(0):
        x = block.labels[i].x
        for k in tuples:
            xs = block.labels[k].xs
            if (M[i, k] == den) != all(v == x for v in xs):
                ok = CheckResult(False, "copy-0 unit distance characterization", (mu.points[i], mu.points[k]))
                break
        if not ok:
            break
    out["copy0_unit_iff_diagonal"] = ok
    ok = CheckResult(True)
    for j in range(1, n + 1):
        for i in block.copy_indices(j):
            x = block.labels[i].x
            for k in tuples:
                if (M[i, k] == den) != (block.labels[k].xs[j - 1] == x):
                    ok = CheckResult(False, f"copy-{j} unit distance characterization", (mu.points[i], mu.points[k]))
                    break
            if not ok:
                break
    out["copyj_unit_iff_coordinate"] = ok

    # c0 and c1 occur as entries, so the shared denominator is a multiple of theirs.
    c0 = c[0].numerator * (den // c[0].denominator)
    c1 = c[1].numerator * (den // c[1].denominator)
    holders = [i for i in range(len(mu)) if (M[i] == c0).any() and (M[i] == c1).any()]
    out["tag_unique"] = CheckResult(holders == [t], "" if holders == [t] else f"holders {holders}")

    orbit_set = set(block.params["orbit"])
    top = c[n + 1]
    ok = CheckResult(True)
    for k in tuples:
        dist = mu.d(k, t)
        in_orbit = block.labels[k].xs in orbit_set
        if (dist == top) != in_orbit or dist < top:
            ok = CheckResult(False, "tag distance does not characterize the orbit", (mu.points[k],))
            break
    out["tag_marks_orbit"] = ok
    assert len(block.copy_indices(0)) == m
    return out


# ---------------------------------------------------------------------------
# abstract groups

def _perm_table(perms):
    """Cayley table of a permutation group listed with the identity first."""
    index = {g: i for i, g in enumerate(perms)}
    return [[index[compose(a, b)] for b in perms] for a in perms]


def _dihedral(k):
    r = tuple((i + 1) % k for i in range(k))
    s = tuple((-i) % k for i in range(k))
    elems = []
    for flip in (identity(k), s):
        g = flip
        for _ in range(k):
            elems.append(g)
            g = compose(r, g)
    elems.sort()
    return elems


def _quaternion_table():
    # Elements (sign, unit) with unit in 1, i, j, k; index = 4 * (sign == -1) + unit.
    unit_mul = {
        (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
        (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
        (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
        (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
    }
    table = []
    for a in range(8):
        row = []
        for b in range(8):
            sa = -1 if a >= 4 else 1
            sb = -1 if b >= 4 else 1
            sign, unit = unit_mul[(a % 4, b % 4)]
            s = sa * sb * sign
            row.append(unit + (4 if s < 0 else 0))
        table.append(row)
    return table


def _alternating4():
    from itertools import permutations

    def parity(p):
        inv = sum(1 for i in range(4) for j in range(i + 1, 4) if p[i] > p[j])
        return inv % 2

    return sorted(p for p in permutations(range(4)) if parity(p) == 0)


def preset_table(name):
    """Cayley table of a named small group (C2..C10, S3, D4, D5, Q8, A4)."""
    key = name.upper()
    if key.startswith("C") and key[1:].isdigit():
        k = int(key[1:])
        if k < 1:
            raise InputError(f"unknown preset {name!r}")
        return [[(a + b) % k for b in range(k)] for a in range(k)]
    if key == "S3":
        from itertools import permutations

        return _perm_table(sorted(permutations(range(3))))
    if key in ("D4", "D5"):
        return _perm_table(_dihedral(int(key[1])))
    if key == "Q8":
        return _quaternion_table()
    if key == "A4":
        return _perm_table(_alternating4())
    raise InputError(f"unknown preset {name!r}")


PRESETS = tuple([f"C{k}" for k in range(2, 11)] + ["S3", "D4", "Q8", "D5", "A4"])


def check_group_table(table):
    """Validate a Cayley table; returns ``(identity, inverses)``."""
    try:
        T = [[int(v) for v in row] for row in table]
    except (TypeError, ValueError):
        raise InputError("group table entries must be integers") from None
    N = len(T)
    if N == 0 or any(len(row) != N for row in T):
        raise NotAGroup("shape", "(table must be square and nonempty)")
    if any(not 0 <= v < N for row in T for v in row):
        raise NotAGroup("closure", "(entry out of range)")
    e = next((a for a in range(N) if all(T[a][b] == b and T[b][a] == b for b in range(N))), None)
    if e is None:
        raise NotAGroup("identity")
    inv = []
    for a in range(N):
        b = next((b for b in range(N) if T[a][b] == e and T[b][a] == e), None)
        if b is None:
            raise NotAGroup("inverses", f"(element {a} has no inverse)")
        inv.append(b)
    for a in range(N):
        for b in range(N):
            ab = T[a][b]
            for c in range(N):
                if T[ab][c] != T[a][T[b][c]]:
                    raise NotAGroup("associativity", f"at ({a}, {b}, {c})")
    return e, inv


def length_classes(table):
    """Nontrivial classes ``{g, g^-1}``, sorted by smallest member."""
    T = [[int(v) for v in row] for row in table]
    e, inv = check_group_table(T)
    classes = []
    seen = {e}
    for a in range(len(T)):
        if a not in seen:
            cls = sorted({a, inv[a]})
            seen.update(cls)
            classes.append(cls)
    return classes


def group_to_space(table):
    """Left-invariant metric on a finite group and its left-translation group.

    ``table`` is a Cayley table or a preset name. The length of each element
    is shared only by ``g`` and ``g^-1``, with distinct classes getting
    distinct values in (1/2, 1]; any two such values sum past 1, so the
    length is subadditive and ``d(x, y) = len(x^-1 y)`` is a metric.
    """
    if isinstance(table, str):
        table = preset_table(table)
    T = [[int(v) for v in row] for row in table]
    e, inv = check_group_table(T)
    N = len(T)
    classes = length_classes(T)
    K = len(classes)
    length = [Fraction(0)] * N
    for k, cls in enumerate(classes):
        for a in cls:
            length[a] = Fraction(1, 2) + Fraction(k + 1, 2 * K)
    rows = [[length[T[inv[x]][y]] for y in range(N)] for x in range(N)]
    space = FiniteMetricSpace.from_trusted([f"g{i}" for i in range(N)], rows)
    check_axioms(space.points, space.num)
    left = [tuple(T[g][x] for x in range(N)) for g in range(N)]
    group = PermutationGroup.from_elements(N, left)
    return space, group


def permgroup_to_space(g):
    """Realize a permutation group over the discrete metric on its points."""
    from .metric import discrete_space

    if g.degree < 2:
        raise InputError("permutation group degree must be at least 2")
    space = discrete_space([str(i) for i in range(g.degree)])
    return realize(space, g, mode="base")
