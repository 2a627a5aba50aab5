"""Explicit permutation groups and isometry-group enumeration.

Permutations are image tuples: ``g[x]`` is the image of point ``x``.
Composition is right-to-left, ``compose(g, h)[x] == g[h[x]]``.
"""

import itertools
from collections import Counter, deque
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DegreeMismatch, InputError, NotAGroup, OrderBound

DEFAULT_ORDER_CAP = 10**6


def identity(n):
    return tuple(range(n))


def compose(g, h):
    return tuple(g[x] for x in h)


def inverse(g):
    inv = [0] * len(g)
    for x, y in enumerate(g):
        inv[y] = x
    return tuple(inv)


def is_permutation(p, degree):
    return len(p) == degree and sorted(p) == list(range(degree))


def element_order(g):
    e = identity(len(g))
    k, h = 1, g
    while h != e:
        h = compose(g, h)
        k += 1
    return k


def _close(start, gens, cap):
    """Smallest set containing ``start`` closed under left multiplication by ``gens``."""
    seen = set(start)
    queue = deque(sorted(seen))
    while queue:
        x = queue.popleft()
        for s in gens:
            y = compose(s, x)
            if y not in seen:
                seen.add(y)
                if len(seen) > cap:
                    raise OrderBound(f"group order exceeds cap {cap}")
                queue.append(y)
    return seen


def _greedy_generators(elements, cap):
    """Scan elements in sorted order, keeping each one not yet generated."""
    if not elements:
        return (), set()
    n = len(elements[0])
    span = {identity(n)}
    gens = []
    for g in elements:
        if g not in span:
            gens.append(g)
            span = _close(span, gens, cap)
    return tuple(gens), span


@dataclass(frozen=True)
class PermutationGroup:
    degree: int
    elements: tuple
    generators: tuple
    _set: frozenset = field(default=frozenset(), repr=False, compare=False)

    @classmethod
    def from_elements(cls, degree, elements, cap=DEFAULT_ORDER_CAP):
        """Group from an explicit element list; closure is verified, not assumed."""
        elems = sorted({tuple(int(x) for x in g) for g in elements})
        for g in elems:
            if not is_permutation(g, degree):
                raise InputError(f"{list(g)} is not a permutation of degree {degree}")
        if identity(degree) not in elems:
            raise NotAGroup("identity", "(identity missing)")
        gens, span = _greedy_generators(elems, cap)
        if span != set(elems):
            raise NotAGroup("closure", "(element set is not closed under composition)")
        return cls(degree, tuple(elems), gens, frozenset(elems))

    @classmethod
    def trivial(cls, degree):
        e = identity(degree)
        return cls(degree, (e,), (), frozenset((e,)))

    @property
    def order(self):
        return len(self.elements)

    def __contains__(self, g):
        return tuple(g) in self._set

    def __len__(self):
        return len(self.elements)

    def as_set(self):
        return self._set

    def check_invariants(self):
        """Exhaustive identity / closure / inverse / canonical-order check."""
        S = self._set
        assert identity(self.degree) in S
        assert list(self.elements) == sorted(S)
        for g in self.elements:
            assert is_permutation(g, self.degree)
            assert inverse(g) in S
            for h in self.elements:
                assert compose(g, h) in S
        return True


def group_closure(degree, gens, cap=DEFAULT_ORDER_CAP):
    """Smallest permutation group containing ``gens``, materialised explicitly."""
    gens = [tuple(int(x) for x in g) for g in gens]
    for g in gens:
        if not is_permutation(g, degree):
            raise InputError(f"{list(g)} is not a permutation of degree {degree}")
    elems = sorted(_close({identity(degree)}, gens, cap))
    found, _ = _greedy_generators(elems, cap)
    return PermutationGroup(degree, tuple(elems), found, frozenset(elems))


def isometries(space, prune=True, backend=None, cap=DEFAULT_ORDER_CAP):
    """The full isometry group of a finite metric space.

    Profile refinement only narrows candidate images; the result is the exact
    set of distance-preserving permutations either way.
    """
    found = kernels.search_isometries(space.num, prune=prune, backend=backend)
    if len(found) > cap:
        raise OrderBound(f"isometry group order {len(found)} exceeds cap {cap}")
    elems = sorted(tuple(int(x) for x in row) for row in found)
    gens, span = _greedy_generators(elems, cap)
    assert len(span) == len(elems), "isometry search returned a non-group"
    return PermutationGroup(len(space), tuple(elems), gens, frozenset(elems))


def isometries_bruteforce(space):
    """Reference filter over all n! permutations (small spaces only)."""
    n = len(space)
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64).reshape(-1, n)
    D = space.num
    keep = np.ones(len(perms), dtype=bool)
    for i in range(n):
        for j in range(i + 1, n):
            keep &= D[perms[:, i], perms[:, j]] == D[i, j]
    return sorted(tuple(int(x) for x in p) for p in perms[keep])


def is_subgroup(h, g):
    if h.degree != g.degree:
        raise DegreeMismatch(f"degrees {h.degree} and {g.degree} differ")
    return h.as_set() <= g.as_set()


def orbit(g, points):
    points = tuple(points)
    if any(not 0 <= z < g.degree for z in points):
        raise InputError("tuple index out of range")
    return frozenset(tuple(u[z] for z in points) for u in g.elements)


def pointwise_stabilizer(g, points):
    return [u for u in g.elements if all(u[z] == z for z in points)]


def minimal_base(g):
    """Greedy base: repeatedly fix the point that shrinks the stabilizer most.

    Ties go to the lowest index. The result is padded with the lowest unused
    points to length at least 2.
    """
    stab = list(g.elements)
    base = []
    while len(stab) > 1:
        best, best_size = None, None
        for x in range(g.degree):
            if x in base:
                continue
            size = sum(1 for u in stab if u[x] == x)
            if best_size is None or size < best_size:
                best, best_size = x, size
        base.append(best)
        stab = [u for u in stab if u[best] == best]
    for x in range(g.degree):
        if len(base) >= 2:
            break
        if x not in base:
            base.append(x)
    return tuple(base)


def all_subgroups(g):
    """Every subgroup, as joins of cyclic subgroups; sorted by (order, elements)."""
    cyclic = {}
    for u in g.elements:
        c = group_closure(g.degree, [u])
        cyclic.setdefault(c.elements, c)
    found = dict(cyclic)
    frontier = list(found.values())
    while frontier:
        new = []
        for h in frontier:
            for c in cyclic.values():
                if c.as_set() <= h.as_set():
                    continue
                j = group_closure(g.degree, list(h.generators) + list(c.generators))
                if j.elements not in found:
                    found[j.elements] = j
                    new.append(j)
        frontier = new
    return sorted(found.values(), key=lambda h: (h.order, h.elements))


def _extend_hom(g1, images):
    """Extend generator images to a map on all of g1 by breadth-first search.

    Returns the map if it is consistent on every edge x -> s*x, else None.
    """
    e1 = identity(g1.degree)
    e2 = identity(len(images[0])) if images else None
    phi = {e1: e2}
    queue = deque([e1])
    gens = g1.generators
    while queue:
        x = queue.popleft()
        for s, t in zip(gens, images):
            y = compose(s, x)
            img = compose(t, phi[x])
            if y in phi:
                if phi[y] != img:
                    return None
            else:
                phi[y] = img
                queue.append(y)
    return phi


def abstract_isomorphic(g1, g2, cap=DEFAULT_ORDER_CAP):
    """Decide abstract isomorphism; returns ``(True, witness)`` or ``(False, None)``.

    The witness maps each element of ``g1`` to its image in ``g2``. Candidate
    maps come from backtracking over generator images with matching element
    orders, and every accepted map is checked against the full
    multiplication table.
    """
    if g1.order > cap or g2.order > cap:
        raise OrderBound(f"group order exceeds cap {cap}")
    if g1.order != g2.order:
        return False, None
    orders1 = {u: element_order(u) for u in g1.elements}
    orders2 = {u: element_order(u) for u in g2.elements}
    if Counter(orders1.values()) != Counter(orders2.values()):
        return False, None
    if g1.order == 1:
        return True, {g1.elements[0]: g2.elements[0]}
    gens = g1.generators
    pools = [[v for v in g2.elements if orders2[v] == orders1[s]] for s in gens]
    for images in itertools.product(*pools):
        phi = _extend_hom(g1, images)
        if phi is None or len(phi) != g1.order:
            continue
        if len(set(phi.values())) != g2.order:
            continue
        if all(phi[compose(a, b)] == compose(phi[a], phi[b]) for a in g1.elements for b in g1.elements):
            return True, {u: phi[u] for u in g1.elements}
    return False, None
