"""Independent reference implementations used only by the tests.

Each oracle works from the textbook definition with plain Python and
``Fraction`` arithmetic, sharing no code path with the package under test.
"""

import itertools
from fractions import Fraction


def dist_rows(space):
    return [[space.d(i, j) for j in range(len(space))] for i in range(len(space))]


def brute_isometries(rows):
    """Filter all n! permutations by distance preservation."""
    n = len(rows)
    out = []
    for p in itertools.permutations(range(n)):
        if all(rows[p[i]][p[j]] == rows[i][j] for i in range(n) for j in range(i + 1, n)):
            out.append(p)
    return sorted(out)


def compose(g, h):
    return tuple(g[x] for x in h)


def table_closure(gens, degree):
    """Close a generator set by multiplying every pair until nothing new appears."""
    elems = {tuple(range(degree))} | {tuple(g) for g in gens}
    while True:
        new = {compose(a, b) for a in elems for b in elems} - elems
        if not new:
            return sorted(elems)
        elems |= new


def brute_stabilizer(elements, points):
    return [g for g in elements if all(g[p] == p for p in points)]


def brute_isomorphic(g1, g2):
    """Try every bijection between two small groups (given as element lists)."""
    if len(g1) != len(g2):
        return False
    for image in itertools.permutations(g2):
        phi = dict(zip(g1, image))
        if all(phi[compose(a, b)] == compose(phi[a], phi[b]) for a in g1 for b in g1):
            return True
    return False


def brute_amalgam_cross(members, common, x, y):
    """min over a in common of d_s(x, a) + d_t(a, y); members are (space) with x, y in different ones."""
    sx = next(s for s in members if x in s.points)
    sy = next(s for s in members if y in s.points)
    return min(sx.distance(x, a) + sy.distance(a, y) for a in common)


def bisect_sqrt(q, eps):
    """Interval [lo, hi] of width <= eps containing sqrt(q), by plain bisection."""
    lo, hi = Fraction(0), max(Fraction(1), q)
    while hi - lo > eps:
        mid = (lo + hi) / 2
        if mid * mid <= q:
            lo = mid
        else:
            hi = mid
    return lo, hi


def _solve(A, b):
    """Unique solution of a square rational system, or None if singular."""
    n = len(A)
    M = [[Fraction(v) for v in row] + [Fraction(rhs)] for row, rhs in zip(A, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col] / M[col][col]
                M[r] = [a - f * c for a, c in zip(M[r], M[col])]
    return [M[i][n] / M[i][i] for i in range(n)]


def transport_lp_vertices(rows, coeffs):
    """Minimum transport cost by enumerating basic feasible solutions.

    Variables are flows on ordered pairs; constraints are the divergences at
    all points but the last (the last is implied by the zero sum).
    """
    n = len(rows)
    arcs = [(p, q) for p in range(n) for q in range(n) if p != q]
    if all(c == 0 for c in coeffs):
        return Fraction(0)
    k = n - 1
    best = None
    for basis in itertools.combinations(range(len(arcs)), k):
        A = []
        for v in range(k):
            A.append([(1 if arcs[a][0] == v else 0) - (1 if arcs[a][1] == v else 0) for a in basis])
        sol = _solve(A, [Fraction(c) for c in coeffs[:k]])
        if sol is None or any(x < 0 for x in sol):
            continue
        cost = sum(x * rows[arcs[a][0]][arcs[a][1]] for x, a in zip(sol, basis))
        if best is None or cost < best:
            best = cost
    return best


def signed_perm_candidates(space_points, iso):
    """Vertex permutations of the maps ±AE(u), computed directly from labels."""
    n = len(space_points)
    verts = []
    for p, q in itertools.combinations(range(n), 2):
        verts += [(p, q), (q, p)]
    index = {v: i for i, v in enumerate(verts)}
    out = set()
    for u in iso:
        for s in (1, -1):
            perm = []
            for p, q in verts:
                a, b = (u[p], u[q]) if s == 1 else (u[q], u[p])
                perm.append(index[(a, b)])
            out.add(tuple(perm))
    return out
