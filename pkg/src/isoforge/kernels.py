"""Hot integer kernels with a numba path and a pure-numpy fallback.

All kernels operate on ``int64`` matrices of scaled distances (numerators over
a shared denominator) or of distance codes, so every comparison is exact.

The backend is chosen per call from the ``ISOFORGE_BACKEND`` environment
variable (``numba`` or ``numpy``). ``numba`` is the default when the package
imports; otherwise the numpy path is used silently.
"""

import os

import numpy as np

try:
    import numba
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

BACKENDS = ("numba", "numpy")


def current_backend():
    choice = os.environ.get("ISOFORGE_BACKEND", "numba").strip().lower()
    if choice not in BACKENDS:
        raise ValueError(f"ISOFORGE_BACKEND must be one of {BACKENDS}, got {choice!r}")
    if choice == "numba" and not HAVE_NUMBA:
        return "numpy"
    return choice


def _resolve(backend):
    if backend is None:
        return current_backend()
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not HAVE_NUMBA:
        return "numpy"
    return backend


# ---------------------------------------------------------------------------
# triangle inequality

def _triangle_numpy(D, strict):
    n = D.shape[0]
    for i in range(n):
        # via[j, k] = D[i, j] + D[j, k]
        via = D[i, :, None] + D
        if strict:
            bad = D[i][None, :] >= via
            bad[i, :] = False
            bad[:, i] = False
            np.fill_diagonal(bad, False)
        else:
            bad = D[i][None, :] > via
        hits = np.argwhere(bad)
        if hits.size:
            j, k = hits[0]
            return i, int(j), int(k)
    return -1, -1, -1


if HAVE_NUMBA:

    @njit(cache=True)
    def _triangle_block(D, strict, i0, i1):
        """Smallest i in [i0, i1) owning a violation, or -1.

        Loops j outermost so the block's rows stay in cache while each row j
        streams past once. D is symmetric, so a violation at (i, j, k) with
        k < i mirrors one at (k, j, i); scanning k > i loses nothing.
        """
        n = D.shape[0]
        flagged = np.zeros(i1 - i0, dtype=np.bool_)
        for j in range(n):
            for i in range(i0, i1):
                if flagged[i - i0] or (strict and i == j):
                    continue
                dij = D[i, j]
                bad = 0
                if strict:
                    for k in range(i + 1, n):
                        bad += D[i, k] >= dij + D[j, k]
                    # k == j (when j > i) always ties; nothing else may
                    if bad > (1 if j > i else 0):
                        flagged[i - i0] = True
                else:
                    for k in range(i + 1, n):
                        bad += D[i, k] > dij + D[j, k]
                    if bad > 0:
                        flagged[i - i0] = True
        for t in range(i1 - i0):
            if flagged[t]:
                return i0 + t
        return -1

    @njit(cache=True)
    def _triangle_row(D, strict, i):
        n = D.shape[0]
        for j in range(n):
            if strict and i == j:
                continue
            for k in range(i + 1, n):
                if strict:
                    if k != j and D[i, k] >= D[i, j] + D[j, k]:
                        return j, k
                elif D[i, k] > D[i, j] + D[j, k]:
                    return j, k
        return -1, -1

    def _triangle_numba(D, strict, block=64):
        n = D.shape[0]
        for i0 in range(0, n, block):
            i = _triangle_block(D, strict, i0, min(n, i0 + block))
            if i >= 0:
                j, k = _triangle_row(D, strict, i)
                return i, j, k
        return -1, -1, -1


def triangle_witness(D, strict=False, backend=None):
    """First (i, j, k) in lexicographic order with D[i,k] > D[i,j] + D[j,k].

    ``D`` must be symmetric. With ``strict`` only distinct triples count and
    equality is a violation. Returns ``None`` when the inequality holds.
    """
    D = np.ascontiguousarray(D, dtype=np.int64)
    if _resolve(backend) == "numba":
        if D.size and int(np.abs(D).max()) < (1 << 30):
            # sums stay below 2**31: half-width lanes double the throughput
            D = D.astype(np.int32)
        w = _triangle_numba(D, strict)
    else:
        w = _triangle_numpy(D, strict)
    return None if w[0] < 0 else (int(w[0]), int(w[1]), int(w[2]))


# ---------------------------------------------------------------------------
# min-plus product: out[x, y] = min_a P[x, a] + Q[a, y]

def _minplus_numpy(P, Q):
    out = np.empty((P.shape[0], Q.shape[1]), dtype=np.int64)
    for x in range(P.shape[0]):
        out[x] = (P[x][:, None] + Q).min(axis=0)
    return out


if HAVE_NUMBA:

    @njit(cache=True)
    def _minplus_numba(P, Q):
        nx, na = P.shape
        ny = Q.shape[1]
        out = np.empty((nx, ny), dtype=np.int64)
        for x in range(nx):
            for y in range(ny):
                best = P[x, 0] + Q[0, y]
                for a in range(1, na):
                    v = P[x, a] + Q[a, y]
                    if v < best:
                        best = v
                out[x, y] = best
        return out


def minplus(P, Q, backend=None):
    P = np.ascontiguousarray(P, dtype=np.int64)
    Q = np.ascontiguousarray(Q, dtype=np.int64)
    if P.shape[1] == 0:
        raise ValueError("min-plus product over an empty index set")
    if _resolve(backend) == "numba":
        return _minplus_numba(P, Q)
    return _minplus_numpy(P, Q)


# ---------------------------------------------------------------------------
# isometry backtracking

_MIX = (np.uint64(0x9E3779B97F4A7C15), np.uint64(0xC2B2AE3D27D4EB4F))


def _mix(x, salt):
    """splitmix64 finalizer: a fixed bijective scramble of uint64 values."""
    z = x + salt
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def refine_colors(codes):
    """Iterated distance-profile refinement.

    Starts from a single colour and splits classes by the multiset of
    (distance code, neighbour colour) pairs until stable. Each multiset is
    summarized by two order-independent sums of scrambled entries, and new
    labels come from sorting (old colour, summaries), so they are
    isometry-invariant. A summary collision can only merge classes, which
    leaves the pruning sound.
    """
    n = codes.shape[0]
    colors = np.zeros(n, dtype=np.int64)
    ncol = 1
    with np.errstate(over="ignore"):
        while True:
            keyed = (codes * (ncol + 1) + colors[None, :]).astype(np.uint64)
            sig = [_mix(keyed, salt).sum(axis=1, dtype=np.uint64) for salt in _MIX]
            full = np.column_stack([colors.astype(np.uint64)] + sig)
            _, new = np.unique(full, axis=0, return_inverse=True)
            new = new.reshape(-1).astype(np.int64)
            k = int(new.max()) + 1 if n else 0
            if k == ncol:
                return new
            colors, ncol = new, k


def _class_tables(colors, order):
    """Flat per-depth candidate lists: members of the colour of order[k]."""
    n = colors.shape[0]
    starts = np.zeros(n, dtype=np.int64)
    stops = np.zeros(n, dtype=np.int64)
    by_color = {}
    for y in range(n):
        by_color.setdefault(int(colors[y]), []).append(y)
    flat = []
    for k in range(n):
        members = by_color[int(colors[order[k]])]
        starts[k] = len(flat)
        flat.extend(members)
        stops[k] = len(flat)
    return np.asarray(flat, dtype=np.int64), starts, stops


def _search_numpy(codes, order, flat, starts, stops, capacity):
    n = codes.shape[0]
    img = np.full(n, -1, dtype=np.int64)
    used = np.zeros(n, dtype=bool)
    out = []
    cands = [None] * (n + 1)
    ptr = np.zeros(n + 1, dtype=np.int64)

    def candidates(k):
        x = order[k]
        c = flat[starts[k]:stops[k]]
        c = c[~used[c]]
        if k and c.size:
            src = order[:k]
            ok = (codes[np.ix_(c, img[src])] == codes[x, src][None, :]).all(axis=1)
            c = c[ok]
        return c

    if n == 0:
        return np.zeros((1, 0), dtype=np.int64), 1
    k = 0
    cands[0] = candidates(0)
    count = 0
    while k >= 0:
        if k == n:
            count += 1
            if len(out) < capacity:
                out.append(img.copy())
            k -= 1
            used[img[order[k]]] = False
            img[order[k]] = -1
            continue
        c = cands[k]
        if ptr[k] < c.size:
            y = c[ptr[k]]
            ptr[k] += 1
            img[order[k]] = y
            used[y] = True
            k += 1
            if k < n:
                cands[k] = candidates(k)
                ptr[k] = 0
        else:
            ptr[k] = 0
            k -= 1
            if k >= 0:
                used[img[order[k]]] = False
                img[order[k]] = -1
    arr = np.array(out, dtype=np.int64).reshape(len(out), n)
    return arr, count


if HAVE_NUMBA:

    @njit(cache=True)
    def _search_numba(codes, order, flat, starts, stops, capacity):
        n = codes.shape[0]
        out = np.empty((capacity, n), dtype=np.int64)
        if n == 0:
            return out[:0], 1
        img = np.full(n, -1, dtype=np.int64)
        used = np.zeros(n, dtype=np.bool_)
        ptr = starts.copy()
        k = 0
        count = 0
        while k >= 0:
            if k == n:
                if count < capacity:
                    out[count, :] = img
                count += 1
                k -= 1
                used[img[order[k]]] = False
                img[order[k]] = -1
                continue
            x = order[k]
            found = -1
            p = ptr[k]
            while p < stops[k]:
                y = flat[p]
                p += 1
                if used[y]:
                    continue
                ok = True
                for t in range(k):
                    s = order[t]
                    if codes[y, img[s]] != codes[x, s]:
                        ok = False
                        break
                if ok:
                    found = y
                    break
            ptr[k] = p
            if found >= 0:
                img[x] = found
                used[found] = True
                k += 1
                if k < n:
                    ptr[k] = starts[k]
            else:
                ptr[k] = starts[k]
                k -= 1
                if k >= 0:
                    used[img[order[k]]] = False
                    img[order[k]] = -1
        m = count if count < capacity else capacity
        return out[:m], count


def distance_codes(num):
    """Rank-encode a distance matrix: equal distances share a code."""
    _, inv = np.unique(np.asarray(num), return_inverse=True)
    return inv.reshape(num.shape).astype(np.int64)


def search_isometries(num, prune=True, capacity=1 << 16, backend=None):
    """All distance-preserving permutations of an integer distance matrix.

    Returns an ``(order, n)`` int64 array of image arrays in unspecified order.
    With ``prune`` the candidate images of a point are restricted to its
    refined colour class; without it only the bijection and the distances to
    already assigned points constrain the search.
    """
    num = np.asarray(num)
    if num.shape[0] == 0:
        # the empty map is the one permutation of no points
        return np.zeros((1, 0), dtype=np.int64)
    codes = distance_codes(num)
    n = codes.shape[0]
    if prune and n:
        colors = refine_colors(codes)
    else:
        colors = np.zeros(n, dtype=np.int64)
    sizes = np.bincount(colors, minlength=1) if n else np.zeros(0, dtype=np.int64)
    order = np.array(sorted(range(n), key=lambda i: (sizes[colors[i]], i)), dtype=np.int64)
    flat, starts, stops = _class_tables(colors, order)
    use_numba = _resolve(backend) == "numba"
    while True:
        if use_numba:
            found, count = _search_numba(codes, order, flat, starts, stops, capacity)
        else:
            found, count = _search_numpy(codes, order, flat, starts, stops, capacity)
        if count <= capacity:
            return np.asarray(found)
        capacity = int(count)
