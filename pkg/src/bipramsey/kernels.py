"""Hot inner loops.

Each kernel is written in the numba subset and compiled with ``@njit`` unless
``BIPRAMSEY_NO_NUMBA=1``.  Bitset adjacency uses int64 masks, so a host side
holds at most ``MAX_SIDE`` vertices.

The regularity scan also has a vectorised numpy implementation which is the
fallback path; the backtracking kernels fall back to their plain Python body.
"""
import numpy as np

from ._jit import NUMBA_ENABLED, njit

MAX_SIDE = 62
NO_BUDGET = np.int64(2**62)


@njit
def popcount(m):
    c = 0
    while m:
        m &= m - 1
        c += 1
    return c


@njit
def lowbit_index(m):
    i = 0
    while (m & 1) == 0:
        m >>= 1
        i += 1
    return i


# -- monochromatic subgraph search ----------------------------------------------


@njit
def _candidates(w, pptr, pidx, out_side, out_host, ladj, radj, full_l, full_r, used_l, used_r, ok_l, ok_r):
    start = pptr[w]
    end = pptr[w + 1]
    if start == end:
        return full_l & ~used_l & ok_l, full_r & ~used_r & ok_r
    s0 = out_side[pidx[start]]
    m = full_r if s0 == 0 else full_l
    for t in range(start, end):
        q = pidx[t]
        if out_side[q] != s0:
            return np.int64(0), np.int64(0)
        if s0 == 0:
            m &= ladj[out_host[q]]
        else:
            m &= radj[out_host[q]]
    if s0 == 0:
        return np.int64(0), m & ~used_r & ok_r
    return m & ~used_l & ok_l, np.int64(0)


@njit
def mono_search(ladj, radj, n_left, n_right, n, pptr, pidx, hdeg, out_side, out_host, budget):
    """Backtracking embedding of H into a bipartite host in H's label order.

    ``ladj[u]`` is the right-neighbour mask of left vertex ``u`` (``radj`` the
    converse); ``pptr``/``pidx`` list each H-vertex's earlier neighbours (CSR);
    ``hdeg`` gives H-degrees for degree pruning.  Returns 1 (found; the map is
    in ``out_side``/``out_host``), 0 (no copy) or -1 (budget exhausted).
    """
    if n == 0:
        return 1
    if n > n_left + n_right:
        return 0
    full_l = (np.int64(1) << n_left) - 1
    full_r = (np.int64(1) << n_right) - 1
    maxd = 0
    for w in range(n):
        if hdeg[w] > maxd:
            maxd = hdeg[w]
    ok_l = np.zeros(maxd + 1, np.int64)
    ok_r = np.zeros(maxd + 1, np.int64)
    for u in range(n_left):
        du = popcount(ladj[u])
        for k in range(min(du, maxd) + 1):
            ok_l[k] |= np.int64(1) << u
    for v in range(n_right):
        dv = popcount(radj[v])
        for k in range(min(dv, maxd) + 1):
            ok_r[k] |= np.int64(1) << v
    cand_l = np.zeros(n, np.int64)
    cand_r = np.zeros(n, np.int64)
    placed = np.zeros(n, np.bool_)
    used_l = np.int64(0)
    used_r = np.int64(0)
    nodes = 0
    d = 0
    cl, cr = _candidates(0, pptr, pidx, out_side, out_host, ladj, radj, full_l, full_r, used_l, used_r,
                         ok_l[hdeg[0]], ok_r[hdeg[0]])
    cand_l[0] = cl
    cand_r[0] = cr
    while True:
        if placed[d]:
            if out_side[d] == 0:
                used_l &= ~(np.int64(1) << out_host[d])
            else:
                used_r &= ~(np.int64(1) << out_host[d])
            placed[d] = False
        if cand_l[d] == 0 and cand_r[d] == 0:
            d -= 1
            if d < 0:
                return 0
            continue
        nodes += 1
        if nodes > budget:
            return -1
        if cand_l[d] != 0:
            x = lowbit_index(cand_l[d])
            cand_l[d] &= ~(np.int64(1) << x)
            out_side[d] = 0
            out_host[d] = x
            used_l |= np.int64(1) << x
        else:
            x = lowbit_index(cand_r[d])
            cand_r[d] &= ~(np.int64(1) << x)
            out_side[d] = 1
            out_host[d] = x
            used_r |= np.int64(1) << x
        placed[d] = True
        if d == n - 1:
            return 1
        d += 1
        placed[d] = False
        cl, cr = _candidates(d, pptr, pidx, out_side, out_host, ladj, radj, full_l, full_r, used_l, used_r,
                             ok_l[hdeg[d]], ok_r[hdeg[d]])
        cand_l[d] = cl
        cand_r[d] = cr


# -- exhaustive bipartite Ramsey search -----------------------------------------------


@njit
def _row_smaller(col, N, u, v):
    base = u * N
    prev = (u - 1) * N
    for j in range(v + 1):
        a = col[base + j]
        b = col[prev + j]
        if a != b:
            return a < b
    return False


@njit
def ramsey_dfs(N, r, tn, pptr_all, pptr_off, pidx_all, pidx_off, hdeg_all, hdeg_off, prefix, budget, out_col):
    """Search for an r-colouring of K_{N,N} avoiding target i in colour i for every i.

    Pairs are coloured in lexicographic (u, v) order; the first ``len(prefix)``
    pairs are forced.  Target i is packed as slices of the ``*_all`` arrays at
    the given offsets.  Left rows must be lexicographically non-decreasing.
    Returns (status, nodes) with status 1 (avoider in ``out_col``), 0 (none) or
    -1 (budget exhausted).
    """
    P = N * N
    plen = prefix.shape[0]
    for i in range(P):
        out_col[i] = 0
    if P == 0:
        return 1, 0
    ladj = np.zeros((r, N), np.int64)
    radj = np.zeros((r, N), np.int64)
    maxn = 1
    for t in range(r):
        if tn[t] > maxn:
            maxn = tn[t]
    side = np.zeros(maxn, np.int64)
    host = np.zeros(maxn, np.int64)
    nextc = np.zeros(P + 1, np.int64)
    nodes = 0
    p = 0
    nextc[0] = prefix[0] if plen > 0 else 1
    while True:
        if p == P:
            return 1, nodes
        u = p // N
        v = p - u * N
        c = out_col[p]
        if c != 0:
            ladj[c - 1, u] &= ~(np.int64(1) << v)
            radj[c - 1, v] &= ~(np.int64(1) << u)
            out_col[p] = 0
        c = nextc[p]
        hi = prefix[p] if p < plen else r
        if c > hi:
            if p == 0:
                return 0, nodes
            p -= 1
            continue
        nextc[p] = c + 1
        nodes += 1
        if nodes > budget:
            return -1, nodes
        out_col[p] = c
        ladj[c - 1, u] |= np.int64(1) << v
        radj[c - 1, v] |= np.int64(1) << u
        if u >= 1 and _row_smaller(out_col, N, u, v):
            continue
        t = c - 1
        n_t = tn[t]
        pp = pptr_all[pptr_off[t]:pptr_off[t] + n_t + 1]
        pi = pidx_all[pidx_off[t]:]
        hd = hdeg_all[hdeg_off[t]:hdeg_off[t] + n_t]
        if mono_search(ladj[t], radj[t], N, N, n_t, pp, pi, hd, side, host, NO_BUDGET) == 1:
            continue
        p += 1
        if p < P:
            nextc[p] = prefix[p] if p < plen else 1


# -- regularity scan ---------------------------------------------------------------


@njit
def _regularity_scan_jit(colmask, a, b, e, p, q):
    ab = a * b
    cnt = np.empty(b, np.int64)
    tmin = (p * b + q - 1) // q
    if tmin < 1:
        tmin = 1
    for X in range(1, 1 << a):
        x = popcount(X)
        if x * q < p * a:
            continue
        for j in range(b):
            cnt[j] = popcount(colmask[j] & X)
        srt = np.sort(cnt)
        lo = 0
        hi = 0
        for t in range(1, b + 1):
            lo += srt[t - 1]
            hi += srt[b - t]
            if t < tmin:
                continue
            rhs = p * x * t * ab
            dh = hi * ab - e * x * t
            if dh < 0:
                dh = -dh
            if dh * q >= rhs:
                return X, t, 1
            dl = lo * ab - e * x * t
            if dl < 0:
                dl = -dl
            if dl * q >= rhs:
                return X, t, 0
    return -1, 0, 0


def _regularity_scan_numpy(colmask, a, b, e, p, q):
    xs = np.arange(1, 1 << a, dtype=np.int64)
    bits = (xs[:, None] >> np.arange(a, dtype=np.int64)) & 1
    x = bits.sum(axis=1)
    keep = x * q >= p * a
    xs, bits, x = xs[keep], bits[keep], x[keep]
    if xs.size == 0:
        return -1, 0, 0
    biadj = ((colmask[None, :] >> np.arange(a, dtype=np.int64)[:, None]) & 1)  # a x b
    counts = bits @ biadj
    srt = np.sort(counts, axis=1)
    lo = np.cumsum(srt, axis=1)
    hi = np.cumsum(srt[:, ::-1], axis=1)
    t = np.arange(1, b + 1, dtype=np.int64)
    ab = a * b
    rhs = p * x[:, None] * t[None, :] * ab
    base = e * x[:, None] * t[None, :]
    vh = np.abs(hi * ab - base) * q >= rhs
    vl = np.abs(lo * ab - base) * q >= rhs
    tmin = max(1, (p * b + q - 1) // q)
    vh[:, : tmin - 1] = False
    vl[:, : tmin - 1] = False
    anyv = vh | vl
    rows = np.flatnonzero(anyv.any(axis=1))
    if rows.size == 0:
        return -1, 0, 0
    i = rows[0]
    j = int(np.flatnonzero(anyv[i])[0])
    return int(xs[i]), j + 1, 1 if vh[i, j] else 0


regularity_scan = _regularity_scan_jit if NUMBA_ENABLED else _regularity_scan_numpy
regularity_scan.__doc__ = """First violating (X mask, |Y|, top?) of an exhaustive regularity scan.

For every qualifying X (in increasing mask order) the extreme densities over
Y of each admissible size are the top/bottom sums of the sorted per-vertex
counts into X, so the scan is exact.  ``colmask[j]`` is the A-neighbourhood
mask of B-vertex j, ``e`` the edge count, eps = p/q.  Returns (-1, 0, 0) if
the pair is regular.
"""


# -- balanced permutation search --------------------------------------------------


@njit
def balanced_perm_search(c1, c2, p, q, min_window, out_perm):
    """Lexicographically first permutation whose windows of >= min_window blocks are xi-balanced.

    xi = p/q; a window passes when |C1 - C2| * q <= p * C2.  Returns 1 when
    found (in ``out_perm``), else 0.
    """
    h = c1.shape[0]
    if h == 0:
        return 1
    used = np.zeros(h, np.bool_)
    nextv = np.zeros(h + 1, np.int64)
    pre1 = np.zeros(h + 1, np.int64)
    pre2 = np.zeros(h + 1, np.int64)
    pos = 0
    placed = np.zeros(h, np.bool_)
    while True:
        if placed[pos]:
            used[out_perm[pos]] = False
            placed[pos] = False
        v = nextv[pos]
        while v < h and used[v]:
            v += 1
        if v >= h:
            if pos == 0:
                return 0
            pos -= 1
            continue
        nextv[pos] = v + 1
        out_perm[pos] = v
        used[v] = True
        placed[pos] = True
        pre1[pos + 1] = pre1[pos] + c1[v]
        pre2[pos + 1] = pre2[pos] + c2[v]
        ok = True
        last = pos + 1 - min_window
        for start in range(0, last + 1):
            s1 = pre1[pos + 1] - pre1[start]
            s2 = pre2[pos + 1] - pre2[start]
            d = s1 - s2
            if d < 0:
                d = -d
            if d * q > p * s2:
                ok = False
                break
        if not ok:
            continue
        if pos == h - 1:
            return 1
        pos += 1
        nextv[pos] = 0
        placed[pos] = False
