"""Monochromatic copies and exact small bipartite Ramsey numbers."""
from __future__ import annotations

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .colourings import HostColouring, check_colour, extremal_three_split, write_colouring
from .errors import SizeLimitError, StructuralError
from .graphs import TargetGraph, balanced_two_colouring, is_bipartite

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**9


@dataclass(frozen=True)
class EmbeddingWitness:
    """``mapping[w]`` is the host vertex id of H-vertex ``w`` (left ``u`` -> ``u``, right ``v`` -> ``L + v``)."""

    mapping: tuple
    colour: int


def _pack(H: TargetGraph):
    adj = H.neighbours()
    pptr = [0]
    pidx: list[int] = []
    for w in range(H.n):
        pidx.extend(u for u in adj[w] if u < w)
        pptr.append(len(pidx))
    hdeg = [len(a) for a in adj]
    return np.array(pptr, np.int64), np.array(pidx or [0], np.int64), np.array(hdeg or [0], np.int64)


def _side_masks(mat: np.ndarray):
    """Bitset adjacency of a boolean biadjacency matrix."""
    L, R = mat.shape
    wl = np.int64(1) << np.arange(R, dtype=np.int64)
    wr = np.int64(1) << np.arange(L, dtype=np.int64)
    ladj = (mat.astype(np.int64) * wl[None, :]).sum(axis=1) if R else np.zeros(L, np.int64)
    radj = (mat.astype(np.int64) * wr[:, None]).sum(axis=0) if L else np.zeros(R, np.int64)
    return np.ascontiguousarray(ladj, np.int64), np.ascontiguousarray(radj, np.int64)


def _require_bipartite(H: TargetGraph):
    if not is_bipartite(H):
        raise StructuralError(f"{H!r} is not bipartite")


def find_monochromatic_copy(c: HostColouring, H: TargetGraph, s: int, budget: int = DEFAULT_BUDGET):
    """A colour-``s`` copy of H in ``c`` as an :class:`EmbeddingWitness`, or None."""
    check_colour(c, s)
    _require_bipartite(H)
    if max(c.L, c.R) > kernels.MAX_SIDE:
        raise SizeLimitError(f"host sides are capped at {kernels.MAX_SIDE}")
    ladj, radj = _side_masks(c.mask(s))
    pptr, pidx, hdeg = _pack(H)
    side = np.zeros(max(H.n, 1), np.int64)
    host = np.zeros(max(H.n, 1), np.int64)
    status = kernels.mono_search(ladj, radj, c.L, c.R, H.n, pptr, pidx, hdeg, side, host, budget)
    if status == -1:
        raise SizeLimitError("subgraph search budget exhausted")
    if status == 0:
        return None
    mapping = tuple(int(host[w]) if side[w] == 0 else c.L + int(host[w]) for w in range(H.n))
    return EmbeddingWitness(mapping, s)


def validate_witness(c: HostColouring, H: TargetGraph, wit: EmbeddingWitness) -> bool:
    m = wit.mapping
    if len(m) != H.n or len(set(m)) != H.n:
        return False
    for i, j in H.edges:
        si, ii = c.side_of(m[i])
        sj, jj = c.side_of(m[j])
        if si == sj:
            return False
        u, v = (ii, jj) if si == 0 else (jj, ii)
        if c.colour[u, v] != wit.colour:
            return False
    return True


def avoids_all_colours(c: HostColouring, H: TargetGraph) -> bool:
    return all(find_monochromatic_copy(c, H, s) is None for s in range(1, c.r + 1))


# -- exact values -------------------------------------------------------------------


@dataclass(frozen=True)
class RamseyResult:
    """``value`` is the least N with no avoiding colouring, or None if unresolved.

    ``avoider`` is the largest avoiding colouring found (of K_{N-1,N-1} when resolved).
    """

    value: int | None
    avoider: HostColouring | None
    n_max: int
    nodes: int
    exhausted_budget: bool = False

    @property
    def resolved(self) -> bool:
        return self.value is not None


def _default_nmax(r: int) -> int:
    return 6 if r <= 2 else 4


def search_avoider(targets: Sequence[TargetGraph], N: int, budget: int = DEFAULT_BUDGET, workers: int = 1):
    """Exhaustive search at one host size.

    Returns (status, colouring or None, nodes): status 1 = avoider found,
    0 = none exists, -1 = budget exhausted.  The search is split into roots by
    the colouring of the first left row; every root gets ``budget`` nodes and
    the lexicographically first avoider is reported, so the result does not
    depend on ``workers``.
    """
    r = len(targets)
    if N > kernels.MAX_SIDE:
        raise SizeLimitError(f"host sides are capped at {kernels.MAX_SIDE}")
    packs = [_pack(H) for H in targets]
    tn = np.array([H.n for H in targets], np.int64)
    pptr_off = np.cumsum([0] + [len(p[0]) for p in packs[:-1]]).astype(np.int64)
    pidx_off = np.cumsum([0] + [len(p[1]) for p in packs[:-1]]).astype(np.int64)
    hdeg_off = np.cumsum([0] + [len(p[2]) for p in packs[:-1]]).astype(np.int64)
    pptr_all = np.concatenate([p[0] for p in packs])
    pidx_all = np.concatenate([p[1] for p in packs])
    hdeg_all = np.concatenate([p[2] for p in packs])

    if N == 0:
        return 1, HostColouring(0, 0, r, np.zeros((0, 0), np.int8)), 0

    roots = [np.array(rt, np.int64) for rt in itertools.product(range(1, r + 1), repeat=N)]

    def run(prefix):
        out = np.zeros(N * N, np.int64)
        status, nodes = kernels.ramsey_dfs(N, r, tn, pptr_all, pptr_off, pidx_all, pidx_off,
                                           hdeg_all, hdeg_off, prefix, budget, out)
        return int(status), out, int(nodes)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, roots))
    else:
        results = []
        for prefix in roots:
            res = run(prefix)
            results.append(res)
            if res[0] == 1:
                break
    total = 0
    exhausted = False
    for status, out, nodes in results:
        total += nodes
        if status == 1:
            mat = out.reshape(N, N).astype(np.int8)
            return 1, HostColouring(N, N, r, mat), total
        if status == -1:
            exhausted = True
    return (-1 if exhausted else 0), None, total


def bipartite_ramsey_exact(targets: Sequence[TargetGraph], n_max: int | None = None,
                           budget: int = DEFAULT_BUDGET, workers: int = 1) -> RamseyResult:
    """Least N <= n_max such that every r-colouring of K_{N,N} has a colour-i copy of targets[i]."""
    for H in targets:
        _require_bipartite(H)
    r = len(targets)
    if r < 1:
        raise StructuralError("need at least one target")
    n_max = _default_nmax(r) if n_max is None else n_max
    best = None
    nodes = 0
    for N in range(0, n_max + 1):
        status, col, k = search_avoider(targets, N, budget, workers)
        nodes += k
        log.debug("N=%d status=%d nodes=%d", N, status, k)
        if status == 1:
            best = col
            continue
        if status == 0:
            return RamseyResult(N, best, n_max, nodes)
        return RamseyResult(None, best, n_max, nodes, exhausted_budget=True)
    return RamseyResult(None, best, n_max, nodes)


def verify_lower_bound_construction(H: TargetGraph, n: int) -> bool:
    """True iff the three-split colouring of K_{N,N}, N = 3(n/2 - 1), has no monochromatic H."""
    if H.n != n:
        raise StructuralError(f"H has {H.n} vertices, expected {n}")
    _require_bipartite(H)
    if balanced_two_colouring(H) is None:
        raise StructuralError(f"{H!r} has no proper 2-colouring with classes of size n/2")
    return avoids_all_colours(extremal_three_split(n), H)


def lower_bound_value(n: int) -> int:
    """3n/2 - 2: the bound certified by the three-split colouring."""
    return 3 * n // 2 - 2


def write_certificate(c: HostColouring, bound: int) -> str:
    """Avoiding colouring with a ``certificate ramsey-lower N r`` header; N is the certified lower bound."""
    return f"certificate ramsey-lower {bound} {c.r}\n" + write_colouring(c)
