"""Densities, epsilon-regularity certificates, slicing and reduced graphs.

All thresholds are compared exactly: densities are :class:`fractions.Fraction`
and the kernels work on integer cross-multiplied forms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .colourings import HostColouring
from .errors import (
    DegeneratePairError,
    PartitionError,
    PreconditionError,
    SizeLimitError,
    SliceFailureError,
)

EXHAUSTIVE_CAP = 16
DEFAULT_SAMPLES = 2000
_MAX_DENOM = 2**31


@dataclass(frozen=True, eq=False)
class VertexPair:
    """Bipartite pair (A, B) with boolean biadjacency ``adj[i, j]`` for ``A[i]``, ``B[j]``."""

    A: tuple
    B: tuple
    adj: np.ndarray

    def __post_init__(self):
        A, B = tuple(self.A), tuple(self.B)
        if set(A) & set(B):
            raise DegeneratePairError("A and B must be disjoint")
        adj = np.array(self.adj, dtype=bool).reshape(len(A), len(B))
        adj.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "adj", adj)

    @classmethod
    def from_edges(cls, A: Sequence, B: Sequence, edges: Iterable) -> "VertexPair":
        ai = {a: i for i, a in enumerate(A)}
        bi = {b: j for j, b in enumerate(B)}
        adj = np.zeros((len(A), len(B)), dtype=bool)
        for a, b in edges:
            if a in ai and b in bi:
                adj[ai[a], bi[b]] = True
            elif b in ai and a in bi:
                adj[ai[b], bi[a]] = True
        return cls(tuple(A), tuple(B), adj)

    @classmethod
    def from_colouring(cls, c: HostColouring, A: Sequence[int], B: Sequence[int], s: int) -> "VertexPair":
        """Pair of host vertex-id sets, one per side, in colour ``s``."""
        sa = {c.side_of(a)[0] for a in A}
        sb = {c.side_of(b)[0] for b in B}
        if len(sa) != 1 or len(sb) != 1 or sa == sb:
            raise PartitionError("A and B must lie inside opposite host sides")
        if sa == {0}:
            rows = [a for a in A]
            cols = [b - c.L for b in B]
            adj = c.colour[np.ix_(rows, cols)] == s
        else:
            rows = [b for b in B]
            cols = [a - c.L for a in A]
            adj = (c.colour[np.ix_(rows, cols)] == s).T
        return cls(tuple(A), tuple(B), adj)

    @property
    def edge_count(self) -> int:
        return int(self.adj.sum())

    def swapped(self) -> "VertexPair":
        return VertexPair(self.B, self.A, self.adj.T)

    def sub(self, X: Sequence, Y: Sequence) -> "VertexPair":
        ai = {a: i for i, a in enumerate(self.A)}
        bi = {b: j for j, b in enumerate(self.B)}
        return VertexPair(tuple(X), tuple(Y), self.adj[np.ix_([ai[x] for x in X], [bi[y] for y in Y])])


def density(p: VertexPair) -> Fraction:
    if not p.A or not p.B:
        raise DegeneratePairError("density of a pair with an empty side")
    return Fraction(p.edge_count, len(p.A) * len(p.B))


@dataclass(frozen=True)
class RegularityCertificate:
    eps: Fraction
    regular: bool
    method: str  # "exhaustive" | "sampled"
    samples: int = 0
    X: tuple | None = None
    Y: tuple | None = None

    @property
    def verdict(self) -> str:
        return "regular" if self.regular else "irregular"

    def to_line(self, i: int, j: int) -> str:
        line = f"pair {i} {j} {self.eps} {self.verdict} {self.method}"
        if self.method == "sampled":
            line += f":{self.samples}"
        if not self.regular:
            xs = " ".join(str(v + 1) for v in self.X)
            ys = " ".join(str(v + 1) for v in self.Y)
            line += f" [{xs} | {ys}]"
        return line


def _eps_parts(eps) -> tuple[Fraction, int, int]:
    eps = Fraction(eps)
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    if eps.denominator >= _MAX_DENOM or eps.numerator >= _MAX_DENOM:
        raise PreconditionError(f"eps={eps} needs a numerator and denominator below 2^31")
    return eps, eps.numerator, eps.denominator


def is_violator(p: VertexPair, X: Sequence, Y: Sequence, eps) -> bool:
    """|X| >= eps|A|, |Y| >= eps|B| and |d(X,Y) - d(A,B)| >= eps."""
    eps = Fraction(eps)
    if not X or not Y or len(X) < eps * len(p.A) or len(Y) < eps * len(p.B):
        return False
    return abs(density(p.sub(X, Y)) - density(p)) >= eps


def _colmask(p: VertexPair) -> np.ndarray:
    w = np.int64(1) << np.arange(len(p.A), dtype=np.int64)
    return np.ascontiguousarray((p.adj.astype(np.int64) * w[:, None]).sum(axis=0), np.int64)


def _extreme_y(counts: np.ndarray, B: tuple, t: int, top: bool) -> tuple:
    order = sorted(range(len(B)), key=(lambda j: (-counts[j], j)) if top else (lambda j: (counts[j], j)))
    return tuple(B[j] for j in sorted(order[:t]))


def eps_regular_exhaustive(p: VertexPair, eps) -> RegularityCertificate:
    """Exact verdict over every admissible X of A; for each X the worst Y is found by sorting."""
    eps, num, den = _eps_parts(eps)
    a, b = len(p.A), len(p.B)
    if a == 0 or b == 0:
        raise DegeneratePairError("pair has an empty side")
    if a > EXHAUSTIVE_CAP or b > EXHAUSTIVE_CAP:
        raise SizeLimitError(
            f"exhaustive certification is capped at {EXHAUSTIVE_CAP} per side; use eps_regular_sampled"
        )
    X, t, top = kernels.regularity_scan(_colmask(p), a, b, p.edge_count, num, den)
    if X < 0:
        return RegularityCertificate(eps, True, "exhaustive")
    xs = tuple(p.A[i] for i in range(a) if (X >> i) & 1)
    counts = p.adj[[i for i in range(a) if (X >> i) & 1]].sum(axis=0)
    ys = _extreme_y(counts, p.B, t, bool(top))
    return RegularityCertificate(eps, False, "exhaustive", X=xs, Y=ys)


def eps_regular_sampled(p: VertexPair, eps, samples: int = DEFAULT_SAMPLES, seed: int = 0) -> RegularityCertificate:
    """Sampled refutation search.

    Draws ``samples`` subsets X of A (size uniform over admissible sizes) and
    pairs each with the extreme Y of every admissible size.  "irregular" comes
    with a checked witness; "regular" only means nothing was found.
    """
    eps, num, den = _eps_parts(eps)
    a, b = len(p.A), len(p.B)
    if a == 0 or b == 0:
        raise DegeneratePairError("pair has an empty side")
    if samples < 1:
        raise PreconditionError("samples must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    xmin = max(1, -(-num * a // den))
    tmin = max(1, -(-num * b // den))
    e = p.edge_count
    ab = a * b
    adj = p.adj.astype(np.int64)
    t = np.arange(1, b + 1, dtype=np.int64)
    done = 0
    batch = 1024
    while done < samples:
        k = min(batch, samples - done)
        sizes = rng.integers(xmin, a + 1, size=k)
        ranks = rng.permuted(np.tile(np.arange(a), (k, 1)), axis=1)
        masks = ranks < sizes[:, None]
        counts = masks.astype(np.int64) @ adj
        srt = np.sort(counts, axis=1)
        lo = np.cumsum(srt, axis=1)
        hi = np.cumsum(srt[:, ::-1], axis=1)
        x = sizes.astype(np.int64)[:, None]
        rhs = num * x * t[None, :] * ab
        base = e * x * t[None, :]
        vh = np.abs(hi * ab - base) * den >= rhs
        vl = np.abs(lo * ab - base) * den >= rhs
        vh[:, : tmin - 1] = False
        vl[:, : tmin - 1] = False
        anyv = vh | vl
        rows = np.flatnonzero(anyv.any(axis=1))
        if rows.size:
            i = rows[0]
            j = int(np.flatnonzero(anyv[i])[0])
            xs = tuple(p.A[q] for q in range(a) if masks[i, q])
            ys = _extreme_y(counts[i], p.B, j + 1, bool(vh[i, j]))
            if not is_violator(p, xs, ys, eps):  # pragma: no cover - arithmetic guard
                raise AssertionError("sampled witness failed re-validation")
            return RegularityCertificate(eps, False, "sampled", samples=samples, X=xs, Y=ys)
        done += k
    return RegularityCertificate(eps, True, "sampled", samples=samples)


def certify(p: VertexPair, eps, method: str = "auto", samples: int = DEFAULT_SAMPLES, seed: int = 0):
    if method == "exhaustive" or (
        method == "auto" and len(p.A) <= EXHAUSTIVE_CAP and len(p.B) <= EXHAUSTIVE_CAP
    ):
        return eps_regular_exhaustive(p, eps)
    return eps_regular_sampled(p, eps, samples, seed)


def is_super_regular(p: VertexPair, eps, d, samples: int = DEFAULT_SAMPLES, seed: int = 0) -> bool:
    """eps-regular and every degree strictly above d times the opposite side."""
    d = Fraction(d)
    deg_a = p.adj.sum(axis=1)
    deg_b = p.adj.sum(axis=0)
    if any(int(x) <= d * len(p.B) for x in deg_a):
        return False
    if any(int(x) <= d * len(p.A) for x in deg_b):
        return False
    return certify(p, eps, "auto", samples, seed).regular


def slice_parameters(eps, alpha) -> Fraction:
    """Regularity parameter max(eps/alpha, 2 eps) of a sub-pair keeping an alpha fraction of each side.

    The density of the sub-pair also stays within eps of the original.
    """
    eps, alpha = Fraction(eps), Fraction(alpha)
    if not (0 < eps < alpha <= 1):
        raise PreconditionError(f"need 0 < eps < alpha <= 1, got eps={eps}, alpha={alpha}")
    return max(eps / alpha, 2 * eps)


def super_slice_parameters(eps, d, r) -> tuple[Fraction, Fraction]:
    eps, d = Fraction(eps), Fraction(d)
    return eps / (1 - eps * r), d - (1 + r) * eps


@dataclass
class SliceResult:
    """Trimmed classes and the super-regularity parameters they are claimed to meet."""

    classes: list
    size: int
    eps: Fraction
    d: Fraction
    removed: dict = field(default_factory=dict)
    verified: dict = field(default_factory=dict)  # matched pair -> bool, or None above the cap

    @property
    def all_verified(self) -> bool:
        return all(v is not False for v in self.verified.values())


def super_slice(classes: Sequence[Sequence[int]], T: Iterable, M: Iterable, eps, d, r: int, m: int,
                adjacency) -> SliceResult:
    """Trim each matched class to ceil((1 - eps r) m) vertices.

    ``adjacency(i, j)`` returns the :class:`VertexPair` between classes i and j
    in the working colour.  Vertices with partner degree <= (d - eps) m go
    first (lowest degree, then lowest id); the rest of the quota is taken from
    the highest ids.  Unmatched classes are left untouched.
    """
    eps, d = Fraction(eps), Fraction(d)
    if eps * r >= 1:
        raise PreconditionError("need eps * r < 1")
    classes = [tuple(cl) for cl in classes]
    if any(len(cl) != m for cl in classes):
        raise PreconditionError(f"all classes must have size {m}")
    Tset = {frozenset(e) for e in T}
    M = [tuple(e) for e in M]
    for e in M:
        if frozenset(e) not in Tset:
            raise PreconditionError(f"matching edge {e} not in T")
    seen = [v for e in M for v in e]
    if len(seen) != len(set(seen)):
        raise PreconditionError("M is not a matching")
    keep = math.ceil((1 - eps * r) * m)
    quota = m - keep
    thresh = (d - eps) * m
    out = list(classes)
    removed: dict = {}
    for i, j in M:
        for me, partner in ((i, j), (j, i)):
            pair = adjacency(me, partner)
            degs = pair.adj.sum(axis=1)
            ids = list(pair.A)
            low = sorted((int(degs[k]), ids[k]) for k in range(m) if degs[k] <= thresh)
            if len(low) > quota:
                raise SliceFailureError(
                    f"class {me}: {len(low)} vertices have partner degree <= (d-eps)m, only {quota} may go"
                )
            drop = [v for _, v in low]
            rest = sorted(v for v in ids if v not in set(drop))
            drop += rest[len(rest) - (quota - len(drop)):] if quota > len(drop) else []
            removed[me] = tuple(drop)
            out[me] = tuple(v for v in classes[me] if v not in set(drop))
    new_eps, new_d = super_slice_parameters(eps, d, r)
    result = SliceResult(out, keep, new_eps, new_d, removed)
    for i, j in M:
        if keep <= EXHAUSTIVE_CAP:
            pair = adjacency(i, j).sub(out[i], out[j])
            result.verified[(i, j)] = is_super_regular(pair, new_eps, new_d)
        else:
            result.verified[(i, j)] = None
    return result


# -- reduced graph -----------------------------------------------------------------


def majority_colour(counts: Sequence[int]) -> int:
    """Largest colour index attaining the maximum count (colours are 1-based)."""
    best = max(counts)
    return max(s + 1 for s, x in enumerate(counts) if x == best)


@dataclass
class ReducedColouredGraph:
    """Classes as vertices; an edge for every pair regular in all colours, coloured by majority.

    ``colours`` maps ``(i, j)`` with ``i < j`` to the edge colour; ``counts``
    keeps the per-colour edge counts for every opposite-side class pair.
    """

    sides: tuple
    colours: dict
    class_size: int = 0
    classes: tuple = ()
    counts: dict = field(default_factory=dict)
    certificates: dict = field(default_factory=dict)
    colour_count: int = 3
    eps: Fraction | None = None

    @property
    def n_classes(self) -> int:
        return len(self.sides)

    def edges(self, s: int | None = None) -> list[tuple[int, int]]:
        return sorted(e for e, col in self.colours.items() if s is None or col == s)

    def neighbours(self, s: int | None = None) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in self.sides]
        for i, j in self.edges(s):
            adj[i].append(j)
            adj[j].append(i)
        return adj

    def colour_of(self, i: int, j: int) -> int | None:
        return self.colours.get((min(i, j), max(i, j)))

    @classmethod
    def from_coloured_edges(cls, sides: Sequence[int], coloured: dict, colour_count: int = 3):
        cols = {}
        for (i, j), s in coloured.items():
            if sides[i] == sides[j]:
                raise PartitionError(f"edge ({i}, {j}) joins classes on the same side")
            cols[(min(i, j), max(i, j))] = s
        return cls(tuple(sides), cols, colour_count=colour_count)


def validate_partition(c: HostColouring, partition: Sequence[Sequence[int]]) -> tuple[list[int], int]:
    """Sides of the classes and the common class size; raises :class:`PartitionError`."""
    if not partition:
        raise PartitionError("empty partition")
    sizes = {len(cl) for cl in partition}
    if len(sizes) != 1 or 0 in sizes:
        raise PartitionError("classes must be non-empty and equal-sized")
    seen: set = set()
    sides = []
    for cl in partition:
        try:
            ss = {c.side_of(v)[0] for v in cl}
        except IndexError as exc:
            raise PartitionError(str(exc)) from exc
        if len(ss) != 1:
            raise PartitionError("a class straddles both host sides")
        if seen & set(cl) or len(set(cl)) != len(cl):
            raise PartitionError("classes overlap")
        seen |= set(cl)
        sides.append(ss.pop())
    return sides, sizes.pop()


def equal_partition(c: HostColouring, k: int) -> list[list[int]]:
    """Split each side into k consecutive classes of size floor(side/k); leftovers are exceptional."""
    if k < 1:
        raise PartitionError("need at least one class per side")
    m = min(c.L, c.R) // k
    if m == 0:
        raise PartitionError(f"sides of size {c.L}, {c.R} cannot hold {k} classes")
    left = [list(range(i * m, (i + 1) * m)) for i in range(k)]
    right = [[c.L + v for v in range(i * m, (i + 1) * m)] for i in range(k)]
    return left + right


def build_reduced_graph(c: HostColouring, partition: Sequence[Sequence[int]], eps, method: str = "auto",
                        samples: int = DEFAULT_SAMPLES, seed: int = 0) -> ReducedColouredGraph:
    eps = Fraction(eps)
    sides, m = validate_partition(c, partition)
    if method == "auto" and m > EXHAUSTIVE_CAP:
        raise SizeLimitError(f"class size {m} exceeds the exhaustive cap; request method='sampled'")
    colours, counts, certs = {}, {}, {}
    for i in range(len(partition)):
        for j in range(i + 1, len(partition)):
            if sides[i] == sides[j]:
                continue
            cnt = []
            ok = True
            for s in range(1, c.r + 1):
                pair = VertexPair.from_colouring(c, partition[i], partition[j], s)
                cnt.append(pair.edge_count)
                cert = certify(pair, eps, method, samples, seed)
                certs[(i, j, s)] = cert
                ok = ok and cert.regular
            counts[(i, j)] = tuple(cnt)
            if ok:
                colours[(i, j)] = majority_colour(cnt)
    return ReducedColouredGraph(tuple(sides), colours, m, tuple(tuple(cl) for cl in partition), counts,
                                certs, c.r, eps)


def majority_guarantee_holds(R: ReducedColouredGraph) -> bool:
    """Chosen colour carries at least a 1/r share of every reduced edge's pair."""
    m = R.class_size
    return all(R.counts[e][s - 1] * R.colour_count >= m * m for e, s in R.colours.items())


def write_certificates(R: ReducedColouredGraph) -> str:
    lines = []
    for s in range(1, R.colour_count + 1):
        lines.append(f"colour {s}")
        for (i, j, s2), cert in sorted(R.certificates.items()):
            if s2 == s:
                lines.append(cert.to_line(i + 1, j + 1))
    return "\n".join(lines) + ("\n" if lines else "")
