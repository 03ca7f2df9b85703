"""Target graphs with bandwidth-witnessing labellings.

Vertices are ``0..n-1`` internally and the labelling order is the identity.
The text format is 1-based.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import FormatError, InvalidSizeError, SizeLimitError, StructuralError

EXACT_BANDWIDTH_MAX_N = 10


@dataclass(frozen=True)
class TargetGraph:
    n: int
    edges: frozenset
    name: str = field(default="", compare=False)

    def __post_init__(self):
        norm = set()
        for i, j in self.edges:
            if i == j:
                raise StructuralError(f"self-loop at {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise StructuralError(f"edge ({i}, {j}) outside [0, {self.n})")
            norm.add((min(i, j), max(i, j)))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], name: str = "") -> "TargetGraph":
        return cls(n, frozenset(edges), name)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def neighbours(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for i, j in self.sorted_edges():
            adj[i].append(j)
            adj[j].append(i)
        for a in adj:
            a.sort()
        return adj

    def degrees(self) -> list[int]:
        return [len(a) for a in self.neighbours()]

    def max_degree(self) -> int:
        return max(self.degrees(), default=0)

    def relabel(self, perm: list[int]) -> "TargetGraph":
        """Vertex ``v`` becomes ``perm[v]``."""
        return TargetGraph.from_edges(self.n, ((perm[i], perm[j]) for i, j in self.edges), self.name)

    def __repr__(self):
        tag = self.name or "H"
        return f"TargetGraph({tag}, n={self.n}, m={len(self.edges)})"


@dataclass(frozen=True)
class VertexTwoColouring:
    """Map from vertices to {1, 2}."""

    assignment: tuple

    def __post_init__(self):
        if any(c not in (1, 2) for c in self.assignment):
            raise StructuralError("vertex colours must be 1 or 2")

    def __getitem__(self, v: int) -> int:
        return self.assignment[v]

    def __len__(self):
        return len(self.assignment)

    def class_of(self, colour: int) -> list[int]:
        return [v for v, c in enumerate(self.assignment) if c == colour]

    def counts(self, vertices: Iterable[int] | None = None) -> tuple[int, int]:
        vs = range(len(self.assignment)) if vertices is None else vertices
        c1 = c2 = 0
        for v in vs:
            if self.assignment[v] == 1:
                c1 += 1
            else:
                c2 += 1
        return c1, c2

    def is_proper(self, H: TargetGraph) -> bool:
        return len(self.assignment) == H.n and all(self.assignment[i] != self.assignment[j] for i, j in H.edges)

    @classmethod
    def alternating(cls, n: int) -> "VertexTwoColouring":
        return cls(tuple(1 if v % 2 == 0 else 2 for v in range(n)))


# -- generators --------------------------------------------------------------


def make_path(n: int) -> TargetGraph:
    if n < 2:
        raise InvalidSizeError(f"path needs n >= 2, got {n}")
    return TargetGraph.from_edges(n, ((i, i + 1) for i in range(n - 1)), f"P{n}")


def make_even_cycle(n: int) -> TargetGraph:
    """Even cycle in zig-zag order: 0-2-4-...-(n-2)-(n-1)-...-3-1-0, bandwidth 2."""
    if n < 4 or n % 2:
        raise InvalidSizeError(f"even cycle needs even n >= 4, got {n}")
    edges = [(i, i + 2) for i in range(n - 2)]
    edges += [(0, 1), (n - 2, n - 1)]
    return TargetGraph.from_edges(n, edges, f"C{n}")


def make_grid(a: int, b: int) -> TargetGraph:
    """Grid on [a] x [b], numbered row-major with rows along the shorter side."""
    if a < 1 or b < 1:
        raise InvalidSizeError(f"grid sides must be positive, got {a}x{b}")
    short, long_ = (b, a) if b <= a else (a, b)

    def label(i, j):  # i along the long axis, j along the short one
        return i * short + j

    edges = []
    for i in range(long_):
        for j in range(short):
            if j + 1 < short:
                edges.append((label(i, j), label(i, j + 1)))
            if i + 1 < long_:
                edges.append((label(i, j), label(i + 1, j)))
    return TargetGraph.from_edges(a * b, edges, f"G{a}x{b}")


def make_star(leaves: int) -> TargetGraph:
    """K_{1,leaves} with the centre labelled 0."""
    if leaves < 1:
        raise InvalidSizeError("star needs at least one leaf")
    return TargetGraph.from_edges(leaves + 1, ((0, i) for i in range(1, leaves + 1)), f"S{leaves}")


def parse_target(spec: str) -> TargetGraph:
    """Parse a short name: ``P5``, ``C6``, ``G2x3`` (grid) or ``S4`` (star)."""
    s = spec.strip()
    try:
        kind, rest = s[0].upper(), s[1:]
        if kind == "P":
            return make_path(int(rest))
        if kind == "C":
            return make_even_cycle(int(rest))
        if kind == "G":
            a, b = rest.lower().split("x")
            return make_grid(int(a), int(b))
        if kind == "S":
            return make_star(int(rest))
    except (ValueError, IndexError) as exc:
        if isinstance(exc, InvalidSizeError):
            raise
        raise FormatError(f"cannot parse target graph {spec!r}") from exc
    raise FormatError(f"unknown target graph kind {spec!r}")


# -- bandwidth ---------------------------------------------------------------


def bandwidth_of_labelling(H: TargetGraph) -> int:
    return max((j - i for i, j in H.edges), default=0)


def exact_bandwidth(H: TargetGraph) -> int:
    """Minimum bandwidth over all labellings (exhaustive with pruning, n <= 10)."""
    n = H.n
    if n > EXACT_BANDWIDTH_MAX_N:
        raise SizeLimitError(f"exact_bandwidth is capped at n={EXACT_BANDWIDTH_MAX_N}, got {n}")
    if not H.edges:
        return 0
    adj = H.neighbours()
    lower = max(1, (H.max_degree() + 1) // 2)
    for b in range(lower, n):
        if _has_labelling(adj, n, b):
            return b
    return n - 1


def _has_labelling(adj, n, b) -> bool:
    # Fill positions left to right; a vertex placed at position p must see all
    # its neighbours placed by position p + b.
    pos = [-1] * n
    order: list[int] = []

    def ok_so_far(p):
        # every vertex at position < p - b must be closed already
        lo = p - b
        for q in range(0, max(0, lo)):
            v = order[q]
            if any(pos[u] < 0 for u in adj[v]):
                return False
        return True

    def rec(p):
        if p == n:
            return True
        if not ok_so_far(p):
            return False
        for v in range(n):
            if pos[v] >= 0:
                continue
            if any(pos[u] >= 0 and p - pos[u] > b for u in adj[v]):
                continue
            pos[v] = p
            order.append(v)
            if rec(p + 1):
                return True
            order.pop()
            pos[v] = -1
        return False

    return rec(0)


# -- colourings of H ------------------------------------------------------------


def proper_two_colouring(H: TargetGraph) -> VertexTwoColouring:
    """BFS 2-colouring; each component's smallest vertex gets colour 1."""
    adj = H.neighbours()
    col = [0] * H.n
    for s in range(H.n):
        if col[s]:
            continue
        col[s] = 1
        dq = deque([s])
        while dq:
            v = dq.popleft()
            for u in adj[v]:
                if not col[u]:
                    col[u] = 3 - col[v]
                    dq.append(u)
                elif col[u] == col[v]:
                    raise StructuralError(f"{H!r} is not bipartite")
    return VertexTwoColouring(tuple(col))


def is_bipartite(H: TargetGraph) -> bool:
    try:
        proper_two_colouring(H)
    except StructuralError:
        return False
    return True


def components(H: TargetGraph) -> list[list[int]]:
    adj = H.neighbours()
    seen = [False] * H.n
    out = []
    for s in range(H.n):
        if seen[s]:
            continue
        comp, stack = [], [s]
        seen[s] = True
        while stack:
            v = stack.pop()
            comp.append(v)
            for u in adj[v]:
                if not seen[u]:
                    seen[u] = True
                    stack.append(u)
        out.append(sorted(comp))
    return out


def balanced_two_colouring(H: TargetGraph) -> VertexTwoColouring | None:
    """A proper 2-colouring with equal classes, flipping components as needed; None if impossible."""
    base = proper_two_colouring(H)
    comps = components(H)
    if H.n % 2:
        return None
    target = H.n // 2
    # subset-sum over per-component class-1 counts, flipping allowed
    reach: dict[int, list[bool]] = {0: []}
    for comp in comps:
        c1 = sum(1 for v in comp if base[v] == 1)
        c2 = len(comp) - c1
        nxt: dict[int, list[bool]] = {}
        for tot, flips in reach.items():
            nxt.setdefault(tot + c1, flips + [False])
            nxt.setdefault(tot + c2, flips + [True])
        reach = nxt
    if target not in reach:
        return None
    col = list(base.assignment)
    for comp, flip in zip(comps, reach[target]):
        if flip:
            for v in comp:
                col[v] = 3 - col[v]
    return VertexTwoColouring(tuple(col))


@dataclass(frozen=True)
class BalanceReport:
    ok: bool
    failed: tuple

    def __bool__(self):
        return self.ok


def class_size_balanced(c1: int, c2: int, beta) -> bool:
    """| c1 - c2 | <= beta * c2; an empty second class only passes if the first is empty too."""
    if c2 == 0:
        return c1 == 0
    return abs(c1 - c2) <= Fraction(beta) * c2


def is_balanced_beta_graph(H: TargetGraph, chi: VertexTwoColouring, beta, delta: int) -> BalanceReport:
    beta = Fraction(beta)
    failed = []
    if not chi.is_proper(H):
        failed.append("proper-colouring")
    if bandwidth_of_labelling(H) > beta * H.n:
        failed.append("bandwidth")
    if H.max_degree() > delta:
        failed.append("max-degree")
    if not class_size_balanced(*chi.counts(), beta):
        failed.append("class-balance")
    return BalanceReport(not failed, tuple(failed))


# -- text format -------------------------------------------------------------


def write_graph(H: TargetGraph) -> str:
    lines = [f"graph {H.n}"]
    lines += [f"{i + 1} {j + 1}" for i, j in H.sorted_edges()]
    return "\n".join(lines) + "\n"


def read_graph(text: str) -> TargetGraph:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise FormatError("empty graph file")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "graph":
        raise FormatError(f"bad graph header {lines[0]!r}")
    n = int(head[1])
    edges = set()
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise FormatError(f"bad edge line {ln!r}")
        i, j = int(parts[0]) - 1, int(parts[1]) - 1
        key = (min(i, j), max(i, j))
        if key in edges:
            raise FormatError(f"duplicate edge {ln!r}")
        edges.add(key)
    return TargetGraph.from_edges(n, edges)


def colouring_from_mapping(mapping: Mapping[int, int], n: int) -> VertexTwoColouring:
    return VertexTwoColouring(tuple(mapping[v] for v in range(n)))
