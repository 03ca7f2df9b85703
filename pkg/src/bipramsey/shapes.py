"""Monochromatic connected matchings and cm-shapes."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Sequence

from .colourings import HostColouring
from .errors import NoShapeError, StructuralError
from .regularity import ReducedColouredGraph, VertexPair, build_reduced_graph, density


@dataclass(frozen=True)
class ConnectedMatching:
    colour: int
    component: tuple
    edges: tuple

    def __len__(self):
        return len(self.edges)


def max_bipartite_matching(left: Sequence, adj: dict) -> dict:
    """Maximum matching by augmenting paths (Kuhn).  Returns ``{left: right}``."""
    match_r: dict = {}

    def augment(u, seen):
        for v in adj.get(u, ()):
            if v in seen:
                continue
            seen.add(v)
            if v not in match_r or augment(match_r[v], seen):
                match_r[v] = u
                return True
        return False

    for u in left:
        augment(u, set())
    return {u: v for v, u in match_r.items()}


def _components(n: int, adj: list[list[int]]) -> list[list[int]]:
    seen = [False] * n
    out = []
    for s in range(n):
        if seen[s] or not adj[s]:
            continue
        comp, dq = [], deque([s])
        seen[s] = True
        while dq:
            v = dq.popleft()
            comp.append(v)
            for u in adj[v]:
                if not seen[u]:
                    seen[u] = True
                    dq.append(u)
        out.append(sorted(comp))
    return out


def find_connected_matching(R: ReducedColouredGraph, s: int) -> ConnectedMatching:
    """Largest matching inside a single component of the colour-s subgraph."""
    adj = R.neighbours(s)
    best = ConnectedMatching(s, (), ())
    for comp in _components(R.n_classes, adj):
        left = [v for v in comp if R.sides[v] == 0]
        mate = max_bipartite_matching(left, {u: adj[u] for u in left})
        edges = tuple(sorted((min(u, v), max(u, v)) for u, v in mate.items()))
        if len(edges) > len(best):
            best = ConnectedMatching(s, tuple(comp), edges)
    return best


def best_monochromatic_connected_matching(R: ReducedColouredGraph) -> ConnectedMatching:
    best = None
    for s in range(1, R.colour_count + 1):
        cm = find_connected_matching(R, s)
        if best is None or len(cm) > len(best):
            best = cm
    return best


def validate_connected_matching(R: ReducedColouredGraph, cm: ConnectedMatching) -> bool:
    ends = [v for e in cm.edges for v in e]
    if len(ends) != len(set(ends)):
        return False
    if any(R.colour_of(i, j) != cm.colour for i, j in cm.edges):
        return False
    if not cm.edges:
        return True
    adj = R.neighbours(cm.colour)
    seen = {ends[0]}
    dq = deque([ends[0]])
    while dq:
        v = dq.popleft()
        for u in adj[v]:
            if u not in seen:
                seen.add(u)
                dq.append(u)
    return all(v in seen for v in ends)


@dataclass(frozen=True)
class LemmaBoundReport:
    eps_ok: bool
    size_ok: bool
    non_neighbours_ok: bool | None
    conclusion: bool

    @property
    def hypotheses(self) -> bool:
        return self.eps_ok and self.size_ok and self.non_neighbours_ok is not False

    @property
    def counterexample(self) -> bool:
        return self.hypotheses and not self.conclusion

    @property
    def status(self) -> str:
        if not self.hypotheses:
            return "hypotheses unmet"
        return "counterexample" if self.counterexample else "conclusion holds"


def check_matching_lemma_bound(k: int, k_prime: int, eps, found: ConnectedMatching,
                               max_non_neighbours: int | None = None) -> LemmaBoundReport:
    """Check the hypotheses (eps < 1/(3*10^5), k >= (3 + 3*10^5 eps) k', few non-neighbours) and |found| >= k'."""
    eps = Fraction(eps)
    eps_ok = 0 < eps < Fraction(1, 3 * 10**5)
    size_ok = k >= (3 + 3 * 10**5 * eps) * k_prime
    nn = None if max_non_neighbours is None else max_non_neighbours <= eps * k_prime
    return LemmaBoundReport(eps_ok, size_ok, nn, len(found) >= k_prime)


# -- even-distance labelling ---------------------------------------------------------


@dataclass(frozen=True)
class ShapeSkeleton:
    """Tree with matched pairs (x_i, y_i) and unmatched z_j; x's pairwise at even distance."""

    tree_edges: tuple
    x: tuple
    y: tuple
    z: tuple

    @property
    def ell(self) -> int:
        return len(self.x)

    @property
    def ell_prime(self) -> int:
        return len(self.z)

    def labels(self) -> dict:
        out = {}
        for i, v in enumerate(self.x):
            out[v] = f"X{i + 1}"
        for i, v in enumerate(self.y):
            out[v] = f"Y{i + 1}"
        for i, v in enumerate(self.z):
            out[v] = f"Z{i + 1}"
        return out


def _tree_adj(vertices, edges):
    adj = {v: [] for v in vertices}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    for v in adj:
        adj[v].sort()
    return adj


def is_tree(vertices: Iterable[Hashable], edges: Iterable[tuple]) -> bool:
    vs = sorted(set(vertices))
    es = list(edges)
    if not vs or len(es) != len(vs) - 1:
        return False
    adj = _tree_adj(vs, es)
    seen = {vs[0]}
    stack = [vs[0]]
    while stack:
        v = stack.pop()
        for u in adj[v]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return len(seen) == len(vs)


def tree_distances(vertices, edges, src) -> dict:
    adj = _tree_adj(vertices, edges)
    dist = {src: 0}
    dq = deque([src])
    while dq:
        v = dq.popleft()
        for u in adj[v]:
            if u not in dist:
                dist[u] = dist[v] + 1
                dq.append(u)
    return dist


def tree_path(vertices, edges, src, dst) -> list:
    adj = _tree_adj(vertices, edges)
    prev = {src: None}
    dq = deque([src])
    while dq:
        v = dq.popleft()
        if v == dst:
            break
        for u in adj[v]:
            if u not in prev:
                prev[u] = v
                dq.append(u)
    path = [dst]
    while path[-1] != src:
        path.append(prev[path[-1]])
    return path[::-1]


def even_distance_labelling(vertices: Iterable[Hashable], T: Iterable[tuple], M: Iterable[tuple]) -> ShapeSkeleton:
    """2-colour T from its smallest vertex; matched endpoints of colour 1 become the x's."""
    vs = sorted(set(vertices))
    T = [tuple(e) for e in T]
    M = [tuple(e) for e in M]
    if not is_tree(vs, T):
        raise StructuralError("T is not a tree")
    tset = {frozenset(e) for e in T}
    ends = [v for e in M for v in e]
    if len(ends) != len(set(ends)):
        raise StructuralError("M is not a matching")
    if any(frozenset(e) not in tset for e in M):
        raise StructuralError("M is not contained in T")
    dist = tree_distances(vs, T, vs[0])
    pairs = []
    for a, b in M:
        x, y = (a, b) if dist[a] % 2 == 0 else (b, a)
        pairs.append((x, y))
    pairs.sort()
    matched = set(ends)
    z = tuple(v for v in vs if v not in matched)
    return ShapeSkeleton(tuple(sorted(tuple(sorted(e)) for e in T)), tuple(p[0] for p in pairs),
                         tuple(p[1] for p in pairs), z)


# -- cm-shape ------------------------------------------------------------------------


@dataclass
class CmShape:
    """Labelled tree plus host classes (label -> host vertex ids) in one colour."""

    skeleton: ShapeSkeleton
    classes: dict
    colour: int
    eps: Fraction
    d: Fraction
    k: int
    lemma_bound_holds: bool = False
    reduced: ReducedColouredGraph | None = field(default=None, repr=False)

    @property
    def ell(self) -> int:
        return self.skeleton.ell

    @property
    def ell_prime(self) -> int:
        return self.skeleton.ell_prime

    @property
    def tree_label_edges(self) -> list[tuple[str, str]]:
        lab = self.skeleton.labels()
        return [(lab[a], lab[b]) for a, b in self.skeleton.tree_edges]

    @property
    def matching_labels(self) -> list[tuple[str, str]]:
        return [(f"X{i + 1}", f"Y{i + 1}") for i in range(self.ell)]

    @property
    def labels(self) -> list[str]:
        return (
            [f"X{i + 1}" for i in range(self.ell)]
            + [f"Y{i + 1}" for i in range(self.ell)]
            + [f"Z{j + 1}" for j in range(self.ell_prime)]
        )

    def with_classes(self, classes: dict, eps=None, d=None) -> "CmShape":
        return CmShape(self.skeleton, dict(classes), self.colour, Fraction(eps if eps is not None else self.eps),
                       Fraction(d if d is not None else self.d), self.k, self.lemma_bound_holds, self.reduced)


def spanning_tree_with_matching(R: ReducedColouredGraph, cm: ConnectedMatching) -> list[tuple[int, int]]:
    """Matching edges first, then BFS edges from the smallest matched vertex."""
    parent = {v: v for v in cm.component}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    tree = []
    for a, b in cm.edges:
        parent[find(a)] = find(b)
        tree.append((a, b))
    adj = R.neighbours(cm.colour)
    root = min(v for e in cm.edges for v in e)
    seen = {root}
    dq = deque([root])
    while dq:
        v = dq.popleft()
        for u in adj[v]:
            if u in seen:
                continue
            seen.add(u)
            dq.append(u)
            if find(u) != find(v):
                parent[find(u)] = find(v)
                tree.append((min(u, v), max(u, v)))
    return sorted(tree)


def assemble_cm_shape(c: HostColouring, partition: Sequence[Sequence[int]], eps, method: str = "auto",
                      R: ReducedColouredGraph | None = None) -> CmShape:
    """Reduced graph -> best connected matching -> tree -> labelling -> host classes."""
    eps = Fraction(eps)
    if R is None:
        R = build_reduced_graph(c, partition, eps, method)
    cm = best_monochromatic_connected_matching(R)
    if not cm.edges:
        raise NoShapeError("reduced graph has no monochromatic matching edge")
    tree = spanning_tree_with_matching(R, cm)
    sk = even_distance_labelling(cm.component, tree, cm.edges)
    lab = sk.labels()
    classes = {lab[v]: tuple(partition[v]) for v in cm.component}
    d = Fraction(1, c.r)
    for a, b in tree:
        pair = VertexPair.from_colouring(c, partition[a], partition[b], cm.colour)
        if density(pair) < d:
            raise AssertionError(f"tree edge {a}-{b} below the majority density")
        cert = R.certificates.get((a, b, cm.colour))
        if cert is not None and not cert.regular:
            raise AssertionError(f"tree edge {a}-{b} is not certified regular")
    k = R.n_classes
    half = Fraction(k, 2)
    holds = sk.ell >= half / (3 + 24 * 10**5 * eps)
    return CmShape(sk, classes, cm.colour, eps, d, k, holds, R)


def validate_shape(shape: CmShape, c: HostColouring | None = None) -> list[str]:
    """Names of violated shape invariants (empty when valid)."""
    sk = shape.skeleton
    bad = []
    verts = list(sk.x) + list(sk.y) + list(sk.z)
    if not is_tree(verts, sk.tree_edges):
        bad.append("tree")
    tset = {frozenset(e) for e in sk.tree_edges}
    if any(frozenset((x, y)) not in tset for x, y in zip(sk.x, sk.y)):
        bad.append("matching-in-tree")
    if sk.x:
        for x in sk.x:
            dist = tree_distances(verts, sk.tree_edges, x)
            if any(dist[x2] % 2 for x2 in sk.x):
                bad.append("even-distance")
                break
    sizes = {len(v) for v in shape.classes.values()}
    allv = [v for cl in shape.classes.values() for v in cl]
    if len(allv) != len(set(allv)):
        bad.append("disjoint-classes")
    if len(sizes) > 1:
        bad.append("uniform-classes")
    if c is not None and shape.classes:
        m = sizes.pop() if len(sizes) == 1 else 0
        if m < (1 - shape.eps) * (c.L + c.R) / shape.k:
            bad.append("class-size")
        lab = sk.labels()
        for a, b in sk.tree_edges:
            pair = VertexPair.from_colouring(c, shape.classes[lab[a]], shape.classes[lab[b]], shape.colour)
            if density(pair) < shape.d:
                bad.append("density")
                break
    return bad


def write_shape(shape: CmShape) -> str:
    lines = [f"cmshape {shape.ell} {shape.ell_prime} {shape.k} {shape.colour}"]
    for a, b in shape.tree_label_edges:
        lines.append(f"tedge {a} {b}")
    for x, y in shape.matching_labels:
        lines.append(f"medge {x} {y}")
    for label in shape.labels:
        ids = " ".join(str(v + 1) for v in shape.classes[label])
        lines.append(f"class {label} {ids}")
    return "\n".join(lines) + "\n"
