"""Target-side partition: constants, window blocks, balanced ordering, links/kernels, X/Y/Z classes."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels
from .errors import DivisibilityError, ParameterError, StructuralError
from .graphs import TargetGraph, VertexTwoColouring
from .shapes import CmShape, ShapeSkeleton, tree_path

EXHAUSTIVE_PERM_MAX = 9
_TEN5 = 10**5


@dataclass(frozen=True)
class ConstantsProfile:
    gamma: Fraction
    delta: int
    eps1: Fraction
    eps: Fraction
    xi: Fraction
    beta: Fraction
    K0: int
    n0: int | None
    hat_ell_max: Fraction
    audit: tuple

    def host_size(self, n: int) -> Fraction:
        return (Fraction(3, 2) + self.gamma) * n

    @property
    def all_hold(self) -> bool:
        return all(ok for _, ok in self.audit)

    def lines(self) -> list[str]:
        out = [f"{name}={getattr(self, name)}" for name in ("gamma", "delta", "eps1", "eps", "xi", "beta", "K0")]
        out.append(f"hat_ell_max={self.hat_ell_max}")
        if self.n0 is not None:
            out.append(f"n0={self.n0}")
        out += [f"audit {name} {'holds' if ok else 'FAILS'}" for name, ok in self.audit]
        return out


def derive_constants(gamma, delta: int, eps1, K0: int = 1, n0: int | None = None) -> ConstantsProfile:
    gamma, eps1 = Fraction(gamma), Fraction(eps1)
    if gamma <= 0 or delta < 1 or eps1 <= 0 or K0 < 1:
        raise ParameterError("need gamma > 0, delta >= 1, eps1 > 0, K0 >= 1")
    eps = min(eps1 / 2, (gamma / 2) / (24 * _TEN5 + 2 * (3 + gamma / 2)))
    xi = gamma / 6
    beta = eps * xi * (1 + 2 * xi) / (72 * delta**2 * K0**2)
    hat_max = 7 * K0 / xi + 2 * K0
    ell = K0
    link_total = 4 * ell * hat_max * beta
    middle = (1 + gamma / 3) * eps / (2 * delta**2)
    smallest_multiple = math.ceil((7 * K0 / xi + ell) / K0) * K0
    audit = (
        ("eps_below_matching_threshold", eps <= Fraction(1, 24 * _TEN5)),
        ("hat_ell_upper_bound", smallest_multiple <= hat_max),
        ("link_budget", link_total <= middle),
        ("link_budget_below_xi", middle <= xi),
        ("beta_below_2_over_hat_ell", beta <= 2 / hat_max),
    )
    return ConstantsProfile(gamma, delta, eps1, eps, xi, beta, K0, n0, hat_max, audit)


def beta_balanced_check(chi: VertexTwoColouring, W: Sequence[int], beta) -> bool:
    c1, c2 = chi.counts(W)
    if c1 == 0 and c2 == 0:
        return True
    beta = Fraction(beta)
    if c2 == 0:
        return False
    return 1 - beta <= Fraction(c1, c2) <= 1 + beta


def equi_partition(H: TargetGraph, hat_ell: int) -> tuple:
    if hat_ell < 1 or H.n % hat_ell:
        raise DivisibilityError(f"hat_ell={hat_ell} does not divide n={H.n}")
    size = H.n // hat_ell
    return tuple(tuple(range(i * size, (i + 1) * size)) for i in range(hat_ell))


# -- balanced ordering ---------------------------------------------------------------


def window_violations(counts: Sequence[tuple[int, int]], sigma: Sequence[int], xi, min_window: int) -> list:
    """Windows (start, end) of >= min_window consecutive blocks with |C1 - C2| > xi C2."""
    xi = Fraction(xi)
    h = len(sigma)
    bad = []
    for a in range(h):
        s1 = s2 = 0
        for b in range(a, h):
            c1, c2 = counts[sigma[b]]
            s1 += c1
            s2 += c2
            if b - a + 1 >= min_window and abs(s1 - s2) > xi * s2:
                bad.append((a, b))
    return bad


def _greedy_interleave(counts):
    excess = [(c1 - c2, i) for i, (c1, c2) in enumerate(counts)]
    pos = sorted((e for e in excess if e[0] > 0), key=lambda t: (-t[0], t[1]))
    neg = sorted((e for e in excess if e[0] < 0), key=lambda t: (t[0], t[1]))
    zero = [i for e, i in excess if e == 0]
    out = []
    run = 0
    while pos or neg:
        take_neg = neg and (run > 0 or not pos)
        e, i = (neg if take_neg else pos).pop(0)
        out.append(i)
        run += e
    return out + zero


def find_balanced_permutation(counts: Sequence[tuple[int, int]], xi, min_window: int = 1):
    """Block order (0-based, position -> block) balanced on every long window, or None.

    Exhaustive (lexicographically first) up to 9 blocks; above that the
    excess-interleaving heuristic, kept only if it verifies.
    """
    xi = Fraction(xi)
    if min_window < 1:
        raise ParameterError("min_window must be >= 1")
    h = len(counts)
    if h <= EXHAUSTIVE_PERM_MAX:
        c1 = np.array([c[0] for c in counts], np.int64)
        c2 = np.array([c[1] for c in counts], np.int64)
        out = np.zeros(max(h, 1), np.int64)
        if not kernels.balanced_perm_search(c1, c2, xi.numerator, xi.denominator, min_window, out):
            return None
        sigma = tuple(int(v) for v in out[:h])
    else:
        sigma = tuple(_greedy_interleave(counts))
    if window_violations(counts, sigma, xi, min_window):
        return None
    return sigma


def brute_force_balanced_permutation(counts, xi, min_window: int = 1):
    """Reference search over itertools.permutations (no pruning)."""
    for sigma in itertools.permutations(range(len(counts))):
        if not window_violations(counts, sigma, xi, min_window):
            return sigma
    return None


# -- plans -------------------------------------------------------------------------


@dataclass(frozen=True)
class Link:
    block: int
    pieces: tuple  # tuple of vertex tuples, piece j at index j-1
    walk: tuple  # tree vertices u_0 .. u_{t+1}
    kappa: int  # colour whose kernel class is u_0's


@dataclass(frozen=True)
class PartitionPlan:
    H: TargetGraph
    hat_ell: int
    blocks: tuple
    sigma: tuple
    ell: int
    ell_prime: int
    block_family: tuple  # block index -> family index (0-based)
    piece_size: int = 0
    links: tuple = ()
    kernels: tuple = ()
    classes: dict = field(default_factory=dict)
    label_of: tuple = ()
    chi: VertexTwoColouring | None = None

    @property
    def n(self) -> int:
        return self.H.n

    @property
    def families(self) -> list[tuple[int, int]]:
        step = self.hat_ell // self.ell
        return [(i * step + 1, (i + 1) * step) for i in range(self.ell)]

    @property
    def labels(self) -> list[str]:
        return (
            [f"X{i + 1}" for i in range(self.ell)]
            + [f"Y{i + 1}" for i in range(self.ell)]
            + [f"Z{j + 1}" for j in range(self.ell_prime)]
        )


def new_plan(H: TargetGraph, hat_ell: int, sigma: Sequence[int], skeleton: ShapeSkeleton) -> PartitionPlan:
    blocks = equi_partition(H, hat_ell)
    ell = skeleton.ell
    if ell < 1 or hat_ell % ell:
        raise DivisibilityError(f"ell={ell} must divide hat_ell={hat_ell}")
    if sorted(sigma) != list(range(hat_ell)):
        raise ParameterError("sigma is not a permutation of the blocks")
    step = hat_ell // ell
    fam = [0] * hat_ell
    for pos, blk in enumerate(sigma):
        fam[blk] = pos // step
    return PartitionPlan(H, hat_ell, blocks, tuple(sigma), ell, skeleton.ell_prime, tuple(fam))


def _walk(skel: ShapeSkeleton, r: int, s: int) -> tuple[tuple, int]:
    verts = list(skel.x) + list(skel.y) + list(skel.z)
    xr, yr, xs, ys = skel.x[r], skel.y[r], skel.x[s], skel.y[s]
    path = tree_path(verts, skel.tree_edges, xr, xs)
    if (len(path) - 1) % 2:
        raise StructuralError(f"x{r + 1} and x{s + 1} are at odd tree distance")
    head = 2 if path[1] == yr else 1
    tail = 2 if path[-2] == ys else 1
    interior = path[head:len(path) - tail]
    if any(v in (xr, yr, xs, ys) for v in interior):
        raise StructuralError("walk interior meets a family's matched vertices")
    u0, ulast = path[head - 1], path[len(path) - tail]
    kappa = 1 if u0 == xr else 2
    return (u0, *interior, ulast), kappa


def build_links_kernels(plan: PartitionPlan, shape: CmShape | ShapeSkeleton, beta, H: TargetGraph | None = None):
    """Carve t+1 trailing pieces of size ceil(beta n) from each block followed by a family change."""
    skel = shape.skeleton if isinstance(shape, CmShape) else shape
    H = plan.H if H is None else H
    beta = Fraction(beta)
    piece = math.ceil(beta * H.n)
    if piece < 1:
        raise ParameterError("beta n must be positive")
    size = H.n // plan.hat_ell
    links, kern = [], []
    for i, blk in enumerate(plan.blocks):
        r = plan.block_family[i]
        if i + 1 < plan.hat_ell and plan.block_family[i + 1] != r:
            s = plan.block_family[i + 1]
            walk, kappa = _walk(skel, r, s)
            t = len(walk) - 2
            need = (t + 1) * piece
            if need > size:
                raise ParameterError(
                    f"block {i + 1}: link needs {need} vertices but blocks have {size}; beta too large"
                )
            tailv = blk[size - need:]
            pieces = tuple(tuple(tailv[j * piece:(j + 1) * piece]) for j in range(t + 1))
            links.append(Link(i, pieces, walk, kappa))
            kern.append(tuple(blk[:size - need]))
        else:
            links.append(Link(i, (), (), 0))
            kern.append(tuple(blk))
    return replace(plan, piece_size=piece, links=tuple(links), kernels=tuple(kern))


def assign_classes(plan: PartitionPlan, chi: VertexTwoColouring, shape: CmShape | ShapeSkeleton) -> PartitionPlan:
    """Kernels go to X_f / Y_f by colour; link pieces walk along the tree path.

    In piece j, vertices of colour kappa (the colour kept in u_0's class) go to
    u_{j-1} for odd j and u_j for even j; the other colour takes the other one.
    """
    skel = shape.skeleton if isinstance(shape, CmShape) else shape
    if not chi.is_proper(plan.H):
        raise StructuralError("chi is not a proper 2-colouring of H")
    if not plan.links:
        raise ParameterError("links and kernels must be built first")
    lab = skel.labels()
    label_of = [""] * plan.n
    for i, ker in enumerate(plan.kernels):
        f = plan.block_family[i] + 1
        for w in ker:
            label_of[w] = f"X{f}" if chi[w] == 1 else f"Y{f}"
    for link in plan.links:
        for j, piece in enumerate(link.pieces, start=1):
            here, prev = link.walk[j], link.walk[j - 1]
            for w in piece:
                same = chi[w] == link.kappa
                target = prev if (j % 2 == 1) == same else here
                label_of[w] = lab[target]
    classes = {name: [] for name in plan.labels}
    for w, name in enumerate(label_of):
        classes[name].append(w)
    return replace(plan, classes={k: tuple(v) for k, v in classes.items()}, label_of=tuple(label_of), chi=chi)


def plan_partition(H: TargetGraph, chi: VertexTwoColouring, shape: CmShape | ShapeSkeleton, hat_ell: int, beta,
                   xi, min_window: int | None = None) -> PartitionPlan:
    skel = shape.skeleton if isinstance(shape, CmShape) else shape
    blocks = equi_partition(H, hat_ell)
    counts = [chi.counts(b) for b in blocks]
    if min_window is None:
        min_window = max(1, hat_ell // max(skel.ell, 1))
    sigma = find_balanced_permutation(counts, xi, min_window)
    if sigma is None:
        raise ParameterError(f"no block order is {xi}-balanced on windows of {min_window} blocks")
    plan = new_plan(H, hat_ell, sigma, skel)
    plan = build_links_kernels(plan, skel, beta, H)
    return assign_classes(plan, chi, skel)


# -- checks ---------------------------------------------------------------------------


def tree_label_edges(skel: ShapeSkeleton) -> set:
    lab = skel.labels()
    return {frozenset((lab[a], lab[b])) for a, b in skel.tree_edges}


def edges_project_to_tree(plan: PartitionPlan, shape: CmShape | ShapeSkeleton) -> list:
    """H-edges that sit inside a class or between classes not joined in T."""
    skel = shape.skeleton if isinstance(shape, CmShape) else shape
    tl = tree_label_edges(skel)
    return [(i, j) for i, j in plan.H.sorted_edges()
            if frozenset((plan.label_of[i], plan.label_of[j])) not in tl]


def size_bounds(plan: PartitionPlan, xi) -> dict:
    """|X_i|, |Y_i| <= (1 + 2 xi) n / (2 ell) and |Z_j| <= 2 hat_ell * piece."""
    xi = Fraction(xi)
    xy_cap = (1 + 2 * xi) * Fraction(plan.n, 2 * plan.ell)
    z_cap = 2 * plan.hat_ell * plan.piece_size
    out = {}
    for name, members in plan.classes.items():
        cap = z_cap if name.startswith("Z") else xy_cap
        out[name] = (len(members), cap, len(members) <= cap)
    return out


def family_balanced(plan: PartitionPlan, xi) -> bool:
    xi = Fraction(xi)
    step = plan.hat_ell // plan.ell
    for f in range(plan.ell):
        vs = [w for pos in range(f * step, (f + 1) * step) for w in plan.blocks[plan.sigma[pos]]]
        c1, c2 = plan.chi.counts(vs)
        if abs(c1 - c2) > xi * c2:
            return False
    return True


def write_plan(plan: PartitionPlan) -> str:
    lines = [f"plan {plan.n} {plan.hat_ell} {plan.ell} {plan.ell_prime}"]
    lines.append("sigma " + " ".join(str(b + 1) for b in plan.sigma))
    for i, (a, b) in enumerate(plan.families, start=1):
        lines.append(f"family {i} {a} {b}")
    for link in plan.links:
        for j, piece in enumerate(link.pieces, start=1):
            groups: dict = {}
            for w in piece:
                groups.setdefault(plan.label_of[w], []).append(w)
            for name in sorted(groups):
                lines.append(f"link {link.block + 1} {j} {len(groups[name])} {name}")
    for name in plan.labels:
        ids = " ".join(str(w + 1) for w in plan.classes.get(name, ()))
        lines.append(f"class {name} {ids}".rstrip())
    return "\n".join(lines) + "\n"
