from fractions import Fraction

import numpy as np
import pytest

from bipramsey.colourings import HostColouring, extremal_three_split, monochromatic, random_colouring
from bipramsey.embed import (
    ClassedHost,
    EmbeddingResult,
    PipelineParams,
    compatibility_check,
    greedy_embed,
    pipeline_demo,
    run_pipeline_seeds,
    verify_embedding,
    write_embedding,
)
from bipramsey.errors import StructuralError
from bipramsey.graphs import VertexTwoColouring, make_even_cycle, make_grid, make_path, proper_two_colouring
from bipramsey.partition import plan_partition
from bipramsey.shapes import CmShape, ShapeSkeleton

SINGLE = ShapeSkeleton(((0, 1),), (0,), (1,), ())
PATH4 = ShapeSkeleton(((0, 1), (1, 2), (2, 3)), (0, 2), (1, 3), ())


def shape_on(skel, sizes, L=None):
    """Shape over a complete colour-1 host; label -> consecutive host ids on the right side."""
    lab = skel.labels()
    classes, left, right = {}, 0, 0
    L = L or sum(sizes[lab[v]] for v in skel.x)
    for v in list(skel.x) + list(skel.y) + list(skel.z):
        name = lab[v]
        if name.startswith("X"):
            classes[name] = tuple(range(left, left + sizes[name]))
            left += sizes[name]
        else:
            classes[name] = tuple(range(L + right, L + right + sizes[name]))
            right += sizes[name]
    shape = CmShape(skel, classes, 1, Fraction(1, 10), Fraction(1, 2), 2)
    return shape, max(left, 1), max(right, 1)


def test_single_family_compatible():
    H = make_path(12)
    plan = plan_partition(H, VertexTwoColouring.alternating(12), SINGLE, 2, Fraction(1, 12), Fraction(1, 2))
    shape, _, _ = shape_on(SINGLE, {"X1": 8, "Y1": 8})
    rep = compatibility_check(plan, shape, Fraction(1, 10))
    assert rep.verdict
    assert not any(rep.U.values())


def test_oversized_class_fails_condition_ii():
    H = make_path(12)
    plan = plan_partition(H, VertexTwoColouring.alternating(12), SINGLE, 2, Fraction(1, 12), Fraction(1, 2))
    shape, _, _ = shape_on(SINGLE, {"X1": 5, "Y1": 8})
    rep = compatibility_check(plan, shape, Fraction(1, 10))
    assert not rep.verdict
    assert not rep.conditions["ii"] and rep.violations["ii"] == ["X1"]


def test_only_condition_iv_fails():
    # Y1-X2 is the only non-matching tree edge, so U sits in Y1 and X2 and U'
    # in X1 and Y2.  Shrinking X1 to exactly its plan size keeps (ii) and (iii)
    # but leaves eps |X1| < |U'_X1|.
    H = make_path(16)
    plan = plan_partition(H, VertexTwoColouring.alternating(16), PATH4, 4, Fraction(1, 16), Fraction(1, 2))
    sizes = {"X1": len(plan.classes["X1"]), "Y1": 40, "X2": 40, "Y2": 40}
    shape, _, _ = shape_on(PATH4, sizes)
    rep = compatibility_check(plan, shape, Fraction(1, 10))
    assert rep.U_prime["X1"] and not rep.U["X1"]
    assert rep.conditions["i"] and rep.conditions["ii"] and rep.conditions["iii"]
    assert not rep.conditions["iv"] and rep.violations["iv"] == ["X1"]
    assert not rep.verdict


def test_u_sets_recomputed():
    H = make_path(16)
    plan = plan_partition(H, VertexTwoColouring.alternating(16), PATH4, 4, Fraction(1, 16), Fraction(1, 2))
    shape, _, _ = shape_on(PATH4, {"X1": 10, "Y1": 10, "X2": 10, "Y2": 10})
    rep = compatibility_check(plan, shape, Fraction(1, 5))
    U = {w for vs in rep.U.values() for w in vs}
    lab = plan.label_of
    nonmatching = {frozenset(("Y1", "X2"))}
    expect = {w for i, j in H.edges if frozenset((lab[i], lab[j])) in nonmatching for w in (i, j)}
    assert U == expect
    Up = {w for vs in rep.U_prime.values() for w in vs}
    adj = H.neighbours()
    assert Up == {w for w in range(H.n) if w not in U and any(u in U for u in adj[w])}


def test_label_mismatch():
    H = make_path(12)
    plan = plan_partition(H, VertexTwoColouring.alternating(12), SINGLE, 2, Fraction(1, 12), Fraction(1, 2))
    shape, _, _ = shape_on(PATH4, {"X1": 8, "Y1": 8, "X2": 8, "Y2": 8})
    with pytest.raises(StructuralError):
        compatibility_check(plan, shape, Fraction(1, 10))


def test_single_edge_embeds_without_backtracking():
    H = make_path(2)
    plan = plan_partition(H, VertexTwoColouring.alternating(2), SINGLE, 1, Fraction(1, 2), Fraction(1))
    c = monochromatic(2, 2, 1, 1)
    G = ClassedHost(c, 1, {"X1": (0, 1), "Y1": (2, 3)})
    res = greedy_embed(H, plan, G)
    assert res.success and res.backtracks == 0 and verify_embedding(res, H, G, plan)


def test_cycle_into_complete_pair():
    H = make_even_cycle(8)
    plan = plan_partition(H, proper_two_colouring(H), SINGLE, 2, Fraction(1, 8), Fraction(1))
    c = monochromatic(8, 8, 1, 1)
    G = ClassedHost(c, 1, {"X1": tuple(range(8)), "Y1": tuple(range(8, 16))})
    res = greedy_embed(H, plan, G)
    assert res.success and verify_embedding(res, H, G, plan)


def test_too_small_host_fails_immediately():
    H = make_path(12)
    plan = plan_partition(H, VertexTwoColouring.alternating(12), SINGLE, 2, Fraction(1, 12), Fraction(1))
    c = monochromatic(4, 4, 1, 1)
    G = ClassedHost(c, 1, {"X1": tuple(range(4)), "Y1": tuple(range(4, 8))})
    res = greedy_embed(H, plan, G)
    assert not res.success and res.nodes == 0


def test_sparse_host_uses_restarts_or_fails_cleanly():
    rng = np.random.default_rng(2)
    c = HostColouring(10, 10, 2, np.where(rng.random((10, 10)) < 0.7, 1, 2))
    H = make_path(8)
    plan = plan_partition(H, VertexTwoColouring.alternating(8), SINGLE, 2, Fraction(1, 8), Fraction(1))
    G = ClassedHost(c, 1, {"X1": tuple(range(10)), "Y1": tuple(range(10, 20))})
    res = greedy_embed(H, plan, G, budget=2000, seed=4)
    if res.success:
        assert verify_embedding(res, H, G, plan)
    else:
        assert res.reason


def test_verify_rejects_collisions_and_non_edges():
    H = make_path(4)
    plan = plan_partition(H, VertexTwoColouring.alternating(4), SINGLE, 2, Fraction(1, 4), Fraction(1))
    c = HostColouring(3, 3, 2, np.array([[1, 1, 2], [1, 1, 1], [1, 1, 1]]))
    G = ClassedHost(c, 1, {"X1": (0, 1, 2), "Y1": (3, 4, 5)})
    assert verify_embedding(EmbeddingResult({0: 0, 1: 3, 2: 1, 3: 4}, True), H, G, plan)
    assert not verify_embedding(EmbeddingResult({0: 0, 1: 3, 2: 0, 3: 4}, True), H, G, plan)
    assert not verify_embedding(EmbeddingResult({0: 0, 1: 5, 2: 1, 3: 4}, True), H, G, plan)
    assert not verify_embedding(EmbeddingResult({0: 3, 1: 0, 2: 4, 3: 1}, True), H, G, plan)
    assert not verify_embedding(EmbeddingResult({0: 0, 1: 3, 2: 1, 3: 4}, False), H, G, plan)


def test_embedding_dump():
    res = EmbeddingResult({0: 2, 1: 5}, True, 3, 0, 1)
    assert write_embedding(res) == "embedding success nodes=3 backtracks=0 attempts=1\nmap 1 3\nmap 2 6\n"


def test_pipeline_all_one():
    c = monochromatic(24, 24, 1, 1)
    rep = pipeline_demo(c, make_path(16), PipelineParams(seed=3))
    assert rep.success and rep.failed_stage is None
    assert [name for name, _, _ in rep.stages] == ["shape", "slice", "plan", "compat", "embed", "verify"]
    assert all(ln.startswith("stage ") for ln in rep.lines())
    # the chain of concrete bounds is recorded on the compatibility report
    assert set(rep.compat.chain) == {"U_small", "U_prime_from_partner", "U_prime_small"}


def test_pipeline_deterministic():
    c = monochromatic(24, 24, 1, 1)
    a = pipeline_demo(c, make_path(16), PipelineParams(seed=9))
    b = pipeline_demo(c, make_path(16), PipelineParams(seed=9))
    assert a.lines() == b.lines() and a.embedding.mapping == b.embedding.mapping


def test_pipeline_fails_on_extremal_host():
    rep = pipeline_demo(extremal_three_split(8), make_even_cycle(8), PipelineParams(k=3))
    assert not rep.success and rep.failed_stage is not None


def test_pipeline_random_host_reports():
    rep = pipeline_demo(random_colouring(30, 3, 5), make_grid(2, 6), PipelineParams())
    assert rep.stages
    if not rep.success:
        assert rep.lines()[-1].split()[2] == "fail"


def test_pipeline_seed_sweep_small():
    c = monochromatic(24, 24, 1, 1)
    assert run_pipeline_seeds(c, make_path(16), PipelineParams(), range(10)) == 10
