import math
from fractions import Fraction as F

import numpy as np
import pytest

from epsnets.bruteforce import (
    lower_trace_sets_bruteforce,
    random_halfspace_traces,
    sweep_halfplane_traces,
)
from epsnets.errors import DegeneracyError
from epsnets.geometry import Halfspace, Hyperplane
from epsnets.ranges import (
    RangeTrace,
    TraceEnumerator,
    canonical_halfspace,
    depth,
    enumerate_canonical_traces,
    subnet_oracle,
    verify_net,
)

TRIANGLE = np.array([[0, 0], [4, 1], [1, 5]])
CONVEX4 = np.array([[0, 0], [10, 1], [11, 9], [1, 8]])


def trace_sets(traces):
    return {t.index_set() for t in traces}


def test_depth_examples():
    pts = np.array([[0, 0], [4, 1], [1, 5], [5, 6], [8, 3]])
    h = Halfspace(Hyperplane((0, 1), 2), "lower")  # y <= 2
    assert depth(h, pts) == 2
    whole = Halfspace(Hyperplane((0, 1), 10**9), "lower")
    assert depth(whole, pts) == len(pts)


def test_depth_against_pointwise_oracle():
    rng = np.random.default_rng(7)
    pts = rng.integers(0, 1000, size=(25, 3))
    for _ in range(200):
        normal = tuple(int(v) for v in rng.integers(-30, 31, size=3))
        if all(v == 0 for v in normal):
            continue
        rhs = int(rng.integers(-2000, 2001))
        side = "lower" if rng.integers(2) else "upper"
        h = Halfspace(Hyperplane(normal, rhs), side)
        by_sum = sum(h.contains(tuple(int(c) for c in p)) for p in pts)
        assert depth(h, pts) == by_sum


def test_triangle_window_matches_sweep():
    traces = enumerate_canonical_traces(TRIANGLE, lo=1, hi=3)
    assert len(traces) == 7  # every nonempty subset of a triangle is a trace
    assert trace_sets(traces) == sweep_halfplane_traces(TRIANGLE, lo=1, hi=3)


def test_full_window_single_trace():
    traces = enumerate_canonical_traces(CONVEX4, lo=4, hi=4)
    assert len(traces) == 1 and traces[0].indices == (0, 1, 2, 3)


def test_convex4_pairs_are_edges():
    traces = enumerate_canonical_traces(CONVEX4, lo=2, hi=2)
    assert trace_sets(traces) == {
        frozenset({0, 1}),
        frozenset({1, 2}),
        frozenset({2, 3}),
        frozenset({0, 3}),
    }
    assert trace_sets(traces) == sweep_halfplane_traces(CONVEX4, lo=2, hi=2)


@pytest.mark.parametrize("seed", range(8))
def test_2d_completeness_against_sweep(seed):
    rng = np.random.default_rng([seed, 77])
    n = int(rng.integers(5, 25))
    from epsnets.instances import generate

    pts = generate("cube_uniform", n, seed + 500, dim=2, box=10**4).points
    assert trace_sets(enumerate_canonical_traces(pts)) == sweep_halfplane_traces(pts)


@pytest.mark.parametrize("side", ["lower", "upper"])
def test_2d_sided_completeness(side):
    pts = np.array([[0, 0], [13, 2], [7, 19], [2, 11], [19, 9], [11, 7]])
    assert trace_sets(enumerate_canonical_traces(pts, side=side)) == sweep_halfplane_traces(pts, side=side)


def test_3d_completeness_small_bruteforce():
    rng = np.random.default_rng(99)
    pts = rng.integers(0, 1000, size=(10, 3))
    canon = trace_sets(enumerate_canonical_traces(pts, side="lower"))
    assert canon == lower_trace_sets_bruteforce(pts)


def test_3d_completeness_random_halfspaces():
    pts = np.random.default_rng(5).integers(0, 100000, size=(20, 3))
    universe = trace_sets(enumerate_canonical_traces(pts))
    for s in random_halfspace_traces(pts, 2000, seed=8):
        assert s in universe


def test_window_partition_union():
    enum = TraceEnumerator(CONVEX4)
    full = trace_sets(enumerate_canonical_traces(None, enum=enum))
    parts = set()
    for lo, hi in [(0, 1), (2, 2), (3, 4)]:
        part = trace_sets(enumerate_canonical_traces(None, lo=lo, hi=hi, enum=enum))
        assert part <= full  # shrinking the window never adds traces
        parts |= part
    assert parts == full


def test_trace_equality_is_by_indices():
    a = RangeTrace((0, 1), (0, 1), (True, True), "lower")
    b = RangeTrace((0, 1), (2, 3), (False, False), "upper")
    assert a == b and hash(a) == hash(b)


def test_shrinking_property_exhaustive():
    # Every trace of size > m contains a trace of size m, for all m; both
    # dimensions, n <= 12.
    cases = [
        np.random.default_rng(3).integers(0, 500, size=(9, 3)),
        np.random.default_rng(4).integers(0, 500, size=(12, 3)),
        np.random.default_rng(5).integers(0, 500, size=(12, 2)),
    ]
    for pts in cases:
        from epsnets.geometry import validate_general_position

        if not validate_general_position(pts).ok:
            continue
        for side in ("lower", "upper"):
            by_size: dict[int, set[frozenset]] = {}
            for t in enumerate_canonical_traces(pts, side=side):
                by_size.setdefault(t.size, set()).add(t.index_set())
            # One-step shrinks suffice: induction gives every smaller size.
            for s, group in by_size.items():
                if s == 0:
                    continue
                smaller = by_size.get(s - 1, set())
                for g in group:
                    if s == 1:
                        assert frozenset() in by_size.get(0, {frozenset()})
                    else:
                        assert any(x <= g for x in smaller), (s, g)


def test_verify_trivial_and_witness():
    verdict = verify_net(TRIANGLE, [0, 1, 2], F(1, 3))
    assert verdict.valid
    bad = verify_net(TRIANGLE, [], F(1, 2))
    assert not bad.valid
    assert bad.witness.indices == (0, 1, 2)  # maximal net-free trace = everything
    assert bad.witness.size >= bad.heavy_threshold


def test_verify_monotonicity():
    pts = np.random.default_rng(11).integers(0, 100000, size=(18, 3))
    enum = TraceEnumerator(pts)
    net = [0, 3, 7, 9, 12]
    was_valid = {}
    for eps in (F(1, 4), F(1, 3), F(1, 2), F(3, 4)):
        was_valid[eps] = enum.verify(net, eps).valid
    # monotone in eps: valid at eps implies valid at every larger eps
    keys = sorted(was_valid)
    for a, b in zip(keys, keys[1:]):
        if was_valid[a]:
            assert was_valid[b]
    # antitone in the net: adding points never breaks validity
    for eps in keys:
        if was_valid[eps]:
            assert enum.verify(net + [1, 2], eps).valid


def test_verify_rejects_bad_epsilon():
    with pytest.raises(ValueError):
        verify_net(TRIANGLE, [0], F(0))
    with pytest.raises(ValueError):
        verify_net(TRIANGLE, [0], F(3, 2))


def test_degenerate_inputs_raise():
    collinear = np.array([[0, 0], [1, 1], [2, 2], [5, 0]])
    with pytest.raises(DegeneracyError):
        enumerate_canonical_traces(collinear)
    coplanar = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0], [3, 4, 17]])
    with pytest.raises(DegeneracyError):
        enumerate_canonical_traces(coplanar)


def test_subnet_oracle_cases():
    assert [t.indices for t in subnet_oracle(np.array([[3, 4, 5]]), [0], F(1))] == [(0,)]
    so = trace_sets(subnet_oracle(CONVEX4, [0, 1, 2, 3], F(1)))
    expected = trace_sets(enumerate_canonical_traces(CONVEX4, side="lower", lo=2, hi=4))
    assert so == expected
    # 3D seeded subset, thresholds from the definition, against the
    # subset-feasibility oracle.
    pts = np.random.default_rng(99).integers(0, 1000, size=(12, 3))
    thresh = math.ceil(F(1, 8) / 2 * 12)
    assert trace_sets(subnet_oracle(pts, range(12), F(1, 8))) == lower_trace_sets_bruteforce(pts, lo=thresh)


def test_subnet_oracle_on_subset_of_larger_set():
    pts = np.random.default_rng(13).integers(0, 100000, size=(30, 3))
    subset = [2, 4, 5, 9, 11, 14, 17, 20, 23, 28]
    enum = TraceEnumerator(pts)
    via_view = trace_sets(subnet_oracle(pts, subset, F(1, 4), enum=enum))
    direct = trace_sets(subnet_oracle(pts[np.array(subset)], range(10), F(1, 4)))
    mapped = {frozenset(subset[i] for i in s) for s in direct}
    assert via_view == mapped


def test_canonical_halfspace_matches_trace():
    pts = np.random.default_rng(21).integers(0, 100000, size=(15, 3))
    for trace in enumerate_canonical_traces(pts, lo=4, hi=6)[:40]:
        h = canonical_halfspace(pts, trace.contacts, trace.side)
        strict = {
            i
            for i in range(len(pts))
            if i not in trace.contacts
            and h.contains(tuple(int(c) for c in pts[i]))
        }
        got = strict | {c for c, inc in zip(trace.contacts, trace.included) if inc}
        assert got == trace.index_set()
