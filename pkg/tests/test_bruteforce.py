import itertools

import numpy as np
import pytest

from epsnets.bruteforce import (
    lower_trace_sets_bruteforce,
    sweep_halfplane_traces,
)
from epsnets.linfeas import open_interval, strictly_feasible


def test_strict_feasibility_basics():
    # Open triangle x > 0, y > 0, x + y < 1.
    assert strictly_feasible([(1, 0, 0), (0, 1, 0), (-1, -1, 1)], 2)
    # x > 0 and x < 0 is empty.
    assert not strictly_feasible([(1, 0), (-1, 0)], 1)
    # Degenerate constraint 0*x + 0 > 0 is infeasible, 0*x + 1 > 0 vacuous.
    assert not strictly_feasible([(0, 0)], 1)
    assert strictly_feasible([(0, 1)], 1)
    # Unbounded strip.
    assert strictly_feasible([(1, 0, 5)], 2)
    assert strictly_feasible([], 3)


def test_open_interval():
    assert open_interval([(1, 0), (-1, 1)]) is not None  # 0 < t < 1
    assert open_interval([(1, 0), (-1, 0)]) is None  # 0 < t < 0
    lo, hi = open_interval([(2, -3)])  # t > 3/2
    assert lo is not None and hi is None


def test_sweep_tiny_sets():
    one = sweep_halfplane_traces(np.array([[3, 4]]))
    assert one == {frozenset(), frozenset({0})}
    two = sweep_halfplane_traces(np.array([[0, 0], [5, 3]]))
    assert two == {frozenset(), frozenset({0}), frozenset({1}), frozenset({0, 1})}


def test_sweep_generic_quadrilateral():
    pts = np.array([[0, 0], [10, 1], [11, 9], [1, 8]])
    traces = sweep_halfplane_traces(pts)
    # Empty set, each vertex, each hull edge pair, each triple (complement
    # of a vertex), and the full set: 14 traces.
    sizes = sorted(len(t) for t in traces)
    assert sizes == [0, 1, 1, 1, 1, 2, 2, 2, 2, 3, 3, 3, 3, 4]


def test_sweep_agrees_with_subset_feasibility():
    # Two independent 2D oracles: angular sweep vs per-subset strict
    # feasibility of the separating-line system.
    rng = np.random.default_rng(31)
    pts = rng.integers(0, 1000, size=(8, 2))
    from epsnets.geometry import validate_general_position

    if not validate_general_position(pts).ok:
        pytest.skip("degenerate draw")
    swept = sweep_halfplane_traces(pts, side="lower")
    coords = [tuple(int(c) for c in p) for p in pts]
    by_feasibility = set()
    n = len(coords)
    for mask in range(1 << n):
        rows = []
        for i, (x, y) in enumerate(coords):
            s = 1 if (mask >> i) & 1 else -1
            rows.append((s * x, s, s * -y))
        if strictly_feasible(rows, 2):
            by_feasibility.add(frozenset(i for i in range(n) if (mask >> i) & 1))
    assert swept == by_feasibility


def test_3d_subset_oracle_respects_window():
    pts = np.random.default_rng(12).integers(0, 500, size=(7, 3))
    full = lower_trace_sets_bruteforce(pts)
    windowed = lower_trace_sets_bruteforce(pts, lo=2, hi=3)
    assert windowed == {s for s in full if 2 <= len(s) <= 3}


def test_3d_subset_oracle_upper_is_reflection():
    pts = np.random.default_rng(13).integers(0, 500, size=(7, 3))
    upper = lower_trace_sets_bruteforce(pts, side="upper")
    reflected = pts.copy()
    reflected[:, 2] = -reflected[:, 2]
    lower_of_reflection = lower_trace_sets_bruteforce(reflected)
    assert upper == lower_of_reflection
