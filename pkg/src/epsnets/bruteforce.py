"""Independent brute-force oracles for halfspace traces.

These are deliberately built on different principles than the canonical
enumerator so they can serve as ground truth:

* 2D: an exact angular sweep over all separating directions.  Between two
  consecutive critical directions (normals of point differences) the order
  of the points along the direction is fixed and strict, and every closed
  halfplane trace is a prefix of one of those orders.
* 3D (small n): subset realizability decided by strict Fourier-Motzkin
  feasibility of the separating-plane system, one subset at a time.
* Random halfspace sampling at any scale, for completeness spot checks.
"""

from __future__ import annotations

import itertools
from functools import cmp_to_key
from math import gcd
from typing import Iterable, Optional

import numpy as np

from . import _core
from .errors import DegeneracyError
from .linfeas import strictly_feasible


def _primitive(v: tuple[int, int]) -> tuple[int, int]:
    g = gcd(abs(v[0]), abs(v[1]))
    return (v[0] // g, v[1] // g)


def _angle_cmp(a: tuple[int, int], b: tuple[int, int]) -> int:
    def half(v):  # 0 for angle in [0, pi), 1 for [pi, 2pi)
        return 0 if (v[1] > 0 or (v[1] == 0 and v[0] > 0)) else 1

    ha, hb = half(a), half(b)
    if ha != hb:
        return -1 if ha < hb else 1
    cross = a[0] * b[1] - a[1] * b[0]
    if cross > 0:
        return -1
    if cross < 0:
        return 1
    return 0


def sweep_halfplane_traces(
    points,
    side: Optional[str] = None,
    lo: int = 0,
    hi: Optional[int] = None,
) -> set[frozenset[int]]:
    """Every closed-halfplane trace on a 2D point set, as index sets.

    side="lower"/"upper" keeps only traces realizable by a halfplane bounded
    by a non-vertical line from below/above; None keeps everything.
    """
    pts = _core.as_int_array(points)
    if pts.shape[1] != 2:
        raise ValueError("sweep oracle is for 2D point sets")
    n = pts.shape[0]
    hi = n if hi is None else hi
    out: set[frozenset[int]] = set()

    def put(mask_indices: Iterable[int]) -> None:
        s = frozenset(int(i) for i in mask_indices)
        if lo <= len(s) <= hi:
            out.add(s)

    if n <= 2:
        for r in range(n + 1):
            for combo in itertools.combinations(range(n), r):
                put(combo)
        return out

    dirs: set[tuple[int, int]] = set()
    for i, j in itertools.combinations(range(n), 2):
        dx, dy = int(pts[j, 0] - pts[i, 0]), int(pts[j, 1] - pts[i, 1])
        if dx == 0 and dy == 0:
            raise DegeneracyError(f"duplicate points {i}, {j}")
        v = _primitive((-dy, dx))
        dirs.add(v)
        dirs.add((-v[0], -v[1]))
    ordered = sorted(dirs, key=cmp_to_key(_angle_cmp))
    m = len(ordered)
    for t in range(m):
        a = ordered[t]
        b = ordered[(t + 1) % m]
        mid = (a[0] + b[0], a[1] + b[1])
        if mid == (0, 0):
            raise DegeneracyError("antipodal critical directions with empty sector")
        if side == "lower" and not (a[1] > 0 or b[1] > 0):
            continue
        if side == "upper" and not (a[1] < 0 or b[1] < 0):
            continue
        keys = pts @ np.array(mid, dtype=np.int64)
        order = np.argsort(keys, kind="stable")
        ks = keys[order]
        if np.any(ks[1:] == ks[:-1]):
            raise DegeneracyError("tie inside an open sector; points are degenerate")
        put(())
        acc: list[int] = []
        for idx in order:
            acc.append(int(idx))
            put(acc)
    return out


def lower_trace_sets_bruteforce(points, lo: int = 0, hi: Optional[int] = None, side: str = "lower") -> set[frozenset[int]]:
    """All realizable traces of one side on a small 3D point set, by strict
    feasibility of the separating-plane system for each subset (O(2^n))."""
    pts = _core.as_int_array(points)
    if pts.shape[1] != 3:
        raise ValueError("subset-feasibility oracle is for 3D point sets")
    n = pts.shape[0]
    if n > 16:
        raise ValueError("subset oracle is exponential; use n <= 16")
    hi = n if hi is None else hi
    sign = 1 if side == "lower" else -1
    out: set[frozenset[int]] = set()
    coords = [tuple(int(c) for c in p) for p in pts]
    for mask in range(1 << n):
        size = bin(mask).count("1")
        if not (lo <= size <= hi):
            continue
        rows = []
        for i, (x, y, z) in enumerate(coords):
            s = sign if (mask >> i) & 1 else -sign
            rows.append((s * x, s * y, s, s * -z))
        if strictly_feasible(rows, 3):
            out.add(frozenset(i for i in range(n) if (mask >> i) & 1))
    return out


def random_halfspace_traces(points, count: int, seed: int, coeff_range: int = 1000) -> list[frozenset[int]]:
    """Traces of `count` random closed halfspaces with small integer normals,
    anchored near the point set so all trace sizes occur."""
    pts = _core.as_int_array(points)
    n, d = pts.shape
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        normal = rng.integers(-coeff_range, coeff_range + 1, size=d)
        if not normal.any():
            continue
        anchor = pts[int(rng.integers(n))]
        rhs = int(normal @ anchor) + int(rng.integers(-coeff_range, coeff_range + 1))
        vals = pts @ normal.astype(np.int64)
        if int(rng.integers(2)):
            out.append(frozenset(np.nonzero(vals <= rhs)[0].tolist()))
        else:
            out.append(frozenset(np.nonzero(vals >= rhs)[0].tolist()))
    return out
