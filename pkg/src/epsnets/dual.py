"""Dual-arrangement diagnostics: levels, crossing distances, shallow
vertices, and ball packing around family members.

Points dualize to the planes z = a*x + b*y + c (coefficient rows kept as
int64 arrays); a family member's perturbed bounding plane dualizes to a
rational point lying on no dual plane.  Vertex coordinates are Cramer
ratios over the defining plane triple; all side tests reduce to integer
signs of a_l*X + b_l*Y + c_l*D - Z times sign(D).  When the coefficient
magnitude allows it (the generator's default boxes do), everything runs
vectorized in int64; otherwise the same formulas run on Python integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import _core
from .builder import Family
from .envelope import GraphPlane, perturbed_family_planes
from .errors import DegeneracyError

# 48 * A^3 bounds |a*X + b*Y + c*D - Z|; keep it inside int64.
_INT64_COEFF_LIMIT = 570_000
_CHUNK = 1 << 16


def dual_plane_rows(points) -> np.ndarray:
    """Dual planes of a 3D point set, one (a, b, c) row per point meaning
    z = a*x + b*y + c."""
    pts = _core.as_int_array(points)
    if pts.shape[1] != 3:
        raise ValueError("duality diagnostics are for 3D point sets")
    rows = pts.copy()
    return rows


def dual_point_of_graph_plane(plane: GraphPlane) -> tuple[Fraction, Fraction, Fraction]:
    a, b, g = plane
    return (-Fraction(a), -Fraction(b), Fraction(g))


def point_sign_vector(q: Sequence[Fraction], planes: np.ndarray) -> np.ndarray:
    """sign(plane_l(q_x, q_y) - q_z) per plane: -1 when the plane passes
    strictly below q.  Exact (rational arithmetic)."""
    qx, qy, qz = (Fraction(v) for v in q)
    out = np.zeros(len(planes), dtype=np.int8)
    for l, (a, b, c) in enumerate(planes):
        g = int(a) * qx + int(b) * qy + int(c) - qz
        out[l] = -1 if g < 0 else (1 if g > 0 else 0)
    return out


def level_of_point(q: Sequence[Fraction], planes: np.ndarray) -> int:
    """Number of planes passing strictly below q; q may not lie on a plane."""
    s = point_sign_vector(q, planes)
    if (s == 0).any():
        raise DegeneracyError("query point lies on a dual plane")
    return int((s == -1).sum())


def crossing_distance(u: Sequence[Fraction], v: Sequence[Fraction], planes: np.ndarray) -> int:
    """Number of planes separating u and v (a metric on arrangement cells)."""
    su = point_sign_vector(u, planes)
    sv = point_sign_vector(v, planes)
    if (su == 0).any() or (sv == 0).any():
        raise DegeneracyError("query point lies on a dual plane")
    return int((su * sv == -1).sum())


@dataclass
class VertexArrangement:
    """All plane-triple vertices of a dual arrangement with exact levels
    and per-plane side signs (0 exactly on the 3 defining planes)."""

    planes: np.ndarray  # (n, 3) int64
    triples: np.ndarray  # (V, 3) int32
    num_x: np.ndarray  # Cramer numerators and determinant, int64 or object
    num_y: np.ndarray
    num_z: np.ndarray
    den: np.ndarray
    signs: np.ndarray  # (V, n) int8
    levels: np.ndarray  # (V,) int64

    def __len__(self) -> int:
        return len(self.triples)

    def vertex_coords(self, i: int) -> tuple[Fraction, Fraction, Fraction]:
        d = int(self.den[i])
        return (
            Fraction(int(self.num_x[i]), d),
            Fraction(int(self.num_y[i]), d),
            Fraction(int(self.num_z[i]), d),
        )

    def select(self, keep: np.ndarray) -> "VertexArrangement":
        return VertexArrangement(
            self.planes,
            self.triples[keep],
            self.num_x[keep],
            self.num_y[keep],
            self.num_z[keep],
            self.den[keep],
            self.signs[keep],
            self.levels[keep],
        )


def build_arrangement(planes: np.ndarray) -> VertexArrangement:
    """Enumerate all C(n,3) vertices by brute force with exact levels.

    Raises DegeneracyError for triples without a unique vertex (parallel
    intersection lines) or for a fourth plane through a vertex.
    """
    planes = np.asarray(planes, dtype=np.int64)
    n = len(planes)
    if n < 3:
        raise ValueError("need at least 3 planes")
    a, b, c = planes[:, 0], planes[:, 1], planes[:, 2]
    use_object = int(np.abs(planes).max()) > _INT64_COEFF_LIMIT
    if use_object:
        a, b, c = a.astype(object), b.astype(object), c.astype(object)
    triples = _core.index_tuples(n, 3)
    xs, ys, zs, ds, sgn_chunks, lvl_chunks = [], [], [], [], [], []
    for start in range(0, len(triples), _CHUNK):
        tup = triples[start : start + _CHUNK]
        i, j, k = tup[:, 0], tup[:, 1], tup[:, 2]
        a1, b1, c1 = a[i], b[i], c[i]
        a2, b2, c2 = a[j], b[j], c[j]
        a3, b3, c3 = a[k], b[k], c[k]
        # Subtracting plane i's equation z = a*x + b*y + c from the other
        # two eliminates z; 2x2 Cramer then gives x, y and back-substitution z.
        den = (a2 - a1) * (b3 - b1) - (b2 - b1) * (a3 - a1)
        if (den == 0).any():
            r = int(np.nonzero(den == 0)[0][0])
            raise DegeneracyError(f"plane triple {tuple(int(t) for t in tup[r])} has no unique vertex")
        nx = (c1 - c2) * (b3 - b1) - (b2 - b1) * (c1 - c3)
        ny = (a2 - a1) * (c1 - c3) - (c1 - c2) * (a3 - a1)
        nz = a1 * nx + b1 * ny + c1 * den
        # den>0 normalization keeps sign logic branch-free.
        flip = den < 0
        den = np.where(flip, -den, den)
        nx = np.where(flip, -nx, nx)
        ny = np.where(flip, -ny, ny)
        nz = np.where(flip, -nz, nz)
        e = nx[:, None] * a[None, :] + ny[:, None] * b[None, :] + den[:, None] * c[None, :] - nz[:, None]
        if use_object:
            s = np.zeros(e.shape, dtype=np.int8)
            s[e.astype(object) > 0] = 1
            s[e.astype(object) < 0] = -1
        else:
            s = np.sign(e).astype(np.int8)
        nzeros = (s == 0).sum(axis=1)
        if (nzeros != 3).any():
            r = int(np.nonzero(nzeros != 3)[0][0])
            raise DegeneracyError(f"extra plane through vertex of triple {tuple(int(t) for t in tup[r])}")
        xs.append(nx)
        ys.append(ny)
        zs.append(nz)
        ds.append(den)
        sgn_chunks.append(s)
        lvl_chunks.append((s == -1).sum(axis=1).astype(np.int64))
    return VertexArrangement(
        planes,
        triples,
        np.concatenate(xs),
        np.concatenate(ys),
        np.concatenate(zs),
        np.concatenate(ds),
        np.concatenate(sgn_chunks),
        np.concatenate(lvl_chunks),
    )


def shallow_vertices(planes: np.ndarray, level_cap: int) -> VertexArrangement:
    """All arrangement vertices at level <= level_cap."""
    arr = build_arrangement(planes)
    return arr.select(arr.levels <= level_cap)


def vertex_distances_to_point(arr: VertexArrangement, sign_vec: np.ndarray) -> np.ndarray:
    """Crossing distances from every vertex to a point with the given
    (zero-free) sign vector: planes with strictly opposite sides."""
    if (sign_vec == 0).any():
        raise DegeneracyError("reference point lies on a dual plane")
    n = arr.signs.shape[1]
    out = np.empty(len(arr), dtype=np.int64)
    sv = sign_vec.astype(np.int32)
    for start in range(0, len(arr), _CHUNK):
        block = arr.signs[start : start + _CHUNK].astype(np.int32)
        dot = block @ sv
        out[start : start + _CHUNK] = (n - 3 - dot) // 2
    return out


def vertex_to_vertex_distance(arr: VertexArrangement, i: int, j: int) -> int:
    si = arr.signs[i].astype(np.int32)
    sj = arr.signs[j].astype(np.int32)
    return int(((si * sj) == -1).sum())


@dataclass(frozen=True)
class BallReport:
    radius: Fraction
    ball_sizes: tuple[int, ...]
    disjoint: bool
    level_bounds_ok: bool
    sum_sizes: int
    shallow_count: int  # vertices at level <= 3k
    min_size_over_r3: float
    count_over_nk2: float


def balls_around_members(
    arr: VertexArrangement,
    member_signs: Sequence[np.ndarray],
    member_levels: Sequence[int],
    r: Fraction,
    k: int,
) -> BallReport:
    """B_h = vertices separated from h* by fewer than r planes; checks
    disjointness and the level sandwich [k - r, 2k + r] directly."""
    r = Fraction(r)
    thresh = math.ceil(r) - 1  # integer d < r  <=>  d <= ceil(r)-1
    owners = np.zeros(len(arr), dtype=np.int32)
    sizes = []
    level_ok = True
    lo_bound = k - r
    hi_bound = 2 * k + r
    for s, lvl in zip(member_signs, member_levels):
        d = vertex_distances_to_point(arr, s)
        inside = d <= thresh
        sizes.append(int(inside.sum()))
        owners += inside.astype(np.int32)
        if inside.any():
            levels = arr.levels[inside]
            if not (int(levels.min()) >= lo_bound and int(levels.max()) <= hi_bound):
                level_ok = False
    disjoint = bool((owners <= 1).all())
    n = arr.signs.shape[1]
    shallow = int((arr.levels <= 3 * k).sum())
    r3 = float(r) ** 3 if r > 0 else 1.0
    nk2 = n * k * k if k else 1
    return BallReport(
        r,
        tuple(sizes),
        disjoint,
        level_ok,
        int(sum(sizes)),
        shallow,
        (min(sizes) / r3) if sizes else 0.0,
        shallow / nk2,
    )


@dataclass(frozen=True)
class DualArrangementStats:
    k: int
    member_levels: tuple[int, ...]
    min_pairwise_distance: Optional[int]
    separation_bound: Fraction  # 2*(1-beta)*k
    triangle_inequality_ok: bool
    balls: Optional[BallReport]


def family_dual_stats(
    points,
    family: Family,
    beta,
    seed: int = 0,
    *,
    with_balls: bool = True,
) -> DualArrangementStats:
    """Fourth-proof accounting for one family: member levels in [k, 2k],
    pairwise crossing distances >= 2(1-beta)k, and the ball packing.

    Upper-side families are reflected to lower form first (z -> -z maps
    upper halfspaces to lower ones without touching trace index sets).
    """
    beta = Fraction(beta)
    pts, planes_graph = perturbed_family_planes(points, family, seed)
    planes = dual_plane_rows(pts)
    n = len(planes)
    k = math.ceil(family.scale * n)
    members = [dual_point_of_graph_plane(p) for p in planes_graph]
    msigns = [point_sign_vector(q, planes) for q in members]
    for trace, s in zip(family.members, msigns):
        if (s == 0).any():
            raise DegeneracyError("member dual point lies on a dual plane")
        lvl = int((s == -1).sum())
        if lvl != trace.size:
            raise AssertionError(f"dual level {lvl} != primal depth {trace.size}")
    levels = tuple(t.size for t in family.members)
    t = len(members)
    min_d: Optional[int] = None
    tri_ok = True
    dmat = np.zeros((t, t), dtype=np.int64)
    for i in range(t):
        for j in range(i + 1, t):
            d = int(((msigns[i].astype(np.int32) * msigns[j].astype(np.int32)) == -1).sum())
            dmat[i, j] = dmat[j, i] = d
            min_d = d if min_d is None else min(min_d, d)
    for i in range(t):
        for j in range(t):
            for l in range(t):
                if dmat[i, l] > dmat[i, j] + dmat[j, l]:
                    tri_ok = False
    balls = None
    if with_balls:
        arr = build_arrangement(planes)
        r = (1 - beta) * k
        balls = balls_around_members(arr, msigns, list(levels), r, k)
    return DualArrangementStats(k, levels, min_d, 2 * (1 - beta) * k, tri_ok, balls)
