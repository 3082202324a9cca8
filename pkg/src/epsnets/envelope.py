"""Upper-envelope diagnostics for trace families.

Checks the counting arguments behind the family-size bound: every member's
bounding plane appears on the upper envelope (for beta < 1/3), envelope
face degrees obey the planar Euler bound, low-degree faces own large
pockets, envelope peeling exhausts a family in one layer, and random
insertion orders produce pairwise disjoint pockets at birth.

Member planes are re-fit through their contact points and perturbed by a
scaled rational tilt that provably preserves every trace (the tilt stays
below the smallest nonzero point/plane margin), then retried with fresh
random tilt magnitudes until the perturbed planes are mutually generic.
Envelope face/edge combinatorics come from the exact 3D hull of the planes'
coefficient points; membership is independently decided by Fourier-Motzkin
feasibility of each plane's strict dominance region, and the two must agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import _core
from .builder import Family
from .errors import DegeneracyError
from .hull3d import convex_hull_3d, upper_hull_info
from .linfeas import strictly_feasible
from .ranges import RangeTrace

GraphPlane = tuple[Fraction, Fraction, Fraction]  # z = a*x + b*y + g


@dataclass(frozen=True)
class EnvelopeStructure:
    planes: tuple[GraphPlane, ...]
    on_envelope: tuple[bool, ...]
    degrees: tuple[Optional[int], ...]
    pockets: tuple[tuple[int, ...], ...]
    edges: tuple[tuple[int, int], ...]
    envelope_vertex_count: int

    @property
    def t(self) -> int:
        return len(self.planes)

    def total_degree(self) -> int:
        return sum(d for d in self.degrees if d is not None)


@dataclass(frozen=True)
class PeelingRecord:
    layers: tuple[tuple[int, ...], ...]
    degrees: tuple[int, ...]  # degree of each plane at its peeling stage

    @property
    def layer_sizes(self) -> tuple[int, ...]:
        return tuple(len(l) for l in self.layers)

    def total_degree(self) -> int:
        return sum(self.degrees)

    def average_degree(self) -> float:
        return self.total_degree() / max(1, len(self.degrees))


@dataclass(frozen=True)
class IncrementalRecord:
    permutation: tuple[int, ...]
    degrees_at_birth: tuple[int, ...]
    pocket_sizes_at_birth: tuple[int, ...]

    def total_degree(self) -> int:
        return sum(self.degrees_at_birth)


@dataclass(frozen=True)
class IncrementalStudy:
    records: tuple[IncrementalRecord, ...]
    mean_degree_ratio: float  # mean over runs of sum(degrees at birth)/t


# ---------------------------------------------------------------------------
# Trace-preserving perturbation.
# ---------------------------------------------------------------------------


def _oriented_points(points, side: str) -> np.ndarray:
    pts = _core.as_int_array(points)
    if pts.shape[1] != 3:
        raise ValueError("envelope diagnostics are for 3D families")
    if side == "upper":  # reflect so the family becomes a lower-halfspace family
        pts = pts.copy()
        pts[:, 2] = -pts[:, 2]
    return pts


def _canonical_graph(pts: np.ndarray, trace: RangeTrace) -> tuple[GraphPlane, np.ndarray]:
    ci = np.asarray(trace.contacts, dtype=np.int64)
    base = pts[ci[0]]
    normal = np.cross(pts[ci[1]] - base, pts[ci[2]] - base)
    if normal[2] == 0:
        raise DegeneracyError(f"vertical canonical plane for contacts {trace.contacts}")
    if normal[2] < 0:
        normal = -normal
    nx, ny, nz = (int(v) for v in normal)
    rhs = int(normal @ base)
    # z = a*x + b*y + g from nx*x + ny*y + nz*z = rhs
    return (Fraction(-nx, nz), Fraction(-ny, nz), Fraction(rhs, nz)), ci


def _plane_heights(plane: GraphPlane, pts: np.ndarray) -> list[Fraction]:
    a, b, g = plane
    return [a * int(p[0]) + b * int(p[1]) + g - int(p[2]) for p in pts]


def perturb_member_plane(pts: np.ndarray, trace: RangeTrace, magnitudes: Sequence[int]) -> GraphPlane:
    """Tilt the canonical plane so all separations are strict while leaving
    the trace unchanged; `magnitudes` are positive contact tilt sizes."""
    (a, b, g), ci = _canonical_graph(pts, trace)
    inside = set(trace.indices)
    targets = [Fraction((1 if int(c) in inside else -1) * int(m)) for c, m in zip(ci, magnitudes)]
    # Solve u*x_i + v*y_i + w = target_i at the three contacts (their xy
    # projections are affinely independent because the plane is non-vertical).
    m = [[Fraction(int(pts[c][0])), Fraction(int(pts[c][1])), Fraction(1)] for c in ci]

    def det3(mm) -> Fraction:
        return (
            mm[0][0] * (mm[1][1] * mm[2][2] - mm[1][2] * mm[2][1])
            - mm[0][1] * (mm[1][0] * mm[2][2] - mm[1][2] * mm[2][0])
            + mm[0][2] * (mm[1][0] * mm[2][1] - mm[1][1] * mm[2][0])
        )

    det = det3(m)
    if det == 0:
        raise DegeneracyError("contact projections are collinear")

    def solve3(col: int) -> Fraction:
        mm = [row[:] for row in m]
        for r in range(3):
            mm[r][col] = targets[r]
        return det3(mm) / det

    u, v, w = solve3(0), solve3(1), solve3(2)
    gaps = _plane_heights((a, b, g), pts)
    contacts = set(int(c) for c in ci)
    noncontact = [abs(gp) for i, gp in enumerate(gaps) if i not in contacts]
    if any(gp == 0 for gp in noncontact):
        raise DegeneracyError("a non-contact point lies on the canonical plane")
    delta = min(noncontact) if noncontact else Fraction(1)
    tilts = [u * int(p[0]) + v * int(p[1]) + w for p in pts]
    big = max(abs(t) for t in tilts)
    lam = delta / (2 * big)
    plane = (a + lam * u, b + lam * v, g + lam * w)
    for i, gp in enumerate(_plane_heights(plane, pts)):
        want_inside = i in inside
        if gp == 0 or (gp > 0) != want_inside:
            raise AssertionError("perturbation changed the trace")
    return plane


def perturbed_family_planes(points, family: Family, seed: int, *, retries: int = 32) -> tuple[np.ndarray, tuple[GraphPlane, ...]]:
    """Perturbed, mutually generic planes for all members (and the point
    array they refer to, reflected for upper-side families)."""
    pts = _oriented_points(points, family.side)
    rng = np.random.default_rng([seed, 0xE27])
    for _ in range(retries):
        planes = []
        for trace in family.members:
            mags = rng.integers(1, 1 << 20, size=3)
            planes.append(perturb_member_plane(pts, trace, [int(x) for x in mags]))
        if _mutually_generic(planes):
            return pts, tuple(planes)
    raise DegeneracyError("could not reach mutually generic perturbed planes")


def _mutually_generic(planes: Sequence[GraphPlane]) -> bool:
    # Dual coefficient points must be distinct with generic xy projections;
    # deeper degeneracies (collinear/coplanar quadruples) surface as
    # DegeneracyError in the hull and trigger a retry there.
    if len(set(planes)) != len(planes):
        return False
    xy = [(p[0], p[1]) for p in planes]
    if len(set(xy)) != len(xy):
        return False
    for i in range(len(xy)):
        for j in range(i + 1, len(xy)):
            for k in range(j + 1, len(xy)):
                ax, ay = xy[j][0] - xy[i][0], xy[j][1] - xy[i][1]
                bx, by = xy[k][0] - xy[i][0], xy[k][1] - xy[i][1]
                if ax * by - ay * bx == 0:
                    return False
    return True


# ---------------------------------------------------------------------------
# Membership and edges (plane-space, no hull needed).
# ---------------------------------------------------------------------------


def envelope_membership(planes: Sequence[GraphPlane]) -> list[bool]:
    """Plane i is on the upper envelope iff some point lies strictly above
    all other planes; decided exactly by strict feasibility of the
    dominance system.  Complete for all inputs, including parallel and
    otherwise degenerate raw plane lists."""
    out = []
    for i, (ai, bi, gi) in enumerate(planes):
        rows = [
            (ai - aj, bi - bj, gi - gj)
            for j, (aj, bj, gj) in enumerate(planes)
            if j != i
        ]
        out.append(strictly_feasible(rows, 2))
    return out


def envelope_edge_exists(planes: Sequence[GraphPlane], i: int, j: int) -> bool:
    """Is there a 1-dimensional set where planes i and j tie as the strict
    maximum?  (Faces are convex, so this is exactly "the faces of i and j
    share an envelope edge".)"""
    ai, bi, gi = planes[i]
    aj, bj, gj = planes[j]
    a, b, c = ai - aj, bi - bj, gi - gj
    if a == 0 and b == 0:
        return False  # parallel or identical planes never tie on a line
    rows = []
    for k, (ak, bk, gk) in enumerate(planes):
        if k in (i, j):
            continue
        da, db, dc = ai - ak, bi - bk, gi - gk
        if b != 0:
            # On the tie line y = (-c - a x) / b; substitute and clear b.
            # sign care: multiply the constraint by |b| to keep direction.
            coeff_x = da * b - db * a
            const = dc * b - db * c
            if b < 0:
                coeff_x, const = -coeff_x, -const
        else:
            # x = -c/a fixed; parameterize by y and clear a.
            coeff_x = db * a
            const = dc * a - da * c
            if a < 0:
                coeff_x, const = -coeff_x, -const
        rows.append((coeff_x, const))
    return strictly_feasible(rows, 1)


# ---------------------------------------------------------------------------
# Static structure: degrees and pockets.
# ---------------------------------------------------------------------------


def _pockets(family: Family) -> tuple[tuple[int, ...], ...]:
    sets = [t.index_set() for t in family.members]
    out = []
    for i, s in enumerate(sets):
        rest: set[int] = set()
        for j, o in enumerate(sets):
            if j != i:
                rest |= o
        out.append(tuple(sorted(s - rest)))
    return tuple(out)


def _degrees_from_edges(t: int, on: Sequence[bool], edges: set[frozenset[int]]) -> list[Optional[int]]:
    degs: list[Optional[int]] = [None] * t
    for i in range(t):
        if on[i]:
            degs[i] = sum(1 for e in edges if i in e)
    return degs


def face_degrees_and_pockets(points, family: Family, seed: int = 0) -> EnvelopeStructure:
    """Exact envelope combinatorics of the (perturbed) member planes plus
    per-member pockets computed from the traces."""
    if len(family.members) == 0:
        raise ValueError("family must have at least one member")
    last_err: Optional[Exception] = None
    for attempt in range(8):
        pts, planes = perturbed_family_planes(points, family, seed + 1000003 * attempt)
        try:
            return _structure_from_planes(planes, family)
        except DegeneracyError as e:  # hull met a coplanarity; re-perturb
            last_err = e
    raise DegeneracyError(f"envelope structure failed after retries: {last_err}")


def _structure_from_planes(planes: tuple[GraphPlane, ...], family: Family) -> EnvelopeStructure:
    t = len(planes)
    on_fm = envelope_membership(planes)
    if t >= 4:
        hull = convex_hull_3d(planes)
        up_verts, up_edges, vcount = upper_hull_info(hull)
        on_hull = [i in up_verts for i in range(t)]
        if on_hull != on_fm:
            raise AssertionError("hull and feasibility disagree on envelope membership")
        edges = {tuple(sorted(e)) for e in up_edges}
    else:
        vcount = 0
        edges = set()
        for i in range(t):
            for j in range(i + 1, t):
                if on_fm[i] and on_fm[j] and envelope_edge_exists(planes, i, j):
                    edges.add((i, j))
        if t == 3 and all(on_fm) and len(edges) == 3:
            vcount = 1
    edge_sets = {frozenset(e) for e in edges}
    degrees = _degrees_from_edges(t, on_fm, edge_sets)
    pockets = _pockets(family)
    for i, s in enumerate(pockets):
        for j in range(i + 1, t):
            if set(s) & set(pockets[j]):
                raise AssertionError("pockets are not pairwise disjoint")
    return EnvelopeStructure(planes, tuple(on_fm), tuple(degrees), pockets, tuple(sorted(edges)), vcount)


# ---------------------------------------------------------------------------
# Peeling (second-proof machinery).
# ---------------------------------------------------------------------------


def peel_planes(planes: Sequence[GraphPlane]) -> PeelingRecord:
    """Repeatedly remove the planes on the current upper envelope; records
    each plane's face degree at the stage it is peeled."""
    t = len(planes)
    remaining = list(range(t))
    layers: list[tuple[int, ...]] = []
    degrees = [0] * t
    while remaining:
        local = [planes[i] for i in remaining]
        mem = envelope_membership(local)
        layer = [remaining[k] for k, on in enumerate(mem) if on]
        if not layer:
            raise DegeneracyError("no plane on the envelope; duplicate planes in input")
        for i in layer:
            degrees[i] = sum(
                1
                for j in remaining
                if j != i and envelope_edge_exists(local, remaining.index(i), remaining.index(j))
            )
        layers.append(tuple(layer))
        remaining = [i for i in remaining if i not in layer]
    return PeelingRecord(tuple(layers), tuple(degrees))


def peel_layers(points, family: Family, seed: int = 0) -> PeelingRecord:
    _, planes = perturbed_family_planes(points, family, seed)
    return peel_planes(planes)


# ---------------------------------------------------------------------------
# Randomized incremental insertion (third-proof machinery).
# ---------------------------------------------------------------------------


def incremental_degrees(points, family: Family, seed: int, permutations: int = 20) -> IncrementalStudy:
    """Insert the members in random orders; report each member's pocket and
    face degree at the moment of its insertion, recomputed from scratch on
    the prefix (no incremental data structures)."""
    if len(family.members) == 0:
        raise ValueError("family must have at least one member")
    _, planes = perturbed_family_planes(points, family, seed)
    traces = [t.index_set() for t in family.members]
    t = len(planes)
    rng = np.random.default_rng([seed, 0x1AC5])
    records = []
    for _ in range(permutations):
        order = [int(x) for x in rng.permutation(t)]
        seen: set[int] = set()
        degs: list[int] = []
        pockets: list[int] = []
        for j, mid in enumerate(order):
            pocket = traces[mid] - seen
            pockets.append(len(pocket))
            prefix_ids = order[: j + 1]
            prefix = [planes[i] for i in prefix_ids]
            on = envelope_membership(prefix)[j]
            if on:
                degs.append(sum(1 for i in range(j) if envelope_edge_exists(prefix, j, i)))
            else:
                degs.append(0)
            seen |= traces[mid]
        records.append(IncrementalRecord(tuple(order), tuple(degs), tuple(pockets)))
    mean_ratio = float(np.mean([r.total_degree() / t for r in records])) if records else 0.0
    return IncrementalStudy(tuple(records), mean_ratio)
