"""Exact incremental convex hull of 3D points with rational coordinates.

Small-scale (tens of points) and fully exact: every visibility decision is
an orientation determinant over Fractions.  Inputs must be in general
position (no duplicate points, no 3 collinear, no 4 coplanar); any
coplanarity encountered raises DegeneracyError instead of being resolved.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import DegeneracyError

Coord = tuple[Fraction, Fraction, Fraction]


def _sub(a: Coord, b: Coord) -> Coord:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def _cross(u: Coord, v: Coord) -> Coord:
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


def _dot(u: Coord, v: Coord) -> Fraction:
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def orient3(a: Coord, b: Coord, c: Coord, d: Coord) -> int:
    det = _dot(_cross(_sub(b, a), _sub(c, a)), _sub(d, a))
    return (det > 0) - (det < 0)


@dataclass(frozen=True)
class Hull3D:
    """Facets are index triples oriented so every other hull point lies on
    their negative side; outward normal of (a,b,c) is (b-a) x (c-a)."""

    points: tuple[Coord, ...]
    facets: tuple[tuple[int, int, int], ...]
    vertices: tuple[int, ...]

    def edges(self) -> set[frozenset[int]]:
        out: set[frozenset[int]] = set()
        for a, b, c in self.facets:
            out.add(frozenset((a, b)))
            out.add(frozenset((b, c)))
            out.add(frozenset((c, a)))
        return out

    def facet_normal(self, facet: tuple[int, int, int]) -> Coord:
        a, b, c = (self.points[i] for i in facet)
        return _cross(_sub(b, a), _sub(c, a))


def convex_hull_3d(points: Sequence[Sequence]) -> Hull3D:
    pts: list[Coord] = [tuple(Fraction(x) for x in p) for p in points]  # type: ignore[misc]
    n = len(pts)
    if n < 4:
        raise ValueError("need at least 4 points for a 3D hull")

    # Initial affinely independent quadruple.
    i1 = next((i for i in range(1, n) if pts[i] != pts[0]), None)
    if i1 is None:
        raise DegeneracyError("all points coincide")
    i2 = next(
        (i for i in range(1, n) if i != i1 and _cross(_sub(pts[i1], pts[0]), _sub(pts[i], pts[0])) != (0, 0, 0)),
        None,
    )
    if i2 is None:
        raise DegeneracyError("all points collinear")
    i3 = next((i for i in range(1, n) if i not in (i1, i2) and orient3(pts[0], pts[i1], pts[i2], pts[i]) != 0), None)
    if i3 is None:
        raise DegeneracyError("all points coplanar")

    quad = [0, i1, i2, i3]
    if orient3(*(pts[q] for q in quad)) < 0:
        quad[1], quad[2] = quad[2], quad[1]
    a, b, c, d = quad
    facets: list[tuple[int, int, int]] = [(a, c, b), (a, b, d), (b, c, d), (c, a, d)]
    for f in facets:
        opp = next(q for q in quad if q not in f)
        if orient3(pts[f[0]], pts[f[1]], pts[f[2]], pts[opp]) >= 0:
            raise AssertionError("initial tetrahedron misoriented")

    for p in range(n):
        if p in quad:
            continue
        vis = []
        for f in facets:
            s = orient3(pts[f[0]], pts[f[1]], pts[f[2]], pts[p])
            if s == 0:
                raise DegeneracyError(f"point {p} coplanar with facet {f}")
            vis.append(s > 0)
        if not any(vis):
            continue  # interior point
        hidden_dir = set()
        for f, v in zip(facets, vis):
            if not v:
                hidden_dir.update(((f[0], f[1]), (f[1], f[2]), (f[2], f[0])))
        new_facets = [f for f, v in zip(facets, vis) if not v]
        for f, v in zip(facets, vis):
            if not v:
                continue
            for u, w in ((f[0], f[1]), (f[1], f[2]), (f[2], f[0])):
                if (w, u) in hidden_dir:  # horizon edge, keep visible-side direction
                    new_facets.append((u, w, p))
        facets = new_facets

    verts = tuple(sorted({i for f in facets for i in f}))
    return Hull3D(tuple(pts), tuple(facets), verts)


def upper_hull_info(hull: Hull3D) -> tuple[set[int], set[frozenset[int]], int]:
    """Vertices and edges incident to an upward facet, plus the upward
    facet count.  A facet with horizontal outward normal means the input
    was not generic enough; callers re-perturb on DegeneracyError."""
    upper_vertices: set[int] = set()
    upper_edges: set[frozenset[int]] = set()
    count = 0
    for f in hull.facets:
        nz = hull.facet_normal(f)[2]
        if nz == 0:
            raise DegeneracyError(f"facet {f} has horizontal normal")
        if nz > 0:
            count += 1
            upper_vertices.update(f)
            upper_edges.update((frozenset((f[0], f[1])), frozenset((f[1], f[2])), frozenset((f[2], f[0]))))
    return upper_vertices, upper_edges, count
