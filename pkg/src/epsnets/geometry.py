"""Exact geometric primitives: points, hyperplanes, halfspaces, duality.

Every predicate in this module evaluates an integer or rational expression
exactly; there is no floating point anywhere.  Input point sets carry integer
coordinates (the library-wide contract); derived objects such as dual points
may carry rational coordinates, and all arithmetic goes through Fraction.

All values are immutable after construction and safe to share across
parallel workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Sequence, Union

import numpy as np

from .errors import DegeneracyError
from . import _core

Scalar = Union[int, Fraction]
Side = Literal["lower", "upper"]

NEGATIVE = -1
ZERO = 0
POSITIVE = 1


def _f(x: Scalar) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class Point:
    """A point with exact coordinates in dimension 2 or 3."""

    coords: tuple[Scalar, ...]

    def __post_init__(self) -> None:
        if len(self.coords) not in (2, 3):
            raise ValueError(f"dimension must be 2 or 3, got {len(self.coords)}")

    @property
    def dim(self) -> int:
        return len(self.coords)

    def is_integral(self) -> bool:
        return all(isinstance(c, int) or _f(c).denominator == 1 for c in self.coords)


class DualPoint(Point):
    """Image of a lower halfspace under the point/plane duality."""


@dataclass(frozen=True)
class Hyperplane:
    """The hyperplane a1*x1 + ... + ad*xd = c with exact coefficients.

    ``normal`` is (a1, ..., ad); the plane is non-vertical when ad != 0, in
    which case it has the graph form x_d = alpha1*x1 + ... + gamma.
    """

    normal: tuple[Scalar, ...]
    rhs: Scalar

    def __post_init__(self) -> None:
        if len(self.normal) not in (2, 3):
            raise ValueError(f"dimension must be 2 or 3, got {len(self.normal)}")
        if all(_f(a) == 0 for a in self.normal):
            raise ValueError("normal vector must be nonzero")

    @property
    def dim(self) -> int:
        return len(self.normal)

    def is_vertical(self) -> bool:
        return _f(self.normal[-1]) == 0

    def value_gap(self, p: Point | Sequence[Scalar]) -> Fraction:
        """a.p - c; zero iff p lies on the plane."""
        coords = p.coords if isinstance(p, Point) else tuple(p)
        if len(coords) != self.dim:
            raise ValueError("dimension mismatch")
        return sum((_f(a) * _f(x) for a, x in zip(self.normal, coords)), Fraction(0)) - _f(self.rhs)

    def graph_coeffs(self) -> tuple[Fraction, ...]:
        """(alpha_1, ..., alpha_{d-1}, gamma) with x_d = sum(alpha_i x_i) + gamma.

        Raises DegeneracyError for vertical planes, which have no graph form.
        """
        ad = _f(self.normal[-1])
        if ad == 0:
            raise DegeneracyError("vertical hyperplane has no graph form")
        alphas = tuple(-_f(a) / ad for a in self.normal[:-1])
        return alphas + (_f(self.rhs) / ad,)

    @classmethod
    def from_graph(cls, coeffs: Sequence[Scalar]) -> "Hyperplane":
        """Build the plane x_d = alpha_1 x_1 + ... + gamma from its graph coefficients."""
        *alphas, gamma = coeffs
        normal = tuple(-_f(a) for a in alphas) + (Fraction(1),)
        return cls(normal, _f(gamma))

    def oriented(self) -> "Hyperplane":
        """Scale so the last nonzero coefficient of the normal is positive.

        For non-vertical planes this puts a_d > 0, so "lower" means smaller
        x_d; for vertical planes it fixes an arbitrary but deterministic
        sign convention.
        """
        lead = Fraction(0)
        for a in reversed(self.normal):
            if _f(a) != 0:
                lead = _f(a)
                break
        if lead > 0:
            return self
        return Hyperplane(tuple(-_f(a) for a in self.normal), -_f(self.rhs))


class DualPlane(Hyperplane):
    """Image of a point under the point/plane duality."""


@dataclass(frozen=True)
class Halfspace:
    """A closed halfspace: the lower or upper side of a bounding plane.

    The plane is stored in oriented form (see Hyperplane.oriented), so
    side="lower" always means {x : a.x <= c}, which for non-vertical planes
    is the set of points below the plane in the x_d direction.
    """

    plane: Hyperplane
    side: Side

    def __post_init__(self) -> None:
        if self.side not in ("lower", "upper"):
            raise ValueError(f"side must be 'lower' or 'upper', got {self.side!r}")
        object.__setattr__(self, "plane", self.plane.oriented())

    @property
    def dim(self) -> int:
        return self.plane.dim

    def contains(self, p: Point | Sequence[Scalar]) -> bool:
        gap = self.plane.value_gap(p)
        return gap <= 0 if self.side == "lower" else gap >= 0


def orientation(points: Sequence[Point | Sequence[Scalar]]) -> int:
    """Sign of the affine orientation determinant of d+1 points (-1, 0, +1)."""
    coords = [p.coords if isinstance(p, Point) else tuple(p) for p in points]
    d = len(coords[0])
    if any(len(c) != d for c in coords):
        raise ValueError("dimension mismatch among points")
    if len(coords) != d + 1:
        raise ValueError(f"need {d + 1} points in dimension {d}, got {len(coords)}")
    base = coords[0]
    rows = [[_f(x) - _f(b) for x, b in zip(c, base)] for c in coords[1:]]
    if d == 2:
        det = rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    else:
        det = (
            rows[0][0] * (rows[1][1] * rows[2][2] - rows[1][2] * rows[2][1])
            - rows[0][1] * (rows[1][0] * rows[2][2] - rows[1][2] * rows[2][0])
            + rows[0][2] * (rows[1][0] * rows[2][1] - rows[1][1] * rows[2][0])
        )
    return (det > 0) - (det < 0)


def side_of(h: Halfspace, p: Point | Sequence[Scalar]) -> str:
    """Exact classification of p against h: inside_strict / on_boundary / outside."""
    gap = h.plane.value_gap(p)
    if gap == 0:
        return "on_boundary"
    inside = gap < 0 if h.side == "lower" else gap > 0
    return "inside_strict" if inside else "outside"


# ---------------------------------------------------------------------------
# Duality.
#
# Convention (order preserving, matching "p in h iff h* lies above p*"):
#   point p=(a, b, c)       ->  dual plane  x_d = a*x + b*y + c
#   lower halfspace of the
#   plane x_d = A*x + B*y + G -> dual point (-A, -B, G)
# The two maps are mutually inverse, so dualize(dualize(obj)) == obj, with
# the inverse direction dispatched on the DualPoint/DualPlane types.
# In 2D drop one slope coordinate; the algebra is identical.
# ---------------------------------------------------------------------------


def dual_plane_of_point(p: Point) -> DualPlane:
    if not all(isinstance(c, int) or isinstance(c, Fraction) for c in p.coords):
        raise ValueError("point coordinates must be exact")
    *slopes, last = p.coords
    normal = tuple(_f(a) for a in slopes) + (Fraction(-1),)
    return DualPlane(normal, -_f(last))


def point_of_dual_plane(plane: Hyperplane) -> Point:
    return Point(plane.graph_coeffs())


def dual_point_of_halfspace(h: Halfspace) -> DualPoint:
    if h.plane.is_vertical():
        raise DegeneracyError("vertical bounding plane has no dual point")
    if h.side != "lower":
        raise ValueError("dualize is defined for lower halfspaces; reflect first")
    *alphas, gamma = h.plane.graph_coeffs()
    return DualPoint(tuple(-a for a in alphas) + (gamma,))


def halfspace_of_dual_point(q: Point) -> Halfspace:
    *negs, gamma = q.coords
    plane = Hyperplane.from_graph(tuple(-_f(a) for a in negs) + (_f(gamma),))
    return Halfspace(plane, "lower")


def dualize(obj: Point | Halfspace | DualPoint | DualPlane):
    """Apply the duality map; DualPoint/DualPlane inputs map back."""
    if isinstance(obj, DualPlane):
        return point_of_dual_plane(obj)
    if isinstance(obj, DualPoint):
        return halfspace_of_dual_point(obj)
    if isinstance(obj, Point):
        return dual_plane_of_point(obj)
    if isinstance(obj, Halfspace):
        return dual_point_of_halfspace(obj)
    raise TypeError(f"cannot dualize {type(obj).__name__}")


# ---------------------------------------------------------------------------
# General position validation.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GeneralPositionReport:
    ok: bool
    violations: tuple[tuple[str, tuple[int, ...]], ...]
    truncated: bool = False

    def kinds(self) -> set[str]:
        return {kind for kind, _ in self.violations}


def validate_general_position(
    points: np.ndarray | Sequence[Sequence[int]],
    *,
    max_witnesses: int = 50,
) -> GeneralPositionReport:
    """Check the general-position contract of a point set.

    2D: no 3 collinear points and no 2 points sharing an x-coordinate.
    3D: no 4 coplanar, no 3 collinear, no 2 points on a common vertical line.
    Violations are reported with witness index tuples, not raised.
    """
    pts = _core.as_int_array(points)
    n, d = pts.shape
    violations: list[tuple[str, tuple[int, ...]]] = []
    truncated = False

    def add(kind: str, witness: tuple[int, ...]) -> bool:
        nonlocal truncated
        if len(violations) >= max_witnesses:
            truncated = True
            return False
        violations.append((kind, witness))
        return True

    # Duplicate-projection checks (shared x in 2D, shared vertical line in 3D).
    proj = pts[:, :1] if d == 2 else pts[:, :2]
    order = np.lexsort(proj.T[::-1])
    same = np.all(proj[order[1:]] == proj[order[:-1]], axis=1)
    kind = "shared_x" if d == 2 else "shared_vertical_line"
    for idx in np.nonzero(same)[0]:
        i, j = int(order[idx]), int(order[idx + 1])
        if not add(kind, tuple(sorted((i, j)))):
            break

    for kind, witness in _core.degeneracy_scan(pts, max_witnesses=max_witnesses):
        if not add(kind, witness):
            break

    return GeneralPositionReport(not violations, tuple(violations), truncated)


def dual_readiness_violations(
    points: np.ndarray | Sequence[Sequence[int]],
    *,
    max_witnesses: int = 50,
) -> tuple[tuple[int, ...], ...]:
    """Triples of 3D points whose xy-projections are collinear.

    Such a triple spans a vertical plane, so the corresponding dual plane
    triple has no intersection vertex; the dual-arrangement diagnostics
    reject point sets containing one.
    """
    pts = _core.as_int_array(points)
    if pts.shape[1] != 3:
        raise ValueError("dual readiness applies to 3D point sets")
    return _core.collinear_projection_triples(pts, max_witnesses=max_witnesses)
