"""Instance generation, JSON I/O, and the line-family lower-bound demo.

Generators draw integer coordinates in a box and reject-and-retry until
the point set is in general position (and, in 3D, has no three collinear
xy-projections, which the dual-arrangement diagnostics require).  The same
seed always reproduces the same instance.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import RetryLimitError
from .geometry import dual_readiness_violations, validate_general_position

DEFAULT_BOX = 10**6
GENERATOR_KINDS = ("cube_uniform", "sphere_rounded", "paraboloid", "clustered")


@dataclass(frozen=True)
class Instance:
    points: np.ndarray  # (n, d) int64
    dim: int
    generator: dict

    @property
    def n(self) -> int:
        return len(self.points)

    def to_json_dict(self) -> dict:
        return {
            "dim": self.dim,
            "points": [[int(c) for c in p] for p in self.points],
            "generator": self.generator,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "Instance":
        pts = np.array(data["points"], dtype=np.int64)
        return cls(pts, int(data["dim"]), dict(data.get("generator", {})))


def save_instance(inst: Instance, path: str | Path) -> None:
    Path(path).write_text(json.dumps(inst.to_json_dict(), sort_keys=True))


def load_instance(path: str | Path) -> Instance:
    return Instance.from_json_dict(json.loads(Path(path).read_text()))


def _draw(kind: str, n: int, dim: int, box: int, rng: np.random.Generator) -> np.ndarray:
    if kind == "cube_uniform":
        return rng.integers(0, box + 1, size=(n, dim))
    if kind == "sphere_rounded":
        center = box / 2
        radius = 0.45 * box
        v = rng.normal(size=(n, dim))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        return np.clip(np.rint(center + radius * v), 0, box).astype(np.int64)
    if kind == "paraboloid":
        xy = rng.integers(0, box + 1, size=(n, dim - 1)).astype(np.int64)
        denom = max(1, (dim - 1) * box)
        last = (xy * xy).sum(axis=1) // denom
        return np.column_stack([xy, last])
    if kind == "clustered":
        m = max(1, n // 12)
        centers = rng.integers(0, box + 1, size=(m, dim))
        idx = rng.integers(0, m, size=n)
        pts = centers[idx] + np.rint(rng.normal(scale=box / 40, size=(n, dim))).astype(np.int64)
        return np.clip(pts, 0, box)
    raise ValueError(f"unknown generator kind {kind!r}")


def generate(kind: str, n: int, seed: int, dim: int = 3, box: int = DEFAULT_BOX, *, retries: int = 50) -> Instance:
    """Seeded random instance in general position (reject-and-retry)."""
    if dim not in (2, 3):
        raise ValueError("dim must be 2 or 3")
    if n < dim + 1:
        raise ValueError(f"need at least {dim + 1} points in dimension {dim}")
    if kind not in GENERATOR_KINDS:
        raise ValueError(f"unknown generator kind {kind!r}")
    rng = np.random.default_rng([seed, dim, n, GENERATOR_KINDS.index(kind)])
    for attempt in range(retries):
        pts = _draw(kind, n, dim, box, rng).astype(np.int64)
        if len(np.unique(pts, axis=0)) != n:
            continue
        if not validate_general_position(pts, max_witnesses=1).ok:
            continue
        if dim == 3 and dual_readiness_violations(pts, max_witnesses=1):
            continue
        return Instance(pts, dim, {"kind": kind, "n": n, "seed": seed, "dim": dim, "box": box})
    raise RetryLimitError(f"could not draw a general-position instance in {retries} tries")


# ---------------------------------------------------------------------------
# Line-family lower-bound demo (grid points and the lines y = a*x + b).
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LineFamilyReport:
    k: int
    n: int
    epsilon: Fraction
    grid_shape: tuple[int, int]
    line_count: int
    points_per_line: int
    max_pairwise_shared: int
    family_size: int
    eps_power_ratio_squared: tuple[int, int]  # ((1/eps)^{3/2})^2 vs family_size^2, exact integers
    lines: tuple[tuple[int, int], ...] = field(repr=False)

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "n": self.n,
            "epsilon": f"{self.epsilon.numerator}/{self.epsilon.denominator}",
            "grid_shape": list(self.grid_shape),
            "line_count": self.line_count,
            "points_per_line": self.points_per_line,
            "max_pairwise_shared": self.max_pairwise_shared,
            "family_size": self.family_size,
            "eps_power_identity": list(self.eps_power_ratio_squared),
        }


def elekes_points(k: int) -> np.ndarray:
    """The integer grid [1:k] x [1:2k^2] as a 2D point set (n = 2k^3)."""
    xs = np.arange(1, k + 1)
    ys = np.arange(1, 2 * k * k + 1)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    return np.column_stack([gx.ravel(), gy.ravel()]).astype(np.int64)


def elekes_demo(k: int) -> LineFamilyReport:
    """The grid family of k^3 lines, each carrying exactly k = eps*n grid
    points with pairwise intersections of at most one point: a family
    satisfying the size window and overlap budget whose cardinality grows
    like (1/eps)^{3/2}, far beyond O(1/eps).

    Every claimed count is asserted exactly; returns the report.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    pts = elekes_points(k)
    n = len(pts)
    assert n == 2 * k**3
    eps = Fraction(1, 2 * k * k)
    assert eps * n == k
    lines = [(a, b) for a in range(1, k + 1) for b in range(1, k * k + 1)]
    assert len(lines) == k**3
    x = pts[:, 0]
    y = pts[:, 1]
    member_sets = []
    for a, b in lines:
        on = np.nonzero(y == a * x + b)[0]
        if len(on) != k:
            raise AssertionError(f"line y={a}x+{b} holds {len(on)} grid points, expected {k}")
        member_sets.append(frozenset(int(i) for i in on))
    max_shared = 0
    for i in range(len(member_sets)):
        for j in range(i + 1, len(member_sets)):
            s = len(member_sets[i] & member_sets[j])
            if s > max_shared:
                max_shared = s
    if max_shared > 1:
        raise AssertionError(f"two lines share {max_shared} grid points")
    # Window (a): every member holds exactly eps*n points.  Overlap (b):
    # pairwise intersections of at most 1 = beta*eps*n for beta = 1/k.
    # Size identity: ((1/eps)^{3/2})^2 == 8 k^6 == (2^{3/2} * |F|)^2.
    lhs = (2 * k * k) ** 3
    rhs = 8 * (k**3) ** 2
    if lhs != rhs:
        raise AssertionError("epsilon power identity failed")
    return LineFamilyReport(
        k,
        n,
        eps,
        (k, 2 * k * k),
        len(lines),
        k,
        max_shared,
        len(lines),
        (lhs, rhs),
        tuple(lines),
    )
