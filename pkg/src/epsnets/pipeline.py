"""Dual-space net construction: approximation sample, shallow vertices,
crossing-distance-separated greedy set, per-point subnets, primal verify.

The construction runs entirely in the dual: points become planes, a seeded
sample X stands in for the deterministic segment-range approximation (its
quality is spot-checked on random chords and downward rays, and the final
net is certified by the complete primal verifier either way), the shallow
vertices of the sample arrangement are thinned to a crossing-distance
separated set F, and each selected vertex contributes a beta-net for the
planes passing below it.  Any failed intermediate assertion or failed
final verification triggers a fresh sample, up to a hard retry cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .builder import hitting_net
from .dual import VertexArrangement, build_arrangement, dual_plane_rows
from .errors import DegeneracyError, RetryLimitError, VerificationError
from .geometry import dual_readiness_violations
from .ranges import TraceEnumerator, Verdict


@dataclass(frozen=True)
class PipelineConfig:
    eps: Fraction
    approx_multiplier: int = 4  # target |X| = ceil(a * (1/eps^2) * log(1/eps))
    beta: Fraction = Fraction(1, 16)
    seed: int = 0
    segment_checks: int = 1000
    sample_retries: int = 20
    pipeline_retries: int = 5

    def __post_init__(self) -> None:
        object.__setattr__(self, "eps", Fraction(self.eps))
        object.__setattr__(self, "beta", Fraction(self.beta))
        if not (0 < self.eps <= 1):
            raise ValueError("eps must satisfy 0 < eps <= 1")
        if not (0 < self.beta < Fraction(1, 8)):
            raise ValueError("beta must satisfy 0 < beta < 1/8")


@dataclass(frozen=True)
class PipelineTrace:
    x_indices: tuple[int, ...]
    shallow_count: int
    members: tuple[tuple[int, int, int], ...]  # defining plane triples (into X order)
    member_x_levels: tuple[int, ...]
    member_h_levels: tuple[int, ...]
    plane_sets_below: tuple[tuple[int, ...], ...]  # H_p as point indices
    subnets: tuple[tuple[int, ...], ...]
    net: tuple[int, ...]
    verdict: Verdict
    attempts: int
    stats: dict


def approx_target_size(config: PipelineConfig) -> int:
    e = float(config.eps)
    raw = config.approx_multiplier * (1.0 / (e * e)) * math.log(1.0 / e) if e < 1 else 0.0
    return max(4, math.ceil(raw))


def attainable_sample_size(n: int, eps: Fraction, sigmas: float = 3.5) -> int:
    """Smallest sample size for which the eps/4 segment discrepancy stays
    below `sigmas` worst-case hypergeometric standard deviations, so the
    mandatory spot check has a realistic chance on 10^3 segments.  The
    multiplier-based target is floored at this size; otherwise samples just
    above the formula size fail the check with probability ~1 ("parameter a
    too small")."""
    if n <= 1:
        return n
    q = 2.0 * float(eps) / 4.0 / sigmas
    m = n / (1.0 + q * q * (n - 1))
    return min(n, max(4, math.ceil(m)))


def _segment_sign(planes: np.ndarray, q: tuple[int, int, int]) -> np.ndarray:
    vals = planes[:, 0] * q[0] + planes[:, 1] * q[1] + planes[:, 2] - q[2]
    return np.sign(vals).astype(np.int8)


def sample_approximation(
    planes: np.ndarray,
    config: PipelineConfig,
    *,
    attempt: int = 0,
) -> tuple[np.ndarray, int]:
    """Seeded uniform sample X of the dual planes, spot-checked as an
    eps/4-approximation for segment ranges (planes crossing a segment) on
    random chords and downward rays.  Returns (sorted indices, checks run).
    """
    n = len(planes)
    target = min(n, max(approx_target_size(config), attainable_sample_size(n, config.eps)))
    rng = np.random.default_rng([config.seed, 0x5A17, attempt])
    quarter = config.eps / 4
    coord_span = max(1, int(np.abs(planes).max()))
    for redraw in range(config.sample_retries):
        x_idx = np.sort(rng.choice(n, size=target, replace=False))
        if target == n:
            return x_idx, 0  # X = H: every discrepancy is exactly zero
        ok = True
        checks = 0
        while checks < config.segment_checks:
            anchor = planes[int(rng.integers(n))]
            px = int(rng.integers(-coord_span, coord_span + 1))
            py = int(rng.integers(-coord_span, coord_span + 1))
            base_z = int(anchor[0]) * px + int(anchor[1]) * py + int(anchor[2])
            if rng.integers(2):  # downward ray from (px, py, z): crossings = planes below
                z = base_z + int(rng.integers(-coord_span, coord_span + 1))
                su = _segment_sign(planes, (px, py, z))
                if (su == 0).any():
                    continue
                h_e = int((su == -1).sum())
                x_e = int((su[x_idx] == -1).sum())
            else:  # chord between two independent points
                z1 = base_z + int(rng.integers(-coord_span, coord_span + 1))
                anchor2 = planes[int(rng.integers(n))]
                qx = int(rng.integers(-coord_span, coord_span + 1))
                qy = int(rng.integers(-coord_span, coord_span + 1))
                z2 = int(anchor2[0]) * qx + int(anchor2[1]) * qy + int(anchor2[2]) + int(
                    rng.integers(-coord_span, coord_span + 1)
                )
                su = _segment_sign(planes, (px, py, z1))
                sv = _segment_sign(planes, (qx, qy, z2))
                if (su == 0).any() or (sv == 0).any():
                    continue
                cross = su * sv == -1
                h_e = int(cross.sum())
                x_e = int(cross[x_idx].sum())
            checks += 1
            if abs(Fraction(x_e, target) - Fraction(h_e, n)) >= quarter:
                ok = False
                break
        if ok:
            return x_idx, checks
    raise RetryLimitError(f"approximation sample failed spot checks {config.sample_retries} times")


def select_separated(arr: VertexArrangement, order: Sequence[int], r: Fraction) -> list[int]:
    """Greedy maximal subset of the given vertices with pairwise crossing
    distance strictly larger than r, scanning in the given order.

    Batch scan: accepting a vertex immediately discards every later vertex
    within distance r, which reproduces the sequential greedy exactly and
    certifies maximality (every non-member was discarded by some member).
    """
    order = [int(v) for v in order]
    if not order:
        return []
    # For integer distances d and rational r: d > r  <=>  d >= floor(r) + 1.
    min_ok = math.floor(r) + 1
    if min_ok <= 0:
        return order
    sig = arr.signs[order].astype(np.int32)
    total = len(order)
    alive = np.ones(total, dtype=bool)
    chosen: list[int] = []
    pos = 0
    while pos < total:
        if not alive[pos]:
            step = int(np.argmax(alive[pos:]))
            if not alive[pos + step]:
                break
            pos += step
        d = ((sig * sig[pos][None, :]) == -1).sum(axis=1)
        alive &= d >= min_ok  # removes pos itself (d = 0)
        chosen.append(order[pos])
        pos += 1
    assert not alive.any(), "separated-set scan left an addable vertex"
    return chosen


def _sorted_shallow(arr: VertexArrangement, shallow_ids: np.ndarray) -> list[int]:
    """Level-ascending order with a deterministic coordinate tie-break:
    float keys first, exact rational comparison only within float ties."""
    fx = arr.num_x[shallow_ids].astype(float) / arr.den[shallow_ids].astype(float)
    fy = arr.num_y[shallow_ids].astype(float) / arr.den[shallow_ids].astype(float)
    fz = arr.num_z[shallow_ids].astype(float) / arr.den[shallow_ids].astype(float)
    lv = arr.levels[shallow_ids]
    rank = np.lexsort((fz, fy, fx, lv))
    ordered = [int(shallow_ids[i]) for i in rank]
    out: list[int] = []
    i = 0
    while i < len(rank):
        j = i + 1
        while (
            j < len(rank)
            and lv[rank[j]] == lv[rank[i]]
            and fx[rank[j]] == fx[rank[i]]
            and fy[rank[j]] == fy[rank[i]]
            and fz[rank[j]] == fz[rank[i]]
        ):
            j += 1
        if j - i > 1:
            out.extend(sorted(ordered[i:j], key=arr.vertex_coords))
        else:
            out.append(ordered[i])
        i = j
    return out


def run_pipeline(points, config: PipelineConfig, *, enum: Optional[TraceEnumerator] = None) -> PipelineTrace:
    pts_enum = enum or TraceEnumerator(points)
    pts = pts_enum.points
    if pts.shape[1] != 3:
        raise ValueError("the dual pipeline is defined for 3D point sets")
    if dual_readiness_violations(pts, max_witnesses=1):
        raise DegeneracyError("three points have collinear xy-projections; dual vertices degenerate")
    planes = dual_plane_rows(pts)
    n = len(planes)
    eps = config.eps
    last_failure = "unknown"
    for attempt in range(1, config.pipeline_retries + 1):
        x_idx, checks = sample_approximation(planes, config, attempt=attempt - 1)
        xplanes = planes[x_idx]
        xsize = len(x_idx)
        arr = build_arrangement(xplanes)
        level_cap = math.ceil(Fraction(3, 2) * eps * xsize)
        shallow_ids = np.nonzero(arr.levels <= level_cap)[0]
        if len(shallow_ids) == 0:
            last_failure = "no shallow vertices in the sample arrangement"
            continue
        order = _sorted_shallow(arr, shallow_ids)
        r = eps * xsize / 4
        members = select_separated(arr, order, r)
        if not members:
            last_failure = "empty separated set"
            continue
        # Pairwise separation recheck (maximality is certified by the scan).
        min_ok = math.floor(r) + 1
        msigns = [arr.signs[v].astype(np.int32) for v in members]
        for i in range(len(members)):
            for j in range(i + 1, len(members)):
                if int(((msigns[i] * msigns[j]) == -1).sum()) < min_ok:
                    raise AssertionError("separated set violates its own distance bound")
        # Levels in the full arrangement and the planes below each member.
        h_levels = []
        below_sets = []
        ok = True
        for v in members:
            vi = int(v)
            e = (
                planes[:, 0].astype(object) * int(arr.num_x[vi])
                + planes[:, 1].astype(object) * int(arr.num_y[vi])
                + planes[:, 2].astype(object) * int(arr.den[vi])
                - int(arr.num_z[vi])
            )
            neg = np.array([1 if val < 0 else 0 for val in e], dtype=bool)
            zero = np.array([1 if val == 0 else 0 for val in e], dtype=bool)
            if int(zero.sum()) != 3:
                raise DegeneracyError("sample vertex lies on an extra plane of H")
            lvl = int(neg.sum())
            if lvl > 2 * eps * n:
                ok = False
                last_failure = f"selected vertex at level {lvl} > 2*eps*n"
                break
            h_levels.append(lvl)
            below_sets.append(tuple(int(i) for i in np.nonzero(neg)[0]))
        if not ok:
            continue
        subnets = []
        net: set[int] = set()
        for below in below_sets:
            if not below:
                subnets.append(())
                continue
            sn = hitting_net(None, below, config.beta, side="lower", enum=pts_enum)
            subnets.append(sn)
            net.update(sn)
        net_sorted = tuple(sorted(net))
        verdict = pts_enum.verify(net_sorted, eps) if net_sorted else Verdict(False, None, math.ceil(eps * n))
        if verdict.valid:
            stats = {
                "n": n,
                "x_size": xsize,
                "x_target": approx_target_size(config),
                "level_cap": level_cap,
                "r": f"{r.numerator}/{r.denominator}",
                "shallow": int(len(shallow_ids)),
                "f_size": len(members),
                "f_times_eps": float(len(members) * eps),
                "segment_checks": checks,
                "net_size": len(net_sorted),
            }
            return PipelineTrace(
                tuple(int(i) for i in x_idx),
                int(len(shallow_ids)),
                tuple(tuple(int(x) for x in arr.triples[v]) for v in members),
                tuple(int(arr.levels[v]) for v in members),
                tuple(h_levels),
                tuple(below_sets),
                tuple(subnets),
                net_sorted,
                verdict,
                attempt,
                stats,
            )
        last_failure = "final primal verification failed"
    raise VerificationError(
        f"pipeline failed after {config.pipeline_retries} attempts; last failure: {last_failure}"
    )
