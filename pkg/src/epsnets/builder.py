"""Primal epsilon-net construction for halfspaces in 2D and 3D.

A family at scale eps_j is a maximal set of same-side traces, each holding
between ceil(eps_j*n) and floor(2*eps_j*n) points, with pairwise
intersections of at most beta*eps_j*n points.  Each member gets a
(beta/2)-net for the halfspace ranges restricted to its trace; the net is
the union of those subnets over both sides (and, in doubling mode, over the
geometric scale sequence eps_j = 2^(j-1)*eps).  The result is always run
through the complete verifier before it is returned.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import _core
from .errors import VerificationError
from .ranges import CandidateRows, RangeTrace, TraceEnumerator, Verdict

_SIDES = ("lower", "upper")


@dataclass(frozen=True)
class BuildConfig:
    eps: Fraction
    beta: Fraction = Fraction(1, 22)
    mode: str = "single_scale"
    subnet_method: str = "greedy_hitting_set"
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "eps", Fraction(self.eps))
        object.__setattr__(self, "beta", Fraction(self.beta))
        if not (0 < self.eps <= 1):
            raise ValueError("eps must satisfy 0 < eps <= 1")
        if not (0 < self.beta < Fraction(1, 3)):
            raise ValueError("beta must satisfy 0 < beta < 1/3")
        if self.mode not in ("single_scale", "doubling"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.subnet_method not in ("greedy_hitting_set", "sample_and_verify"):
            raise ValueError(f"unknown subnet method {self.subnet_method!r}")


@dataclass(frozen=True)
class Family:
    """Maximal trace family at one scale, with per-member subnets."""

    scale: Fraction
    side: str
    members: tuple[RangeTrace, ...]
    subnets: tuple[tuple[int, ...], ...] = ()

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class NetReport:
    epsilon: Fraction
    beta: Fraction
    mode: str
    subnet_method: str
    seed: int
    families: tuple[Family, ...]
    net: tuple[int, ...]
    verdict: Verdict
    stats: dict


@dataclass(frozen=True)
class BaselineResult:
    net: tuple[int, ...]
    draws: int
    sample_size: int


def family_window(eps_j: Fraction, n: int) -> tuple[int, int]:
    return math.ceil(eps_j * n), min(n, math.floor(2 * eps_j * n))


def intersection_budget(eps_j: Fraction, beta: Fraction, n: int) -> int:
    # |T ∩ U| <= beta*eps_j*n compared exactly; for integer sizes this is
    # the same as <= floor(beta*eps_j*n).
    return math.floor(beta * eps_j * n)


def build_family(
    points,
    eps_j,
    beta,
    side: str,
    *,
    enum: Optional[TraceEnumerator] = None,
) -> Family:
    """Greedy maximal family over the full canonical candidate set.

    Candidates are scanned by (size descending, index tuple ascending); a
    candidate is accepted iff its intersection with every already accepted
    member stays within the budget.  The batch elimination below is the
    plain greedy scan: after each acceptance, exactly the conflicting
    candidates are discarded, so at the end every candidate was either
    accepted or conflicts with an accepted member - which is maximality.
    """
    eps_j, beta = Fraction(eps_j), Fraction(beta)
    enum = enum or TraceEnumerator(points)
    n = enum.n
    lo, hi = family_window(eps_j, n)
    if lo > n:
        return Family(eps_j, side, ())
    cand = enum.candidate_rows(side, lo, hi).deduplicate().greedy_order()
    total = len(cand)
    if total == 0:
        return Family(eps_j, side, ())
    budget = intersection_budget(eps_j, beta, n)
    alive = np.ones(total, dtype=bool)
    picked: list[int] = []
    pos = 0
    while pos < total:
        if not alive[pos]:
            step = int(np.argmax(alive[pos:]))
            if not alive[pos + step]:
                break
            pos += step
        inter = np.bitwise_count(cand.words & cand.words[pos]).sum(axis=1).astype(np.int64)
        alive &= inter <= budget
        picked.append(pos)
        pos += 1
    assert not alive.any(), "greedy scan left an addable candidate"
    members = tuple(cand.materialize(i) for i in picked)
    return Family(eps_j, side, members)


def check_family_invariants(points, family: Family, beta, *, enum: Optional[TraceEnumerator] = None) -> None:
    """Recompute properties (a) and (b) and maximality from scratch."""
    beta = Fraction(beta)
    enum = enum or TraceEnumerator(points)
    n = enum.n
    lo, hi = family_window(family.scale, n)
    budget = intersection_budget(family.scale, beta, n)
    masks = [t.index_set() for t in family.members]
    for t in family.members:
        if not (lo <= t.size <= hi):
            raise AssertionError(f"size window violated: {t.size} not in [{lo}, {hi}]")
    for i in range(len(masks)):
        for j in range(i + 1, len(masks)):
            if len(masks[i] & masks[j]) > budget:
                raise AssertionError("pairwise intersection budget violated")
    cand = enum.candidate_rows(family.side, lo, hi).deduplicate()
    if len(cand) == 0:
        if family.members:
            raise AssertionError("members exist but candidate set is empty")
        return
    member_rows = np.zeros((len(masks), cand.words.shape[1]), dtype=np.uint64)
    for r, t in enumerate(family.members):
        local = enum.to_local(t.indices)
        row = np.zeros((1, enum.n), dtype=bool)
        row[0, local] = True
        member_rows[r] = _core.pack_bool_rows(row, enum.n)[0]
    covered = np.zeros(len(cand), dtype=bool)
    for r in range(len(masks)):
        inter = np.bitwise_count(cand.words & member_rows[r]).sum(axis=1).astype(np.int64)
        covered |= inter > budget
        covered |= np.all(cand.words == member_rows[r], axis=1)
    if not covered.all():
        raise AssertionError("family is not maximal: an addable candidate remains")


# ---------------------------------------------------------------------------
# Subnets (hitting sets for heavy subtraces).
# ---------------------------------------------------------------------------


def default_sample_size(theta: Fraction) -> int:
    x = 4 / float(theta)
    return math.ceil(x * math.log(x))


def hitting_net(
    points,
    subset: Sequence[int],
    theta,
    *,
    side: str = "lower",
    method: str = "greedy_hitting_set",
    rng: Optional[np.random.Generator] = None,
    enum: Optional[TraceEnumerator] = None,
    sample_cap: int = 64,
) -> tuple[int, ...]:
    """A theta-net for the halfspace ranges of one side restricted to the
    subset: hits every trace on S with at least ceil(theta*|S|) points.

    Certified against the full heavy-trace enumeration before returning.
    Greedy mode covers the traces of size exactly ceil(theta*|S|) first
    (hitting those hits everything above, by the shrinking property) and
    the certificate then confirms it.
    """
    theta = Fraction(theta)
    subset = sorted(set(int(i) for i in subset))
    if not subset:
        raise ValueError("subset must be nonempty")
    m = len(subset)
    thresh = max(1, math.ceil(theta * m))
    if m == 1:
        return (subset[0],)
    enum = enum or TraceEnumerator(points)
    sub = enum.restrict(subset)
    heavy = sub.candidate_rows(side, thresh, m).deduplicate()
    if len(heavy) == 0:
        return (subset[0],)
    submap = np.asarray(subset, dtype=np.int64)

    def certified(local_net: np.ndarray) -> bool:
        row = np.zeros((1, m), dtype=bool)
        row[0, local_net] = True
        w = _core.pack_bool_rows(row, m)[0]
        hits = np.bitwise_count(heavy.words & w).sum(axis=1)
        return bool((hits > 0).all())

    if method == "sample_and_verify":
        if rng is None:
            raise ValueError("sample_and_verify needs an rng")
        size = min(m, default_sample_size(2 * theta))
        for _ in range(sample_cap):
            local = np.sort(rng.choice(m, size=size, replace=False))
            if certified(local):
                return tuple(int(x) for x in submap[local])
        # Sampling failed its draw budget; fall back to the deterministic cover.

    minimal = heavy.sizes == heavy.sizes.min()
    rows = np.zeros((int(minimal.sum()), m), dtype=bool)
    for out_r, r in enumerate(np.nonzero(minimal)[0]):
        rows[out_r, _core.unpack_word_row(heavy.words[r], m)] = True
    uncovered = np.ones(len(rows), dtype=bool)
    chosen: list[int] = []
    while uncovered.any():
        counts = rows[uncovered].sum(axis=0)
        pick = int(np.argmax(counts))
        chosen.append(pick)
        uncovered &= ~rows[:, pick]
    local = np.array(sorted(chosen), dtype=np.int64)
    if not certified(local):
        # The minimal-size cover missed a larger trace (cannot happen for
        # halfspaces, which have the shrinking property); cover everything.
        all_rows = np.zeros((len(heavy), m), dtype=bool)
        for r in range(len(heavy)):
            all_rows[r, _core.unpack_word_row(heavy.words[r], m)] = True
        uncovered = np.ones(len(all_rows), dtype=bool)
        chosen = []
        while uncovered.any():
            counts = all_rows[uncovered].sum(axis=0)
            pick = int(np.argmax(counts))
            chosen.append(pick)
            uncovered &= ~all_rows[:, pick]
        local = np.array(sorted(chosen), dtype=np.int64)
        assert certified(local)
    return tuple(int(x) for x in submap[local])


def build_subnet(
    points,
    trace: RangeTrace | Sequence[int],
    beta,
    *,
    method: str = "greedy_hitting_set",
    rng: Optional[np.random.Generator] = None,
    enum: Optional[TraceEnumerator] = None,
    side: Optional[str] = None,
) -> tuple[int, ...]:
    """(beta/2)-net for the ranges of `side` restricted to the trace."""
    if isinstance(trace, RangeTrace):
        indices = trace.indices
        side = side or trace.side
    else:
        indices = tuple(int(i) for i in trace)
        side = side or "lower"
    return hitting_net(points, indices, Fraction(beta) / 2, side=side, method=method, rng=rng, enum=enum)


# ---------------------------------------------------------------------------
# Whole-net construction.
# ---------------------------------------------------------------------------


def build_net(points, config: BuildConfig, *, enum: Optional[TraceEnumerator] = None) -> NetReport:
    """Run the construction at every scale and side, verify, and report.

    Verification failure raises VerificationError: the construction is
    proven correct, so a failure means an implementation bug.
    """
    t0 = time.perf_counter()
    enum = enum or TraceEnumerator(points)
    n = enum.n
    families: list[Family] = []
    net: set[int] = set()
    for side_bit, side in enumerate(_SIDES):
        j = 1
        while True:
            eps_j = config.eps * (1 << (j - 1))
            if math.ceil(eps_j * n) > n:
                break
            fam = build_family(None, eps_j, config.beta, side, enum=enum)
            subnets = []
            for m_idx, member in enumerate(fam.members):
                rng = np.random.default_rng([config.seed, side_bit, j, m_idx])
                subnet = build_subnet(
                    None, member, config.beta, method=config.subnet_method, rng=rng, enum=enum
                )
                subnets.append(subnet)
                net.update(subnet)
            families.append(replace(fam, subnets=tuple(subnets)))
            if config.mode == "single_scale":
                break
            j += 1
    net_sorted = tuple(sorted(net))
    verdict = enum.verify(net_sorted, config.eps)
    if not verdict.valid:
        raise VerificationError(
            f"constructed net failed verification; witness trace of size {verdict.witness.size}"
        )
    millis = (time.perf_counter() - t0) * 1000.0
    stats = {
        "n": n,
        "dim": enum.d,
        "net_size": len(net_sorted),
        "family_sizes": [
            {"side": f.side, "scale": _frac_str(f.scale), "members": len(f.members)} for f in families
        ],
        "max_family_size": max((len(f) for f in families), default=0),
        "four_over_eps": _frac_str(4 / config.eps),
        "subnet_size_total": sum(len(s) for f in families for s in f.subnets),
        "millis": millis,
    }
    return NetReport(
        config.eps,
        config.beta,
        config.mode,
        config.subnet_method,
        config.seed,
        tuple(families),
        net_sorted,
        verdict,
        stats,
    )


def baseline_hw_net(points, eps, seed: int, *, enum: Optional[TraceEnumerator] = None, cap: int = 100) -> BaselineResult:
    """Random-sample-and-verify baseline with the classical sample size
    ceil((8d/eps) * ln(8/eps)), capped at n; redraws until the verifier
    accepts (cap draws, then a hard error)."""
    eps = Fraction(eps)
    enum = enum or TraceEnumerator(points)
    n, d = enum.n, enum.d
    size = min(n, math.ceil((8 * d / float(eps)) * math.log(8 / float(eps))))
    size = max(1, size)
    rng = np.random.default_rng([seed, n, d])
    for draw in range(1, cap + 1):
        sample = tuple(sorted(int(x) for x in rng.choice(n, size=size, replace=False)))
        if enum.verify(sample, eps).valid:
            return BaselineResult(sample, draw, size)
    raise VerificationError(f"baseline sampling failed {cap} draws at eps={eps}")


# ---------------------------------------------------------------------------
# Coverage explanation (the "N is an eps-net" argument, checked per trace).
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoverageReport:
    heavy_traces: int
    via_member_equality: int
    via_neighbor: int
    uncovered: int


def explain_coverage(points, report: NetReport, *, enum: Optional[TraceEnumerator] = None) -> CoverageReport:
    """For every heavy canonical trace T, exhibit a member g of the scale
    bracket of |T| with |T∩g| > beta*eps_j*n and T∩N_g nonempty.

    This is the verifier-independent form of the construction's own
    correctness argument; `uncovered` must be 0.
    """
    enum = enum or TraceEnumerator(points)
    n = enum.n
    need = math.ceil(report.epsilon * n)
    eq = nb = unc = 0
    total = 0
    for side in _SIDES:
        heavy = enum.candidate_rows(side, need, n).deduplicate()
        if len(heavy) == 0:
            continue
        total += len(heavy)
        fams = [f for f in report.families if f.side == side]
        satisfied = np.zeros(len(heavy), dtype=bool)
        equality = np.zeros(len(heavy), dtype=bool)
        for fam in fams:
            budget = intersection_budget(fam.scale, report.beta, n)
            if report.mode == "doubling":
                lo_b = math.ceil(fam.scale * n)
                hi_b = math.floor(2 * fam.scale * n)
                bracket = (heavy.sizes >= lo_b) & (heavy.sizes <= min(hi_b, n)) if fam.scale * 2 <= 1 else (heavy.sizes >= lo_b)
            else:
                bracket = np.ones(len(heavy), dtype=bool)
            for member, subnet in zip(fam.members, fam.subnets):
                mrow = np.zeros((1, n), dtype=bool)
                mrow[0, enum.to_local(member.indices)] = True
                mw = _core.pack_bool_rows(mrow, n)[0]
                srow = np.zeros((1, n), dtype=bool)
                srow[0, enum.to_local(subnet)] = True
                sw = _core.pack_bool_rows(srow, n)[0]
                inter = np.bitwise_count(heavy.words & mw).sum(axis=1).astype(np.int64)
                hits = np.bitwise_count(heavy.words & sw).sum(axis=1) > 0
                ok = bracket & (inter > budget) & hits
                equality |= ok & (inter == heavy.sizes) & (inter == member.size)
                satisfied |= ok
        eq += int((satisfied & equality).sum())
        nb += int((satisfied & ~equality).sum())
        unc += int((~satisfied).sum())
    return CoverageReport(total, eq, nb, unc)


def _frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"
