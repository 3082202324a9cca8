"""Canonical halfspace-trace enumeration, depth counting, net verification.

The completeness of everything here rests on one canonicalization fact: in
general position any closed halfspace can be translated toward its bounding
plane's far side and rotated about accumulated contact points, without
changing its trace except for the explicit inclusion/exclusion of the at
most d contact points, until d points of P lie on the boundary.  Hence
enumerating (d-subset of P) x (lower/upper) x (2^d inclusion masks) visits
every realizable trace.  Vertical candidate planes are skipped: rotating
about a contact line meets another point of P before turning vertical (or
the trace is already realized non-vertically), so their traces are always
picked up elsewhere.

The enumerator is pure and reusable; building it once per point set and
passing it to the builder/verifier avoids recomputing the O(n^{d+1}) sign
structure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Sequence

import numpy as np

from . import _core
from .errors import DegeneracyError
from .geometry import Halfspace, Hyperplane, Point, side_of

_SIDES = ("lower", "upper")


@dataclass(frozen=True)
class RangeTrace:
    """The subset h∩P realized by a canonical halfspace.

    Equality and hashing look only at the index set: traces with the same
    indices are the same range on P no matter which plane realized them.
    """

    indices: tuple[int, ...]
    contacts: tuple[int, ...]
    included: tuple[bool, ...]
    side: str

    def __eq__(self, other) -> bool:
        if not isinstance(other, RangeTrace):
            return NotImplemented
        return self.indices == other.indices

    def __hash__(self) -> int:
        return hash(self.indices)

    @property
    def size(self) -> int:
        return len(self.indices)

    def bitmask(self) -> int:
        m = 0
        for i in self.indices:
            m |= 1 << i
        return m

    def index_set(self) -> frozenset[int]:
        return frozenset(self.indices)


@dataclass(frozen=True)
class Verdict:
    """Result of an epsilon-net check; a failing check carries a witness
    heavy trace disjoint from the net."""

    valid: bool
    witness: Optional[RangeTrace]
    heavy_threshold: int


def canonical_halfspace(points, contacts: Sequence[int], side: str) -> Halfspace:
    """The halfspace bounded by the plane through the given contact points."""
    pts = _core.as_int_array(points)
    d = pts.shape[1]
    if len(contacts) != d:
        raise ValueError(f"need exactly {d} contact points")
    coords = pts[np.asarray(contacts, dtype=np.int64)]
    base = coords[0]
    if d == 2:
        diff = coords[1] - base
        normal = (-int(diff[1]), int(diff[0]))
    else:
        c = np.cross(coords[1] - base, coords[2] - base)
        normal = tuple(int(x) for x in c)
    if all(a == 0 for a in normal):
        raise DegeneracyError(f"contact points {tuple(contacts)} are affinely dependent")
    rhs = sum(a * int(b) for a, b in zip(normal, base))
    return Halfspace(Hyperplane(normal, rhs), side)  # oriented by Halfspace


def depth(h: Halfspace, points) -> int:
    """Exact |h ∩ P| for a closed halfspace."""
    pts = _core.as_int_array(points)
    if h.dim != pts.shape[1]:
        raise ValueError("dimension mismatch")
    return sum(side_of(h, tuple(int(c) for c in p)) != "outside" for p in pts)


@dataclass
class CandidateRows:
    """Window-filtered canonical trace candidates in packed-bitmask form."""

    n_local: int
    words: np.ndarray  # (C, W) uint64, bit i = local point i
    revwords: np.ndarray  # (C, W) uint64, reversed bit order (for lex keys)
    sizes: np.ndarray  # (C,) int64
    tuple_rows: np.ndarray  # (C,) int64 row into owner's tuple table, -1 if none
    masks: np.ndarray  # (C,) uint8 contact-inclusion bits (bit j = slot j)
    sides: np.ndarray  # (C,) uint8 (0 lower, 1 upper)
    repkeys: np.ndarray  # (C,) int64 representative order for deduplication
    owner: "TraceEnumerator"

    def __len__(self) -> int:
        return len(self.sizes)

    def deduplicate(self) -> "CandidateRows":
        """Keep one row per distinct index set: the lexicographically smallest
        (contacts, mask, side) representative."""
        if not len(self):
            return self
        keys = (self.repkeys,) + tuple(self.words[:, w] for w in range(self.words.shape[1]))
        order = np.lexsort(keys)
        sw = self.words[order]
        first = np.ones(len(order), dtype=bool)
        first[1:] = np.any(sw[1:] != sw[:-1], axis=1)
        pick = order[first]
        return self._take(pick)

    def greedy_order(self) -> "CandidateRows":
        """Sort by (size descending, index tuple lexicographically ascending)."""
        if not len(self):
            return self
        inv = np.invert(self.revwords)
        keys = tuple(inv[:, w] for w in range(inv.shape[1])) + (-self.sizes,)
        return self._take(np.lexsort(keys))

    def _take(self, idx: np.ndarray) -> "CandidateRows":
        return CandidateRows(
            self.n_local,
            self.words[idx],
            self.revwords[idx],
            self.sizes[idx],
            self.tuple_rows[idx],
            self.masks[idx],
            self.sides[idx],
            self.repkeys[idx],
            self.owner,
        )

    def materialize(self, i: int) -> RangeTrace:
        local = _core.unpack_word_row(self.words[i], self.n_local)
        indices = tuple(int(x) for x in self.owner.to_global(local))
        side = _SIDES[int(self.sides[i])]
        row = int(self.tuple_rows[i])
        if row < 0:
            return RangeTrace(indices, (), (), side)
        tup = self.owner.tuples[row]
        contacts = tuple(int(x) for x in self.owner.to_global(tup))
        mask = int(self.masks[i])
        included = tuple(bool((mask >> j) & 1) for j in range(len(contacts)))
        return RangeTrace(indices, contacts, included, side)

    def materialize_all(self) -> list[RangeTrace]:
        return [self.materialize(i) for i in range(len(self))]


class TraceEnumerator:
    """Canonical trace machinery over a fixed point set (or subset view)."""

    def __init__(self, points, _precomputed=None):
        if _precomputed is not None:
            self.points, self.index_map, self._retained = _precomputed
            self.n, self.d = self.points.shape
            self.tuples = _core.index_tuples(self.n, self.d) if self.n > self.d else np.zeros((0, self.d), np.int32)
            return
        self.points = _core.as_int_array(points)
        self.n, self.d = self.points.shape
        self.index_map: Optional[np.ndarray] = None
        self.tuples = _core.index_tuples(self.n, self.d) if self.n > self.d else np.zeros((0, self.d), np.int32)
        self._retained: Optional[list[_core.SignChunk]] = None
        if len(self.tuples) * max(self.n, 1) <= _core.RETAIN_CELL_LIMIT:
            chunks = []
            for chunk in _core.iter_sign_chunks(self.points):
                _core.check_chunk_nondegenerate(chunk, self.d)
                chunks.append(chunk)
            self._retained = chunks

    # -- index bookkeeping -------------------------------------------------

    def to_global(self, local: np.ndarray) -> np.ndarray:
        if self.index_map is None:
            return np.asarray(local, dtype=np.int64)
        return self.index_map[np.asarray(local, dtype=np.int64)]

    def to_local(self, global_idx) -> np.ndarray:
        g = np.asarray(sorted(int(i) for i in set(global_idx)), dtype=np.int64)
        if self.index_map is None:
            if len(g) and (g[0] < 0 or g[-1] >= self.n):
                raise ValueError("index out of range")
            return g
        pos = np.searchsorted(self.index_map, g)
        if np.any(pos >= len(self.index_map)) or np.any(self.index_map[pos] != g):
            raise ValueError("indices not contained in this view")
        return pos

    def restrict(self, subset) -> "TraceEnumerator":
        """Enumerator over a subset of the points (global indices)."""
        local = self.to_local(subset)
        sub_points = self.points[local]
        sub_map = self.to_global(local)
        m = len(local)
        retained = None
        if self._retained is not None and m > self.d:
            sub_tuples = _core.index_tuples(m, self.d)
            glob_tuples = local[sub_tuples.astype(np.int64)]
            rows = _core.tuple_ranks(glob_tuples, self.n)
            normals = np.concatenate([c.normals for c in self._retained])[rows]
            rel = np.concatenate([c.rel for c in self._retained])[rows][:, local]
            vertical = normals[:, -1] == 0
            retained = [_core.SignChunk(0, sub_tuples, normals, rel, vertical)]
        return TraceEnumerator(None, _precomputed=(sub_points, sub_map, retained))

    def _chunks(self) -> Iterator[_core.SignChunk]:
        if self._retained is not None:
            yield from self._retained
            return
        for chunk in _core.iter_sign_chunks(self.points):
            _core.check_chunk_nondegenerate(chunk, self.d)
            yield chunk

    # -- candidate generation ----------------------------------------------

    def candidate_rows(self, side: Optional[str], lo: int, hi: int) -> CandidateRows:
        """All canonical traces with lo <= size <= hi on the given side(s),
        not yet deduplicated."""
        n, d = self.n, self.d
        hi = min(hi, n)
        side_bits = (0, 1) if side is None else (_SIDES.index(side),)
        if n <= d:
            return self._small_candidates(side_bits, lo, hi)
        mask_pop = np.array([bin(m).count("1") for m in range(1 << d)], dtype=np.int64)
        mask_lex = _core.mask_lex_key(d)
        parts: dict[str, list[np.ndarray]] = {k: [] for k in ("w", "r", "s", "t", "m", "sd", "rk")}
        for chunk in self._chunks():
            below = chunk.rel == -1
            b = below.sum(axis=1).astype(np.int64)
            a = n - d - b
            ok_rows = ~chunk.vertical
            row_ids = np.arange(chunk.start, chunk.start + len(chunk.tuples), dtype=np.int64)
            for side_bit in side_bits:
                base = b if side_bit == 0 else a
                memb = below if side_bit == 0 else (chunk.rel == 1)
                for mask in range(1 << d):
                    size = base + mask_pop[mask]
                    keep = ok_rows & (size >= lo) & (size <= hi)
                    if not keep.any():
                        continue
                    kidx = np.nonzero(keep)[0]
                    rows = memb[kidx].copy()
                    loc = np.arange(len(kidx))
                    for j in range(d):
                        if (mask >> j) & 1:
                            rows[loc, chunk.tuples[kidx, j]] = True
                    parts["w"].append(_core.pack_bool_rows(rows, n))
                    parts["r"].append(_core.reversed_bit_keys(rows, n))
                    parts["s"].append(size[kidx])
                    parts["t"].append(row_ids[kidx])
                    parts["m"].append(np.full(len(kidx), mask, dtype=np.uint8))
                    parts["sd"].append(np.full(len(kidx), side_bit, dtype=np.uint8))
                    parts["rk"].append((row_ids[kidx] << (d + 1)) + (int(mask_lex[mask]) << 1) + side_bit)
        return self._assemble(parts)

    def _small_candidates(self, side_bits, lo: int, hi: int) -> CandidateRows:
        # n <= d points in general position are shattered by halfspaces of
        # either side, so every subset is a trace.
        n = self.n
        rows = []
        for m in range(1 << n):
            if lo <= bin(m).count("1") <= hi:
                rows.append([bool((m >> i) & 1) for i in range(n)])
        memb = np.array(rows, dtype=bool).reshape(len(rows), n)
        parts = {
            "w": [_core.pack_bool_rows(memb, n)],
            "r": [_core.reversed_bit_keys(memb, n)],
            "s": [memb.sum(axis=1).astype(np.int64)],
            "t": [np.full(len(memb), -1, dtype=np.int64)],
            "m": [np.zeros(len(memb), dtype=np.uint8)],
            "sd": [np.full(len(memb), side_bits[0], dtype=np.uint8)],
            "rk": [np.arange(len(memb), dtype=np.int64)],
        }
        return self._assemble(parts)

    def _assemble(self, parts) -> CandidateRows:
        w = _core.words_per_row(self.n)
        if not parts["w"]:
            empty64 = np.zeros(0, dtype=np.int64)
            return CandidateRows(
                self.n,
                np.zeros((0, w), dtype=np.uint64),
                np.zeros((0, w), dtype=np.uint64),
                empty64,
                empty64.copy(),
                np.zeros(0, dtype=np.uint8),
                np.zeros(0, dtype=np.uint8),
                empty64.copy(),
                self,
            )
        return CandidateRows(
            self.n,
            np.concatenate(parts["w"]),
            np.concatenate(parts["r"]),
            np.concatenate(parts["s"]).astype(np.int64),
            np.concatenate(parts["t"]).astype(np.int64),
            np.concatenate(parts["m"]),
            np.concatenate(parts["sd"]),
            np.concatenate(parts["rk"]).astype(np.int64),
            self,
        )

    # -- verification --------------------------------------------------------

    def verify(self, net_indices, eps: Fraction) -> Verdict:
        """Sound and complete epsilon-net check for all (closed) halfspaces.

        Scans every canonical plane and asks for the largest net-free trace;
        the net is valid iff that maximum stays below ceil(eps*n).
        """
        eps = Fraction(eps)
        if not (0 < eps <= 1):
            raise ValueError("epsilon must satisfy 0 < eps <= 1")
        n, d = self.n, self.d
        need = math.ceil(eps * n)
        net = sorted(set(int(i) for i in net_indices))
        net_local = self.to_local(net) if net else np.zeros(0, np.int64)
        netmask = np.zeros(n, dtype=bool)
        netmask[net_local] = True
        if n <= d:
            free = int((~netmask).sum())
            if free >= need:
                idx = tuple(int(i) for i in self.to_global(np.nonzero(~netmask)[0]))
                return Verdict(False, RangeTrace(idx, (), (), "lower"), need)
            return Verdict(True, None, need)

        best = None  # (size, memb_row copy, tuple row, free contact slots, side)
        netcols = np.nonzero(netmask)[0]
        for chunk in self._chunks():
            b = (chunk.rel == -1).sum(axis=1).astype(np.int64)
            a = n - d - b
            relN = chunk.rel[:, netcols] if len(netcols) else np.zeros((len(chunk.tuples), 0), np.int8)
            bN = (relN == -1).sum(axis=1)
            aN = (relN == 1).sum(axis=1)
            contactsN = netmask[chunk.tuples]  # (B, d)
            free_contacts = d - contactsN.sum(axis=1)
            for side_bit, base, baseN in ((0, b, bN), (1, a, aN)):
                cand = ~chunk.vertical & (baseN == 0)
                size = base + free_contacts
                bad = cand & (size >= need)
                if not bad.any():
                    continue
                r = int(np.argmax(np.where(bad, size, -1)))
                if best is None or int(size[r]) > best[0]:
                    best = (
                        int(size[r]),
                        chunk.rel[r].copy(),
                        chunk.tuples[r].copy(),
                        ~contactsN[r],
                        side_bit,
                    )
        if best is None:
            return Verdict(True, None, need)
        size, rel_row, tup, free_slots, side_bit = best
        memb = rel_row == (-1 if side_bit == 0 else 1)
        memb[tup[free_slots]] = True
        indices = tuple(int(x) for x in self.to_global(np.nonzero(memb)[0]))
        contacts = tuple(int(x) for x in self.to_global(tup))
        included = tuple(bool(x) for x in free_slots)
        witness = RangeTrace(indices, contacts, included, _SIDES[side_bit])
        return Verdict(False, witness, need)


# ---------------------------------------------------------------------------
# Public operations.
# ---------------------------------------------------------------------------


def enumerate_canonical_traces(
    points,
    side: Optional[str] = None,
    lo: int = 0,
    hi: Optional[int] = None,
    *,
    enum: Optional[TraceEnumerator] = None,
) -> list[RangeTrace]:
    """Deduplicated canonical traces with sizes in [lo, hi].

    For every halfspace h of the requested side(s) with lo <= |h∩P| <= hi,
    the trace h∩P appears exactly once, represented by its lexicographically
    smallest (contacts, inclusion mask, side) realization.  Deterministic
    order: size descending, then index tuple ascending.
    """
    enum = enum or TraceEnumerator(points)
    hi = enum.n if hi is None else hi
    if lo > hi:
        return []
    return enum.candidate_rows(side, lo, hi).deduplicate().greedy_order().materialize_all()


def verify_net(points, net_indices, eps, *, enum: Optional[TraceEnumerator] = None) -> Verdict:
    """Certify that net_indices hits every halfspace trace of size >= ceil(eps*n)."""
    enum = enum or TraceEnumerator(points)
    return enum.verify(net_indices, Fraction(eps))


def subnet_oracle(points, subset, beta, *, enum: Optional[TraceEnumerator] = None, side: str = "lower") -> list[RangeTrace]:
    """All canonical traces of the given side on the subset S with size at
    least ceil((beta/2)|S|); the ground truth the subnet builder must hit."""
    subset = sorted(int(i) for i in set(subset))
    if not subset:
        raise ValueError("subset must be nonempty")
    beta = Fraction(beta)
    enum = enum or TraceEnumerator(points)
    sub = enum.restrict(subset)
    thresh = math.ceil(beta / 2 * len(subset))
    return enumerate_canonical_traces(None, side=side, lo=max(thresh, 1), hi=len(subset), enum=sub)
