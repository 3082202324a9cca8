"""Integer-array kernels shared by the validators and the trace enumerator.

All arithmetic is int64 and exact.  Plane normals are cross products of
coordinate differences and side tests are evaluated as normal.(p - base),
which for coordinates bounded by COORD_LIMIT stays strictly inside the
int64 range (|normal| <= 2*M^2, |dot| <= 6*M^3 < 2^63 for M <= 1.09e6).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .errors import DegeneracyError

COORD_LIMIT = 1_090_000
CHUNK_ROWS = 1 << 16
RETAIN_CELL_LIMIT = 120_000_000  # retain the full sign matrix up to ~120 MB


def as_int_array(points) -> np.ndarray:
    pts = np.asarray(points)
    if pts.ndim != 2 or pts.shape[1] not in (2, 3):
        raise ValueError("points must be an (n, d) array with d in {2, 3}")
    if not np.issubdtype(pts.dtype, np.integer):
        ipts = np.asarray(points, dtype=np.int64)
        if not np.array_equal(ipts, pts):
            raise ValueError("point coordinates must be integers")
        pts = ipts
    pts = pts.astype(np.int64, copy=False)
    if pts.size and int(np.abs(pts).max()) > COORD_LIMIT:
        raise ValueError(f"coordinates must stay within +/-{COORD_LIMIT} for exact int64 arithmetic")
    return pts


@lru_cache(maxsize=16)
def index_tuples(n: int, d: int) -> np.ndarray:
    """All d-subsets of range(n) in lexicographic order, shape (C, d) int32."""
    combos = list(itertools.combinations(range(n), d))
    return np.array(combos, dtype=np.int32).reshape(len(combos), d)


def tuple_ranks(tuples: np.ndarray, n: int) -> np.ndarray:
    """Lexicographic rank of each row of `tuples` among d-subsets of range(n)."""
    t = tuples.astype(np.int64)
    if t.shape[1] == 2:
        i, j = t[:, 0], t[:, 1]
        return _c2(n) - _c2(n - i) + (j - i - 1)
    i, j, k = t[:, 0], t[:, 1], t[:, 2]
    return _c3(n) - _c3(n - i) + _c2(n - i - 1) - _c2(n - j) + (k - j - 1)


def _c2(m):
    return m * (m - 1) // 2


def _c3(m):
    return m * (m - 1) * (m - 2) // 6


@dataclass
class SignChunk:
    """Side classifications for a block of canonical planes.

    rel[r, p] is the sign of normal_r.(x_p - base_r): -1 below, 0 on, +1
    above the plane through tuple r (normals oriented with positive last
    coordinate, so "below" is the lower side).  `vertical` marks planes
    with vanishing last normal coordinate, which have no lower/upper
    decomposition and are skipped by the enumerator.
    """

    start: int
    tuples: np.ndarray  # (B, d) int32
    normals: np.ndarray  # (B, d) int64
    rel: np.ndarray  # (B, n) int8
    vertical: np.ndarray  # (B,) bool


def _chunk_from_tuples(pts: np.ndarray, tup: np.ndarray, start: int) -> SignChunk:
    d = pts.shape[1]
    base = pts[tup[:, 0]]
    if d == 2:
        diff = pts[tup[:, 1]] - base
        normals = np.stack([-diff[:, 1], diff[:, 0]], axis=1)
    else:
        d1 = pts[tup[:, 1]] - base
        d2 = pts[tup[:, 2]] - base
        normals = np.cross(d1, d2)
    flip = normals[:, -1] < 0
    normals[flip] = -normals[flip]
    vertical = normals[:, -1] == 0
    dots = normals @ pts.T
    offsets = np.einsum("ij,ij->i", normals, base)
    rel = np.sign(dots - offsets[:, None]).astype(np.int8)
    return SignChunk(start, tup, normals, rel, vertical)


def iter_sign_chunks(pts: np.ndarray, chunk_rows: int = CHUNK_ROWS) -> Iterator[SignChunk]:
    n, d = pts.shape
    tuples = index_tuples(n, d)
    for start in range(0, len(tuples), chunk_rows):
        yield _chunk_from_tuples(pts, tuples[start : start + chunk_rows], start)


def check_chunk_nondegenerate(chunk: SignChunk, d: int) -> None:
    """Raise DegeneracyError if the chunk shows collinear/coplanar points."""
    flat = np.all(chunk.normals == 0, axis=1)
    if flat.any():
        r = int(np.nonzero(flat)[0][0])
        kind = "collinear" if d == 3 else "duplicate_point"
        raise DegeneracyError(f"{kind} points {tuple(int(x) for x in chunk.tuples[r])}")
    zeros = (chunk.rel == 0).sum(axis=1)
    bad = zeros != d
    if bad.any():
        r = int(np.nonzero(bad)[0][0])
        kind = "coplanar" if d == 3 else "collinear"
        extra = np.nonzero(chunk.rel[r] == 0)[0]
        raise DegeneracyError(f"{kind} points involving tuple {tuple(int(x) for x in chunk.tuples[r])}; on-plane set {tuple(int(x) for x in extra)}")


def degeneracy_scan(pts: np.ndarray, *, max_witnesses: int) -> list[tuple[str, tuple[int, ...]]]:
    """Collect collinear/coplanar witnesses (used by the validator)."""
    n, d = pts.shape
    out: list[tuple[str, tuple[int, ...]]] = []
    seen: set[tuple[str, tuple[int, ...]]] = set()

    def add(kind: str, witness: tuple[int, ...]) -> bool:
        item = (kind, witness)
        if item not in seen:
            seen.add(item)
            out.append(item)
        return len(out) < max_witnesses

    if n <= d:
        return out
    for chunk in iter_sign_chunks(pts):
        flat = np.all(chunk.normals == 0, axis=1)
        kind = "collinear" if d == 3 else "duplicate_point"
        for r in np.nonzero(flat)[0]:
            if not add(kind, tuple(int(x) for x in chunk.tuples[r])):
                return out
        zeros = (chunk.rel == 0).sum(axis=1)
        bad = np.nonzero((zeros != d) & ~flat)[0]
        kind = "coplanar" if d == 3 else "collinear"
        for r in bad:
            tup = tuple(int(x) for x in chunk.tuples[r])
            extras = [int(x) for x in np.nonzero(chunk.rel[r] == 0)[0] if int(x) not in tup]
            witness = tuple(sorted(tup + (extras[0],))) if extras else tup
            if not add(kind, witness):
                return out
    return out


def collinear_projection_triples(pts: np.ndarray, *, max_witnesses: int) -> tuple[tuple[int, ...], ...]:
    n = pts.shape[0]
    out: list[tuple[int, ...]] = []
    if n < 3:
        return ()
    xy = pts[:, :2]
    tuples = index_tuples(n, 3)
    for start in range(0, len(tuples), CHUNK_ROWS):
        tup = tuples[start : start + CHUNK_ROWS]
        d1 = xy[tup[:, 1]] - xy[tup[:, 0]]
        d2 = xy[tup[:, 2]] - xy[tup[:, 0]]
        cross = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
        for r in np.nonzero(cross == 0)[0]:
            out.append(tuple(int(x) for x in tup[r]))
            if len(out) >= max_witnesses:
                return tuple(out)
    return tuple(out)


# ---------------------------------------------------------------------------
# Bitmask packing helpers (traces as W-word uint64 rows).
# ---------------------------------------------------------------------------


def words_per_row(n: int) -> int:
    return max(1, (n + 63) // 64)


def pack_bool_rows(rows: np.ndarray, n: int) -> np.ndarray:
    """Pack a boolean (R, n) matrix into (R, W) uint64 words, bit i = column i."""
    w = words_per_row(n)
    padded = np.zeros((rows.shape[0], w * 64), dtype=bool)
    padded[:, :n] = rows
    packed = np.packbits(padded, axis=1, bitorder="little")
    return packed.view(np.uint64).reshape(rows.shape[0], w)


def unpack_word_row(words: np.ndarray, n: int) -> np.ndarray:
    """Indices of set bits in a single (W,) word row."""
    bits = np.unpackbits(words.view(np.uint8), bitorder="little")[:n]
    return np.nonzero(bits)[0]


def popcount_rows(words: np.ndarray) -> np.ndarray:
    return np.bitwise_count(words).sum(axis=1).astype(np.int64)


def reversed_bit_keys(rows: np.ndarray, n: int) -> np.ndarray:
    """Pack rows with bit i stored at position (W*64 - 1 - i).

    Numeric descending order on these keys equals lexicographic ascending
    order on the sorted index tuples, for rows of equal popcount.
    """
    w = words_per_row(n)
    padded = np.zeros((rows.shape[0], w * 64), dtype=bool)
    padded[:, :n] = rows
    packed = np.packbits(padded[:, ::-1], axis=1, bitorder="little")
    return packed.view(np.uint64).reshape(rows.shape[0], w)


def set_bits_at(words: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> None:
    """Set bit `cols[t]` in word row `rows[t]` (row indices must be unique)."""
    wi = cols >> 6
    bit = np.uint64(1) << (cols & 63).astype(np.uint64)
    words[rows, wi] |= bit


def mask_lex_key(d: int) -> np.ndarray:
    """Map a contact-inclusion mask (bit j = slot j) to a key whose numeric
    order equals lexicographic order on the boolean tuple (slot 0 first)."""
    keys = np.zeros(1 << d, dtype=np.int64)
    for m in range(1 << d):
        k = 0
        for j in range(d):
            k = (k << 1) | ((m >> j) & 1)
        keys[m] = k
    return keys
