"""Strict linear feasibility by Fourier-Motzkin elimination.

A constraint is a tuple (a_1, ..., a_k, c) of exact numbers (int or
Fraction) meaning a.x + c > 0.  Elimination keeps coefficients exact; with
integer inputs everything stays integer, so there is no rounding anywhere.
Complete for every input, including degenerate systems (empty, parallel,
or rank-deficient constraint sets), unlike vertex-witness schemes.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional, Sequence

Row = tuple


def eliminate_first(constraints: Sequence[Row]) -> list[Row]:
    """Project the system {a.x + c > 0} along its first variable."""
    lows, ups, keep = [], [], []
    for row in constraints:
        a, rest = row[0], row[1:]
        if a > 0:
            lows.append((a, rest))
        elif a < 0:
            ups.append((a, rest))
        else:
            keep.append(rest)
    for l, rl in lows:
        for u, ru in ups:
            # x > -RL/l and x < RU/(-u) are compatible iff l*RU - u*RL > 0
            keep.append(tuple(l * y - u * x for x, y in zip(rl, ru)))
    return keep


def _normalized(rows: list[Row]) -> list[Row]:
    """Scale integer rows by their gcd and deduplicate; elimination products
    repeat heavily, and without this the final stages blow up quadratically."""
    out = set()
    for row in rows:
        if all(isinstance(v, int) for v in row):
            g = 0
            for v in row:
                g = math.gcd(g, abs(v))
            if g > 1:
                row = tuple(v // g for v in row)
        out.add(row)
    return list(out)


def strictly_feasible(constraints: Sequence[Row], nvars: int) -> bool:
    """Does {x : a.x + c > 0 for all rows} have a point (hence an open ball)?"""
    rows = [tuple(r) for r in constraints]
    for row in rows:
        if len(row) != nvars + 1:
            raise ValueError("constraint arity mismatch")
    k = nvars
    while k > 1:
        rows = _normalized(eliminate_first(rows))
        k -= 1
    if k == 1:
        return open_interval(rows) is not None
    return all(c > 0 for (c,) in rows)


def open_interval(constraints: Sequence[Row]) -> Optional[tuple[Optional[Fraction], Optional[Fraction]]]:
    """For one-variable systems {a*t + c > 0}: the open feasible interval as
    (lo, hi), None endpoints meaning unbounded; None when infeasible."""
    lo: Optional[Fraction] = None
    hi: Optional[Fraction] = None
    for a, c in constraints:
        if a > 0:
            bound = Fraction(-c, a) if isinstance(a, int) and isinstance(c, int) else Fraction(-c) / Fraction(a)
            lo = bound if lo is None else max(lo, bound)
        elif a < 0:
            bound = Fraction(-c, a) if isinstance(a, int) and isinstance(c, int) else Fraction(-c) / Fraction(a)
            hi = bound if hi is None else min(hi, bound)
        elif not c > 0:
            return None
    if lo is not None and hi is not None and not lo < hi:
        return None
    return (lo, hi)
