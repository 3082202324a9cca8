from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epsnets.errors import DegeneracyError
from epsnets.geometry import (
    DualPlane,
    DualPoint,
    Halfspace,
    Hyperplane,
    Point,
    dual_readiness_violations,
    dualize,
    orientation,
    side_of,
    validate_general_position,
)
from epsnets.instances import elekes_points

ints = st.integers(min_value=-1000, max_value=1000)


@pytest.mark.parametrize(
    "pts,expected",
    [
        ([(0, 0), (1, 0), (0, 1)], 1),
        ([(0, 0), (1, 1), (2, 2)], 0),
        ([(0, 0), (0, 1), (1, 0)], -1),
        ([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)], 1),
    ],
)
def test_orientation_examples(pts, expected):
    assert orientation(pts) == expected


def test_orientation_dimension_mismatch():
    with pytest.raises(ValueError):
        orientation([(0, 0), (1, 0, 0), (0, 1)])
    with pytest.raises(ValueError):
        orientation([(0, 0), (1, 0)])


@given(st.lists(st.tuples(ints, ints, ints), min_size=4, max_size=4), st.integers(min_value=1, max_value=50))
@settings(max_examples=100, deadline=None)
def test_orientation_scale_invariant(pts, scale):
    base = orientation(pts)
    scaled = orientation([tuple(scale * c for c in p) for p in pts])
    assert base == scaled


def test_side_of_examples():
    h = Halfspace(Hyperplane((0, 0, 1), 0), "lower")  # z <= 0
    assert side_of(h, (1, 1, -1)) == "inside_strict"
    assert side_of(h, (0, 0, 0)) == "on_boundary"
    assert side_of(h, (0, 0, 5)) == "outside"


def test_halfspace_orientation_normalized():
    # A plane handed in with negative last coefficient still means the same
    # geometric lower side after normalization.
    h = Halfspace(Hyperplane((0, 0, -2), 0), "lower")
    assert h.contains((0, 0, -1))
    assert not h.contains((0, 0, 1))


def test_dualize_roundtrips():
    p = Point((3, -2, 7))
    dp = dualize(p)
    assert isinstance(dp, DualPlane)
    assert dualize(dp) == p
    h = Halfspace(Hyperplane.from_graph((F(1), F(1), F(1))), "lower")
    q = dualize(h)
    assert isinstance(q, DualPoint)
    assert q.coords == (F(-1), F(-1), F(1))
    assert dualize(q) == h


def test_dualize_example_incidence():
    # p = origin, plane z = x + y + 1: p strictly inside the lower side and
    # the dual point lies strictly above the dual plane.
    h = Halfspace(Hyperplane.from_graph((F(1), F(1), F(1))), "lower")
    p = Point((0, 0, 0))
    assert side_of(h, p) == "inside_strict"
    hstar = dualize(h)
    pstar = dualize(p)
    assert pstar.value_gap(hstar) < 0  # gap<0 means the point is above the plane


def test_dualize_vertical_degenerate():
    with pytest.raises(DegeneracyError):
        dualize(Halfspace(Hyperplane((1, 0, 0), 0), "lower"))


def test_dualize_rejects_upper():
    with pytest.raises(ValueError):
        dualize(Halfspace(Hyperplane((0, 0, 1), 0), "upper"))


def test_incidence_preservation_seeded():
    # p in h iff h* lies (weakly) above p*, over 1000 seeded pairs, with
    # side_of as the primal oracle.
    rng = np.random.default_rng(424242)
    agree = 0
    for _ in range(1000):
        p = Point(tuple(int(v) for v in rng.integers(-50, 51, size=3)))
        alphas = tuple(F(int(v)) for v in rng.integers(-20, 21, size=2))
        gamma = F(int(rng.integers(-2000, 2001)))
        h = Halfspace(Hyperplane.from_graph(alphas + (gamma,)), "lower")
        primal_in = side_of(h, p) != "outside"
        gap = dualize(p).value_gap(dualize(h))  # <=0 iff h* weakly above p*
        dual_in = gap <= 0
        assert primal_in == dual_in
        agree += 1
    assert agree == 1000


@given(st.tuples(ints, ints, ints))
@settings(max_examples=200, deadline=None)
def test_duality_roundtrip_property(coords):
    p = Point(coords)
    assert dualize(dualize(p)) == p


def test_validate_2d():
    ok = validate_general_position(np.array([[0, 0], [5, 1], [2, 7]]))
    assert ok.ok
    col = validate_general_position(np.array([[0, 0], [1, 1], [2, 2]]))
    assert not col.ok
    assert ("collinear", (0, 1, 2)) in col.violations
    samex = validate_general_position(np.array([[3, 0], [3, 9], [1, 1]]))
    assert "shared_x" in samex.kinds()


def test_validate_3d():
    good = validate_general_position(np.array([[0, 0, 0], [7, 1, 3], [2, 9, 5], [4, 3, 11]]))
    assert good.ok
    coplanar = validate_general_position(
        np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0], [3, 4, 17]])
    )
    assert "coplanar" in coplanar.kinds()
    collinear = validate_general_position(
        np.array([[0, 0, 0], [1, 2, 3], [2, 4, 6], [9, 1, 4], [3, 17, 5]])
    )
    assert "collinear" in collinear.kinds()
    vertical = validate_general_position(np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]]))
    assert "shared_vertical_line" in vertical.kinds()  # origin and (0,0,1)


def test_validate_elekes_grid_violates():
    report = validate_general_position(elekes_points(2))
    assert not report.ok
    assert "collinear" in report.kinds() or "shared_x" in report.kinds()


def test_dual_readiness():
    # Three points over a common vertical plane: projections collinear.
    pts = np.array([[0, 0, 5], [1, 1, 9], [2, 2, 100], [7, 1, 3]])
    bad = dual_readiness_violations(pts)
    assert (0, 1, 2) in bad


def test_predicates_are_exact_rationals():
    h = Halfspace(Hyperplane((F(1, 3), F(1, 7), F(1)), F(22, 21)), "lower")
    assert side_of(h, (1, 2, F(3, 7))) == "on_boundary"
