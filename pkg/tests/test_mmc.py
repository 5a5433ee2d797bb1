import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fhp.core import PointSet
from fhp.errors import DegenerateInstanceError, InputError
from fhp.exact import solve_eps_net, solve_exact_bfs
from fhp.mmc import affine_margin, solve_mmc

from oracles import mmc_sweep


def test_two_points_on_a_line():
    sep = solve_mmc([[2, 0], [4, 0]])
    assert sep.margin == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(sep.center, [3, 0])
    assert abs(sep.normal[0]) == pytest.approx(1.0)
    assert -sep.offset / sep.normal[0] == pytest.approx(3.0)


def test_square_corners():
    pts = [[0, 0], [2, 0], [0, 2], [2, 2]]
    sep = solve_mmc(pts)
    assert sep.margin == pytest.approx(1.0, abs=1e-10)
    assert min(abs(sep.normal[0]), abs(sep.normal[1])) == pytest.approx(0.0, abs=1e-9)
    assert mmc_sweep(pts) == pytest.approx(1.0, abs=1e-6)


def test_identical_points_have_no_separation():
    with pytest.raises(DegenerateInstanceError):
        solve_mmc([[1, 1], [1, 1]])


def test_needs_two_points():
    with pytest.raises(InputError):
        solve_mmc([[1, 0]])


def test_accepts_pointset_and_reports_both_sides():
    ps = PointSet(np.array([[0.5, 0.1], [-0.4, 0.2], [0.1, -0.6]]))
    sep = solve_mmc(ps)
    side = sep.side(ps.points)
    assert np.any(side > 0) and np.any(side < 0)
    assert sep.margin == pytest.approx(affine_margin(sep.normal, sep.offset, ps.points))
    rep = sep.to_report()
    assert rep["pair"] == list(sep.pair)


def test_any_exact_inner_solver():
    rng = np.random.default_rng(5)
    pts = rng.standard_normal((5, 2))
    a = solve_mmc(pts, solve_exact_bfs)
    b = solve_mmc(pts, solve_eps_net)
    assert a.margin == pytest.approx(b.margin, abs=1e-6)


def test_tie_keeps_first_pair():
    # a regular hexagon has many optimal pairs
    ang = np.arange(6) * math.pi / 3
    pts = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    sep = solve_mmc(pts)
    again = solve_mmc(pts)
    assert sep.pair == again.pair


@pytest.mark.parametrize("seed", range(12))
def test_matches_sweep(seed):
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((int(rng.integers(2, 7)), 2))
    assert abs(solve_mmc(pts).margin - mmc_sweep(pts)) <= 1e-4


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.integers(3, 6))
def test_dominates_fhp_when_origin_is_a_midpoint(seed, n):
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((n, 2))
    pts -= (pts[0] + pts[1]) / 2
    sep = solve_mmc(pts)
    s = np.linalg.norm(pts, axis=1).max()
    fhp = solve_exact_bfs(PointSet(pts / s)).margin * s
    assert sep.margin >= fhp - 1e-9
    side = sep.side(pts)
    assert np.any(side > 0) and np.any(side < 0)
