import math

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fhp.core import (
    DEFAULT_TOL,
    PointSet,
    Tolerances,
    labeling_of,
    margin_of,
    min_norm_point,
    normalize_instance,
    solve_labeled,
)
from fhp.errors import ConvergenceError, DegenerateInstanceError, InputError, NormalizationError

from oracles import labeled_bruteforce, pointset, rotation

R2 = 1 / math.sqrt(2)


# --- margin_of / labeling_of ------------------------------------------------

def test_margin_of_direct_products():
    assert margin_of([1, 0], pointset([[1, 0], [0.5, 0]])) == 0.5
    assert margin_of([0, 1], pointset([[1, 0]])) == 0.0
    assert margin_of([R2, R2], pointset([[1, 0]])) == pytest.approx(0.7071067811865476, abs=1e-15)


def test_margin_of_rejects_non_unit():
    with pytest.raises(NormalizationError):
        margin_of([1, 1], pointset([[1, 0]]))


def test_margin_of_rejects_wrong_dimension():
    with pytest.raises(InputError):
        margin_of([1, 0, 0], pointset([[1, 0]]))


def test_labeling_of_signs():
    assert labeling_of([1, 0], pointset([[1, 0], [-1, 0]])).labels == (1, -1)
    assert labeling_of([0.6, 0.8], pointset([[1, 0], [0, -1]])).labels == (1, -1)


def test_labeling_of_tie_goes_positive():
    lab = labeling_of([0, 1], pointset([[1, 0]]))
    assert lab.labels == (1,)
    # the labeling itself is still realisable, by w = (1, 0)
    assert lab.feasible and lab.solved_margin == pytest.approx(1.0)


# --- solve_labeled -----------------------------------------------------------

def test_single_point():
    lab = solve_labeled([1], pointset([[1, 0]]))
    assert lab.feasible
    assert lab.solved_margin == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(lab.witness.normal, [1, 0], atol=1e-12)


def test_two_orthogonal_points_same_side():
    lab = solve_labeled([1, 1], pointset([[1, 0], [0, 1]]))
    assert lab.solved_margin == pytest.approx(R2, abs=1e-10)
    np.testing.assert_allclose(lab.witness.normal, [R2, R2], atol=1e-10)


def test_segment_min_norm_against_grid():
    t = np.linspace(0, 1, 100_001)
    seg = np.stack([t, 1 - t], axis=1)
    grid_min = np.linalg.norm(seg, axis=1).min()
    lab = solve_labeled([1, 1], pointset([[1, 0], [0, 1]]))
    assert abs(lab.solved_margin - grid_min) < 1e-9


def test_opposite_points_same_label_infeasible():
    lab = solve_labeled([1, 1], pointset([[1, 0], [-1, 0]]))
    assert not lab.feasible
    assert lab.solved_margin == 0.0
    assert lab.witness is None


def test_zero_point_makes_every_labeling_infeasible():
    ps = pointset([[1, 0], [0, 0]])
    assert not solve_labeled([1, 1], ps).feasible
    assert not solve_labeled([1, -1], ps).feasible


def test_bad_labels_rejected():
    ps = pointset([[1, 0], [0, 1]])
    with pytest.raises(InputError):
        solve_labeled([1], ps)
    with pytest.raises(InputError):
        solve_labeled([1, 0], ps)


def test_iteration_cap_raises_with_bounds():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((40, 8)) + 3.0
    A /= np.linalg.norm(A, axis=1).max()
    with pytest.raises(ConvergenceError) as err:
        min_norm_point(A, tol_mnp=1e-300, tol_zero=1e-300, max_iter=2)
    assert err.value.lower is not None and err.value.upper is not None
    assert err.value.lower <= err.value.upper


# --- normalize_instance / PointSet -----------------------------------------

@pytest.mark.parametrize(
    "raw, expect, scale",
    [
        ([[2, 0]], [[1, 0]], 2.0),
        ([[1, 0], [0, 0.5]], [[1, 0], [0, 0.5]], 1.0),
        ([[3, 4]], [[0.6, 0.8]], 5.0),
    ],
)
def test_normalize_examples(raw, expect, scale):
    ps = normalize_instance(raw)
    np.testing.assert_allclose(ps.points, expect, atol=1e-15)
    assert ps.scale == scale


def test_normalize_all_zero():
    with pytest.raises(DegenerateInstanceError):
        normalize_instance([[0, 0], [0, 0]])


def test_pointset_rejects_long_points():
    with pytest.raises(InputError):
        PointSet(np.array([[1.0, 1.0]]))


def test_pointset_accepts_norm_within_tolerance():
    PointSet(np.array([[1 + 5e-10, 0.0]]))


def test_pointset_is_immutable():
    ps = pointset([[1, 0]])
    with pytest.raises(ValueError):
        ps.points[0, 0] = 0.5


def test_pointset_rejects_empty():
    with pytest.raises(InputError):
        PointSet(np.zeros((0, 2)))


def test_tolerance_defaults():
    assert DEFAULT_TOL == Tolerances(norm=1e-9, unit=1e-12, feas=1e-9, mnp=1e-10)


# --- properties ---------------------------------------------------------------

small = st.integers(1, 6).flatmap(
    lambda n: st.integers(1, 3).flatmap(
        lambda d: st.tuples(
            arrays(np.float64, (n, d), elements=st.floats(-1, 1, allow_nan=False, width=64)),
            st.lists(st.sampled_from([1, -1]), min_size=n, max_size=n),
        )
    )
)


def _ps(raw):
    if not np.any(raw):
        raw = raw.copy()
        raw[0, 0] = 1.0
    return normalize_instance(raw)


@settings(max_examples=150, deadline=None)
@given(small)
def test_witness_certifies_solved_margin(case):
    raw, y = case
    ps = _ps(raw)
    lab = solve_labeled(y, ps)
    assert lab.feasible == (lab.solved_margin > DEFAULT_TOL.feas)
    if lab.feasible:
        w = lab.witness.normal
        dots = ps.points @ w
        assert abs(np.linalg.norm(w) - 1) <= 1e-12
        assert margin_of(w, ps) >= lab.solved_margin - DEFAULT_TOL.feas
        assert np.all(np.asarray(y) * dots >= lab.solved_margin - DEFAULT_TOL.feas)
        clear = np.abs(dots) > DEFAULT_TOL.feas
        got = np.array(labeling_of(w, ps).labels)
        assert np.array_equal(got[clear], np.asarray(y)[clear])


@settings(max_examples=150, deadline=None)
@given(small)
def test_negation_symmetry(case):
    raw, y = case
    ps = _ps(raw)
    a = solve_labeled(y, ps)
    b = solve_labeled([-v for v in y], ps)
    assert a.feasible == b.feasible
    assert abs(a.solved_margin - b.solved_margin) <= 1e-9


@settings(max_examples=100, deadline=None)
@given(small, st.integers(0, 2**32 - 1))
def test_margin_rotation_invariant(case, seed):
    raw, _ = case
    ps = _ps(raw)
    rng = np.random.default_rng(seed)
    Q = rotation(ps.d, rng)
    w = rng.standard_normal(ps.d)
    w /= np.linalg.norm(w)
    w2 = Q @ w
    w2 /= np.linalg.norm(w2)
    rotated = PointSet(ps.points @ Q.T, tol_norm=1e-9)
    assert abs(margin_of(w, ps) - margin_of(w2, rotated)) <= 1e-9


@pytest.mark.slow
@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(small, st.integers(0, 1000))
def test_solve_labeled_matches_bruteforce(case, seed):
    raw, y = case
    ps = _ps(raw)
    lab = solve_labeled(y, ps)
    ref = labeled_bruteforce(y, ps.points, seed=seed)
    assert abs(lab.solved_margin - ref) <= 1e-4
