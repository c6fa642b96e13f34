import numpy as np
import pytest
from hypothesis import given, settings

from epiuq import (
    SimplexGrid,
    grid_minimize,
    label_wise_variance,
    mutual_information,
    wasserstein_dispersion,
)
from epiuq.distribution import WD_METHODS

from conftest import binary_prediction_sets, prediction_sets, random_prediction_set

# frozen: independent fsum recomputation of the three-member binary set
B_BINARY = np.array([[0.2, 0.8], [0.5, 0.5], [0.9, 0.1]])
MI_BINARY = 0.26648373582275553
LWV_BINARY = 0.16444444444444448
WD_BINARY = 0.7

# frozen: analytic transport optimum, cross-checked on a 0.005 lattice
B_THREE = np.array([[0.6, 0.3, 0.1], [0.4, 0.5, 0.1], [0.5, 0.2, 0.3]])
WD_THREE = 0.4


def test_mutual_information_frozen():
    assert mutual_information(B_BINARY) == pytest.approx(MI_BINARY, abs=1e-12)


def test_label_wise_variance_frozen():
    assert label_wise_variance(B_BINARY) == pytest.approx(LWV_BINARY, abs=1e-12)


def test_wasserstein_dispersion_frozen_binary():
    # the scalar median absolute-deviation sum: |0.2-0.5| + 0 + |0.9-0.5|
    assert wasserstein_dispersion(B_BINARY) == pytest.approx(WD_BINARY, abs=1e-12)
    assert wasserstein_dispersion(B_BINARY, method="dual") == pytest.approx(
        WD_BINARY, abs=1e-9
    )


def test_wasserstein_dispersion_frozen_three_class():
    assert wasserstein_dispersion(B_THREE) == pytest.approx(WD_THREE, abs=1e-12)


def test_wasserstein_dispersion_simplex_corners():
    corners = np.eye(3)
    assert wasserstein_dispersion(corners) == pytest.approx(2.0, abs=1e-12)


def test_wd_method_validation():
    assert set(WD_METHODS) == {"auto", "dual", "median"}
    with pytest.raises(ValueError):
        wasserstein_dispersion(B_BINARY, method="simplex")
    with pytest.raises(ValueError):
        wasserstein_dispersion(B_THREE, method="median")


def test_identical_members_score_exactly_zero():
    b = np.tile([0.3, 0.3, 0.4], (5, 1))
    assert mutual_information(b) == 0.0
    assert label_wise_variance(b) == 0.0
    assert wasserstein_dispersion(b) == 0.0


def test_single_member_scores_zero():
    b = np.array([[0.1, 0.9]])
    assert mutual_information(b) == 0.0
    assert label_wise_variance(b) == 0.0
    assert wasserstein_dispersion(b) == 0.0


def test_label_wise_variance_matches_population_variance():
    rng = np.random.default_rng(5)
    for _ in range(50):
        b = random_prediction_set(rng, rng.integers(2, 7), rng.integers(2, 6))
        want = float(b.var(axis=0).sum())
        assert label_wise_variance(b) == pytest.approx(want, abs=1e-12)


@given(prediction_sets())
@settings(max_examples=80, deadline=None)
def test_distribution_measures_nonnegative(b):
    assert mutual_information(b) >= 0.0
    assert label_wise_variance(b) >= 0.0
    assert wasserstein_dispersion(b) >= 0.0


@given(prediction_sets(min_m=2))
@settings(max_examples=60, deadline=None)
def test_member_order_invariance(b):
    perm = np.random.default_rng(0).permutation(len(b))
    shuffled = b[perm]
    assert mutual_information(shuffled) == pytest.approx(
        mutual_information(b), abs=1e-12
    )
    assert label_wise_variance(shuffled) == pytest.approx(
        label_wise_variance(b), abs=1e-12
    )
    assert wasserstein_dispersion(shuffled) == pytest.approx(
        wasserstein_dispersion(b), abs=1e-12
    )


@given(prediction_sets(min_m=2))
@settings(max_examples=60, deadline=None)
def test_class_relabeling_invariance(b):
    perm = np.random.default_rng(1).permutation(b.shape[1])
    relabeled = b[:, perm]
    assert mutual_information(relabeled) == pytest.approx(
        mutual_information(b), abs=1e-12
    )
    assert label_wise_variance(relabeled) == pytest.approx(
        label_wise_variance(b), abs=1e-12
    )
    assert wasserstein_dispersion(relabeled) == pytest.approx(
        wasserstein_dispersion(b), abs=1e-12
    )


@given(binary_prediction_sets(min_m=2))
@settings(max_examples=80, deadline=None)
def test_binary_median_route_equals_dual_route(b):
    fast = wasserstein_dispersion(b, method="median")
    dual = wasserstein_dispersion(b, method="dual")
    assert fast == pytest.approx(dual, abs=1e-9)


def test_dual_center_optimality_against_grid(rng):
    # transport cost at the dual optimum never exceeds the best lattice point
    for k in (2, 3):
        grid = SimplexGrid(k, 0.01 if k == 2 else 0.02)
        for _ in range(20):
            b = random_prediction_set(rng, int(rng.integers(2, 6)), k)

            def cost(pts):
                return 0.5 * np.abs(b[None, :, :] - pts[:, None, :]).sum(axis=(1, 2))

            best = grid_minimize(cost, grid, vectorized=True)
            got = wasserstein_dispersion(b, method="dual")
            assert got <= best.value + 1e-9


def test_mi_upper_bounded_by_mean_entropy():
    rng = np.random.default_rng(9)
    for _ in range(50):
        b = random_prediction_set(rng, 4, 3)
        assert mutual_information(b) <= np.log2(3) + 1e-12
