import numpy as np
import pytest
from hypothesis import given, settings

from epiuq import (
    check_prediction_set,
    check_prediction_stack,
    check_probability_vector,
    entropy,
    mean_prediction,
)
from epiuq.simplex import binary_entropy

from conftest import prediction_sets


def test_check_probability_vector_accepts_valid():
    p = check_probability_vector([0.2, 0.3, 0.5])
    assert p.shape == (3,)
    assert p.dtype == np.float64


def test_check_probability_vector_renormalizes_small_drift():
    p = check_probability_vector([0.2 * 1.00005, 0.8 * 1.00005])
    assert abs(p.sum() - 1.0) <= 1e-6


def test_check_probability_vector_rejects_large_drift():
    with pytest.raises(ValueError):
        check_probability_vector([0.6, 0.6])


def test_check_probability_vector_rejects_negative():
    with pytest.raises(ValueError):
        check_probability_vector([-0.1, 1.1])


def test_check_probability_vector_rejects_nan():
    with pytest.raises(ValueError):
        check_probability_vector([np.nan, 1.0])


def test_check_prediction_set_shape_and_k():
    b = check_prediction_set([[0.5, 0.5], [0.1, 0.9]])
    assert b.shape == (2, 2)


def test_check_prediction_set_rejects_single_class():
    with pytest.raises(ValueError):
        check_prediction_set([[1.0], [1.0]])


def test_check_prediction_set_rejects_empty():
    with pytest.raises(ValueError):
        check_prediction_set(np.empty((0, 3)))


def test_check_prediction_set_rejects_1d():
    with pytest.raises(ValueError):
        check_prediction_set([0.5, 0.5])


def test_check_prediction_stack_shape():
    x = np.full((4, 3, 2), 0.5)
    out = check_prediction_stack(x)
    assert out.shape == (4, 3, 2)
    with pytest.raises(ValueError):
        check_prediction_stack(np.full((4, 3), 0.5))


@given(prediction_sets())
@settings(max_examples=60, deadline=None)
def test_check_prediction_set_rows_sum_to_one(b):
    out = check_prediction_set(b)
    assert np.all(np.abs(out.sum(axis=1) - 1.0) <= 1e-6)


def test_entropy_uniform_and_onehot():
    assert entropy(np.array([0.5, 0.5])) == 1.0
    assert entropy(np.array([1.0, 0.0])) == 0.0
    assert entropy(np.array([0.25] * 4)) == pytest.approx(2.0, abs=1e-12)


def test_entropy_zero_entries_ignored():
    # 0 * log(0) contributes nothing
    a = entropy(np.array([0.5, 0.5, 0.0]))
    assert a == pytest.approx(1.0, abs=1e-12)


def test_binary_entropy_matches_entropy():
    for x in (0.0, 0.113, 0.5, 0.887, 1.0):
        assert binary_entropy(x) == pytest.approx(
            entropy(np.array([x, 1.0 - x])), abs=1e-12
        )


def test_mean_prediction_values():
    b = np.array([[0.2, 0.8], [0.5, 0.5], [0.9, 0.1]])
    mp = mean_prediction(b)
    assert np.allclose(mp.mean, [1.6 / 3, 1.4 / 3], atol=1e-12)
    assert mp.argmax_class == 0


def test_mean_prediction_tie_goes_to_lowest_index():
    b = np.array([[0.5, 0.5], [0.5, 0.5]])
    assert mean_prediction(b).argmax_class == 0


@given(prediction_sets())
@settings(max_examples=60, deadline=None)
def test_mean_prediction_stays_on_simplex(b):
    mp = mean_prediction(b)
    assert abs(mp.mean.sum() - 1.0) <= 1e-9
    assert np.all(mp.mean >= -1e-15)
