"""Shared helpers and hypothesis strategies for the test suite."""

import numpy as np
import pytest
from hypothesis import strategies as st

_capture_manager = None


def pytest_configure(config):
    global _capture_manager
    _capture_manager = config.pluginmanager.getplugin("capturemanager")


def emit_line(text: str) -> None:
    """Print to the real stdout even under pytest's fd-level capture."""
    if _capture_manager is not None:
        with _capture_manager.global_and_fixture_disabled():
            print(text, flush=True)
    else:
        print(text, flush=True)


def random_prediction_set(rng, m, k):
    """Draw m rows from a flat Dirichlet over k classes."""
    return rng.dirichlet(np.ones(k), size=m)


def random_prediction_stack(rng, n, m, k):
    return rng.dirichlet(np.ones(k), size=(n, m))


@st.composite
def prediction_sets(draw, min_m=1, max_m=6, min_k=2, max_k=6):
    """Valid prediction sets with rows bounded away from the simplex boundary.

    Keeping entries >= 0.01 before normalization avoids degenerate float
    pathologies that the validation layer is tested on separately.
    """
    m = draw(st.integers(min_m, max_m))
    k = draw(st.integers(min_k, max_k))
    rows = draw(
        st.lists(
            st.lists(
                st.floats(0.01, 1.0, allow_nan=False, allow_infinity=False),
                min_size=k,
                max_size=k,
            ),
            min_size=m,
            max_size=m,
        )
    )
    arr = np.asarray(rows, dtype=float)
    arr /= arr.sum(axis=1, keepdims=True)
    return arr


@st.composite
def binary_prediction_sets(draw, min_m=1, max_m=8):
    m = draw(st.integers(min_m, max_m))
    p0 = draw(
        st.lists(
            st.floats(0.0, 1.0, allow_nan=False, allow_infinity=False),
            min_size=m,
            max_size=m,
        )
    )
    arr = np.empty((m, 2))
    arr[:, 0] = p0
    arr[:, 1] = 1.0 - arr[:, 0]
    return arr


@pytest.fixture
def rng():
    return np.random.default_rng(17041)
