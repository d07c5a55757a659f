"""Hypothesis strategies for random distributions."""

import numpy as np
from hypothesis import strategies as st


@st.composite
def prob_arrays(draw, shape, min_mass=0.0):
    """Normalized non-negative array of the given shape (zeros allowed)."""
    size = int(np.prod(shape))
    w = draw(st.lists(st.floats(0.0, 1.0), min_size=size, max_size=size))
    w = np.asarray(w) + min_mass
    if w.sum() <= 0:
        w = np.ones(size)
    return (w / w.sum()).reshape(shape)


@st.composite
def stochastic(draw, rows, cols):
    return np.stack([draw(prob_arrays((cols,))) for _ in range(rows)])


sizes = st.integers(2, 3)
