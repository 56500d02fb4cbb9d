from __future__ import annotations

import os
from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def small_ints(bound: int = 4):
    return st.integers(-bound, bound)


def small_fractions(bound: int = 4, max_den: int = 4):
    return st.builds(Fraction, st.integers(-bound, bound), st.integers(1, max_den))


@st.composite
def int_matrices(draw, max_rows: int = 4, max_cols: int = 4, bound: int = 5):
    r = draw(st.integers(0, max_rows))
    c = draw(st.integers(0, max_cols))
    return [[draw(small_ints(bound)) for _ in range(c)] for _ in range(r)], r, c
