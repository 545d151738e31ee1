"""Hypothesis strategies shared by the property tests."""

import numpy as np
from hypothesis import strategies as st

from szego.rational import RationalSymbol

finite = dict(allow_nan=False, allow_infinity=False)


@st.composite
def complex_numbers(draw, scale=2.0):
    return complex(draw(st.floats(-scale, scale, **finite)), draw(st.floats(-scale, scale, **finite)))


@st.composite
def lower_poles(draw, r_min=0.5, r_max=3.0):
    return complex(draw(st.floats(-3, 3, **finite)), -draw(st.floats(r_min, r_max, **finite)))


@st.composite
def rational_symbols(draw, max_poles=3, max_order=2, r_min=0.5):
    n = draw(st.integers(1, max_poles))
    poles = []
    while len(poles) < n:
        p = draw(lower_poles(r_min=r_min))
        if all(abs(p - q) > 0.3 for q in poles):
            poles.append(p)
        else:
            break
    terms = []
    for p in poles:
        order = draw(st.integers(1, max_order))
        for m in range(1, order + 1):
            c = draw(complex_numbers())
            if m == order and abs(c) < 0.1:
                c = 1.0
            terms.append((p, m, c))
    return RationalSymbol.from_terms(terms)


@st.composite
def hardy_coeffs(draw, n_modes, band=32):
    """Random coefficients on modes 0..band of an n_modes field."""
    seed = draw(st.integers(0, 2**32 - 1))
    amp = draw(st.floats(0.01, 1.0, **finite))
    rng = np.random.default_rng(seed)
    c = np.zeros(n_modes, dtype=complex)
    c[: band + 1] = amp * (rng.normal(size=band + 1) + 1j * rng.normal(size=band + 1)) / np.sqrt(band)
    return c
