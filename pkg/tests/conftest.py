import numpy as np
import pytest

from wkbrec import Constant, RecurrenceSpec, SinusoidalInEpsK


def complex_array(rng, shape, scale=1.0):
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def constant_spec(coeffs, horizon, k_start=0, forcing=0.0):
    """Constant-coefficient problem from plain numbers (f[0] first)."""
    return RecurrenceSpec(
        order=len(coeffs),
        coeffs=tuple(Constant(c) for c in coeffs),
        k_start=k_start,
        horizon=horizon,
        forcing=Constant(forcing),
    )


def sin_family(epsilon, horizon, amplitudes=(0.2, 0.1, -0.1), offsets=(-6, 11, -6), k_start=0):
    """Slowly varying third-order family with well-separated roots.

    The unperturbed polynomial has roots 1, 2, 3; the chosen amplitudes keep
    the roots separated by at least ~0.7 along the whole sweep range.
    """
    return RecurrenceSpec(
        order=3,
        coeffs=tuple(
            SinusoidalInEpsK(a, o, epsilon=epsilon) for a, o in zip(amplitudes, offsets)
        ),
        k_start=k_start,
        horizon=horizon,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def fib_spec():
    # y[k+2] = y[k+1] + y[k]
    return constant_spec([-1, -1], horizon=8)


@pytest.fixture
def cubic123_spec():
    # characteristic polynomial (x-1)(x-2)(x-3) = x^3 - 6x^2 + 11x - 6
    return constant_spec([-6, 11, -6], horizon=10)
