"""Problem definition and baseline propagators for linear difference equations.

An order-N linear difference equation

    y[k+N] + f[N-1](k) y[k+N-1] + ... + f[1](k) y[k+1] + f[0](k) y[k] + f(k) = 0

is described by a :class:`RecurrenceSpec`: N coefficient models ``f[0..N-1]``,
a forcing model ``f`` and an integer index window.  Two reference propagators
live here: :func:`direct_solve`, the plain scalar recursion used as the oracle
throughout the test suite, and :func:`companion_propagate`, the equivalent
companion-matrix bookkeeping.

All arithmetic is complex double precision even for real inputs; the
characteristic roots of real problems are generically complex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import IndexOutOfWindow, ZeroCoefficient

MIN_ORDER = 2
MAX_ORDER = 8


class CoefficientModel:
    """A complex-valued sequence over integer indices, ``model(k) -> complex``.

    Parametric models sample smooth functions at ``eps * k``; ``eps`` is the
    slow-variation parameter and ``eps = 0`` reduces them to constants.
    """

    def __call__(self, k: int) -> complex:
        raise NotImplementedError

    def with_epsilon(self, epsilon: float) -> "CoefficientModel":
        """Copy with the slow-variation parameter replaced (no-op if absent)."""
        return self

    def coverage(self) -> tuple[int, int] | None:
        """Inclusive index range the model is defined on, or None if total."""
        return None


@dataclass(frozen=True)
class Constant(CoefficientModel):
    value: complex

    def __call__(self, k: int) -> complex:
        return complex(self.value)


@dataclass(frozen=True, eq=False)
class Tabulated(CoefficientModel):
    """Explicit values for ``k = k_first .. k_first + len(values) - 1``."""

    values: np.ndarray
    k_first: int

    def __post_init__(self):
        object.__setattr__(self, "values", np.array(self.values, dtype=complex))

    def __call__(self, k: int) -> complex:
        i = k - self.k_first
        if i < 0 or i >= len(self.values):
            raise IndexOutOfWindow(
                f"tabulated model covers [{self.k_first}, "
                f"{self.k_first + len(self.values) - 1}]",
                k=k,
            )
        return complex(self.values[i])

    def coverage(self) -> tuple[int, int]:
        return self.k_first, self.k_first + len(self.values) - 1


@dataclass(frozen=True)
class PolynomialInEpsK(CoefficientModel):
    """Polynomial in ``eps * k`` with coefficients in ascending degree."""

    coeffs: tuple[complex, ...]
    epsilon: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")

    def __call__(self, k: int) -> complex:
        x = self.epsilon * k
        acc = 0.0 + 0.0j
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def with_epsilon(self, epsilon: float) -> "PolynomialInEpsK":
        return replace(self, epsilon=epsilon)


@dataclass(frozen=True)
class SinusoidalInEpsK(CoefficientModel):
    """``offset + amplitude * sin(frequency * eps * k + phase)``."""

    amplitude: complex
    offset: complex
    frequency: float = 1.0
    phase: float = 0.0
    epsilon: float = 0.0

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")

    def __call__(self, k: int) -> complex:
        arg = self.frequency * self.epsilon * k + self.phase
        return complex(self.offset) + complex(self.amplitude) * math.sin(arg)

    def with_epsilon(self, epsilon: float) -> "SinusoidalInEpsK":
        return replace(self, epsilon=epsilon)


@dataclass(frozen=True, eq=False)
class RecurrenceSpec:
    """Order, coefficient models ``f[0..N-1]``, forcing and index window.

    The window is ``[k_start, k_start + horizon + order]`` inclusive; every
    model must be defined on all of it, and ``f[0]`` must be nonzero there.
    ``horizon`` is the number of recursion steps taken by the propagators.
    """

    order: int
    coeffs: tuple[CoefficientModel, ...]
    k_start: int
    horizon: int
    forcing: CoefficientModel = Constant(0.0)

    def __post_init__(self):
        if not MIN_ORDER <= self.order <= MAX_ORDER:
            raise ValueError(
                f"order must be in [{MIN_ORDER}, {MAX_ORDER}], got {self.order}"
            )
        if self.horizon < 1:
            raise ValueError("horizon must be a positive integer")
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        if len(self.coeffs) != self.order:
            raise ValueError(
                f"expected {self.order} coefficient models, got {len(self.coeffs)}"
            )
        lo, hi = self.window
        for model in (*self.coeffs, self.forcing):
            rng = model.coverage()
            if rng is not None and (rng[0] > lo or rng[1] < hi):
                raise IndexOutOfWindow(
                    f"model covers [{rng[0]}, {rng[1]}] but the window "
                    f"is [{lo}, {hi}]"
                )
        f0 = self.coeffs[0]
        for k in range(lo, hi + 1):
            if f0(k) == 0:
                raise ZeroCoefficient("f[0] vanishes inside the window", k=k)

    @property
    def window(self) -> tuple[int, int]:
        return self.k_start, self.k_start + self.horizon + self.order

    def check_window(self, k: int) -> None:
        lo, hi = self.window
        if not lo <= k <= hi:
            raise IndexOutOfWindow(f"window is [{lo}, {hi}]", k=k)

    def coeff_array(self, k: int) -> np.ndarray:
        """``(f[0](k), ..., f[N-1](k))`` as a complex vector."""
        self.check_window(k)
        return np.array([m(k) for m in self.coeffs], dtype=complex)

    def forcing_value(self, k: int) -> complex:
        self.check_window(k)
        return complex(self.forcing(k))

    def is_homogeneous(self) -> bool:
        lo, hi = self.window
        return all(self.forcing(k) == 0 for k in range(lo, hi + 1))

    def with_epsilon(self, epsilon: float) -> "RecurrenceSpec":
        """Copy with the slow-variation parameter replaced in every model."""
        return replace(
            self,
            coeffs=tuple(m.with_epsilon(epsilon) for m in self.coeffs),
            forcing=self.forcing.with_epsilon(epsilon),
        )


@dataclass(frozen=True, eq=False)
class ScalarTrajectory:
    """Solution values ``y[k]`` for ``k = k_start .. k_start + len - 1``."""

    values: np.ndarray
    k_start: int

    def __post_init__(self):
        object.__setattr__(self, "values", np.array(self.values, dtype=complex))

    def __len__(self) -> int:
        return len(self.values)

    @property
    def k_last(self) -> int:
        return self.k_start + len(self.values) - 1

    def value_at(self, k: int) -> complex:
        i = k - self.k_start
        if i < 0 or i >= len(self.values):
            raise IndexOutOfWindow(
                f"trajectory covers [{self.k_start}, {self.k_last}]", k=k
            )
        return complex(self.values[i])


@dataclass(frozen=True, eq=False)
class CompanionState:
    """Stacked window ``(y[k+N-1], ..., y[k])``, newest value first."""

    entries: np.ndarray
    k: int

    def __post_init__(self):
        object.__setattr__(self, "entries", np.array(self.entries, dtype=complex))


def eval_coeffs(spec: RecurrenceSpec, k: int) -> np.ndarray:
    """Evaluate ``(f[0](k), ..., f[N-1](k), f(k))`` at one index.

    Deterministic; raises :class:`IndexOutOfWindow` outside the declared
    window (models are total functions over the window only, out-of-window
    access is an error rather than extrapolation).
    """
    return np.append(spec.coeff_array(k), spec.forcing_value(k))


def direct_solve(spec: RecurrenceSpec, initial) -> ScalarTrajectory:
    """Run the scalar recursion; the oracle for every other propagator.

    ``initial`` supplies ``y[k_start] .. y[k_start + N - 1]``.  Each step
    evaluates ``y[k+N] = -(f[N-1](k) y[k+N-1] + ... + f[0](k) y[k] + f(k))``
    in double-precision complex arithmetic, and the returned trajectory has
    ``horizon + N`` values.
    """
    initial = np.asarray(initial, dtype=complex)
    n = spec.order
    if initial.shape != (n,):
        raise ValueError(f"initial data must have length {n}")
    y = np.empty(spec.horizon + n, dtype=complex)
    y[:n] = initial
    for s in range(spec.horizon):
        k = spec.k_start + s
        f = spec.coeff_array(k)
        y[s + n] = -(f @ y[s : s + n] + spec.forcing_value(k))
    return ScalarTrajectory(values=y, k_start=spec.k_start)


def companion_matrix(spec: RecurrenceSpec, k: int) -> np.ndarray:
    """N x N one-step matrix: first row ``(-f[N-1], ..., -f[0])``, ones below."""
    f = spec.coeff_array(k)
    n = spec.order
    t = np.zeros((n, n), dtype=complex)
    t[0, :] = -f[::-1]
    t[np.arange(1, n), np.arange(n - 1)] = 1.0
    return t


def companion_propagate(spec: RecurrenceSpec, initial) -> ScalarTrajectory:
    """Propagate the stacked window ``X[k+1] = T(k) X[k] + F(k)``.

    Forcing enters as ``F(k) = (-f(k), 0, ..., 0)`` so the update matches the
    scalar recursion with the forcing moved to the right-hand side.  The
    result is the same trajectory as :func:`direct_solve` up to rounding.
    """
    initial = np.asarray(initial, dtype=complex)
    n = spec.order
    if initial.shape != (n,):
        raise ValueError(f"initial data must have length {n}")
    y = np.empty(spec.horizon + n, dtype=complex)
    y[:n] = initial
    state = CompanionState(entries=initial[::-1], k=spec.k_start)
    for s in range(spec.horizon):
        k = spec.k_start + s
        forcing = np.zeros(n, dtype=complex)
        forcing[0] = -spec.forcing_value(k)
        entries = companion_matrix(spec, k) @ state.entries + forcing
        state = CompanionState(entries=entries, k=k + 1)
        y[s + n] = entries[0]
    return ScalarTrajectory(values=y, k_start=spec.k_start)
