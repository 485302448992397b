"""Sum decomposition of a scalar recurrence into N coupled components.

The scalar solution is split as ``y[k] = sum_n y[n,k]`` and the N-1 shifted
values are distributed over the components by gauge rows:

    y[k+m] = sum_n g[m,n,k] y[n,k],    m = 1 .. N-1.

Stacking a row of ones on top of the gauge rows gives the square matrix that
must be nonsingular for the split to be unique.  One index step is then the
exact linear system

    M[k+1] Y[k+1] = H[k+1] Y[k] + (0, ..., 0, -f(k))

where M[k+1] carries the gauge at k+1, the first N-1 rows of H[k+1] carry the
gauge at k, and the last row of H folds the recurrence coefficients through
the gauge.  The transformation is exact for every admissible gauge; the gauge
only changes how the solution is split, never the reconstructed sum.

Linear systems are solved per step by partial-pivot elimination
(``numpy.linalg.solve``) rather than by forming an explicit inverse; each
solve is residual-checked.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import MAX_ORDER, MIN_ORDER, RecurrenceSpec
from .errors import SingularGauge

# |det| relative to the product of column norms (the Hadamard bound), a
# scale-free measure in [0, 1]; the row of ones keeps every column norm at
# least one.  Scaling by the product rather than a power of the largest norm
# keeps well-conditioned gauges with very unequal column sizes admissible.
ADMISSIBILITY_THRESHOLD = 1e-12

# Relative residual allowed on every per-step linear solve.
SOLVE_RESIDUAL_TOL = 1e-10

_TINY = np.finfo(float).tiny


@dataclass(frozen=True, eq=False)
class GaugeSet:
    """Gauge rows at one index: ``g[m-1, n-1] = g[m,n,k]``, shape (N-1, N)."""

    k: int
    g: np.ndarray

    def __post_init__(self):
        g = np.array(self.g, dtype=complex)
        if g.ndim != 2 or g.shape[0] != g.shape[1] - 1:
            raise ValueError(f"gauge rows must have shape (N-1, N), got {g.shape}")
        if not MIN_ORDER <= g.shape[1] <= MAX_ORDER:
            raise ValueError(f"order must be in [{MIN_ORDER}, {MAX_ORDER}]")
        object.__setattr__(self, "g", g)

    @property
    def order(self) -> int:
        return self.g.shape[1]

    def stacked(self) -> np.ndarray:
        """Row of ones stacked on the gauge rows (the M-shaped matrix)."""
        return np.vstack([np.ones(self.order, dtype=complex), self.g])

    def admissibility(self) -> float:
        """``|det|`` of the stacked matrix relative to its Hadamard bound."""
        a = self.stacked()
        scale = float(np.prod(np.linalg.norm(a, axis=0)))
        return abs(np.linalg.det(a)) / scale

    def is_admissible(self, threshold: float = ADMISSIBILITY_THRESHOLD) -> bool:
        return self.admissibility() > threshold


@dataclass(frozen=True, eq=False)
class ComponentVector:
    """Decomposed state ``Y[k] = (y[1,k], ..., y[N,k])``."""

    k: int
    y: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "y", np.array(self.y, dtype=complex))

    @property
    def order(self) -> int:
        return len(self.y)


@dataclass(frozen=True, eq=False)
class StepMatrices:
    """The matrices of one step: M, H, the folded last row of H, and T."""

    M: np.ndarray
    H: np.ndarray
    A_row: np.ndarray
    T: np.ndarray


def _checked_stacked(gauge: GaugeSet) -> np.ndarray:
    if not gauge.is_admissible():
        raise SingularGauge(
            f"gauge admissibility {gauge.admissibility():.3e} below threshold",
            k=gauge.k,
        )
    return gauge.stacked()


def _residual_checked_solve(a: np.ndarray, b: np.ndarray, k: int | None):
    try:
        x = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise SingularGauge(f"linear solve failed: {exc}", k=k) from exc
    residual = np.max(np.abs(a @ x - b))
    scale = max(float(np.max(np.abs(b))), _TINY)
    if residual > SOLVE_RESIDUAL_TOL * scale:
        raise SingularGauge(
            f"solve residual {residual / scale:.3e} above {SOLVE_RESIDUAL_TOL:g}",
            k=k,
        )
    return x


def build_M(gauge_next: GaugeSet) -> np.ndarray:
    """Left-hand matrix of the step: ones row, then the gauge rows at k+1."""
    return _checked_stacked(gauge_next)


def build_H(gauge_now: GaugeSet, coeffs) -> np.ndarray:
    """Right-hand matrix of the step.

    Rows 1..N-1 copy the gauge rows at k.  The last row is

        A[n] = -(sum_{m=1}^{N-1} f[m] g[m,n,k] + f[0])

    which reproduces y[k+N] from the recurrence once the shifted values are
    expressed through the gauge.  With the power gauge of characteristic
    roots it collapses to the N-th powers of the roots.
    """
    f = np.asarray(coeffs, dtype=complex)
    n = gauge_now.order
    if f.shape != (n,):
        raise ValueError(f"expected {n} coefficients, got {f.shape}")
    h = np.empty((n, n), dtype=complex)
    h[: n - 1] = gauge_now.g
    h[n - 1] = -(f[1:] @ gauge_now.g + f[0])
    return h


def decompose_initial(scalar_values, gauge: GaugeSet) -> ComponentVector:
    """Split a scalar window ``(y[k0], ..., y[k0+N-1])`` into components.

    Solves the stacked gauge system at k0, so the components reproduce both
    the sum and every gauge condition at that index.
    """
    b = np.asarray(scalar_values, dtype=complex)
    if b.shape != (gauge.order,):
        raise ValueError(f"expected {gauge.order} scalar values, got {b.shape}")
    a = _checked_stacked(gauge)
    return ComponentVector(k=gauge.k, y=_residual_checked_solve(a, b, gauge.k))


def step(
    Y: ComponentVector,
    gauge_now: GaugeSet,
    gauge_next: GaugeSet,
    coeffs,
    forcing: complex = 0.0,
) -> ComponentVector:
    """Advance the component vector one index, exactly.

    ``coeffs`` are ``(f[0](k), ..., f[N-1](k))`` and ``forcing`` is ``f(k)``,
    all at the departure index ``k = Y.k``; the forcing enters the last row
    of the right-hand side with a minus sign.
    """
    if gauge_now.k != Y.k or gauge_next.k != Y.k + 1:
        raise ValueError(
            f"gauge indices ({gauge_now.k}, {gauge_next.k}) do not bracket k={Y.k}"
        )
    m = build_M(gauge_next)
    rhs = build_H(gauge_now, coeffs) @ Y.y
    rhs[-1] -= forcing
    return ComponentVector(k=Y.k + 1, y=_residual_checked_solve(m, rhs, Y.k + 1))


def reconstruct(Y: ComponentVector) -> complex:
    """The scalar solution value at Y.k: the sum of the components."""
    return complex(np.sum(Y.y))


def transfer_matrix(gauge_now: GaugeSet, gauge_next: GaugeSet, coeffs) -> np.ndarray:
    """One-step matrix T with ``Y[k+1] = T Y[k]`` for the homogeneous part.

    Obtained by solving ``M T = H`` column by column; the solve residual is
    checked against :data:`SOLVE_RESIDUAL_TOL` relative to ``H``.
    """
    m = build_M(gauge_next)
    h = build_H(gauge_now, coeffs)
    try:
        t = np.linalg.solve(m, h)
    except np.linalg.LinAlgError as exc:
        raise SingularGauge(f"linear solve failed: {exc}", k=gauge_next.k) from exc
    residual = np.max(np.abs(m @ t - h))
    scale = max(float(np.max(np.abs(h))), _TINY)
    if residual > SOLVE_RESIDUAL_TOL * scale:
        raise SingularGauge(
            f"transfer-matrix residual {residual / scale:.3e} above tolerance",
            k=gauge_next.k,
        )
    return t


def step_matrices(gauge_now: GaugeSet, gauge_next: GaugeSet, coeffs) -> StepMatrices:
    """Bundle M, H, the folded row and T for one step (diagnostics helper)."""
    m = build_M(gauge_next)
    h = build_H(gauge_now, coeffs)
    t = transfer_matrix(gauge_now, gauge_next, coeffs)
    return StepMatrices(M=m, H=h, A_row=h[-1].copy(), T=t)


def propagate(spec: RecurrenceSpec, initial, gauges) -> tuple[np.ndarray, list[ComponentVector]]:
    """Propagate under a per-index gauge sequence and reconstruct.

    ``gauges`` must supply one :class:`GaugeSet` per index
    ``k_start .. k_start + horizon``.  Returns the reconstructed values
    ``y[k]`` on that range together with the component vectors.
    """
    gauges = list(gauges)
    if len(gauges) != spec.horizon + 1:
        raise ValueError(
            f"need {spec.horizon + 1} gauge sets, got {len(gauges)}"
        )
    for j, gauge in enumerate(gauges):
        if gauge.k != spec.k_start + j:
            raise ValueError(
                f"gauge {j} has k={gauge.k}, expected {spec.k_start + j}"
            )
    Y = decompose_initial(np.asarray(initial, dtype=complex), gauges[0])
    values = np.empty(spec.horizon + 1, dtype=complex)
    values[0] = reconstruct(Y)
    components = [Y]
    for s in range(spec.horizon):
        k = spec.k_start + s
        Y = step(Y, gauges[s], gauges[s + 1], spec.coeff_array(k), spec.forcing_value(k))
        values[s + 1] = reconstruct(Y)
        components.append(Y)
    return values, components
