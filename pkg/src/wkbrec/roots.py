"""Characteristic roots per index and the machinery built on them.

At each index k the frozen-coefficient characteristic polynomial

    p(rho) = rho^N + f[N-1](k) rho^(N-1) + ... + f[1](k) rho + f[0](k)

has N complex roots.  This module finds them simultaneously (Aberth-Ehrlich
iteration with warm starting), carries consistent branch labels from one
index to the next, builds the power gauge ``g[m,n,k] = rho[n,k]**m`` whose
stacked matrix is the Vandermonde matrix of the roots, and provides that
matrix's closed-form inverse through elementary symmetric polynomials.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import RecurrenceSpec
from .decomposition import GaugeSet
from .errors import (
    AmbiguousTracking,
    DegenerateRoots,
    NoConvergence,
    RecurrenceError,
    ZeroCoefficient,
)

DEFAULT_ROOT_TOL = 1e-10
ABERTH_MAX_ITER = 200
ABERTH_UPDATE_TOL = 1e-13
# Pairwise root separation below this fraction of the largest magnitude is
# treated as a degenerate root set (the decomposition requires distinct roots).
SEPARATION_THRESHOLD = 1e-8
# Two branch assignments whose total distances differ by less than this
# (times the root scale) cannot be told apart.
TIE_THRESHOLD = 1e-12


@dataclass(frozen=True, eq=False)
class RootFrame:
    """Labelled characteristic roots at one index.

    ``roots[n]`` is branch n; ``residuals[n]`` is ``|p(roots[n])|`` as a
    diagnostic of root quality (NaN when not computed).
    """

    k: int
    roots: np.ndarray
    residuals: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "roots", np.array(self.roots, dtype=complex))
        object.__setattr__(self, "residuals", np.array(self.residuals, dtype=float))

    @property
    def order(self) -> int:
        return len(self.roots)


@dataclass(frozen=True, eq=False)
class SigmaTable:
    """``entries[i, j]``: degree-j elementary symmetric polynomial of the
    roots with branch i left out; column 0 is identically one."""

    entries: np.ndarray


def _descending(coeffs: np.ndarray) -> np.ndarray:
    """Monic coefficients in descending degree: (1, f[N-1], ..., f[0])."""
    return np.concatenate(([1.0 + 0.0j], coeffs[::-1]))


def _polyval(c_desc: np.ndarray, z: np.ndarray) -> np.ndarray:
    acc = np.full_like(np.asarray(z, dtype=complex), c_desc[0])
    for c in c_desc[1:]:
        acc = acc * z + c
    return acc


def root_residuals(coeffs, roots) -> np.ndarray:
    """``|p(root)|`` for each root of the monic characteristic polynomial."""
    c = _descending(np.asarray(coeffs, dtype=complex))
    return np.abs(_polyval(c, np.asarray(roots, dtype=complex)))


def min_separation(roots) -> float:
    roots = np.asarray(roots, dtype=complex)
    diff = np.abs(roots[:, None] - roots[None, :])
    np.fill_diagonal(diff, np.inf)
    return float(diff.min())


def _prepare_seed(z: np.ndarray, radius: float) -> np.ndarray:
    # Two traps to avoid: exactly coincident iterates blow up the repulsion
    # terms, and exactly real iterates of a real polynomial can never reach
    # a complex-conjugate pair (the real axis is an invariant subspace of
    # the iteration).  A deterministic, branch-dependent nudge off the real
    # axis breaks both; it costs at most a couple of extra sweeps.
    z = z + 1j * 1e-8 * radius * (np.arange(len(z)) + 1.0)
    for i in range(1, len(z)):
        while np.min(np.abs(z[:i] - z[i])) < 1e-14 * radius:
            z[i] += (i + 1) * 1e-7 * radius * (0.6 + 0.8j)
    return z


def characteristic_roots(
    coeffs,
    tol: float = DEFAULT_ROOT_TOL,
    seed=None,
    max_iter: int = ABERTH_MAX_ITER,
) -> np.ndarray:
    """All N roots of the monic characteristic polynomial, unordered.

    ``coeffs`` are ``(f[0], ..., f[N-1])`` in ascending degree.  The roots
    are found by simultaneous Aberth-Ehrlich iteration, initialised on a
    circle of radius ``1 + max|f|`` (a bound on every root) or on ``seed``
    when warm starting from a neighbouring index.  Convergence requires the
    largest update to drop below ``1e-13`` times that radius within
    ``max_iter`` sweeps, and every root must satisfy

        |p(root)| <= tol * (1 + sum|f|) * max(1, |root|)**N

    or :class:`NoConvergence` is raised.
    """
    f = np.asarray(coeffs, dtype=complex)
    n = len(f)
    if n < 1:
        raise ValueError("need at least one coefficient")
    if f[0] == 0:
        raise ZeroCoefficient("zero constant term implies a zero root")
    c = _descending(f)
    dc = c[:-1] * np.arange(n, 0, -1)
    radius = 1.0 + float(np.max(np.abs(f)))
    if seed is None:
        angles = 2.0 * np.pi * np.arange(n) / n + np.pi / (2.0 * n) + 0.3 / n
        z = radius * np.exp(1j * angles)
    else:
        z = np.asarray(seed, dtype=complex)
        if z.shape != (n,):
            raise ValueError(f"seed must supply {n} start values")
        z = _prepare_seed(z, radius)

    converged = False
    for _ in range(max_iter):
        p = _polyval(c, z)
        dp = _polyval(dc, z)
        bad = dp == 0
        if np.any(bad):
            z = np.where(bad, z * (1.0 + 1e-7) + 1e-7 * radius, z)
            continue
        ratio = p / dp
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        repulsion = (1.0 / diff).sum(axis=1)
        denom = 1.0 - ratio * repulsion
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.where(denom == 0, ratio, ratio / denom)
        if not np.all(np.isfinite(w)):
            z = np.where(np.isfinite(w), z, z * (1.0 + 1e-7) + 1e-7 * radius)
            continue
        z = z - w
        if np.max(np.abs(w)) < ABERTH_UPDATE_TOL * radius:
            converged = True
            break
    if not converged:
        raise NoConvergence(f"no convergence within {max_iter} iterations")
    residuals = np.abs(_polyval(c, z))
    scale = (1.0 + np.abs(f).sum()) * np.maximum(1.0, np.abs(z)) ** n
    if np.any(residuals > tol * scale):
        worst = int(np.argmax(residuals / scale))
        raise NoConvergence(
            f"root residual {residuals[worst]:.3e} above tolerance", branch=worst
        )
    return z


@lru_cache(maxsize=None)
def _permutations(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n))), dtype=int)


def track_branches(prev: RootFrame, new_roots, residuals=None) -> RootFrame:
    """Carry branch labels to a new unordered root set.

    Branch n of the returned frame (at index ``prev.k + 1``) is the new root
    assigned to the previous branch n by the permutation minimising the total
    label-to-root distance; the minimisation is exact over all permutations.
    If the best and second-best assignments tie within :data:`TIE_THRESHOLD`
    times the root scale, branches are about to collide and
    :class:`AmbiguousTracking` is raised.
    """
    new = np.asarray(new_roots, dtype=complex)
    n = prev.order
    if new.shape != (n,):
        raise ValueError(f"expected {n} roots, got {new.shape}")
    cost = np.abs(new[None, :] - prev.roots[:, None])
    perms = _permutations(n)
    totals = cost[np.arange(n)[None, :], perms].sum(axis=1)
    order = np.argsort(totals, kind="stable")
    best = perms[order[0]]
    scale = max(1.0, float(np.max(np.abs(new))))
    if totals[order[1]] - totals[order[0]] < TIE_THRESHOLD * scale:
        raise AmbiguousTracking(
            "two branch assignments tie within tolerance", k=prev.k + 1
        )
    if residuals is None:
        new_res = np.full(n, np.nan)
    else:
        new_res = np.asarray(residuals, dtype=float)[best]
    return RootFrame(k=prev.k + 1, roots=new[best], residuals=new_res)


def power_gauge(frame: RootFrame) -> GaugeSet:
    """Gauge rows ``g[m,n] = roots[n]**m`` for m = 1 .. N-1.

    The stacked matrix is then the Vandermonde matrix of the roots, so the
    roots must be pairwise distinct; separations below
    :data:`SEPARATION_THRESHOLD` times the largest magnitude raise
    :class:`DegenerateRoots`.
    """
    roots = frame.roots
    n = len(roots)
    if min_separation(roots) <= SEPARATION_THRESHOLD * float(np.max(np.abs(roots))):
        raise DegenerateRoots("root separation below threshold", k=frame.k)
    g = roots[None, :] ** np.arange(1, n)[:, None]
    return GaugeSet(k=frame.k, g=g)


def sigma_excluding(roots, i: int) -> np.ndarray:
    """Elementary symmetric polynomials of the roots with branch ``i`` left out.

    Entry j is the sum over all j-subsets of the remaining N-1 roots of the
    subset product; entry 0 is 1 and entry N-1 is the product of all
    remaining roots.
    """
    roots = np.asarray(roots, dtype=complex)
    n = len(roots)
    if not 0 <= i < n:
        raise ValueError(f"branch index {i} out of range for {n} roots")
    sig = np.zeros(n, dtype=complex)
    sig[0] = 1.0
    for r in np.delete(roots, i):
        sig[1:] = sig[1:] + r * sig[:-1]
    return sig


def sigma_table(roots) -> SigmaTable:
    roots = np.asarray(roots, dtype=complex)
    entries = np.vstack([sigma_excluding(roots, i) for i in range(len(roots))])
    return SigmaTable(entries=entries)


def vandermonde_inverse(frame: RootFrame) -> np.ndarray:
    """Closed-form inverse of the stacked power-gauge matrix.

    Row i, column j (zero-based) is

        (-1)**j * sigma_i[N-1-j] / prod_{s != i} (roots[s] - roots[i])

    which is the coefficient of x**j in the i-th Lagrange cardinal polynomial
    on the roots.  Requires pairwise distinct roots.
    """
    roots = frame.roots
    n = len(roots)
    if min_separation(roots) <= SEPARATION_THRESHOLD * float(np.max(np.abs(roots))):
        raise DegenerateRoots("root separation below threshold", k=frame.k)
    signs = (-1.0) ** np.arange(n)
    inv = np.empty((n, n), dtype=complex)
    for i in range(n):
        denom = np.prod(np.delete(roots, i) - roots[i])
        inv[i] = signs * sigma_excluding(roots, i)[::-1] / denom
    return inv


def frame_from_coeffs(
    spec: RecurrenceSpec, k: int, tol: float = DEFAULT_ROOT_TOL, prev: RootFrame | None = None
) -> RootFrame:
    """Root frame at one index, warm started and tracked from ``prev``."""
    f = spec.coeff_array(k)
    try:
        roots = characteristic_roots(f, tol=tol, seed=None if prev is None else prev.roots)
    except RecurrenceError as exc:
        raise exc.with_context(k=k) from exc
    res = root_residuals(f, roots)
    if prev is None:
        # Fix an arbitrary but deterministic labelling for the first frame.
        order = np.lexsort((roots.imag, roots.real))
        return RootFrame(k=k, roots=roots[order], residuals=res[order])
    return track_branches(prev, roots, residuals=res)


def root_frames(
    spec: RecurrenceSpec,
    k_lo: int | None = None,
    k_hi: int | None = None,
    tol: float = DEFAULT_ROOT_TOL,
) -> list[RootFrame]:
    """Tracked root frames for ``k = k_lo .. k_hi``.

    Defaults to ``k_start .. k_start + horizon``, which is what one
    propagation pass needs.  Each frame seeds the next solve, so for slowly
    varying coefficients the per-index cost is a couple of sweeps.
    """
    if k_lo is None:
        k_lo = spec.k_start
    if k_hi is None:
        k_hi = spec.k_start + spec.horizon
    frames: list[RootFrame] = []
    prev = None
    for k in range(k_lo, k_hi + 1):
        prev = frame_from_coeffs(spec, k, tol=tol, prev=prev)
        frames.append(prev)
    return frames
