import numpy as np
import pytest
from numpy.testing import assert_allclose

from wkbrec import (
    ComponentVector,
    RecurrenceSpec,
    RootFrame,
    SinusoidalInEpsK,
    Tabulated,
    compare_methods,
    decompose_initial,
    direct_solve,
    epsilon_sweep,
    exact_step_general,
    explicit_step,
    min_separation,
    power_gauge,
    reconstruct,
    root_frames,
    step,
    wkb3_step,
    wkb_diagonal_gain,
    wkb_step_general,
)
from conftest import complex_array, constant_spec, sin_family


def frame(roots, k=0):
    roots = np.asarray(roots, dtype=complex)
    return RootFrame(k=k, roots=roots, residuals=np.zeros(len(roots)))


def wkb3_multipliers(frame_now, frame_next):
    """The linearised diagonal multipliers of the hand-derived order-3 step."""
    r, R = frame_now.roots, frame_next.roots
    out = np.empty(3, dtype=complex)
    for i in range(3):
        coupling = sum(1.0 / (R[i] - R[m]) for m in range(3) if m != i)
        out[i] = r[i] * (1.0 - (R[i] - r[i]) * coupling)
    return out


def sin_family_order(n, epsilon, horizon, rng):
    """Order-n slowly varying family whose roots stay pairwise separated.

    The base roots are spread over the complex plane (separation ~1), so the
    sinusoidal wobble never drives a collision on realistic windows.
    """
    base = np.array(
        [0.6 + 0.45j, -1.15 - 0.35j, 1.7 + 0.3j, -1.9 + 0.95j,
         2.2 - 0.75j, -0.45 - 1.5j, 1.05 + 1.6j, -2.3 - 1.1j]
    )[:n]
    poly = np.poly(base)  # monic, descending degree
    offsets = poly[::-1][:-1]  # ascending f[0 .. n-1]
    amps = 0.05 * (1 + np.arange(n) % 3)
    return RecurrenceSpec(
        order=n,
        coeffs=tuple(
            SinusoidalInEpsK(a, o, epsilon=epsilon) for a, o in zip(amps, offsets)
        ),
        k_start=0,
        horizon=horizon,
    )


class TestExactStepGeneral:
    def test_constant_frames_diagonal_action(self, rng):
        y = complex_array(rng, 4)
        r = np.array([0.5, -1.2, 2.0, 0.3 + 1j])
        out = exact_step_general(
            ComponentVector(k=0, y=y), frame(r, 0), frame(r, 1)
        )
        assert_allclose(out.y, r * y, rtol=1e-12)

    def test_order3_matches_explicit_step(self, rng):
        spec = sin_family(epsilon=0.02, horizon=2)
        frames = root_frames(spec)
        y = complex_array(rng, 3)
        a = exact_step_general(ComponentVector(k=0, y=y), frames[0], frames[1])
        b = explicit_step(ComponentVector(k=0, y=y), frames[0], frames[1])
        assert_allclose(a.y, b.y, rtol=1e-10)

    def test_order5_hundred_steps_vs_oracle(self, rng):
        spec = sin_family_order(5, epsilon=0.008, horizon=100, rng=rng)
        init = complex_array(rng, 5)
        frames = root_frames(spec)
        Y = decompose_initial(init, power_gauge(frames[0]))
        values = [reconstruct(Y)]
        for s in range(100):
            Y = exact_step_general(Y, frames[s], frames[s + 1])
            values.append(reconstruct(Y))
        oracle = direct_solve(spec, init).values[:101]
        assert_allclose(values, oracle, rtol=1e-9)

    def test_agrees_with_generic_gauge_step(self, rng):
        spec = sin_family_order(4, epsilon=0.01, horizon=2, rng=rng)
        frames = root_frames(spec)
        y = complex_array(rng, 4)
        a = exact_step_general(ComponentVector(k=0, y=y), frames[0], frames[1])
        b = step(
            ComponentVector(k=0, y=y),
            power_gauge(frames[0]),
            power_gauge(frames[1]),
            spec.coeff_array(0),
        )
        assert_allclose(a.y, b.y, rtol=1e-10)


class TestWkbStepGeneral:
    def test_constant_frames_gain_is_roots(self, rng):
        y = complex_array(rng, 4)
        r = np.array([0.5, -1.2, 2.0, 0.3 + 1j])
        out, report = wkb_step_general(ComponentVector(k=0, y=y), frame(r, 0), frame(r, 1))
        assert_allclose(report.diagonal_gain, r, rtol=1e-12)
        assert report.offdiag_norm < 1e-13 * np.max(np.abs(r)) ** 4
        assert report.k == 1
        assert_allclose(out.y, report.diagonal_gain * y)

    def test_gain_at_own_nodes_is_exact(self, rng):
        # the diagonal gain is the root times its Lagrange cardinal value,
        # which is exactly one on its own node set
        for _ in range(10):
            n = int(rng.integers(2, 7))
            roots = complex_array(rng, n, scale=1.5)
            if min_separation(roots) < 0.1:
                continue
            gain = wkb_diagonal_gain(frame(roots, 0), frame(roots, 1))
            assert np.max(np.abs(gain - roots)) < 1e-12 * max(1, np.max(np.abs(roots)))

    def test_order3_gain_matches_hand_multipliers_small_increment(self, rng):
        # the hand-derived multipliers are linear in the root increments, so
        # they agree with the exact diagonal gain only up to second order;
        # at increments of 5e-7 the difference sits well below 1e-10
        worst = 0.0
        for _ in range(100):
            roots = complex_array(rng, 3, scale=1.2)
            if min_separation(roots) < 0.5:
                continue
            d = 5e-7 * complex_array(rng, 3)
            gain = wkb_diagonal_gain(frame(roots, 0), frame(roots + d, 1))
            mult = wkb3_multipliers(frame(roots, 0), frame(roots + d, 1))
            worst = max(worst, float(np.max(np.abs(gain - mult))))
        assert worst < 1e-10

    def test_order2_gain_matches_hand_multiplier_small_increment(self, rng):
        # order-2 specialisation of the diagonal gain: the linearised
        # multiplier is r_i (1 - (R_i - r_i)/(R_i - R_m)) for the other
        # branch m, agreeing with the exact gain up to second order
        worst = 0.0
        for _ in range(100):
            roots = complex_array(rng, 2, scale=1.2)
            if min_separation(roots) < 0.5:
                continue
            d = 5e-7 * complex_array(rng, 2)
            R = roots + d
            gain = wkb_diagonal_gain(frame(roots, 0), frame(R, 1))
            mult = np.array(
                [
                    roots[0] * (1 - (R[0] - roots[0]) / (R[0] - R[1])),
                    roots[1] * (1 - (R[1] - roots[1]) / (R[1] - R[0])),
                ]
            )
            worst = max(worst, float(np.max(np.abs(gain - mult))))
        assert worst < 1e-10

    def test_offdiag_scales_linearly_with_epsilon(self, rng):
        spec_big = sin_family(epsilon=0.02, horizon=2)
        spec_small = sin_family(epsilon=0.01, horizon=2)
        y = complex_array(rng, 3)
        norms = {}
        for label, spec in (("big", spec_big), ("small", spec_small)):
            frames = root_frames(spec)
            _, report = wkb_step_general(
                ComponentVector(k=0, y=y), frames[0], frames[1]
            )
            norms[label] = report.offdiag_norm
        ratio = norms["small"] / norms["big"]
        assert 0.5 / 1.5 < ratio < 0.5 * 1.5

    def test_wkb_error_shrinks_with_epsilon_order4(self, rng):
        init = complex_array(rng, 4)
        errs = []
        for eps in (0.01, 0.005):
            spec = sin_family_order(4, epsilon=eps, horizon=400, rng=rng)
            frames = root_frames(spec)
            Y = decompose_initial(init, power_gauge(frames[0]))
            for s in range(400):
                Y = wkb_step_general(Y, frames[s], frames[s + 1])[0]
            oracle = direct_solve(spec, init).value_at(400)
            errs.append(abs(reconstruct(Y) - oracle) / abs(oracle))
        assert errs[1] < errs[0]


class TestCompareMethods:
    def test_exact_methods_stay_exact(self, rng):
        spec = sin_family(epsilon=0.01, horizon=80)
        init = complex_array(rng, 3)
        table = compare_methods(spec, init, ["companion", "gauge-exact"])
        assert float(np.max(table.rel_errors["companion"])) < 1e-10
        assert float(np.max(table.rel_errors["gauge-exact"])) < 1e-10

    def test_wkb_general_exact_at_constant_coefficients(self, rng):
        spec = sin_family(epsilon=0.0, horizon=150)
        init = complex_array(rng, 3)
        table = compare_methods(spec, init, ["wkb-general", "wkb3", "explicit3"])
        for name in ("wkb-general", "wkb3", "explicit3"):
            assert float(np.max(table.rel_errors[name])) < 1e-10

    def test_sweep_monotone_terminal_errors(self, rng):
        spec = sin_family(epsilon=0.02, horizon=200)
        init = np.array([1 + 0.3j, 0.5 - 0.2j, 0.8 + 0.1j])
        sweep = epsilon_sweep(spec, init, ["wkb-general"], [0.02, 0.01, 0.005])
        errs = sweep.terminal_errors["wkb-general"]
        assert errs[1] < errs[0] and errs[2] < errs[1]

    def test_method_order_preserved_and_deduped(self, rng):
        spec = sin_family(epsilon=0.01, horizon=10)
        init = complex_array(rng, 3)
        table = compare_methods(spec, init, ["wkb3", "direct", "wkb3"])
        assert list(table.values) == ["wkb3", "direct"]

    def test_unknown_method_rejected(self, rng):
        spec = sin_family(epsilon=0.01, horizon=10)
        with pytest.raises(ValueError, match="unknown method"):
            compare_methods(spec, complex_array(rng, 3), ["newton"])

    def test_third_order_method_requires_order3(self, rng):
        spec = constant_spec([-1, -1], horizon=10)
        with pytest.raises(ValueError, match="order 3"):
            compare_methods(spec, complex_array(rng, 2), ["wkb3"])

    def test_homogeneous_only_methods_reject_forcing(self, rng):
        spec = constant_spec([-6, 11, -6], horizon=10, forcing=1.0)
        with pytest.raises(ValueError, match="zero forcing"):
            compare_methods(spec, complex_array(rng, 3), ["wkb-general"])

    def test_forced_methods_track_oracle(self, rng):
        spec = RecurrenceSpec(
            order=3,
            coeffs=(
                SinusoidalInEpsK(0.2, -6, epsilon=0.01),
                SinusoidalInEpsK(0.1, 11, epsilon=0.01),
                SinusoidalInEpsK(-0.1, -6, epsilon=0.01),
            ),
            k_start=0,
            horizon=60,
            forcing=Tabulated(complex_array(rng, 120), k_first=-5),
        )
        init = complex_array(rng, 3)
        table = compare_methods(spec, init, ["companion", "gauge-exact", "explicit3"])
        for name in ("companion", "gauge-exact", "explicit3"):
            assert float(np.max(table.rel_errors[name])) < 1e-9

    def test_riccati_method_matches_oracle(self):
        spec = sin_family(epsilon=0.01, horizon=50)
        init = np.array([1 + 0.2j, 1.4 - 0.1j, 2.2 + 0.3j])
        table = compare_methods(spec, init, ["riccati"])
        assert float(np.max(table.rel_errors["riccati"])) < 1e-7

    def test_exact_step_composition_error_growth(self, rng):
        # composed exact steps stay within a slowly growing multiple of
        # rounding over long horizons
        spec = sin_family(epsilon=0.01, horizon=300)
        init = complex_array(rng, 3)
        table = compare_methods(spec, init, ["gauge-exact"])
        assert table.terminal_error("gauge-exact") < 1e-9 * 300


class TestRobustness:
    def test_shifted_window_all_methods(self, rng):
        # every driver must respect a nonzero window start
        spec = sin_family(epsilon=0.01, horizon=60, k_start=17)
        init = complex_array(rng, 3)
        methods = ["direct", "companion", "gauge-exact", "explicit3", "wkb3", "riccati", "wkb-general"]
        table = compare_methods(spec, init, methods)
        assert table.k[0] == 17 and table.k[-1] == 77
        for name in ("companion", "gauge-exact", "explicit3", "riccati"):
            assert float(np.max(table.rel_errors[name])) < 1e-7

    def test_max_order_exact_methods(self, rng):
        spec = sin_family_order(8, epsilon=0.004, horizon=60, rng=rng)
        init = complex_array(rng, 8)
        table = compare_methods(spec, init, ["companion", "gauge-exact"])
        assert float(np.max(table.rel_errors["companion"])) < 1e-9
        assert float(np.max(table.rel_errors["gauge-exact"])) < 1e-8
