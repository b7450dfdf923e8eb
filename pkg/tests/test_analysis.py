"""Analysis layer: integrals, fits, regime labels, fidelity, revival witness."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinbattery.analysis import (
    AnalysisWindow,
    FitModel,
    RegimeLabel,
    battery_magnetization,
    battery_magnetization_summed,
    classify_regime,
    fit_exponential,
    fit_power_law,
    fit_time_decay,
    nonmonotonicity_witness,
    quasi_steady_current,
    state_fidelity,
)
from spinbattery.mps import ReducedDensityMatrix
from spinbattery.record import TrajectoryRecord


def synthetic_record(times, junction, L=4):
    times = np.asarray(times, dtype=float)
    n = times.shape[0]
    return TrajectoryRecord.from_rows(
        times,
        np.zeros((n, L)),
        np.tile(np.asarray(junction, dtype=float)[:, None], (1, L - 1)),
        junction,
        np.ones(n, dtype=int),
        np.zeros(n),
        np.zeros(n),
        np.zeros(n),
    )


def random_rdm(rng, dim):
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = a @ a.conj().T
    rho = rho / np.trace(rho).real
    return ReducedDensityMatrix(0, int(np.log2(dim)), rho)


class TestBatteryMagnetization:
    def test_zero_current_keeps_full_magnetization(self):
        rec = synthetic_record(np.linspace(0, 5, 51), np.zeros(51))
        z = battery_magnetization(rec, N_b=4)
        assert np.allclose(z, 1.0)

    def test_constant_current_drains_linearly(self):
        # linear demagnetization regime: z(t) = 1 - c t / N_b
        times = np.linspace(0, 3, 31)
        c = 0.8
        rec = synthetic_record(times, np.full(31, c))
        z = battery_magnetization(rec, N_b=5)
        assert np.max(np.abs(z - (1 - c * times / 5))) < 1e-12

    def test_derivative_consistency(self):
        times = np.linspace(0, 4, 401)
        q = np.sin(times)
        rec = synthetic_record(times, q)
        z = battery_magnetization(rec, N_b=3)
        dz = np.gradient(z, times)
        assert np.max(np.abs(dz[1:-1] + q[1:-1] / 3)) < 1e-3

    def test_summed_form_reads_lead_columns(self):
        times = np.linspace(0, 1, 5)
        rec = synthetic_record(times, np.zeros(5), L=6)
        rec.z_profile[:, :3] = 0.5
        assert np.allclose(battery_magnetization_summed(rec, 3), 0.5)


class TestQuasiSteadyCurrent:
    def test_constant(self):
        rec = synthetic_record(np.linspace(0, 10, 101), np.full(101, 2.5))
        win = AnalysisWindow(1.0, 5.0, 10.0)
        assert quasi_steady_current(rec, win) == pytest.approx(2.5, abs=1e-12)

    def test_whole_period_sine_averages_to_zero(self):
        times = np.linspace(0, 4 * np.pi, 40001)
        rec = synthetic_record(times, np.sin(times))
        win = AnalysisWindow(0.1, 2 * np.pi, 4 * np.pi)
        assert quasi_steady_current(rec, win) == pytest.approx(0.0, abs=1e-8)

    def test_closed_form_cosine(self):
        # oracle: the exact integral of 2 + 0.1 cos(5t) over [7, 10]
        times = np.linspace(0, 10, 200001)
        rec = synthetic_record(times, 2 + 0.1 * np.cos(5 * times))
        win = AnalysisWindow(1.0, 7.0, 10.0)
        expected = 2 + 0.1 * (math.sin(50) - math.sin(35)) / 15.0
        assert quasi_steady_current(rec, win) == pytest.approx(expected, abs=1e-8)

    def test_window_outside_record(self):
        rec = synthetic_record(np.linspace(0, 1, 11), np.ones(11))
        with pytest.raises(ValueError):
            quasi_steady_current(rec, AnalysisWindow(0.1, 0.5, 2.0))


class TestScalingFits:
    def test_power_law_recovery(self):
        sizes = np.array([8, 12, 16, 20, 24])
        res = fit_power_law(sizes, 3.0 * sizes ** -1.2)
        assert res.exponent == pytest.approx(1.2, abs=1e-12)
        assert res.amplitude == pytest.approx(3.0, abs=1e-10)
        assert res.residual < 1e-12

    def test_constant_current_has_zero_alpha(self):
        res = fit_power_law([8, 12, 16], [0.7, 0.7, 0.7])
        assert res.exponent == pytest.approx(0.0, abs=1e-12)

    def test_exponential_recovery(self):
        sizes = np.array([8, 12, 16, 20])
        res = fit_exponential(sizes, 0.7 * np.exp(-0.3 * sizes))
        assert res.exponent == pytest.approx(0.3, abs=1e-12)
        assert res.amplitude == pytest.approx(0.7, abs=1e-10)
        assert res.residual < 1e-12

    def test_constant_current_has_zero_beta(self):
        res = fit_exponential([8, 12, 16], [0.7, 0.7, 0.7])
        assert res.exponent == pytest.approx(0.0, abs=1e-12)

    def test_cross_model_residuals(self):
        sizes = np.array([8, 12, 16, 20, 24])
        exp_data = 0.7 * np.exp(-0.3 * sizes)
        assert fit_power_law(sizes, exp_data).residual > fit_exponential(sizes, exp_data).residual
        pow_data = 3.0 * sizes ** -1.2
        assert fit_exponential(sizes, pow_data).residual > fit_power_law(sizes, pow_data).residual

    def test_nonpositive_current_rejected(self):
        with pytest.raises(ValueError):
            fit_power_law([8, 12, 16], [0.1, -0.2, 0.3])

    def test_floor_exclusion_reported(self):
        sizes = [8, 12, 16, 20]
        currents = [0.5, 0.25, 0.125, 1e-12]  # last point sits below the floor
        res = fit_power_law(sizes, currents)
        assert res.n_points == 3

    @given(st.floats(min_value=0.0, max_value=2.5),
           st.floats(min_value=1e-3, max_value=50.0))
    @settings(max_examples=60, deadline=None)
    def test_recovery_property(self, alpha, amplitude):
        sizes = np.array([8.0, 12.0, 16.0, 20.0])
        data = amplitude * sizes ** -alpha
        res = fit_power_law(sizes, data)
        assert abs(res.exponent - alpha) < 1e-8
        assert abs(res.amplitude - amplitude) < 1e-6 * max(1.0, amplitude)
        assert res.residual <= fit_exponential(sizes, data).residual + 1e-12


class TestTimeDecay:
    def test_synthetic_recovery(self):
        times = np.linspace(1.0, 8.0, 71)
        q = (times / 2.0) ** -1.2
        rec = synthetic_record(times, q)
        res = fit_time_decay(rec, 1.0, 8.0)
        assert res.exponent == pytest.approx(1.2, abs=1e-10)

    def test_constant_is_ballistic(self):
        times = np.linspace(1.0, 8.0, 71)
        rec = synthetic_record(times, np.full(71, 0.4))
        res = fit_time_decay(rec, 1.0, 8.0)
        assert res.exponent == pytest.approx(0.0, abs=1e-12)

    def test_oscillation_around_constant(self):
        # whole-period window: oscillation must not fake a decay exponent
        times = np.linspace(1.0, 1.0 + 4 * np.pi, 2001)
        rec = synthetic_record(times, 1.0 + 0.05 * np.sin(times - 1.0))
        res = fit_time_decay(rec, 1.0, 1.0 + 4 * np.pi)
        assert abs(res.exponent) < 0.1


class TestClassifyRegime:
    def _fit(self, model, exponent, residual):
        return pytest.importorskip("spinbattery.analysis").FitResult(
            model, 1.0, exponent, residual, 4)

    def test_near_zero_alpha_is_ballistic(self):
        from spinbattery.analysis import FitResult

        power = FitResult(FitModel.POWER_LAW, 1.0, 0.02, 1e-3, 4)
        expo = FitResult(FitModel.EXPONENTIAL, 1.0, 0.001, 2e-3, 4)
        assert classify_regime(power, expo, 0.05) is RegimeLabel.BALLISTIC

    def test_large_alpha_with_better_power_fit(self):
        from spinbattery.analysis import FitResult

        power = FitResult(FitModel.POWER_LAW, 1.0, 1.4, 1e-4, 4)
        expo = FitResult(FitModel.EXPONENTIAL, 1.0, 0.2, 1e-2, 4)
        assert classify_regime(power, expo, 0.05) is RegimeLabel.SUB_DIFFUSIVE

    def test_exponential_wins_means_insulating(self):
        from spinbattery.analysis import FitResult

        power = FitResult(FitModel.POWER_LAW, 1.0, 2.0, 5e-2, 4)
        expo = FitResult(FitModel.EXPONENTIAL, 1.0, 0.3, 1e-3, 4)
        assert classify_regime(power, expo, 0.05) is RegimeLabel.INSULATING

    def test_intermediate_and_diffusive(self):
        from spinbattery.analysis import FitResult

        expo = FitResult(FitModel.EXPONENTIAL, 1.0, 0.1, 1e-1, 4)
        power = FitResult(FitModel.POWER_LAW, 1.0, 0.5, 1e-3, 4)
        assert classify_regime(power, expo, 0.05) is RegimeLabel.SUPER_DIFFUSIVE
        power = FitResult(FitModel.POWER_LAW, 1.0, 1.02, 1e-3, 4)
        assert classify_regime(power, expo, 0.05) is RegimeLabel.DIFFUSIVE

    def test_invariant_under_current_rescaling(self):
        rng = np.random.default_rng(17)
        sizes = np.array([8, 12, 16, 20])
        currents = 2.0 * sizes ** -1.3 * np.exp(rng.normal(0, 0.01, 4))
        for scale in (1.0, 7.3, 0.004):
            p = fit_power_law(sizes, scale * currents)
            e = fit_exponential(sizes, scale * currents)
            assert p.exponent == pytest.approx(fit_power_law(sizes, currents).exponent, abs=1e-10)
            assert classify_regime(p, e, 0.05) is classify_regime(
                fit_power_law(sizes, currents), fit_exponential(sizes, currents), 0.05)


class TestStateFidelity:
    def test_self_fidelity_is_one(self):
        rng = np.random.default_rng(23)
        rho = random_rdm(rng, 4)
        assert state_fidelity(rho, rho) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal_pure_states(self):
        a = np.zeros((4, 4), dtype=complex); a[0, 0] = 1.0
        b = np.zeros((4, 4), dtype=complex); b[3, 3] = 1.0
        fa = ReducedDensityMatrix(0, 2, a)
        fb = ReducedDensityMatrix(0, 2, b)
        assert state_fidelity(fa, fb) == pytest.approx(0.0, abs=1e-14)

    def test_matches_direct_formula(self):
        rng = np.random.default_rng(24)
        a, b = random_rdm(rng, 4), random_rdm(rng, 4)
        direct = np.trace(a.matrix.conj().T @ b.matrix).real / math.sqrt(
            np.trace(a.matrix @ a.matrix).real * np.trace(b.matrix @ b.matrix).real)
        assert state_fidelity(a, b) == pytest.approx(direct, abs=1e-12)

    def test_symmetry_and_bound(self):
        rng = np.random.default_rng(25)
        for _ in range(10):
            a, b = random_rdm(rng, 8), random_rdm(rng, 8)
            assert abs(state_fidelity(a, b) - state_fidelity(b, a)) < 1e-12
            assert 0.0 <= state_fidelity(a, b) <= 1.0 + 1e-10

    def test_dimension_mismatch(self):
        rng = np.random.default_rng(26)
        with pytest.raises(Exception):
            state_fidelity(random_rdm(rng, 4), random_rdm(rng, 8))


class TestNonmonotonicityWitness:
    def test_monotone_series_is_empty(self):
        t = np.arange(5.0)
        assert nonmonotonicity_witness(t, [0.0, 0.1, 0.2, 0.3, 0.4]) == []

    def test_single_revival(self):
        t = np.arange(4.0)
        out = nonmonotonicity_witness(t, [0.0, 0.5, 0.3, 0.6])
        assert out == [(3.0, pytest.approx(0.3))]

    def test_noisy_monotone_below_threshold(self):
        rng = np.random.default_rng(27)
        t = np.arange(50.0)
        series = np.linspace(0, 1, 50) + rng.uniform(-4e-7, 4e-7, 50)
        assert nonmonotonicity_witness(t, series, threshold=1e-6) == []

    def test_two_revivals(self):
        t = np.arange(7.0)
        out = nonmonotonicity_witness(t, [0.5, 0.2, 0.4, 0.4, 0.1, 0.3, 0.35])
        assert [x[0] for x in out] == [2.0, 5.0]
