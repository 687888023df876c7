import math

import numpy as np
import pytest

from chemostokes.diagnostics import DiagnosticsRecord, DiagnosticsSeries
from chemostokes.errors import ValidationError
from chemostokes.fields import Grid, ScalarField, VectorField
from chemostokes.integrator import SimState
from chemostokes.lyapunov import (EnergyCoefficients, check_c_monotone, check_n2_floor,
                                  check_u_decay, dissipation_coexistence,
                                  dissipation_exclusion, energy_coexistence,
                                  energy_exclusion, fit_epsilon, search_coefficients,
                                  _relative_entropy)

from conftest import random_scalar

N1 = 2.0 / 3.0
N2 = 2.0 / 3.0


def state_of(grid, n1, n2, c):
    return SimState(0.0, 0, ScalarField(grid, np.broadcast_to(n1, grid.n).copy()),
                    ScalarField(grid, np.broadcast_to(n2, grid.n).copy()),
                    ScalarField(grid, np.broadcast_to(c, grid.n).copy()),
                    VectorField.zeros(grid), ScalarField.zeros(grid))


def synth_series(t, ent1, ent2=None, c_sq=None, F=None, linf_c=None,
                 l2_u=None, min_n2=None, case="coexistence",
                 k=1.0, l=1.0, n2_inf=N2):
    n = len(t)
    ent2 = np.zeros(n) if ent2 is None else ent2
    c_sq = np.zeros(n) if c_sq is None else c_sq
    F = np.zeros(n) if F is None else F
    linf_c = np.zeros(n) if linf_c is None else linf_c
    l2_u = np.zeros(n) if l2_u is None else l2_u
    min_n2 = np.full(n, n2_inf) if min_n2 is None else min_n2
    series = DiagnosticsSeries(case=case, n1_inf=N1, n2_inf=n2_inf, k=k, l=l)
    for i in range(n):
        series.append(DiagnosticsRecord(
            t=float(t[i]), mass_n1=0.0, mass_n2=0.0, linf_n1_dev=0.0,
            linf_n2_dev=0.0, linf_c=float(linf_c[i]), l2_c=0.0, linf_u=0.0,
            l2_u=float(l2_u[i]), min_n2=float(min_n2[i]),
            energy=float(ent1[i] + k * ent2[i] + 0.5 * l * c_sq[i]),
            dissipation=float(F[i]), max_divu=0.0, dt=0.0,
            ent_n1=float(ent1[i]), ent_n2=float(ent2[i]), c_sq=float(c_sq[i])))
    return series


class TestEnergyFunctionals:
    def setup_method(self):
        self.grid = Grid((4, 4), (0.5, 0.5))  # volume 4
        self.coeffs = EnergyCoefficients(1.0, 1.0)

    def test_zero_at_steady_state(self):
        s = state_of(self.grid, N1, N2, 0.0)
        assert energy_coexistence(s, self.coeffs, N1, N2) == pytest.approx(0.0, abs=1e-15)
        assert dissipation_coexistence(s, N1, N2) == pytest.approx(0.0, abs=1e-15)

    def test_entropy_closed_form(self):
        # n1 = N1*e: integrand N1*(e - 1 - log e) = N1*(e - 2)
        s = state_of(self.grid, N1 * math.e, N2, 0.0)
        expect = 4.0 * N1 * (math.e - 2.0)
        assert energy_coexistence(s, self.coeffs, N1, N2) == pytest.approx(expect, rel=1e-12)

    def test_signal_term_weight(self):
        s = state_of(self.grid, N1, N2, 2.0)
        coeffs = EnergyCoefficients(1.0, 3.0)
        # (l/2) * int c^2 = 1.5 * 4 * 4
        assert energy_coexistence(s, coeffs, N1, N2) == pytest.approx(24.0, rel=1e-12)

    def test_nonnegative_on_random_states(self, rng):
        for _ in range(50):
            s = state_of(self.grid, 0.1 + 2 * rng.random(self.grid.n),
                         0.1 + 2 * rng.random(self.grid.n), rng.random(self.grid.n))
            assert energy_coexistence(s, self.coeffs, N1, N2) >= 0.0
            assert dissipation_coexistence(s, N1, N2) >= 0.0

    def test_rejects_nonpositive_density(self):
        s = state_of(self.grid, 0.0, N2, 0.0)
        with pytest.raises(ValidationError, match="strictly positive"):
            energy_coexistence(s, self.coeffs, N1, N2)

    def test_dissipation_uniform_offset(self):
        s = state_of(self.grid, N1 + 1.0, N2, 0.0)
        assert dissipation_coexistence(s, N1, N2) == pytest.approx(4.0, rel=1e-13)

    def test_exclusion_zero_at_limit(self):
        s = state_of(self.grid, 1e-300, 1.0, 0.0)
        coeffs = EnergyCoefficients(1.0, 1.0, case="exclusion")
        assert energy_exclusion(s, coeffs) == pytest.approx(0.0, abs=1e-12)
        assert dissipation_exclusion(state_of(self.grid, 0.0, 1.0, 0.0)) == 0.0

    def test_exclusion_mass_term(self):
        s = state_of(self.grid, 1.0, 1.0, 0.0)
        coeffs = EnergyCoefficients(1.0, 1.0, case="exclusion")
        assert energy_exclusion(s, coeffs) == pytest.approx(4.0, rel=1e-13)

    def test_exclusion_dissipation_value(self):
        s = state_of(self.grid, 2.0, 1.0, 0.0)
        assert dissipation_exclusion(s) == pytest.approx(16.0, rel=1e-13)

    def test_coefficients_must_be_positive(self):
        with pytest.raises(ValidationError):
            EnergyCoefficients(0.0, 1.0)

    def test_entropy_stable_for_tiny_deviations(self):
        # naive n - N - N*log(n/N) loses all digits here; the stable form
        # must agree with 50-digit arithmetic
        import mpmath
        mpmath.mp.dps = 50
        ref = 2.0 / 3.0
        for s in (1e-3, 1e-6, 1e-9, -1e-9, 1e-12):
            n = ref * (1.0 + s)
            got = float(_relative_entropy(np.array([n]), ref)[0])
            ms = mpmath.mpf(n) / mpmath.mpf(ref) - 1
            want = float(mpmath.mpf(ref) * (ms - mpmath.log1p(ms)))
            assert got == pytest.approx(want, rel=1e-8, abs=1e-300)


class TestFitEpsilon:
    def test_synthetic_exponential_rate(self):
        t = np.arange(0.0, 5.0, 0.01)
        E = np.exp(-t)
        series = synth_series(t, ent1=E, F=E)
        report = fit_epsilon(series, EnergyCoefficients(1.0, 1.0))
        assert report.monotone
        assert report.epsilon_hat == pytest.approx(1.0, rel=0.02)
        assert report.integrable_ok
        assert report.f_integral == pytest.approx(math.exp(-1) - math.exp(-5), rel=1e-3)

    def test_rate_with_distinct_scales(self):
        # E = e^{-2t}, F = 4 e^{-2t}: dE/dt = -2E = -(1/2) F
        t = np.arange(0.0, 4.0, 0.005)
        series = synth_series(t, ent1=np.exp(-2 * t), F=4 * np.exp(-2 * t))
        report = fit_epsilon(series, EnergyCoefficients(1.0, 1.0))
        assert report.epsilon_hat == pytest.approx(0.5, rel=0.02)

    def test_steady_series_hits_floor_sentinel(self):
        t = np.arange(0.0, 3.0, 0.1)
        series = synth_series(t, ent1=np.zeros_like(t), F=np.zeros_like(t))
        report = fit_epsilon(series, EnergyCoefficients(1.0, 1.0))
        assert report.f_below_floor
        assert report.epsilon_hat == 0.0
        assert report.monotone
        assert "floor" in report.message

    def test_too_few_samples(self):
        t = np.array([0.0, 0.6, 1.2, 1.4])
        series = synth_series(t, ent1=np.exp(-t), F=np.exp(-t))
        with pytest.raises(ValidationError, match="3 records"):
            fit_epsilon(series, EnergyCoefficients(1.0, 1.0))

    def test_growing_energy_not_monotone(self):
        t = np.arange(0.0, 3.0, 0.05)
        series = synth_series(t, ent1=1.0 + t, F=np.ones_like(t))
        report = fit_epsilon(series, EnergyCoefficients(1.0, 1.0))
        assert not report.monotone
        assert report.epsilon_hat == 0.0


class TestSearchCoefficients:
    def test_exponential_family_all_admissible(self):
        t = np.arange(0.0, 4.0, 0.02)
        decay = np.exp(-t)
        series = synth_series(t, ent1=decay, ent2=decay, c_sq=decay, F=decay)
        result = search_coefficients(series, "coexistence")
        assert result.found
        assert result.n_admissible == 625
        # the fitted rate scales with the energy weights, so the search tops
        # out at the largest admissible pair; the cross-check must still hold
        k, l = result.coefficients.k, result.coefficients.l
        assert result.report.epsilon_hat == pytest.approx(1.0 + k + 0.5 * l, rel=0.02)
        assert result.report.integrable_ok

    def test_steady_series_ties_break_toward_unit_weights(self):
        t = np.arange(0.0, 3.0, 0.05)
        zero = np.zeros_like(t)
        series = synth_series(t, ent1=zero, ent2=zero, c_sq=zero, F=zero)
        result = search_coefficients(series, "coexistence")
        assert result.found
        assert result.report.f_below_floor
        assert result.coefficients.k == pytest.approx(1.0)
        assert result.coefficients.l == pytest.approx(1.0)

    def test_adversarial_series_fails_explicitly(self):
        t = np.arange(0.0, 3.0, 0.05)
        grow = 1.0 + t
        series = synth_series(t, ent1=grow, ent2=grow, c_sq=grow, F=np.ones_like(t))
        result = search_coefficients(series, "coexistence")
        assert not result.found
        assert result.coefficients is None
        assert "monotone" in result.message

    def test_selective_admissibility(self):
        # ent2 grows: only small k keeps E monotone
        t = np.arange(0.0, 4.0, 0.02)
        series = synth_series(t, ent1=np.exp(-t), ent2=0.001 * t, c_sq=np.exp(-t),
                              F=np.exp(-t))
        result = search_coefficients(series, "coexistence")
        assert result.found
        assert result.coefficients.k < 1.0
        assert 0 < result.n_admissible < 625

    def test_unknown_case_rejected(self):
        t = np.arange(0.0, 2.0, 0.1)
        series = synth_series(t, ent1=np.exp(-t))
        with pytest.raises(ValidationError):
            search_coefficients(series, "chaos")


class TestTrajectoryChecks:
    def test_c_monotone_true_for_decay(self):
        t = np.arange(0.0, 2.0, 0.1)
        series = synth_series(t, ent1=np.zeros_like(t), linf_c=np.exp(-t))
        ok, idx = check_c_monotone(series)
        assert ok and idx is None

    def test_c_monotone_flags_first_violation(self):
        t = np.arange(0.0, 1.0, 0.1)
        linf = np.exp(-t)
        linf[4] = linf[3] + 1e-6
        series = synth_series(t, ent1=np.zeros_like(t), linf_c=linf)
        ok, idx = check_c_monotone(series)
        assert not ok and idx == 4

    def test_u_decay_synthetic(self):
        t = np.arange(0.0, 5.0, 0.05)
        series = synth_series(t, ent1=np.exp(-t), F=np.exp(-2 * t),
                              l2_u=np.exp(-t / 2))
        report = check_u_decay(series, None)
        assert report.passed
        assert report.final_y == pytest.approx(math.exp(-t[-1]), rel=1e-12)
        assert report.fitted_constant > 0

    def test_u_identically_zero_passes(self):
        t = np.arange(0.0, 2.0, 0.1)
        series = synth_series(t, ent1=np.zeros_like(t))
        assert check_u_decay(series, None).passed

    def test_n2_floor_constant_one(self):
        t = np.arange(0.0, 2.0, 0.1)
        series = synth_series(t, ent1=np.zeros_like(t), min_n2=np.ones_like(t),
                              n2_inf=1.0)
        report = check_n2_floor(series, 1.0)
        assert report.passed
        assert report.t_star == 0.0
        assert report.floor == 1.0

    def test_n2_floor_after_dip(self):
        t = np.arange(0.0, 3.0, 0.1)
        m = np.full_like(t, 0.8)
        m[8:12] = 0.3  # dip below threshold 0.5 around t in [0.8, 1.1]
        series = synth_series(t, ent1=np.zeros_like(t), min_n2=m, n2_inf=1.0)
        report = check_n2_floor(series, 1.0)
        assert report.passed
        assert report.t_star == pytest.approx(1.2)
        assert report.floor == pytest.approx(0.8)

    def test_n2_floor_fails_when_never_recovering(self):
        t = np.arange(0.0, 2.0, 0.1)
        series = synth_series(t, ent1=np.zeros_like(t),
                              min_n2=np.full_like(t, 0.1), n2_inf=1.0)
        report = check_n2_floor(series, 1.0)
        assert not report.passed
        assert report.t_star == math.inf
