import math

import numpy as np
import pytest

from crossdiff import (Field, GridSpec, ModelParams, NonpositiveSteadyStateError,
                       SpeciesInit, InitialCondition, StepperConfig, SystemState,
                       apriori_monitors, dissipation_h, dissipation_mb, energy_h,
                       energy_mb, integrate_cells, make_report, relative_entropy,
                       sample_trajectory, step_explicit, supercritical_fraction)

SCALED = ModelParams.scaled()


def uniform_state(grid, a, b):
    return SystemState(0.0, Field.full(grid, a), Field.full(grid, b))


def fig1_state(n=200):
    grid = GridSpec((10.0,), (n,))
    ic = InitialCondition(
        rho_a=SpeciesInit("gaussian_bump", 0.5, 1.0, (1.0,), 1.0),
        rho_b=SpeciesInit("gaussian_bump", 0.1, 1.0, (-1.0,), 1.0))
    return ic.build(grid)


class TestEnergies:
    def test_unit_pair_measure_ten(self):
        g = GridSpec((10.0,), (200,))
        st = uniform_state(g, 1.0, 1.0)
        assert math.isclose(energy_h(st, SCALED), -10.0, rel_tol=1e-13)
        assert math.isclose(energy_mb(st), -20.0, rel_tol=1e-13)

    def test_vacuum_is_zero(self):
        g = GridSpec((10.0,), (64,))
        st = uniform_state(g, 0.0, 0.0)
        assert energy_h(st, SCALED) == 0.0
        assert energy_mb(st) == 0.0

    def test_e_one_pair(self):
        # rho_a = e, rho_b = 1 on measure 1, kappa = 1: H = e - 1
        g = GridSpec((1.0,), (8,))
        st = uniform_state(g, math.e, 1.0)
        assert math.isclose(energy_h(st, SCALED), math.e - 1.0, rel_tol=1e-12)

    def test_mb_of_e_is_zero(self):
        g = GridSpec((1.0,), (8,))
        st = uniform_state(g, math.e, math.e)
        assert abs(energy_mb(st)) <= 1e-12

    def test_coupling_identity(self):
        # H - H_MB = kappa * integral(ra*rb), up to one fused reduction
        rng = np.random.default_rng(17)
        for geometry in (((10.0,), (40,)), ((4.0, 3.0), (8, 6))):
            g = GridSpec(*geometry)
            p = ModelParams(beta=0.9, c=0.7)
            for _ in range(10):
                st = SystemState(0.0, Field(g, rng.uniform(0.0, 2.0, g.shape)),
                                 Field(g, rng.uniform(0.0, 2.0, g.shape)))
                lhs = energy_h(st, p) - energy_mb(st)
                rhs = p.kappa * integrate_cells(
                    Field(g, st.rho_a.values * st.rho_b.values))
                assert math.isclose(lhs, rhs, rel_tol=1e-12, abs_tol=1e-13)


class TestDissipationH:
    def test_constant_state_zero(self):
        g = GridSpec((10.0, 10.0), (8, 8))
        assert dissipation_h(uniform_state(g, 0.8, 0.3), SCALED) == 0.0

    def test_nonnegative_on_random_states(self):
        rng = np.random.default_rng(23)
        g = GridSpec((5.0,), (32,))
        p = ModelParams(beta=1.5, c=1.0)
        for _ in range(50):
            st = SystemState(0.0, Field(g, rng.uniform(0.0, 3.0, 32)),
                             Field(g, rng.uniform(0.0, 3.0, 32)))
            assert dissipation_h(st, p) >= -1e-12

    def test_vacuum_species_no_spurious_contribution(self):
        # rho_b = 0: its faces are weighted by the zero interface density
        g = GridSpec((10.0,), (100,))
        ra = Field(g, 0.2 + np.exp(-g.centers(0) ** 2))
        st = SystemState(0.0, ra, Field.full(g, 0.0))
        d = dissipation_h(st, SCALED)
        assert math.isfinite(d) and d > 0.0

    def test_log_gradient_vs_sqrt_gradient_identity(self):
        # rho_b = 0: d0*sum(rho_a |grad log rho_a|^2) vs 4*d0*sum(|grad sqrt|^2)
        g = GridSpec((10.0,), (200,))
        ra = np.exp(-g.centers(0) ** 2)
        st = SystemState(0.0, Field(g, ra), Field.full(g, 0.0))
        d_log = dissipation_h(st, SCALED)
        grads = np.diff(np.sqrt(ra)) / g.spacing[0]
        d_sqrt = 4.0 * float((grads * grads).sum()) * g.cell_volume
        assert abs(d_log - d_sqrt) <= 0.02 * d_sqrt


class TestDissipationMb:
    def test_constant_state_zero(self):
        g = GridSpec((10.0,), (16,))
        assert dissipation_mb(uniform_state(g, 0.8, 0.3), SCALED) == 0.0

    def test_nonnegative_in_validity_region(self):
        # all interface weights stay in [0, 1) for densities below 1
        rng = np.random.default_rng(29)
        g = GridSpec((5.0,), (32,))
        for _ in range(50):
            vals = rng.uniform(0.0, 0.99, 32)
            st = SystemState(0.0, Field(g, vals), Field(g, vals))
            assert supercritical_fraction(st, SCALED) == 0.0
            assert dissipation_mb(st, SCALED) >= -1e-12

    def test_sign_indefinite_when_supercritical(self):
        # opposed gradients deep in the degenerate region: the sum gradient
        # cancels while the (1 - s) term goes negative
        g = GridSpec((10.0,), (50,))
        x = g.centers(0)
        ra = 4.0 + np.tanh(x)
        rb = (4.0 + np.tanh(-x)) * (16.0 / (ra * (4.0 + np.tanh(-x))))  # ra*rb = 16
        st = SystemState(0.0, Field(g, ra), Field(g, rb))
        assert supercritical_fraction(st, SCALED) == 1.0
        assert dissipation_mb(st, SCALED) < 0.0


class TestBalanceConsistency:
    @pytest.mark.parametrize("which", ["natural", "mb"])
    def test_finite_difference_matches_and_halves(self, which):
        # -(E(t+dt)-E(t))/dt vs the instantaneous rate: within 5% at half-CFL,
        # and the gap halves with dt; evaluated past the steepest transient
        # where the first-order-in-dt term dominates the quadrature gap
        from crossdiff import cfl_dt
        s = sample_trajectory(fig1_state(), SCALED, StepperConfig(), [5.0])[0]
        dt0 = 0.5 * cfl_dt(s, SCALED, StepperConfig(cfl_safety=1.0))
        if which == "natural":
            efn, dfn = (lambda x: energy_h(x, SCALED),
                        lambda x: dissipation_h(x, SCALED))
        else:
            efn, dfn = (lambda x: energy_mb(x)), (lambda x: dissipation_mb(x, SCALED))
        d_inst = dfn(s)
        mism = []
        for dt in (dt0, 0.5 * dt0):
            s1 = step_explicit(s, dt, SCALED)
            mism.append(abs(-(efn(s1) - efn(s)) / dt - d_inst))
        assert mism[0] <= 0.05 * d_inst
        assert 0.35 <= mism[1] / mism[0] <= 0.65


class TestLyapunov:
    def test_energy_nonincreasing_per_explicit_step(self):
        # subcritical run: H decays at every accepted CFL-safe step
        from crossdiff import cfl_dt
        state = fig1_state(100)
        cfg = StepperConfig()
        h_prev = energy_h(state, SCALED)
        for _ in range(200):
            state = step_explicit(state, cfl_dt(state, SCALED, cfg), SCALED)
            h_now = energy_h(state, SCALED)
            assert h_now <= h_prev + 1e-10 * abs(h_prev)
            h_prev = h_now


class TestRelativeEntropy:
    def test_zero_at_steady_state(self):
        g = GridSpec((10.0,), (32,))
        st = uniform_state(g, 0.8, 0.6)
        assert relative_entropy(st, (0.8, 0.6), SCALED) == 0.0

    def test_hand_value(self):
        # (2, 1) against (1, 1) on measure 1, kappa 1: 2*log(2) - 1
        g = GridSpec((1.0,), (8,))
        st = uniform_state(g, 2.0, 1.0)
        got = relative_entropy(st, (1.0, 1.0), SCALED)
        assert math.isclose(got, 2.0 * math.log(2.0) - 1.0, rel_tol=1e-12)

    def test_positive_away_from_steady_state(self):
        # admissible masses (<= 1/kappa): strictly positive off the fixed point
        rng = np.random.default_rng(37)
        g = GridSpec((1.0,), (4,))
        for _ in range(1000):
            a, b = rng.uniform(0.0, 3.0, 2)
            if abs(a - 0.8) < 1e-12 and abs(b - 0.6) < 1e-12:
                continue
            st = uniform_state(g, a, b)
            assert relative_entropy(st, (0.8, 0.6), SCALED) > 0.0

    def test_nonpositive_steady_state_rejected(self):
        g = GridSpec((1.0,), (4,))
        with pytest.raises(NonpositiveSteadyStateError):
            relative_entropy(uniform_state(g, 1.0, 1.0), (0.0, 1.0), SCALED)


class TestAprioriMonitors:
    def test_vacuum(self):
        g = GridSpec((10.0,), (16,))
        assert apriori_monitors(uniform_state(g, 0.0, 0.0)) == (0.0, 0.0)

    def test_unit_pair(self):
        g = GridSpec((10.0,), (100,))
        l32, logs = apriori_monitors(uniform_state(g, 1.0, 1.0))
        assert math.isclose(l32, 10.0 ** (2.0 / 3.0), rel_tol=1e-12)
        assert logs == 0.0

    def test_refinement_convergence(self):
        vals = []
        for n in (200, 400):
            st = fig1_state(n)
            vals.append(apriori_monitors(st))
        for coarse, fine in zip(*vals):
            assert abs(coarse - fine) <= 0.01 * abs(fine)


class TestMakeReport:
    def test_fields_consistent(self):
        st = fig1_state()
        ss = (0.677, 0.277)
        r = make_report(st, SCALED, ss)
        assert r.t == 0.0
        assert math.isclose(r.mass_a, integrate_cells(st.rho_a), rel_tol=1e-15)
        assert r.diss_h >= -1e-12
        assert r.supercrit_frac == supercritical_fraction(st, SCALED)
        assert r.rel_entropy >= -1e-12
        assert r.linf_to_ss > 0.0
