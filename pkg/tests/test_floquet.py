import math

import numpy as np
import pytest

from floqosc.floquet import (
    InvalidRange,
    Regime,
    SystemParams,
    analyze,
    floquet_matrix,
    instability_condition_single,
    single_oscillator_exponent,
    single_oscillator_floquet,
    stability_scan,
    stiffness_matrix,
)
from floqosc.linalg import hamiltonian_exponential, symplectic_defect

from oracles import eigenvalue_moduli

FIG4 = SystemParams(epsilon=0.1, period=3.32, coupling=0.1)

# Leading exponent at the pinned unstable point, frozen from the
# eigenvalue route after cross-checking against numpy's general solver.
FIG4_LYAPUNOV = 0.1256144283673168


class TestSystemParams:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"epsilon": -0.1, "period": 1.0, "coupling": 0.1},
            {"epsilon": 1.0, "period": 1.0, "coupling": 0.1},
            {"epsilon": 0.1, "period": 0.0, "coupling": 0.1},
            {"epsilon": 0.1, "period": -2.0, "coupling": 0.1},
            {"epsilon": 0.1, "period": 1.0, "coupling": math.inf},
            {"epsilon": 0.1, "period": 1.0, "coupling": 0.1, "alpha": 0.0},
        ],
    )
    def test_rejects_invalid(self, kwargs):
        with pytest.raises(ValueError):
            SystemParams(**kwargs)

    def test_is_frozen(self):
        with pytest.raises(AttributeError):
            FIG4.epsilon = 0.2

    def test_stiffness_blocks(self):
        k_up = stiffness_matrix(FIG4, +1)
        k_dn = stiffness_matrix(FIG4, -1)
        assert k_up[0, 0] == 1.0
        assert k_up[1, 1] == pytest.approx(1.1**2)
        assert k_dn[1, 1] == pytest.approx(0.9**2)
        assert k_up[0, 1] == k_up[1, 0] == 0.1


class TestFloquetMatrix:
    def test_half_period_composition_order(self):
        # Raised-frequency half first, then lowered; the product order
        # matters because the two propagators do not commute.
        half = 0.5 * FIG4.period
        up = hamiltonian_exponential(stiffness_matrix(FIG4, +1), half)
        down = hamiltonian_exponential(stiffness_matrix(FIG4, -1), half)
        assert np.array_equal(floquet_matrix(FIG4), down @ up)

    def test_symplectic(self):
        assert symplectic_defect(floquet_matrix(FIG4)) < 1e-12

    def test_reversed_composition_is_similar(self):
        half = 0.5 * FIG4.period
        up = hamiltonian_exponential(stiffness_matrix(FIG4, +1), half)
        down = hamiltonian_exponential(stiffness_matrix(FIG4, -1), half)
        assert eigenvalue_moduli(down @ up) == pytest.approx(
            eigenvalue_moduli(up @ down), rel=1e-9
        )

    def test_zero_modulation_is_pure_rotation(self):
        params = SystemParams(epsilon=0.0, period=2.0, coupling=0.0)
        moduli = eigenvalue_moduli(floquet_matrix(params))
        assert moduli == pytest.approx(np.ones(4), abs=1e-14)


class TestSingleOscillator:
    def test_boundary_function_frozen_values(self):
        # |cos T - eps^2 cos(eps T)| at the two reference points.
        stable = abs(math.cos(1.0) - 0.01 * math.cos(0.1))
        unstable = abs(math.cos(3.32) - 0.01 * math.cos(0.332))
        assert stable == pytest.approx(0.5303522642153595, abs=1e-15)
        assert unstable == pytest.approx(0.9935815006367105, abs=1e-15)
        assert not instability_condition_single(0.1, 1.0)
        assert instability_condition_single(0.1, 3.32)

    def test_condition_matches_trace(self):
        for eps, T in [(0.1, 1.0), (0.1, 3.32), (0.3, 2.0), (0.25, 6.3)]:
            trace_unstable = abs(np.trace(single_oscillator_floquet(eps, T))) > 2.0
            assert instability_condition_single(eps, T) == trace_unstable

    def test_exponent_against_eigenvalues(self):
        for eps, T in [(0.1, 3.32), (0.2, 3.0), (0.3, 6.3)]:
            top = eigenvalue_moduli(single_oscillator_floquet(eps, T))[0]
            expected = math.log(top) if top > 1.0 else 0.0
            assert single_oscillator_exponent(eps, T) == pytest.approx(expected, abs=1e-12)

    def test_exponent_zero_when_stable(self):
        assert single_oscillator_exponent(0.1, 1.0) == 0.0

    def test_block_reduction_at_zero_coupling(self):
        worst = 0.0
        for eps in np.linspace(0.0, 0.5, 7):
            for T in np.linspace(0.4, 9.6, 7):
                full = floquet_matrix(SystemParams(float(eps), float(T), 0.0))
                block = np.array([[full[1, 1], full[1, 3]], [full[3, 1], full[3, 3]]])
                single = single_oscillator_floquet(float(eps), float(T))
                worst = max(worst, float(np.max(np.abs(block - single))))
                # the cross blocks must vanish identically
                assert full[0, 1] == full[0, 3] == full[2, 1] == full[2, 3] == 0.0
        assert worst < 1e-12


class TestAnalyze:
    def test_fig4_exponent_frozen(self):
        assert analyze(FIG4).lyapunov == pytest.approx(FIG4_LYAPUNOV, rel=1e-12)

    @pytest.mark.parametrize(
        "period,regime",
        [
            (3.0, Regime.UNSTABLE_REAL),
            (3.2, Regime.UNSTABLE_COMPLEX),
            (2.8, Regime.STABLE),
            (3.32, Regime.UNSTABLE_REAL),
            (1.0, Regime.STABLE),
        ],
    )
    def test_regime_classification(self, period, regime):
        assert analyze(SystemParams(0.1, period, 0.1)).regime is regime

    def test_exponent_against_general_solver(self):
        rng = np.random.default_rng(19)
        for _ in range(50):
            params = SystemParams(
                epsilon=float(rng.uniform(0.0, 0.5)),
                period=float(rng.uniform(0.1, 10.0)),
                coupling=float(rng.uniform(0.0, 0.5)),
            )
            data = analyze(params)
            top = eigenvalue_moduli(data.matrix)[0]
            expected = max(math.log(top), 0.0)
            assert data.lyapunov == pytest.approx(expected, abs=1e-9)

    def test_stable_exponent_clamped_at_zero(self):
        assert analyze(SystemParams(0.1, 1.0, 0.1)).lyapunov == 0.0


class TestStabilityScan:
    def test_ordering_and_exact_zeros(self):
        points = stability_scan((0.0, 0.1), (0.5, 1.5), (2, 3), 0.1)
        assert len(points) == 6
        # epsilon-major, period fastest
        assert [p.epsilon for p in points[:3]] == [0.0, 0.0, 0.0]
        assert points[0].period < points[1].period < points[2].period
        assert all(p.lyapunov == 0.0 for p in points if p.regime is Regime.STABLE)

    def test_all_stable_grid(self):
        points = stability_scan((0.0, 0.05), (0.5, 1.0), (2, 2), 0.1)
        assert [p.lyapunov for p in points] == [0.0, 0.0, 0.0, 0.0]

    def test_threads_do_not_change_output(self):
        serial = stability_scan((0.0, 0.4), (2.5, 3.5), (4, 5), 0.1, threads=1)
        pooled = stability_scan((0.0, 0.4), (2.5, 3.5), (4, 5), 0.1, threads=4)
        assert serial == pooled

    def test_single_point_axis(self):
        points = stability_scan((0.1, 0.1), (3.32, 3.32), (1, 1), 0.1)
        assert len(points) == 1
        assert points[0].lyapunov == pytest.approx(FIG4_LYAPUNOV, rel=1e-12)

    @pytest.mark.parametrize(
        "eps_range,t_range,grid",
        [
            ((0.2, 0.1), (1.0, 2.0), (2, 2)),
            ((0.0, 0.1), (2.0, 1.0), (2, 2)),
            ((0.0, 0.1), (1.0, 2.0), (0, 2)),
        ],
    )
    def test_invalid_ranges(self, eps_range, t_range, grid):
        with pytest.raises(InvalidRange):
            stability_scan(eps_range, t_range, grid, 0.1)

    def test_scan_matches_single_condition_at_zero_coupling(self):
        points = stability_scan((0.0, 0.4), (2.0, 4.0), (5, 9), 0.0)
        for p in points:
            margin = abs(
                abs(math.cos(p.period) - p.epsilon**2 * math.cos(p.epsilon * p.period))
                - (1.0 - p.epsilon**2)
            )
            if margin < 1e-6:
                continue
            unstable = p.regime is not Regime.STABLE
            assert unstable == instability_condition_single(p.epsilon, p.period)
