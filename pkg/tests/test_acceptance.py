"""Acceptance gate: twelve release criteria, one verdict line each.

Each test computes its criterion from scratch, prints a single
``PASS``/``FAIL`` line (visible under ``pytest -s``), and asserts.
Tolerances are fixed here on purpose; loosening one is a release
decision, not a test fix.
"""

import math

import numpy as np
import pytest

from floqosc.cli import main as cli_main
from floqosc.floquet import (
    Regime,
    SystemParams,
    analyze,
    floquet_matrix,
    instability_condition_single,
    single_oscillator_floquet,
    stability_scan,
)
from floqosc.gaussian import (
    NotThermalForm,
    TemperatureUndefined,
    effective_beta,
    evolve_exact,
    evolve_rk4,
    initial_state,
    linear_entropy,
    reduced_density_matrix,
)
from floqosc.linalg import symplectic_defect
from floqosc.moments import (
    effective_frequency,
    fit_growth_rate,
    otoc_series,
    second_moments,
)

from oracles import purity_quadrature

FIG4 = SystemParams(epsilon=0.1, period=3.32, coupling=0.1)
FIG2B = SystemParams(epsilon=0.1, period=3.2, coupling=0.1)
FIG2C = SystemParams(epsilon=0.1, period=2.8, coupling=0.1)
STABLE = SystemParams(epsilon=0.1, period=1.0, coupling=0.1)
COMPLEX_PT = SystemParams(epsilon=0.03, period=3.120, coupling=0.1)


def _verdict(num, description, ok):
    line = f"{'PASS' if ok else 'FAIL'} criterion {num}: {description}"
    print(line)
    assert ok, line


def test_criterion_01_symplectic_draws():
    rng = np.random.default_rng(1729)
    worst_defect = 0.0
    worst_det = 0.0
    for _ in range(1000):
        params = SystemParams(
            epsilon=rng.uniform(0.0, 0.5),
            period=rng.uniform(0.1, 10.0),
            coupling=rng.uniform(0.0, 0.5),
            alpha=rng.uniform(0.5, 2.0),
        )
        f = floquet_matrix(params)
        worst_defect = max(worst_defect, symplectic_defect(f))
        worst_det = max(worst_det, abs(np.linalg.det(f) - 1.0))
    ok = worst_defect < 1e-11 and worst_det < 1e-11
    _verdict(
        1,
        "1000 random propagators symplectic "
        f"(defect {worst_defect:.2e}, |det-1| {worst_det:.2e}, tol 1e-11)",
        ok,
    )


def test_criterion_02_uncoupled_block_reduction():
    worst = 0.0
    for eps in np.linspace(0.0, 0.5, 50):
        for t in 0.1 + 9.9 * np.arange(1, 51) / 50:
            coupled = floquet_matrix(SystemParams(epsilon=eps, period=t, coupling=0.0))
            block = coupled[np.ix_([1, 3], [1, 3])]
            single = single_oscillator_floquet(eps, t)
            worst = max(worst, float(np.max(np.abs(block - single))))
    ok = worst < 1e-12
    _verdict(
        2,
        f"zero-coupling map reduces to the 2x2 driven block (max dev {worst:.2e}, tol 1e-12)",
        ok,
    )


def test_criterion_03_single_oscillator_boundary():
    points = stability_scan((0.0, 0.5), (0.1, 10.0), (200, 200), coupling=0.0, threads=4)
    mismatches = 0
    excluded = 0
    for point in points:
        margin = abs(
            math.cos(point.period)
            - point.epsilon**2 * math.cos(point.epsilon * point.period)
        ) - (1.0 - point.epsilon**2)
        if abs(margin) < 1e-6:
            excluded += 1
            continue
        spectral = point.regime is not Regime.STABLE
        if spectral != instability_condition_single(point.epsilon, point.period):
            mismatches += 1
    ok = mismatches == 0
    _verdict(
        3,
        "spectral regime matches the closed-form inequality on a 200x200 grid "
        f"({mismatches} mismatches, {excluded} boundary cells excluded)",
        ok,
    )


def test_criterion_04_commutator_growth_rate():
    data = analyze(FIG4)
    series = otoc_series(data.matrix, 200)
    slope_qq = fit_growth_rate([(r.n, r.c_qq.log) for r in series], window=(50, 200)).slope
    slope_pq = fit_growth_rate([(r.n, r.c_pq.log) for r in series], window=(50, 200)).slope
    target = 2.0 * data.lyapunov
    rel_qq = abs(slope_qq - target) / target
    rel_pq = abs(slope_pq - target) / target
    pairwise = abs(slope_qq - slope_pq) / target
    ok = data.lyapunov > 0.0 and rel_qq < 0.01 and rel_pq < 0.01 and pairwise < 0.005
    _verdict(
        4,
        "commutator slopes reach twice the Lyapunov rate "
        f"(rel {rel_qq:.1e}/{rel_pq:.1e} < 1%, pairwise {pairwise:.1e} < 0.5%)",
        ok,
    )


def _unstable_sweep(n_points):
    values = []
    for i, t in enumerate(np.linspace(2.90, 3.55, n_points)):
        data = analyze(SystemParams(epsilon=0.1, period=float(t), coupling=0.1))
        if data.regime is not Regime.STABLE:
            values.append((i, effective_frequency(data.matrix)))
    jumps = [
        abs(b - a) for (i, a), (j, b) in zip(values, values[1:]) if j == i + 1
    ]
    return [v for _, v in values], max(jumps)


def test_criterion_05_equipartition_saturation():
    data = analyze(FIG4)
    omega_sq = effective_frequency(data.matrix) ** 2
    ratio = second_moments(data.matrix, 200)[-1].ratio
    saturation_dev = abs(ratio - omega_sq) / omega_sq

    coarse_values, coarse_jump = _unstable_sweep(151)
    refined_values, refined_jump = _unstable_sweep(601)
    healthy = all(math.isfinite(v) and v > 0.0 for v in coarse_values + refined_values)
    ok = saturation_dev < 1e-6 and healthy and refined_jump <= 0.5 * coarse_jump
    _verdict(
        5,
        f"moment ratio saturates at the effective frequency (dev {saturation_dev:.1e}) "
        f"and the sweep refines continuously (jump {coarse_jump:.2f} -> {refined_jump:.2f})",
        ok,
    )


def _integrator_deviation(params, steps_per_period):
    exact = evolve_exact(initial_state(), params, 100)
    stepped = evolve_rk4(initial_state(), params, 100, steps_per_period)
    return max(
        max(abs(x.a - y.a), abs(x.b - y.b), abs(x.c - y.c))
        for x, y in zip(exact, stepped)
    )


def test_criterion_06_integrator_cross_validation():
    worst = 0.0
    for params in (STABLE, FIG2C, SystemParams(0.1, 3.0, 0.1), FIG4, COMPLEX_PT):
        worst = max(worst, _integrator_deviation(params, 1000))
    order_ratio = _integrator_deviation(FIG4, 500) / _integrator_deviation(FIG4, 1000)
    ok = worst < 1e-6 and 8.0 <= order_ratio <= 32.0
    _verdict(
        6,
        f"stepped integrator tracks the exact flow (max dev {worst:.1e} over 5 points, "
        f"halving steps scales error x{order_ratio:.1f})",
        ok,
    )


def test_criterion_07_purity_closed_form():
    runs = (
        (FIG4, range(0, 60, 3)),
        (FIG2B, range(0, 100, 5)),
        (FIG2C, range(0, 1000, 50)),
    )
    worst = 0.0
    for params, sample in runs:
        states = evolve_exact(initial_state(), params, sample[-1])
        for n in sample:
            state = states[n]
            dm = reduced_density_matrix(state)
            closed = 1.0 - linear_entropy(dm, state.log_norm)
            quad = purity_quadrature(dm, state.log_norm)
            worst = max(worst, abs(quad - closed))
    ok = worst < 1e-6
    _verdict(
        7,
        f"closed-form purity matches 2-D quadrature (max dev {worst:.1e}, "
        "20 steps in each regime)",
        ok,
    )


def test_criterion_08_moment_cross_derivation():
    worst = 0.0
    for params in (STABLE, FIG4, COMPLEX_PT):
        heisenberg = second_moments(analyze(params).matrix, 100)
        states = evolve_exact(initial_state(), params, 100)
        for record, state in zip(heisenberg, states):
            from_state = reduced_density_matrix(state).q1_variance
            worst = max(worst, abs(record.q1_sq.value - from_state) / from_state)
    ok = worst < 1e-8
    _verdict(
        8,
        "Heisenberg and reduced-state position variances agree "
        f"(max rel dev {worst:.1e} for n <= 100 at 3 points)",
        ok,
    )


def _saturation_onset(params, horizon=250):
    omega = effective_frequency(analyze(params).matrix)
    converged = []
    for state in evolve_exact(initial_state(), params, horizon):
        dm = reduced_density_matrix(state)
        entropy = linear_entropy(dm, state.log_norm)
        try:
            beta = effective_beta(dm, omega).beta
        except (TemperatureUndefined, NotThermalForm):
            beta = math.inf
        converged.append(
            entropy >= 1.0 - 1e-3
            and 1.0 - 1e-3 <= dm.thermal_ratio <= 1.0
            and beta <= 1e-3
        )
    if not converged[-1]:
        return None
    n = len(converged) - 1
    while n > 0 and converged[n - 1]:
        n -= 1
    return n


def test_criterion_09_thermalization_endpoint():
    onset_real = _saturation_onset(FIG4)
    onset_complex = _saturation_onset(FIG2B)

    stable_states = evolve_exact(initial_state(), FIG2C, 1000)
    window = [
        linear_entropy(reduced_density_matrix(s), s.log_norm)
        for s in stable_states[500:]
    ]
    variance = float(np.var(window))

    ok = onset_real is not None and onset_complex is not None and variance > 1e-4
    _verdict(
        9,
        "both unstable presets reach the maximally mixed endpoint "
        f"(N* = {onset_real} real, {onset_complex} complex) while the stable "
        f"preset keeps oscillating (window variance {variance:.1e} > 1e-4)",
        ok,
    )


def test_criterion_10_initial_exactness():
    data = analyze(FIG4)
    moment0 = second_moments(data.matrix, 0)[0]
    otoc0 = otoc_series(data.matrix, 0)[0]
    state0 = initial_state()
    entropy0 = linear_entropy(reduced_density_matrix(state0), state0.log_norm)
    ok = (
        moment0.q1_sq.value == 0.5
        and moment0.p1_sq.value == 0.5
        and moment0.ratio == 1.0
        and otoc0.c_qq.value == 0.0
        and otoc0.c_pq.value == 1.0
        and entropy0 < 1e-12
    )
    _verdict(
        10,
        "step-zero outputs are exact (moments 1/2, ratio 1, commutators 0 and 1, "
        f"entropy {entropy0:.1e})",
        ok,
    )


def test_criterion_11_overflow_robustness():
    data = analyze(FIG4)
    moments = second_moments(data.matrix, 10_000)
    otocs = otoc_series(data.matrix, 10_000)
    finite = all(
        math.isfinite(m.q1_sq.log) and math.isfinite(m.p1_sq.log) for m in moments[1:]
    ) and all(
        math.isfinite(r.c_qq.log) and math.isfinite(r.c_pq.log) for r in otocs[1:]
    )

    target = 2.0 * data.lyapunov
    tail = fit_growth_rate(
        [(m.n, m.q1_sq.log) for m in moments], window=(9000, 10_000)
    ).slope
    tail_rel = abs(tail - target) / target

    # Dense reference while the raw values are still representable.
    dense_dev = 0.0
    power = np.eye(4)
    for n in range(31):
        growth = power @ (0.5 * np.eye(4)) @ power.T
        for direct, scaled in (
            (growth[0, 0], moments[n].q1_sq),
            (growth[2, 2], moments[n].p1_sq),
            (power[0, 2] ** 2, otocs[n].c_qq),
            (power[2, 2] ** 2, otocs[n].c_pq),
        ):
            if direct == 0.0:
                dense_dev = max(dense_dev, abs(scaled.value))
            else:
                dense_dev = max(dense_dev, abs(scaled.value - direct) / abs(direct))
        power = data.matrix @ power
    ok = finite and tail_rel < 0.01 and dense_dev < 1e-10
    _verdict(
        11,
        f"series stay finite to n = 10^4 (tail slope rel dev {tail_rel:.1e}, "
        f"dense check {dense_dev:.1e})",
        ok,
    )


def test_criterion_12_cli_determinism(tmp_path):
    commands = [
        ["scan", "--eps-samples", "6", "--t-samples", "6"],
        ["lyapunov", "--t-min", "2.9", "--t-max", "3.5", "--t-samples", "7"],
        ["orbit", "--preset", "fig2a", "--periods", "10", "--samples-per-period", "8"],
        ["moments", "--preset", "fig4", "--n-max", "30"],
        ["otoc", "--preset", "fig4", "--n-max", "60"],
        ["thermalize", "--preset", "fig4", "--periods", "20"],
        ["selftest"],
    ]
    stable = True
    for i, argv in enumerate(commands):
        first = tmp_path / f"{i}_a.csv"
        second = tmp_path / f"{i}_b.csv"
        assert cli_main(argv + ["--out", str(first)]) == 0
        assert cli_main(argv + ["--out", str(second)]) == 0
        stable = stable and first.read_bytes() == second.read_bytes()

    base = ["scan", "--eps-samples", "8", "--t-samples", "8"]
    one = tmp_path / "threads_1.csv"
    four = tmp_path / "threads_4.csv"
    assert cli_main(base + ["--threads", "1", "--out", str(one)]) == 0
    assert cli_main(base + ["--threads", "4", "--out", str(four)]) == 0
    threaded = one.read_bytes() == four.read_bytes()

    ok = stable and threaded
    _verdict(
        12,
        "all subcommands rerun byte-identical and the scan ignores thread count",
        ok,
    )
