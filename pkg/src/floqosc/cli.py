"""Command-line interface emitting deterministic figure-data files.

Subcommands map one-to-one onto the analyses: ``scan`` (stability
heatmap), ``lyapunov`` (exponent vs period), ``orbit`` (dense classical
trajectory), ``moments`` (second moments and equipartition ratio, plus a
frequency sweep mode), ``otoc`` (commutator growth and slope fit),
``thermalize`` (reduced-state diagnostics), and ``selftest``.

Every output embeds its resolved configuration as ``#``-prefixed header
lines, uses 17-significant-digit float formatting and ``\\n`` line
endings, and is byte-identical across reruns with the same configuration.
``--threads`` and ``--out`` are execution parameters, not configuration,
and are deliberately not embedded.

Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 numerical
failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .classical import PhasePoint, dense_orbit
from .floquet import (
    InvalidRange,
    Regime,
    SystemParams,
    analyze,
    floquet_matrix,
    single_oscillator_exponent,
    single_oscillator_floquet,
    stability_scan,
)
from .gaussian import (
    TemperatureUndefined,
    NotThermalForm,
    effective_beta,
    evolve_exact,
    evolve_rk4,
    initial_state,
    linear_entropy,
    reduced_density_matrix,
)
from .linalg import symplectic_defect
from .moments import (
    effective_frequency,
    fit_growth_rate,
    moment_ratio,
    otoc_series,
    second_moments,
)
from .presets import PRESETS, get_preset

# Keys a config file may set; anything else is rejected as a likely typo.
_CONFIG_KEYS = {
    "epsilon", "period", "lambda", "alpha", "format", "preset", "threads",
    "eps_min", "eps_max", "eps_samples", "t_min", "t_max", "t_samples",
    "periods", "samples_per_period", "q1", "q2", "p1", "p2",
    "n_max", "window_lo", "window_hi",
    "sweep_min", "sweep_max", "sweep_samples",
    "steps_per_period", "synthetic",
}


class ConfigError(ValueError):
    """Invalid command-line/config-file combination."""


def _fmt(value) -> str:
    """Render one value for CSV output; floats get 17 significant digits."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _fmt_json(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if not math.isfinite(value):
            return "null"
        return f"{value:.17g}"
    if isinstance(value, str):
        return json.dumps(value)
    return str(value)


def _render(
    command: str,
    config_pairs: list[tuple[str, object]],
    columns: list[str],
    rows: list[tuple],
    footer_pairs: list[tuple[str, object]],
    fmt: str,
) -> str:
    lines = [f"# floqosc {command}"]
    for key, value in config_pairs:
        lines.append(f"# {key} = {_fmt(value)}")
    if fmt == "csv":
        lines.append(",".join(columns))
        for row in rows:
            lines.append(",".join(_fmt(v) for v in row))
    else:
        for row in rows:
            body = ", ".join(
                f"{json.dumps(c)}: {_fmt_json(v)}" for c, v in zip(columns, row)
            )
            lines.append("{" + body + "}")
    for key, value in footer_pairs:
        lines.append(f"# {key} = {_fmt(value)}")
    return "\n".join(lines) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", newline="\n") as fh:
        fh.write(text)


def _load_config(path: str) -> dict:
    try:
        import tomllib  # Python >= 3.11
    except ModuleNotFoundError:
        import tomli as tomllib
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    unknown = sorted(set(data) - _CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    return data


def _resolve(args: argparse.Namespace, key: str, default, cast=None):
    """Flag value, else config-file value, else default."""
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    if key in args.config_data:
        value = args.config_data[key]
        return cast(value) if cast is not None else value
    return default


def _resolve_params(args: argparse.Namespace) -> tuple[SystemParams, str | None, list[tuple[str, object]]]:
    """Build SystemParams honoring flag > config > preset > default."""
    preset_name = _resolve(args, "preset", None)
    if preset_name is not None:
        base = get_preset(preset_name)
        defaults = {"epsilon": base.epsilon, "period": base.period, "lam": base.coupling}
    else:
        defaults = {"epsilon": 0.1, "period": 3.32, "lam": 0.1}

    epsilon = _resolve(args, "epsilon", defaults["epsilon"], float)
    period = _resolve(args, "period", defaults["period"], float)
    # "lambda" in config files; the flag parses into "lam"
    lam = getattr(args, "lam", None)
    if lam is None:
        lam = float(args.config_data.get("lambda", defaults["lam"]))
    alpha = _resolve(args, "alpha", 1.0, float)
    params = SystemParams(epsilon=epsilon, period=period, coupling=lam, alpha=alpha)
    pairs: list[tuple[str, object]] = [
        ("epsilon", params.epsilon),
        ("period", params.period),
        ("lambda", params.coupling),
        ("alpha", params.alpha),
    ]
    if preset_name is not None:
        pairs.insert(0, ("preset", preset_name))
    return params, preset_name, pairs


def _cmd_scan(args: argparse.Namespace) -> str:
    eps_lo = _resolve(args, "eps_min", 0.0, float)
    eps_hi = _resolve(args, "eps_max", 0.5, float)
    n_eps = _resolve(args, "eps_samples", 100, int)
    t_lo = _resolve(args, "t_min", 0.1, float)
    t_hi = _resolve(args, "t_max", 10.0, float)
    n_t = _resolve(args, "t_samples", 100, int)
    lam = getattr(args, "lam", None)
    if lam is None:
        lam = float(args.config_data.get("lambda", 0.1))
    alpha = _resolve(args, "alpha", 1.0, float)
    threads = _resolve(args, "threads", 1, int)

    points = stability_scan(
        (eps_lo, eps_hi), (t_lo, t_hi), (n_eps, n_t), lam, alpha, threads=threads
    )
    config = [
        ("lambda", lam),
        ("alpha", alpha),
        ("eps_min", eps_lo),
        ("eps_max", eps_hi),
        ("eps_samples", n_eps),
        ("t_min", t_lo),
        ("t_max", t_hi),
        ("t_samples", n_t),
        ("format", args.fmt),
    ]
    rows = [(p.epsilon, p.period, p.lyapunov, p.regime.value) for p in points]
    return _render("scan", config, ["epsilon", "T", "mu_L", "regime"], rows, [], args.fmt)


def _cmd_lyapunov(args: argparse.Namespace) -> str:
    epsilon = _resolve(args, "epsilon", 0.1, float)
    lam = getattr(args, "lam", None)
    if lam is None:
        lam = float(args.config_data.get("lambda", 0.1))
    alpha = _resolve(args, "alpha", 1.0, float)
    t_lo = _resolve(args, "t_min", 0.1, float)
    t_hi = _resolve(args, "t_max", 10.0, float)
    n_t = _resolve(args, "t_samples", 200, int)
    if n_t < 1:
        raise ConfigError(f"t_samples must be at least 1, got {n_t}")
    if t_hi < t_lo:
        raise ConfigError(f"period range is inverted: [{t_lo}, {t_hi}]")

    rows = []
    for T in np.linspace(t_lo, t_hi, n_t):
        data = analyze(SystemParams(epsilon=epsilon, period=float(T), coupling=lam, alpha=alpha))
        coupled = 0.0 if data.regime is Regime.STABLE else data.lyapunov
        rows.append((float(T), coupled, single_oscillator_exponent(epsilon, float(T))))
    config = [
        ("epsilon", epsilon),
        ("lambda", lam),
        ("alpha", alpha),
        ("t_min", t_lo),
        ("t_max", t_hi),
        ("t_samples", n_t),
        ("format", args.fmt),
    ]
    return _render(
        "lyapunov", config, ["T", "mu_L_coupled", "mu_L_single"], rows, [], args.fmt
    )


def _cmd_orbit(args: argparse.Namespace) -> str:
    params, _, config = _resolve_params(args)
    periods = _resolve(args, "periods", 10, int)
    spp = _resolve(args, "samples_per_period", 64, int)
    start = PhasePoint(
        q1=_resolve(args, "q1", 1.0, float),
        q2=_resolve(args, "q2", 0.0, float),
        p1=_resolve(args, "p1", 0.0, float),
        p2=_resolve(args, "p2", 0.0, float),
    )
    orbit = dense_orbit(params, start, n_periods=periods, samples_per_period=spp)
    config += [
        ("periods", periods),
        ("samples_per_period", spp),
        ("q1", start.q1),
        ("q2", start.q2),
        ("p1", start.p1),
        ("p2", start.p2),
        ("format", args.fmt),
    ]
    rows = [
        (float(t), float(x[0]), float(x[1]), float(x[2]), float(x[3]))
        for t, x in zip(orbit.times, orbit.points)
    ]
    footer = []
    if orbit.truncated_at is not None:
        footer.append(("truncated_at", orbit.truncated_at))
    return _render("orbit", config, ["t", "q1", "q2", "p1", "p2"], rows, footer, args.fmt)


def _cmd_moments(args: argparse.Namespace) -> str:
    sweep_min = _resolve(args, "sweep_min", None, float)
    sweep_max = _resolve(args, "sweep_max", None, float)
    sweep_samples = _resolve(args, "sweep_samples", None, int)
    sweep_given = [v is not None for v in (sweep_min, sweep_max, sweep_samples)]
    if any(sweep_given) and not all(sweep_given):
        raise ConfigError("sweep mode needs sweep_min, sweep_max and sweep_samples")

    if all(sweep_given):
        epsilon = _resolve(args, "epsilon", 0.1, float)
        lam = getattr(args, "lam", None)
        if lam is None:
            lam = float(args.config_data.get("lambda", 0.1))
        alpha = _resolve(args, "alpha", 1.0, float)
        if sweep_samples < 1:
            raise ConfigError(f"sweep_samples must be at least 1, got {sweep_samples}")
        if sweep_max < sweep_min:
            raise ConfigError(f"sweep range is inverted: [{sweep_min}, {sweep_max}]")
        rows = []
        for T in np.linspace(sweep_min, sweep_max, sweep_samples):
            data = analyze(SystemParams(epsilon=epsilon, period=float(T), coupling=lam, alpha=alpha))
            if data.regime is Regime.STABLE:
                continue  # omega_eff is defined by the growing mode only
            rows.append((float(T), effective_frequency(data.matrix)))
        config = [
            ("epsilon", epsilon),
            ("lambda", lam),
            ("alpha", alpha),
            ("sweep_min", sweep_min),
            ("sweep_max", sweep_max),
            ("sweep_samples", sweep_samples),
            ("format", args.fmt),
        ]
        return _render("moments", config, ["T", "omega_eff"], rows, [], args.fmt)

    params, _, config = _resolve_params(args)
    n_max = _resolve(args, "n_max", 200, int)
    data = analyze(params)
    records = second_moments(data.matrix, n_max)
    config += [("n_max", n_max), ("format", args.fmt)]
    rows = [(r.n, r.q1_sq.log, r.p1_sq.log, r.ratio) for r in records]
    footer = []
    if data.regime is not Regime.STABLE:
        footer.append(("omega_eff_sq", effective_frequency(data.matrix) ** 2))
    return _render(
        "moments", config, ["n", "q1_sq_log", "p1_sq_log", "R"], rows, footer, args.fmt
    )


def _cmd_otoc(args: argparse.Namespace) -> str:
    synthetic = _resolve(args, "synthetic", False)
    window_lo = _resolve(args, "window_lo", None, int)
    window_hi = _resolve(args, "window_hi", None, int)
    if (window_lo is None) != (window_hi is None):
        raise ConfigError("window needs both window_lo and window_hi")
    window = None if window_lo is None else (window_lo, window_hi)
    n_max = _resolve(args, "n_max", 200, int)
    if n_max < 40:
        raise ConfigError(f"n_max must be at least 40, got {n_max}")

    if synthetic:
        # Pure exponential replay: validates the fitting machinery alone.
        rate = 0.3
        rows = [(n, rate * n, rate * n) for n in range(n_max + 1)]
        fit = fit_growth_rate([(n, rate * n) for n in range(n_max + 1)], window=window)
        config = [("synthetic", True), ("n_max", n_max), ("format", args.fmt)]
        footer = [
            ("slope_fit", fit.slope),
            ("fit_residual_rms", fit.residual_rms),
        ]
        return _render(
            "otoc", config, ["n", "log_c_qq", "log_c_pq"], rows, footer, args.fmt
        )

    params, _, config = _resolve_params(args)
    data = analyze(params)
    series = otoc_series(data.matrix, n_max)
    config += [("n_max", n_max), ("format", args.fmt)]
    rows = [(r.n, r.c_qq.log, r.c_pq.log) for r in series]

    qq_logs = [(r.n, r.c_qq.log) for r in series if math.isfinite(r.c_qq.log)]
    fit = fit_growth_rate(qq_logs, window=window)
    footer: list[tuple[str, object]] = [("slope_fit", fit.slope)]
    if data.regime is Regime.STABLE:
        footer.append(("no_exponential_growth", True))
    else:
        two_mu = 2.0 * data.lyapunov
        footer.append(("two_mu_L", two_mu))
        footer.append(("relative_error", abs(fit.slope - two_mu) / two_mu))
    return _render("otoc", config, ["n", "log_c_qq", "log_c_pq"], rows, footer, args.fmt)


def _cmd_thermalize(args: argparse.Namespace) -> str:
    params, _, config = _resolve_params(args)
    periods = _resolve(args, "periods", 200, int)
    if periods < 1:
        raise ConfigError(f"periods must be at least 1, got {periods}")
    data = analyze(params)
    omega = None
    if data.regime is not Regime.STABLE:
        omega = effective_frequency(data.matrix)

    states = evolve_exact(initial_state(params.alpha), params, periods)
    rows = []
    for n, state in enumerate(states):
        dm = reduced_density_matrix(state)
        s_lin = linear_entropy(dm, state.log_norm)
        residual = abs(dm.chi.imag) / abs(dm.chi) if dm.chi != 0 else 0.0
        beta = None
        if omega is not None:
            try:
                estimate = effective_beta(dm, omega)
                beta = estimate.beta
                residual = estimate.thermal_residual
            except (NotThermalForm, TemperatureUndefined):
                beta = None
        rows.append((n, dm.thermal_ratio, s_lin, beta, residual))
    config += [("periods", periods), ("format", args.fmt)]
    return _render(
        "thermalize",
        config,
        ["n", "eta_over_rechi", "s_lin", "beta_hat", "thermal_residual"],
        rows,
        [],
        args.fmt,
    )


def _cmd_selftest(args: argparse.Namespace) -> str:
    lines = ["# floqosc selftest"]
    failures = 0

    def check(name: str, ok: bool) -> None:
        nonlocal failures
        lines.append(f"{'ok' if ok else 'FAIL'} {name}")
        if not ok:
            failures += 1

    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(100):
        p = SystemParams(
            epsilon=float(rng.uniform(0.0, 0.5)),
            period=float(rng.uniform(0.1, 10.0)),
            coupling=float(rng.uniform(0.0, 0.5)),
            alpha=float(rng.uniform(0.5, 2.0)),
        )
        worst = max(worst, symplectic_defect(floquet_matrix(p)))
    check("symplectic_draws", worst < 1.0e-11)

    worst = 0.0
    for eps in np.linspace(0.0, 0.5, 10):
        for T in np.linspace(0.5, 9.5, 10):
            full = floquet_matrix(SystemParams(float(eps), float(T), 0.0))
            block = np.array([[full[1, 1], full[1, 3]], [full[3, 1], full[3, 3]]])
            worst = max(
                worst,
                float(np.max(np.abs(block - single_oscillator_floquet(float(eps), float(T))))),
            )
    check("decoupled_reduction", worst < 1.0e-12)

    fig4 = get_preset("fig4")
    matrix = floquet_matrix(fig4)
    otoc0 = otoc_series(matrix, 1)[0]
    check(
        "initial_exactness",
        moment_ratio(matrix, 0) == 1.0
        and otoc0.c_qq.mantissa == 0.0
        and otoc0.c_pq.value == 1.0,
    )

    s0 = initial_state()
    dm0 = reduced_density_matrix(s0)
    check("initial_purity", linear_entropy(dm0, s0.log_norm) < 1.0e-12)

    exact = evolve_exact(s0, fig4, 10)
    rk4 = evolve_rk4(s0, fig4, 10, 1000)
    dev = max(
        max(abs(x.a - y.a), abs(x.b - y.b), abs(x.c - y.c))
        for x, y in zip(exact, rk4)
    )
    check("integrator_agreement", dev < 1.0e-6)

    quiet = SystemParams(epsilon=0.0, period=2.0, coupling=0.0)
    held = evolve_exact(s0, quiet, 5)[-1]
    check(
        "stationary_ground_state",
        abs(held.a - s0.a) < 1.0e-12
        and abs(held.b - s0.b) < 1.0e-12
        and abs(held.c - s0.c) < 1.0e-12,
    )

    lines.append(f"# checks_failed = {failures}")
    text = "\n".join(lines) + "\n"
    if failures:
        raise ArithmeticError(f"selftest: {failures} check(s) failed\n{text}")
    return text


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--epsilon", type=float, help="modulation depth in [0, 1)")
    common.add_argument("--period", type=float, help="drive period T")
    common.add_argument("--lambda", dest="lam", type=float, help="bilinear coupling")
    common.add_argument("--alpha", type=float, help="static oscillator frequency")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", dest="fmt", choices=["csv", "jsonl"], help="output format")
    common.add_argument("--config", help="TOML config file; flags override it")
    common.add_argument("--threads", type=int, help="worker threads (scan only)")
    common.add_argument("--preset", choices=sorted(PRESETS), help="named parameter preset")

    parser = argparse.ArgumentParser(
        prog="floqosc",
        description="Floquet analysis of a parametrically driven coupled oscillator pair.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scan", parents=[common], help="stability heatmap over (epsilon, T)")
    p.add_argument("--eps-min", dest="eps_min", type=float)
    p.add_argument("--eps-max", dest="eps_max", type=float)
    p.add_argument("--eps-samples", dest="eps_samples", type=int)
    p.add_argument("--t-min", dest="t_min", type=float)
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--t-samples", dest="t_samples", type=int)

    p = sub.add_parser("lyapunov", parents=[common], help="mu_L vs T, coupled and single")
    p.add_argument("--t-min", dest="t_min", type=float)
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--t-samples", dest="t_samples", type=int)

    p = sub.add_parser("orbit", parents=[common], help="dense classical trajectory")
    p.add_argument("--periods", type=int)
    p.add_argument("--samples-per-period", dest="samples_per_period", type=int)
    p.add_argument("--q1", type=float)
    p.add_argument("--q2", type=float)
    p.add_argument("--p1", type=float)
    p.add_argument("--p2", type=float)

    p = sub.add_parser("moments", parents=[common], help="second moments and R, or omega_eff sweep")
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--sweep-min", dest="sweep_min", type=float)
    p.add_argument("--sweep-max", dest="sweep_max", type=float)
    p.add_argument("--sweep-samples", dest="sweep_samples", type=int)

    p = sub.add_parser("otoc", parents=[common], help="commutator growth and slope fit")
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--window-lo", dest="window_lo", type=int)
    p.add_argument("--window-hi", dest="window_hi", type=int)
    p.add_argument("--synthetic", action="store_const", const=True, default=None,
                   help="replay a pure exponential through the fit")

    p = sub.add_parser("thermalize", parents=[common], help="reduced-state diagnostics per period")
    p.add_argument("--periods", type=int)

    sub.add_parser("selftest", parents=[common], help="quick internal consistency checks")
    return parser


_RUNNERS = {
    "scan": _cmd_scan,
    "lyapunov": _cmd_lyapunov,
    "orbit": _cmd_orbit,
    "moments": _cmd_moments,
    "otoc": _cmd_otoc,
    "thermalize": _cmd_thermalize,
    "selftest": _cmd_selftest,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    try:
        args.config_data = {} if args.config is None else _load_config(args.config)
        if args.fmt is None:
            args.fmt = args.config_data.get("format", "csv")
        if args.fmt not in ("csv", "jsonl"):
            raise ConfigError(f"format must be csv or jsonl, got {args.fmt!r}")
    except OSError as exc:
        print(f"floqosc: cannot read config: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"floqosc: {exc}", file=sys.stderr)
        return 2

    runner = _RUNNERS[args.command]
    try:
        text = runner(args)
    except (ConfigError, InvalidRange) as exc:
        print(f"floqosc: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError) as exc:
        # Plain ValueError comes from argument validation (SystemParams
        # bounds, step counts) and is a config problem; the module error
        # subclasses (non-normalizable states, rejected steps, fit windows
        # too small, ...) are genuine numerical failures.
        if type(exc) is ValueError:
            print(f"floqosc: {exc}", file=sys.stderr)
            return 2
        print(f"floqosc: numerical failure: {exc}", file=sys.stderr)
        return 4
    try:
        _emit(text, args.out)
    except OSError as exc:
        print(f"floqosc: cannot write output: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
