"""Command-line front end.

Subcommands: eval, verify, fourier, spectrum, green, simulate.  Shared flags
(--output, --format, --config, --seed-dims, --figure) may appear after any
subcommand; a flat key=value config file can supply any long flag, with
explicit flags winning.

Exit codes: 0 success, 1 a verification or comparison check failed, 2 invalid
parameters or usage, 3 file I/O failure, 4 the lattice run diverged.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import analysis, quantum, report, simulator, solutions
from .elliptic import complete_k, jacobi
from .solutions import Family, Sign

EXIT_OK = 0
EXIT_CHECK = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_DIVERGED = 4

FAMILIES = ("massive", "massless", "ssb")

RESIDUAL_TOL = 1.0e-9
SERIES_TOL = 1.0e-7
PARSEVAL_TOL = 1.0e-8
GREEN_VALUE_TOL = 1.0e-10
GREEN_JUMP_TOL = 1.0e-8
GREEN_ODE_TOL = 1.0e-7


def load_config(path: str) -> dict[str, str]:
    """Flat key=value lines; blank lines and # comments ignored."""
    config: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            config[key.strip()] = value.strip()
    return config


# Flags whose argparse destination differs from the config key.
_DEST = {"lambda": "lam"}


class Options:
    """Layered parameter lookup: explicit flag, then config file, then default."""

    def __init__(self, args: argparse.Namespace, config: dict[str, str]):
        self.args = args
        self.config = config

    def get(self, name: str, cast=float, default=None, required: bool = False):
        dest = _DEST.get(name, name.replace("-", "_"))
        value = getattr(self.args, dest, None)
        if value is None and name in self.config:
            try:
                value = cast(self.config[name])
            except ValueError as exc:
                raise ValueError(f"config key {name}={self.config[name]!r}: {exc}") from exc
        if value is None:
            value = default
        if value is None and required:
            raise ValueError(f"missing required parameter --{name}")
        return value


def _choice(name: str, allowed: tuple[str, ...]):
    def cast(raw: str) -> str:
        if raw not in allowed:
            raise ValueError(f"{name} must be one of {', '.join(allowed)}, got {raw!r}")
        return raw

    return cast


def build_spec(opt: Options, spatial=None) -> solutions.SolutionSpec:
    family = opt.get("family", _choice("family", FAMILIES), required=True)
    if spatial is None:
        dims = opt.get("seed-dims", int, default=4)
        if dims < 2:
            raise ValueError(f"--seed-dims must be at least 2, got {dims}")
        spatial = (0.0,) * (dims - 1)
    theta = opt.get("theta", float, 0.0)
    sign = Sign(opt.get("sign", _choice("sign", ("plus", "minus")), "plus"))
    lam = opt.get("lambda", float, required=True)
    if family == "massive":
        mu0 = opt.get("mu0", float, required=True)
        mu = opt.get("mu", float, required=True)
        return solutions.make_massive(mu0, lam, mu, theta, sign, spatial=spatial)
    if family == "massless":
        mu = opt.get("mu", float, required=True)
        return solutions.make_massless(lam, mu, theta, sign, spatial=spatial)
    mu0 = opt.get("mu0", float, required=True)
    return solutions.make_ssb(mu0, lam, theta, sign, spatial=spatial)


def emit(opt: Options, header, rows, extras: dict | None = None,
         note: str | None = None) -> None:
    """Write the tabular payload as CSV or JSON to --output or stdout."""
    fmt = opt.get("format", _choice("format", ("csv", "json")), "csv")
    if fmt == "csv":
        content = report.render_csv(header, rows)
    else:
        payload = {"columns": list(header), "rows": [list(r) for r in rows]}
        if extras:
            payload.update(extras)
        content = report.render_json(payload) + "\n"
    path = opt.get("output", str, None)
    if path is None:
        sys.stdout.write(content)
    else:
        report.write_text(path, content)
        print(f"wrote {path}")
    if note:
        print(note)


def cmd_eval(opt: Options) -> int:
    spec = build_spec(opt)
    points = opt.get("points", int, 256)
    if points < 2:
        raise ValueError(f"--points must be at least 2, got {points}")
    u_min = opt.get("u-min", float, 0.0)
    u_max = opt.get("u-max", float, u_min + analysis.phase_period(spec))
    if not u_max > u_min:
        raise ValueError(f"empty phase range [{u_min}, {u_max}]")
    u = np.linspace(u_min, u_max, points)
    phi = solutions.profile(spec, u)
    rows = [(float(a), float(b)) for a, b in zip(u, phi)]
    emit(opt, ("u", "phi"), rows)
    figure = opt.get("figure", str, None)
    if figure:
        report.save_line_figure(figure, u, phi, "phase u", "phi",
                               f"{spec.family.value} profile")
        print(f"wrote {figure}")
    return EXIT_OK


def _parse_corruption(raw: str | None):
    if raw is None:
        return None
    target, sep, factor = raw.partition(":")
    if not sep:
        raise ValueError(f"--corrupt expects target:factor, got {raw!r}")
    return target, float(factor)


def _sweep_specs(families):
    for name in families:
        for lam in (0.1, 1.0, 10.0):
            for scale in (0.5, 1.0, 2.0):
                label = f"{name} lambda={lam} scale={scale}"
                if name == "massive":
                    yield label, solutions.make_massive(scale, lam, scale, spatial=(0.0,))
                elif name == "massless":
                    yield label, solutions.make_massless(lam, scale, spatial=(0.0,))
                else:
                    yield label, solutions.make_ssb(scale, lam, spatial=(0.0,))


def _verify_residual(families, corruption, samples, rows):
    for label, spec in _sweep_specs(families):
        if corruption is not None:
            target, factor = corruption
            spec = solutions.corrupt(spec, target, factor)
            label += f" corrupt {target}x{factor}"
        measured = analysis.residual_max(spec, samples)
        rows.append(("residual_max", label, measured, RESIDUAL_TOL,
                     measured <= RESIDUAL_TOL))


def _verify_fourier(families, rows):
    for name in families:
        if name == "massive":
            spec = solutions.make_massive(1.0, 2.0, 1.0, spatial=(0.0,))
        elif name == "massless":
            spec = solutions.make_massless(2.0, 1.0, spatial=(0.0,))
        else:
            spec = solutions.make_ssb(1.0, 2.0, spatial=(0.0,))
        series = analysis.fourier_series(spec, 8)
        period = analysis.phase_period(spec)
        u = np.linspace(0.0, period, 2048)
        deviation = float(np.max(np.abs(
            analysis.partial_sum(series, u) - solutions.profile(spec, u)
        ))) / spec.amplitude
        rows.append(("series_n8", name, deviation, SERIES_TOL,
                     deviation <= SERIES_TOL))
        dense = solutions.profile(spec, np.arange(16384) * (period / 16384))
        average = float(np.mean(dense**2))
        gap = abs(analysis.mean_square(series) - average) / average
        rows.append(("parseval", name, gap, PARSEVAL_TOL, gap <= PARSEVAL_TOL))


def _verify_green(opt: Options, corruption, rows):
    lam = opt.get("lambda", float, 2.0)
    mu = opt.get("mu", float, 1.0)
    g = quantum.make_green_time_part(mu, lam)
    if corruption is not None and corruption[0] in ("normalization", "omega"):
        g = quantum.detune(g, corruption[0], corruption[1])
    period = 4.0 * complete_k(-1.0) / g.omega
    value0 = abs(quantum.green_time_part(g, 0.0))
    rows.append(("green_value_at_0", f"lambda={lam} mu={mu}", value0,
                 GREEN_VALUE_TOL, value0 <= GREEN_VALUE_TOL))
    slope = abs(quantum.jump_slope(g) - 1.0)
    rows.append(("green_jump_slope", f"lambda={lam} mu={mu}", slope,
                 GREEN_JUMP_TOL, slope <= GREEN_JUMP_TOL))
    t = np.linspace(period / 512, period, 512)
    eq = float(np.max(np.abs(quantum.greens_equation_residual(g, t))))
    scale = g.normalization * g.omega**2
    rows.append(("green_equation", f"lambda={lam} mu={mu}", eq / scale,
                 GREEN_VALUE_TOL, eq / scale <= GREEN_VALUE_TOL))
    ident = float(np.max(np.abs(quantum.green_derivative_identity(g, t))))
    t_scale = float(np.max(np.abs(quantum.green_time_part(g, t))))
    rows.append(("green_identity", f"lambda={lam} mu={mu}", ident / t_scale,
                 GREEN_VALUE_TOL, ident / t_scale <= GREEN_VALUE_TOL))
    half = 2.0 * complete_k(-1.0) / g.omega
    t_half = np.linspace(period / 512, half - period / 512, 256)
    # Half-period translation antisymmetry T(t + 2K/w) = -T(t).
    odd = float(np.max(np.abs(
        quantum.green_time_part(g, t_half + half)
        + quantum.green_time_part(g, t_half)
    )))
    rows.append(("green_oddness", f"lambda={lam} mu={mu}", odd / t_scale,
                 GREEN_VALUE_TOL, odd / t_scale <= GREEN_VALUE_TOL))
    ode_gap = _green_ode_gap(g, period)
    rows.append(("green_ode", f"lambda={lam} mu={mu}", ode_gap,
                 GREEN_ODE_TOL, ode_gap <= GREEN_ODE_TOL))


def _green_ode_gap(g: quantum.GreenTimePart, period: float) -> float:
    """Re-integrate the fluctuation equation from the jump data with an
    independent high-order integrator and compare against the closed form."""
    from scipy.integrate import solve_ivp

    amplitude = (2.0 / g.lam) ** 0.25 * g.mu
    offset = complete_k(-1.0)

    def rhs(t, y):
        sn = jacobi(g.omega * t + offset, -1.0).sn
        return [y[1], -3.0 * g.lam * (amplitude * sn) ** 2 * y[0]]

    t_eval = np.linspace(0.0, 3.0 * period, 600)
    sol = solve_ivp(rhs, (0.0, 3.0 * period), [0.0, 1.0], t_eval=t_eval,
                    method="DOP853", rtol=1.0e-11, atol=1.0e-13)
    exact = quantum.green_time_part(g, t_eval)
    return float(np.max(np.abs(sol.y[0] - exact)))


def cmd_verify(opt: Options) -> int:
    family = opt.get("family", _choice("family", FAMILIES), None)
    families = FAMILIES if family is None else (family,)
    check = opt.get("check", _choice("check", ("residual", "fourier", "green", "all")), "all")
    corruption = _parse_corruption(opt.get("corrupt", str, None))
    samples = opt.get("samples", int, 256)
    rows: list[tuple] = []
    if check in ("residual", "all"):
        _verify_residual(families, corruption, samples, rows)
    if check in ("fourier", "all"):
        _verify_fourier(families, rows)
    if check in ("green", "all") and (family is None or family == "massless"):
        _verify_green(opt, corruption, rows)
    if not rows:
        raise ValueError(f"check {check!r} does not apply to family {family!r}")
    width = max(len(r[0]) for r in rows) + 2
    case_width = max(len(r[1]) for r in rows) + 2
    print(f"{'check':{width}}{'case':{case_width}}{'measured':>13}{'threshold':>13}  status")
    failures = 0
    for name, case, measured, threshold, ok in rows:
        status = "pass" if ok else "FAIL"
        failures += 0 if ok else 1
        print(f"{name:{width}}{case:{case_width}}{measured:13.3e}{threshold:13.1e}  {status}")
    print(f"{len(rows) - failures}/{len(rows)} checks passed")
    path = opt.get("output", str, None)
    if path is not None:
        header = ("check", "case", "measured", "threshold", "status")
        table = [(n, c, float(m), float(t), "pass" if ok else "fail")
                 for n, c, m, t, ok in rows]
        emit(opt, header, table)
    return EXIT_OK if failures == 0 else EXIT_CHECK


def cmd_fourier(opt: Options) -> int:
    spec = build_spec(opt)
    n_coeffs = opt.get("n-coefficients", int, 8)
    series = analysis.fourier_series(spec, n_coeffs)
    rows = []
    if series.kind is analysis.SeriesKind.DN:
        rows.append((0, 0.0, series.constant_term))
    for i, c in enumerate(series.coefficients):
        mult = series.harmonic_multiplier(i)
        index = i if series.kind is analysis.SeriesKind.SN else i + 1
        rows.append((index, mult * series.fundamental, c))
    period = analysis.phase_period(spec)
    u = np.linspace(0.0, period, 4096)
    deviation = float(np.max(np.abs(
        analysis.partial_sum(series, u) - solutions.profile(spec, u)
    )))
    dense = solutions.profile(spec, np.arange(16384) * (period / 16384))
    average = float(np.mean(dense**2))
    parseval_gap = abs(analysis.mean_square(series) - average) / average
    note = (f"max |partial_sum - direct| over one period: "
            f"{report.format_float(deviation)} "
            f"({report.format_float(deviation / spec.amplitude)} of amplitude)\n"
            f"parseval gap (relative): {report.format_float(parseval_gap)}")
    extras = {"max_deviation": deviation, "parseval_gap": parseval_gap,
              "fundamental": series.fundamental}
    emit(opt, ("n", "frequency", "coefficient"), rows, extras, note)
    figure = opt.get("figure", str, None)
    if figure:
        report.save_stem_figure(
            figure, [r[1] for r in rows], [r[2] for r in rows],
            "frequency per unit phase", "|coefficient|",
            f"{spec.family.value} harmonic content",
        )
        print(f"wrote {figure}")
    return EXIT_OK


def cmd_spectrum(opt: Options) -> int:
    spec = build_spec(opt)
    n_max = opt.get("n-max", int, 4)
    lines = analysis.mass_spectrum(spec, n_max)
    compare = opt.get("compare", _choice("compare", ("green",)), None)
    mismatch = False
    if compare == "green":
        if spec.family is not Family.MASSLESS:
            raise ValueError("--compare green applies to the massless family only")
        g = quantum.make_green_time_part(spec.mu, spec.lam)
        green = quantum.green_spectrum(g, n_max)
        rows = []
        for line, gline in zip(lines, green.lines):
            rows.append((line.n, line.energy, line.amplitude,
                         gline.energy, gline.amplitude))
            if gline.energy != line.energy:
                mismatch = True
        header = ("n", "energy", "amplitude", "green_energy", "green_amplitude")
        note = ("energy columns bit-identical" if not mismatch
                else "energy columns DIFFER")
    else:
        rows = [(line.n, line.energy, line.amplitude) for line in lines]
        header = ("n", "energy", "amplitude")
        note = None
    emit(opt, header, rows, None, note)
    figure = opt.get("figure", str, None)
    if figure:
        report.save_stem_figure(
            figure, [line.energy for line in lines],
            [line.amplitude for line in lines],
            "energy", "|amplitude|", f"{spec.family.value} spectrum",
        )
        print(f"wrote {figure}")
    return EXIT_CHECK if mismatch else EXIT_OK


def cmd_green(opt: Options) -> int:
    lam = opt.get("lambda", float, required=True)
    mu = opt.get("mu", float, required=True)
    index = opt.get("phase-index", int, 0)
    n_max = opt.get("n-max", int, 4)
    g = quantum.make_green_time_part(mu, lam, index)
    spectrum = quantum.green_spectrum(g, n_max)
    rows = [
        (line.n, line.energy, line.amplitude, phase, spectrum.phase_index)
        for line, phase in zip(spectrum.lines, spectrum.phases)
    ]
    note = ("spatial factor: -delta^(D-1)(x), symbolic (not sampled); "
            f"jump slope = {report.format_float(quantum.jump_slope(g))}")
    extras = {"spatial_delta_symbolic": True,
              "normalization": g.normalization, "omega": g.omega}
    emit(opt, ("n", "energy", "amplitude", "phase", "phase_index"), rows,
         extras, note)
    figure = opt.get("figure", str, None)
    if figure:
        period = 4.0 * complete_k(-1.0) / g.omega
        t = np.linspace(0.0, 3.0 * period, 1500)
        report.save_line_figure(figure, t, quantum.green_time_part(g, t),
                               "t", "T(t)", "Green function temporal factor")
        print(f"wrote {figure}")
    return EXIT_OK


def cmd_simulate(opt: Options) -> int:
    px = opt.get("px", float, 0.0)
    spec = build_spec(opt, spatial=(px,))
    resting = px == 0.0
    nx = opt.get("nx", int, 16 if resting else 1024)
    periods = opt.get("periods", float, 10.0)
    if periods <= 0.0:
        raise ValueError(f"--periods must be positive, got {periods}")
    t_period = simulator.temporal_period(spec)
    if resting:
        length = opt.get("length", float, 1.0)
    else:
        length = opt.get("length", float, simulator.spatial_period(spec))
    dt = opt.get("dt", float, None)
    cfl = opt.get("cfl", float, None)
    if dt is None:
        if cfl is not None:
            dt = cfl * length / nx
        elif resting:
            dt = t_period / 4096.0
        else:
            dt = 0.5 * length / nx
    grid = simulator.GridSpec(nx=nx, length=length, dt=dt)
    state = simulator.seed_from_spec(spec, grid)
    physics = simulator.physics_from_spec(spec)
    n_steps = max(1, round(periods * t_period / grid.dt))
    stride = max(1, n_steps // 16384)
    result = simulator.run(state, grid, physics, n_steps, sample_stride=stride)
    predicted = simulator.predicted_frequency(spec)
    drift = simulator.energy_drift(result)
    try:
        measured = simulator.measure_frequency(result.times, result.probe)
    except ValueError as exc:
        print(f"frequency measurement failed: {exc}", file=sys.stderr)
        return EXIT_CHECK
    relative = abs(measured - predicted) / predicted
    print(f"predicted frequency: {report.format_float(predicted)}")
    print(f"measured frequency:  {report.format_float(measured)}")
    print(f"relative error:      {report.format_float(relative)}")
    print(f"energy drift:        {report.format_float(drift)}")
    print(f"steps:               {result.state.steps}")
    path = opt.get("output", str, None)
    if path is not None:
        rows = [(float(t), float(p), float(e))
                for t, p, e in zip(result.times, result.probe, result.energies)]
        emit(opt, ("time", "probe_value", "energy"), rows)
        manifest = {
            "grid": {"nx": grid.nx, "length": grid.length, "dt": grid.dt,
                     "cfl": grid.cfl},
            "physics": {"family": physics.family.value, "mu0": physics.mu0,
                        "lambda": physics.lam},
            "seed": spec.to_dict(),
            "n_steps": n_steps,
            "sample_stride": stride,
            "probe_index": result.probe_index,
            "predicted_frequency": predicted,
            "measured_frequency": measured,
            "relative_error": relative,
            "energy_drift": drift,
        }
        manifest_path = _manifest_path(path)
        report.write_text(manifest_path, report.render_json(manifest) + "\n")
        print(f"wrote {manifest_path}")
    figure = opt.get("figure", str, None)
    if figure:
        report.save_run_figure(figure, result.times, result.probe,
                               result.energies,
                               f"{spec.family.value} lattice run")
        print(f"wrote {figure}")
    return EXIT_OK


def _manifest_path(output: str) -> str:
    stem, dot, ext = output.rpartition(".")
    base = stem if dot else output
    return base + ".manifest.json"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", help="write the primary table here instead of stdout")
    common.add_argument("--format", choices=("csv", "json"),
                        help="table format (default csv)")
    common.add_argument("--config", help="key=value file supplying any long flag")
    common.add_argument("--seed-dims", type=int,
                        help="spacetime dimension D for constructed solutions (default 4)")
    common.add_argument("--figure", help="also render a PNG figure to this path")

    family = argparse.ArgumentParser(add_help=False)
    family.add_argument("--family", choices=FAMILIES)
    family.add_argument("--mu0", type=float, help="bare mass")
    family.add_argument("--lambda", dest="lam", type=float, help="quartic coupling")
    family.add_argument("--mu", type=float, help="solution mass scale")
    family.add_argument("--theta", type=float, help="phase offset (default 0)")
    family.add_argument("--sign", choices=("plus", "minus"))

    parser = argparse.ArgumentParser(
        prog="phi4waves",
        description="Exact elliptic waves of quartic scalar field theory: "
                    "construction, verification, spectra, lattice cross-checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common, family],
                       help="tabulate a solution profile over a phase range")
    p.add_argument("--points", type=int, help="sample count (default 256)")
    p.add_argument("--u-min", type=float)
    p.add_argument("--u-max", type=float, help="default: one period past u-min")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("verify", parents=[common, family],
                       help="run residual, series and Green-function checks")
    p.add_argument("--check", choices=("residual", "fourier", "green", "all"))
    p.add_argument("--corrupt", metavar="TARGET:FACTOR",
                   help="scale one derived quantity first; checks must then fail")
    p.add_argument("--samples", type=int, help="residual sample count (default 256)")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("fourier", parents=[common, family],
                       help="harmonic coefficients and partial-sum deviation")
    p.add_argument("--n-coefficients", type=int, help="coefficient count (default 8)")
    p.set_defaults(handler=cmd_fourier)

    p = sub.add_parser("spectrum", parents=[common, family],
                       help="oscillation energy ladder")
    p.add_argument("--n-max", type=int, help="highest line index (default 4)")
    p.add_argument("--compare", choices=("green",),
                   help="add Green-function columns and check energy equality")
    p.set_defaults(handler=cmd_spectrum)

    p = sub.add_parser("green", parents=[common, family],
                       help="Green function spectral lines and phases")
    p.add_argument("--phase-index", type=int, help="phase family index n (default 0)")
    p.add_argument("--n-max", type=int, help="highest line index (default 4)")
    p.set_defaults(handler=cmd_green)

    p = sub.add_parser("simulate", parents=[common, family],
                       help="integrate the field equation on a periodic lattice")
    p.add_argument("--px", type=float, help="spatial momentum (default 0, rest frame)")
    p.add_argument("--nx", type=int, help="grid points (default 16 rest, 1024 travelling)")
    p.add_argument("--length", type=float, help="domain size (default: one wavelength)")
    p.add_argument("--dt", type=float, help="time step (overrides --cfl)")
    p.add_argument("--cfl", type=float, help="Courant number to derive dt from")
    p.add_argument("--periods", type=float, help="run length in oscillation periods (default 10)")
    p.set_defaults(handler=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config) if args.config else {}
        opt = Options(args, config)
        return args.handler(opt)
    except simulator.DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
