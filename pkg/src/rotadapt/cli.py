"""Command-line entry point: ``rotadapt {adapt,estimate-angle,simulate,experiment}``.

Settings resolve as command-line flag, then ``--config`` JSON file, then
built-in default. Results go to stdout and ``--out``; diagnostics and
errors go to stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

from . import __version__
from .adapt import AdaptationConfig, adapt_regression_report, estimate_angle
from .core import RotadaptError
from .datasets import format_points_csv, read_points_csv
from .plots import heatmap_svg, line_chart_svg
from .sim import (
    GRID_SIGMAS,
    GRID_THETAS,
    NS_SWEEP_VALUES,
    DomainSpec,
    generate_domain,
    run_ns_sweep,
    run_theta_sigma_grid,
)

DEFAULTS = {
    "seed": 0,
    "p_norm": 2.0,
    "repetitions": 100,
    "bootstrap_prop": 0.5,
    "x_range": [0.0, 10.0],
    "jobs": 1,
    "center_rotation": False,
    "out": None,
}
SIMULATE_DEFAULTS = {"theta": 0.0, "sigma": 1.0, "n": 100}
NS_SWEEP_DEFAULTS = {"runs": 1000, "ns": list(NS_SWEEP_VALUES), "theta": math.pi / 4,
                     "sigma": 1.0, "n_t": 10, "n_test": 1000}
GRID_DEFAULTS = {"runs": 100, "thetas": list(GRID_THETAS), "sigmas": list(GRID_SIGMAS),
                 "n_s": 1000, "n_t": 50, "n_test": 1000}
# |cos theta| below this is treated as a vertical line when typed on the command line
NEAR_VERTICAL_COS = 1e-4


class CLIError(Exception):
    pass


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(float(v)) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _x_range(text: str) -> list[float]:
    vals = _float_list(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"expected lo,hi, got {text!r}")
    return vals


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _add_shared(p: argparse.ArgumentParser) -> None:
    # defaults stay None so that a --config file can fill the gaps
    p.add_argument("--seed", type=_seed, help="master seed (unsigned 64-bit)")
    p.add_argument("--p-norm", dest="p_norm", type=float, help="transport cost norm order (>=1, 'inf' allowed)")
    p.add_argument("--repetitions", type=int, help="bootstrap repetitions N")
    p.add_argument("--bootstrap-prop", dest="bootstrap_prop", type=float, help="bootstrap proportion in (0, 1]")
    p.add_argument("--x-range", dest="x_range", type=_x_range, help="covariate range lo,hi")
    p.add_argument("--jobs", type=int, help="worker processes for trials")
    p.add_argument("--out", help="output directory")
    p.add_argument("--config", help="JSON file with default settings")
    p.add_argument("--center-rotation", dest="center_rotation", action=argparse.BooleanOptionalAction,
                   default=None, help="centre matched sets before the rotation fit")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rotadapt", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"rotadapt {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("adapt", help="adapt the source regression line to the target domain")
    p.add_argument("source_csv")
    p.add_argument("target_csv")
    _add_shared(p)

    p = sub.add_parser("estimate-angle", help="estimate the rotation from source to target")
    p.add_argument("source_csv")
    p.add_argument("target_csv")
    _add_shared(p)

    p = sub.add_parser("simulate", help="draw a synthetic line dataset as CSV")
    _add_shared(p)
    p.add_argument("--theta", type=float, help="line inclination in radians")
    p.add_argument("--sigma", type=float, help="noise standard deviation")
    p.add_argument("--n", type=int, help="number of points")

    p = sub.add_parser("experiment", help="Monte-Carlo experiments")
    esub = p.add_subparsers(dest="kind", required=True)
    e = esub.add_parser("ns-sweep", help="vary the source size")
    _add_shared(e)
    e.add_argument("--runs", type=int)
    e.add_argument("--ns", type=_int_list, help="comma-separated source sizes")
    e.add_argument("--theta", type=float)
    e.add_argument("--sigma", type=float)
    e.add_argument("--n-t", dest="n_t", type=int)
    e.add_argument("--n-test", dest="n_test", type=int)
    e = esub.add_parser("theta-sigma", help="grid over rotation angle and noise level")
    _add_shared(e)
    e.add_argument("--runs", type=int)
    e.add_argument("--thetas", type=_float_list, help="comma-separated angles in radians")
    e.add_argument("--sigmas", type=_float_list)
    e.add_argument("--n-s", dest="n_s", type=int)
    e.add_argument("--n-t", dest="n_t", type=int)
    e.add_argument("--n-test", dest="n_test", type=int)
    return parser


def resolve_settings(args: argparse.Namespace, extra_defaults: dict | None = None) -> dict:
    settings = dict(DEFAULTS)
    settings.update(extra_defaults or {})
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise CLIError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(loaded, dict):
            raise CLIError(f"config {args.config} must hold a JSON object")
        unknown = set(loaded) - set(settings)
        if unknown:
            raise CLIError(f"unknown config keys: {', '.join(sorted(unknown))}")
        settings.update(loaded)
    for key, value in vars(args).items():
        if key in settings and value is not None:
            settings[key] = value
    return settings


def _adaptation_config(s: dict) -> AdaptationConfig:
    return AdaptationConfig(
        n_repetitions=int(s["repetitions"]),
        bootstrap_proportion=float(s["bootstrap_prop"]),
        norm_order=float(s["p_norm"]),
        seed=int(s["seed"]),
        center_rotation=bool(s["center_rotation"]),
    )


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, allow_nan=True) + "\n")


def _manifest(command: str, settings: dict, started: float, outputs: list[str],
              inputs: list[str] | None = None) -> dict:
    return {
        "command": command,
        "inputs": inputs or [],
        "config": {k: v for k, v in sorted(settings.items()) if k != "config"},
        "seed": settings["seed"],
        "version": __version__,
        "outputs": outputs,
        "duration_seconds": round(time.perf_counter() - started, 3),
    }


def _out_dir(settings: dict, default: str | None = ".") -> Path | None:
    out = settings["out"] if settings["out"] is not None else default
    if out is None:
        return None
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def cmd_adapt(args, started) -> int:
    s = resolve_settings(args)
    source = read_points_csv(args.source_csv)
    target = read_points_csv(args.target_csv)
    report = adapt_regression_report(source, target, _adaptation_config(s))
    for rec in report.iterations:
        if rec.failure:
            print(f"iteration {rec.index}: failed ({rec.failure})", file=sys.stderr)
    print(f"a_r={report.line.a!r}")
    print(f"b_r={report.line.b!r}")
    failures = {}
    for rec in report.iterations:
        if rec.failure:
            failures[rec.failure] = failures.get(rec.failure, 0) + 1
    payload = {
        "a_r": report.line.a,
        "b_r": report.line.b,
        "source_fit": {"a": report.source_fit.a, "b": report.source_fit.b},
        "n_repetitions": len(report.iterations),
        "n_failed": report.n_failed,
        "failures": failures,
        "thetas": report.thetas,
        "iterations": [
            {
                "index": rec.index,
                "theta_hat": rec.theta_hat,
                "a": rec.line.a if rec.line else None,
                "b": rec.line.b if rec.line else None,
                "n_distinct": rec.n_distinct,
                "attempts": rec.attempts,
                "failure": rec.failure,
            }
            for rec in report.iterations
        ],
    }
    out = _out_dir(s)
    _write_json(out / "adapt_report.json", payload)
    _write_json(out / "manifest.json", _manifest("adapt", s, started, ["adapt_report.json"],
                                                       [args.source_csv, args.target_csv]))
    return 0


def cmd_estimate_angle(args, started) -> int:
    s = resolve_settings(args)
    source = read_points_csv(args.source_csv)
    target = read_points_csv(args.target_csv)
    est = estimate_angle(source, target, _adaptation_config(s))
    print(repr(est.theta_hat))
    out = _out_dir(s, default=None)
    if out is not None:
        payload = {
            "theta_hat": est.theta_hat,
            "assignment": [int(j) for j in est.plan.assignment],
            "transport_cost": est.plan.total_cost,
            "centroids": est.centroids.tolist(),
        }
        _write_json(out / "estimate.json", payload)
        _write_json(out / "manifest.json", _manifest("estimate-angle", s, started, ["estimate.json"],
                                                                [args.source_csv, args.target_csv]))
    return 0


def cmd_simulate(args, started) -> int:
    s = resolve_settings(args, SIMULATE_DEFAULTS)
    theta = float(s["theta"])
    if abs(math.cos(theta)) < NEAR_VERTICAL_COS:
        raise CLIError(f"theta={theta} is (numerically) vertical; slope tan(theta) is unbounded")
    spec = DomainSpec(theta, float(s["sigma"]), int(s["n"]), tuple(s["x_range"]), int(s["seed"]))
    text = format_points_csv(generate_domain(spec))
    out = _out_dir(s, default=None)
    if out is None:
        sys.stdout.write(text)
    else:
        (out / "dataset.csv").write_text(text)
        _write_json(out / "manifest.json", _manifest("simulate", s, started, ["dataset.csv"]))
    return 0


def _r(v: float) -> str:
    return repr(float(v))


def cmd_ns_sweep(args, started) -> int:
    s = resolve_settings(args, NS_SWEEP_DEFAULTS)
    results = run_ns_sweep(
        s["ns"], runs=int(s["runs"]), theta=float(s["theta"]), n_t=int(s["n_t"]),
        sigma=float(s["sigma"]), config=_adaptation_config(s), seed=int(s["seed"]),
        n_test=int(s["n_test"]), x_range=tuple(s["x_range"]), jobs=int(s["jobs"]),
    )
    lines = ["n_s,median_mse_target,median_mse_adapted,q1,q3,n_failed"]
    runs = ["n_s,run,mse_target,mse_adapted"]
    for res in results:
        q1, q3 = res.quartiles("adapted")
        lines.append(",".join([str(res.cell["n_s"]), _r(res.median_mse_target_only),
                               _r(res.median_mse_adapted), _r(q1), _r(q3), str(res.n_failed)]))
        for i, (t, a) in enumerate(zip(res.mse_target_only, res.mse_adapted)):
            runs.append(f"{res.cell['n_s']},{i},{_r(t)},{_r(a)}")
    summary = "\n".join(lines) + "\n"
    sys.stdout.write(summary)
    out = _out_dir(s)
    (out / "ns_sweep.csv").write_text(summary)
    (out / "ns_sweep_runs.csv").write_text("\n".join(runs) + "\n")
    svg = line_chart_svg(
        [r.cell["n_s"] for r in results],
        {"target only": [r.median_mse_target_only for r in results],
         "adapted": [r.median_mse_adapted for r in results]},
        title="Median MSE vs source size", xlabel="n_s", ylabel="median MSE",
    )
    (out / "ns_sweep.svg").write_text(svg)
    _write_json(out / "manifest.json", _manifest(
        "experiment ns-sweep", s, started, ["ns_sweep.csv", "ns_sweep_runs.csv", "ns_sweep.svg"]))
    return 0


def cmd_theta_sigma(args, started) -> int:
    s = resolve_settings(args, GRID_DEFAULTS)
    thetas = [float(t) for t in s["thetas"]]
    sigmas = [float(v) for v in s["sigmas"]]
    results = run_theta_sigma_grid(
        thetas, sigmas, runs=int(s["runs"]), n_s=int(s["n_s"]), n_t=int(s["n_t"]),
        config=_adaptation_config(s), seed=int(s["seed"]), n_test=int(s["n_test"]),
        x_range=tuple(s["x_range"]), jobs=int(s["jobs"]),
    )
    lines = ["theta,sigma,median_mse_target,median_mse_adapted,median_variation,q1_variation,q3_variation,n_failed"]
    for res in results:
        q1, q3 = res.quartiles("variation")
        lines.append(",".join([_r(res.cell["theta"]), _r(res.cell["sigma"]),
                               _r(res.median_mse_target_only), _r(res.median_mse_adapted),
                               _r(res.median_variation), _r(q1), _r(q3), str(res.n_failed)]))
    summary = "\n".join(lines) + "\n"
    sys.stdout.write(summary)
    out = _out_dir(s)
    (out / "theta_sigma.csv").write_text(summary)
    grid = [[r.median_variation for r in results[i * len(sigmas):(i + 1) * len(sigmas)]]
            for i in range(len(thetas))]
    svg = heatmap_svg(
        [f"{t / math.pi:.3f}π" for t in thetas], [f"{v:g}" for v in sigmas], grid,
        title="Median variation (target-only MSE / adapted MSE - 1)",
        row_label="theta", col_label="sigma",
    )
    (out / "theta_sigma.svg").write_text(svg)
    _write_json(out / "manifest.json", _manifest(
        "experiment theta-sigma", s, started, ["theta_sigma.csv", "theta_sigma.svg"]))
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    started = time.perf_counter()
    handlers = {
        "adapt": cmd_adapt,
        "estimate-angle": cmd_estimate_angle,
        "simulate": cmd_simulate,
    }
    try:
        if args.command == "experiment":
            handler = cmd_ns_sweep if args.kind == "ns-sweep" else cmd_theta_sigma
        else:
            handler = handlers[args.command]
        return handler(args, started)
    except RotadaptError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
