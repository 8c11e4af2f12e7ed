"""Command-line front end: analyze, simulate, sweep, verify.

Configs are JSON files with a shared schema (:class:`RunConfig`); graphs
are separate edge-list files referenced from the config.  All outputs
are written atomically (temp file + rename) as JSON reports or CSV time
series, with floats at 17 significant digits so files round-trip to the
in-memory values exactly and reruns with the same config and seed are
byte-identical.

Exit codes: 0 success, 1 I/O or parse problem, 2 structurally invalid
graph (not strongly connected and weight-balanced), 3 inadmissible or
out-of-range parameters, 4 numerical failure (including failed
verification checks).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import verify as _verify
from .bounds import AlgorithmParams, build_ct_report, build_dt_report
from .errors import GraphStructureError, InputFormatError, ToolkitError
from .graph import Digraph, laplacian, read_edge_list, validate
from .signals import (
    ArctanRamp,
    Constant,
    Ramp,
    SampledHold,
    Signal,
    Sinusoid,
    Sum,
    constant_catalog,
    sampled_hold_catalog,
    smooth_catalog,
)
from .sim import Trajectory, signal_variation_gamma, simulate_ct, simulate_dt
from .spectral import Spectrum

__all__ = ["RunConfig", "load_config", "build_signals", "load_trajectory_csv", "main"]

_DEFAULT_VERIFY_SEED = 20260824


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    """Parsed, type-checked run configuration.

    ``tau``/``h``/``horizon`` are continuous-time fields,
    ``delta``/``d``/``steps`` discrete-time fields; only the fields of
    the selected ``mode`` are populated.  ``signals_spec`` keeps the raw
    JSON signal description so sweep workers can rebuild signal objects
    deterministically from ``seed``.
    """

    mode: str
    graph_path: Path
    graph: Digraph
    beta: float
    tau: float | None
    h: float | None
    horizon: float | None
    delta: float | None
    d: int | None
    steps: int | None
    signals_spec: Any
    seed: int
    out_dir: Path
    sweep_parameter: str | None
    sweep_values: tuple[float, ...] | None


def _get_number(
    data: dict, key: str, label: str, required: bool = False, positive: bool = False
) -> float | None:
    if key not in data:
        if required:
            raise InputFormatError(f'{label}: missing required field "{key}"')
        return None
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InputFormatError(f'{label}: field "{key}" must be a number, got {value!r}')
    if positive and not value > 0:
        raise InputFormatError(f'{label}: field "{key}" must be positive, got {value!r}')
    return float(value)


def _get_int(
    data: dict, key: str, label: str, required: bool = False, minimum: int | None = None
) -> int | None:
    value = _get_number(data, key, label, required=required)
    if value is None:
        return None
    if value != int(value):
        raise InputFormatError(f'{label}: field "{key}" must be an integer, got {value!r}')
    result = int(value)
    if minimum is not None and result < minimum:
        raise InputFormatError(f'{label}: field "{key}" must be >= {minimum}, got {result}')
    return result


def load_config(
    path: Path, out_override: str | None = None, seed_override: int | None = None
) -> RunConfig:
    """Read and validate a JSON run configuration.

    Relative paths inside the config (graph file, output directory) are
    resolved against the config file's own directory; ``--out`` and
    ``--seed`` command-line values take precedence over config fields.
    Schema violations raise :class:`InputFormatError` (exit 1); values
    that parse but are out of range raise :class:`ParameterError`
    subclasses (exit 3) when the analysis runs.
    """
    path = Path(path)
    label = str(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputFormatError(f"cannot read config {label}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputFormatError(
            f"{label}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(data, dict):
        raise InputFormatError(f"{label}: top-level JSON value must be an object")

    mode = data.get("mode")
    if mode not in ("ct", "dt"):
        raise InputFormatError(f'{label}: field "mode" must be "ct" or "dt", got {mode!r}')
    if "graph" not in data or not isinstance(data["graph"], str):
        raise InputFormatError(f'{label}: field "graph" must be a path to an edge-list file')
    graph_path = path.parent / data["graph"]
    graph = read_edge_list(graph_path)

    beta = _get_number(data, "beta", label, required=True)
    tau = h = horizon = delta = None
    d = steps = None
    if mode == "ct":
        tau = _get_number(data, "tau", label, required=True)
        h = _get_number(data, "h", label, required=True, positive=True)
        horizon = _get_number(data, "horizon", label, positive=True)
        AlgorithmParams(beta=beta, tau=tau)
    else:
        delta = _get_number(data, "delta", label, required=True)
        d = _get_int(data, "d", label, required=True)
        steps = _get_int(data, "steps", label, minimum=1)
        AlgorithmParams(beta=beta, delta=delta, d=d)

    seed = seed_override if seed_override is not None else _get_int(data, "seed", label) or 0

    if out_override is not None:
        out_dir = Path(out_override)
    elif "out" in data:
        if not isinstance(data["out"], str):
            raise InputFormatError(f'{label}: field "out" must be a directory path')
        out_dir = path.parent / data["out"]
    else:
        out_dir = Path(".")

    sweep_parameter = None
    sweep_values: tuple[float, ...] | None = None
    if "sweep" in data:
        sweep = data["sweep"]
        if not isinstance(sweep, dict):
            raise InputFormatError(f'{label}: field "sweep" must be an object')
        sweep_parameter = sweep.get("parameter")
        expected = "tau" if mode == "ct" else "d"
        if sweep_parameter != expected:
            raise InputFormatError(
                f'{label}: sweep parameter must be "{expected}" in {mode} mode,'
                f" got {sweep_parameter!r}"
            )
        values = sweep.get("values")
        if not isinstance(values, list) or not values:
            raise InputFormatError(f'{label}: sweep "values" must be a non-empty list')
        parsed = []
        for i, v in enumerate(values):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise InputFormatError(f"{label}: sweep value #{i + 1} must be a number, got {v!r}")
            if mode == "dt" and v != int(v):
                raise InputFormatError(
                    f"{label}: sweep value #{i + 1} must be an integer delay, got {v!r}"
                )
            parsed.append(float(v))
        sweep_values = tuple(parsed)

    return RunConfig(
        mode=mode,
        graph_path=graph_path,
        graph=graph,
        beta=beta,
        tau=tau,
        h=h,
        horizon=horizon,
        delta=delta,
        d=d,
        steps=steps,
        signals_spec=data.get("signals"),
        seed=seed,
        out_dir=out_dir,
        sweep_parameter=sweep_parameter,
        sweep_values=sweep_values,
    )


# ---------------------------------------------------------------------------
# Signal specifications
# ---------------------------------------------------------------------------

_SIGNAL_KEYS = {
    "constant": {"level"},
    "sinusoid": {"amplitude", "omega", "phase", "offset"},
    "ramp": {"slope"},
    "arctan": {"gain", "rate"},
    "sampled-hold": {"seed", "stream", "bias", "offset", "period", "omega_sigma", "phase_sigma"},
    "sum": {"terms"},
}


def _parse_signal(entry: Any, seed: int, label: str) -> Signal:
    if not isinstance(entry, dict) or "kind" not in entry:
        raise InputFormatError(f'{label}: each signal must be an object with a "kind" field')
    kind = entry["kind"]
    if kind not in _SIGNAL_KEYS:
        raise InputFormatError(
            f"{label}: unknown signal kind {kind!r}; valid kinds: {', '.join(_SIGNAL_KEYS)}"
        )
    extra = set(entry) - _SIGNAL_KEYS[kind] - {"kind"}
    if extra:
        raise InputFormatError(
            f"{label}: signal kind {kind!r} does not accept field(s) {', '.join(sorted(extra))}"
        )
    if kind == "constant":
        return Constant(_get_number(entry, "level", label, required=True))
    if kind == "sinusoid":
        return Sinusoid(
            _get_number(entry, "amplitude", label, required=True),
            _get_number(entry, "omega", label, required=True),
            phase=_get_number(entry, "phase", label) or 0.0,
            offset=_get_number(entry, "offset", label) or 0.0,
        )
    if kind == "ramp":
        return Ramp(_get_number(entry, "slope", label, required=True))
    if kind == "arctan":
        return ArctanRamp(
            _get_number(entry, "gain", label, required=True),
            _get_number(entry, "rate", label, required=True),
        )
    if kind == "sampled-hold":
        hold_seed = _get_int(entry, "seed", label)
        kwargs = {}
        for key in ("bias", "offset", "period", "omega_sigma", "phase_sigma"):
            value = _get_number(entry, key, label)
            if value is not None:
                kwargs[key] = value
        return SampledHold(
            seed=hold_seed if hold_seed is not None else seed,
            stream=_get_int(entry, "stream", label) or 0,
            **kwargs,
        )
    terms = entry["terms"]
    if not isinstance(terms, list) or not terms:
        raise InputFormatError(f'{label}: "sum" signal needs a non-empty "terms" list')
    return Sum([_parse_signal(t, seed, label) for t in terms])


def build_signals(spec: Any, n: int, seed: int, label: str = "config") -> list[Signal]:
    """Construct the per-agent signal list a config describes.

    ``spec`` is either ``{"catalog": ...}`` naming one of the built-in
    families (``smooth``, ``sampled-hold``, ``constant``) or a list of
    exactly ``n`` per-agent signal objects (kinds: constant, sinusoid,
    ramp, arctan, sampled-hold, sum).
    """
    if spec is None:
        raise InputFormatError(f'{label}: missing "signals" section')
    if isinstance(spec, dict):
        catalog = spec.get("catalog")
        if catalog == "smooth":
            extra = set(spec) - {"catalog"}
            if extra:
                raise InputFormatError(
                    f"{label}: smooth catalog takes no extra fields, got {', '.join(sorted(extra))}"
                )
            return smooth_catalog(n)
        if catalog == "sampled-hold":
            extra = set(spec) - {"catalog", "seed", "period"}
            if extra:
                raise InputFormatError(
                    f"{label}: sampled-hold catalog fields are seed and period,"
                    f" got {', '.join(sorted(extra))}"
                )
            cat_seed = _get_int(spec, "seed", label)
            period = _get_number(spec, "period", label, positive=True)
            return sampled_hold_catalog(
                n,
                seed=cat_seed if cat_seed is not None else seed,
                period=period if period is not None else 5.0,
            )
        if catalog == "constant":
            levels = spec.get("levels")
            if not isinstance(levels, list) or len(levels) != n:
                raise InputFormatError(
                    f'{label}: constant catalog needs a "levels" list of length {n}'
                )
            for i, v in enumerate(levels):
                if isinstance(v, bool) or not isinstance(v, (int, float)):
                    raise InputFormatError(f"{label}: level #{i + 1} must be a number, got {v!r}")
            return constant_catalog([float(v) for v in levels])
        raise InputFormatError(
            f"{label}: unknown catalog {catalog!r}; valid catalogs:"
            f" smooth, sampled-hold, constant"
        )
    if isinstance(spec, list):
        if len(spec) != n:
            raise InputFormatError(
                f"{label}: expected {n} per-agent signals (one per node), got {len(spec)}"
            )
        return [_parse_signal(entry, seed, label) for entry in spec]
    raise InputFormatError(f'{label}: "signals" must be a catalog object or a list')


# ---------------------------------------------------------------------------
# Serialization helpers
# ---------------------------------------------------------------------------


def _atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _jsonify(obj: Any) -> Any:
    """Convert report payloads to strict-JSON-safe plain Python values.

    Non-finite floats become ``null`` (strict JSON has no Infinity/NaN);
    complex numbers become ``[real, imag]`` pairs.
    """
    if isinstance(obj, dict):
        return {str(k): _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if math.isfinite(value) else None
    if isinstance(obj, (complex, np.complexfloating)):
        return [_jsonify(obj.real), _jsonify(obj.imag)]
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__} to JSON")


def _write_json(path: Path, payload: Any) -> None:
    _atomic_write(path, json.dumps(_jsonify(payload), sort_keys=True, indent=2) + "\n")


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _trajectory_csv(traj: Trajectory) -> str:
    n = traj.x.shape[1]
    header = (
        "t,"
        + ",".join(f"x_{i}" for i in range(1, n + 1))
        + ","
        + ",".join(f"e_{i}" for i in range(1, n + 1))
    )
    lines = [header]
    for k in range(len(traj.times)):
        cells = [_fmt(traj.times[k])]
        cells.extend(_fmt(v) for v in traj.x[k])
        cells.extend(_fmt(v) for v in traj.errors[k])
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def load_trajectory_csv(path: Path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Read back an emitted trajectory file as ``(times, x, errors)``.

    Inverse of the ``simulate`` command's CSV writer; because values are
    printed at 17 significant digits the arrays match the originals
    bit for bit.
    """
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputFormatError(f"cannot read trajectory {path}: {exc}") from exc
    lines = [ln for ln in text.splitlines() if ln]
    if not lines or not lines[0].startswith("t,"):
        raise InputFormatError(f"{path}: not a trajectory file (missing 't,...' header)")
    n, rem = divmod(len(lines[0].split(",")) - 1, 2)
    if rem or n < 1:
        raise InputFormatError(f"{path}: header must list x_1..x_n followed by e_1..e_n")
    rows = []
    for i, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != 1 + 2 * n:
            raise InputFormatError(f"{path}: line {i}: expected {1 + 2 * n} columns")
        try:
            rows.append([float(c) for c in cells])
        except ValueError as exc:
            raise InputFormatError(f"{path}: line {i}: {exc}") from exc
    data = np.array(rows, dtype=float)
    return data[:, 0], data[:, 1 : 1 + n], data[:, 1 + n :]


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _ensure_scwb(g: Digraph) -> None:
    report = validate(g)
    if not report.is_scwb:
        problems = []
        if not report.strongly_connected:
            problems.append("not strongly connected")
        if not report.weight_balanced:
            problems.append(
                f"not weight-balanced (in/out degree mismatch {report.balance_residual:.3g})"
            )
        raise GraphStructureError(
            "graph does not meet the structural requirements: " + "; ".join(problems)
        )


def _maybe_gamma(cfg: RunConfig) -> float | None:
    if cfg.signals_spec is None:
        return None
    signals = build_signals(cfg.signals_spec, cfg.graph.n, cfg.seed, "config")
    if cfg.mode == "ct":
        if cfg.horizon is None:
            return None
        return signal_variation_gamma(signals, cfg.horizon, "ct")
    if cfg.steps is None:
        return None
    return signal_variation_gamma(signals, cfg.steps * cfg.delta, "dt", delta=cfg.delta)


def cmd_analyze(args: argparse.Namespace) -> int:
    cfg = load_config(Path(args.config), args.out, args.seed)
    _ensure_scwb(cfg.graph)
    structure = validate(cfg.graph)
    spectrum = Spectrum.from_laplacian(laplacian(cfg.graph))
    gamma = _maybe_gamma(cfg)
    if cfg.mode == "ct":
        report = build_ct_report(cfg.graph, cfg.beta, cfg.tau, gamma=gamma)
    else:
        report = build_dt_report(cfg.graph, cfg.beta, cfg.delta, cfg.d, gamma=gamma)
    out_path = cfg.out_dir / "report.json"
    _write_json(
        out_path,
        {
            "structure": structure.to_dict(),
            "spectrum": spectrum.to_dict(),
            "report": report.to_dict(),
        },
    )
    print(f"wrote {out_path}")
    return 0


def _run_once(cfg: RunConfig, value: float | None = None) -> tuple[Trajectory, Any]:
    """Simulate one configuration (optionally overriding the swept delay)."""
    signals = build_signals(cfg.signals_spec, cfg.graph.n, cfg.seed, "config")
    if cfg.mode == "ct":
        tau = cfg.tau if value is None else float(value)
        if cfg.horizon is None:
            raise InputFormatError('continuous-time simulation needs a "horizon" field')
        traj = simulate_ct(cfg.graph, cfg.beta, tau, signals, cfg.h, cfg.horizon)
        gamma = signal_variation_gamma(signals, cfg.horizon, "ct")
        report = build_ct_report(cfg.graph, cfg.beta, tau, gamma=gamma)
    else:
        d = cfg.d if value is None else int(value)
        if cfg.steps is None:
            raise InputFormatError('discrete-time simulation needs a "steps" field')
        traj = simulate_dt(cfg.graph, cfg.beta, cfg.delta, d, signals, cfg.steps)
        gamma = signal_variation_gamma(signals, cfg.steps * cfg.delta, "dt", delta=cfg.delta)
        report = build_dt_report(cfg.graph, cfg.beta, cfg.delta, d, gamma=gamma)
    return traj, report


def cmd_simulate(args: argparse.Namespace) -> int:
    cfg = load_config(Path(args.config), args.out, args.seed)
    _ensure_scwb(cfg.graph)
    traj, report = _run_once(cfg)
    csv_path = cfg.out_dir / "trajectory.csv"
    _atomic_write(csv_path, _trajectory_csv(traj))
    summary_path = cfg.out_dir / "summary.json"
    _write_json(
        summary_path,
        {
            "mode": cfg.mode,
            "classification": traj.classification,
            "steady_error": traj.steady_error,
            "gamma": report.gamma,
            "tracking_bound": report.tracking_bound,
            "report": report.to_dict(),
        },
    )
    print(f"wrote {csv_path}")
    print(f"wrote {summary_path}")
    print(f"classification: {traj.classification}; steady error: {traj.steady_error:.6g}")
    return 0


def _sweep_row(cfg: RunConfig, value: float) -> dict:
    traj, report = _run_once(cfg, value)
    return {
        "value": value,
        "classification": traj.classification,
        "steady_error": traj.steady_error,
        "gamma": report.gamma,
        "tracking_bound": report.tracking_bound,
        "admissible": report.admissible,
    }


def _sweep_task(payload: tuple[str, str | None, int | None, float]) -> dict:
    config_path, out_override, seed_override, value = payload
    cfg = load_config(Path(config_path), out_override, seed_override)
    return _sweep_row(cfg, value)


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = load_config(Path(args.config), args.out, args.seed)
    _ensure_scwb(cfg.graph)
    if cfg.sweep_values is None:
        raise InputFormatError('sweep requires a "sweep" section with "parameter" and "values"')
    if args.jobs > 1:
        payloads = [(args.config, args.out, args.seed, v) for v in cfg.sweep_values]
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sweep_task, payloads))
    else:
        rows = [_sweep_row(cfg, v) for v in cfg.sweep_values]

    lines = ["value,classification,steady_error,tracking_bound"]
    for row in rows:
        bound = "" if row["tracking_bound"] is None else _fmt(row["tracking_bound"])
        lines.append(
            f"{_fmt(row['value'])},{row['classification']},{_fmt(row['steady_error'])},{bound}"
        )
    csv_path = cfg.out_dir / "sweep.csv"
    _atomic_write(csv_path, "\n".join(lines) + "\n")
    json_path = cfg.out_dir / "sweep.json"
    _write_json(json_path, {"parameter": cfg.sweep_parameter, "rows": rows})
    print(f"wrote {csv_path}")
    print(f"wrote {json_path}")
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    start = time.perf_counter()
    seed = args.seed if args.seed is not None else _DEFAULT_VERIFY_SEED
    results = _verify.run_all(seed=seed, inject=args.inject)
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        print(f"{status} {result.name}: {result.detail}")
    passed = sum(r.passed for r in results)
    elapsed = time.perf_counter() - start
    print(f"{passed}/{len(results)} checks passed in {elapsed:.1f} s")
    return 0 if passed == len(results) else 4


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with the I/O/parse code."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="dacdelay",
        description=(
            "Delay bounds, convergence rates and tracking-error envelopes for"
            " average-consensus trackers on directed graphs, with matching"
            " continuous- and discrete-time simulators."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_analyze = sub.add_parser("analyze", help="compute bounds and write report.json")
    p_simulate = sub.add_parser("simulate", help="run one simulation; write CSV + summary")
    p_sweep = sub.add_parser("sweep", help="simulate over a grid of delays; write CSV + JSON")
    for p in (p_analyze, p_simulate, p_sweep):
        p.add_argument("--config", required=True, help="path to a JSON run configuration")
        p.add_argument("--out", default=None, help="output directory (default: from config or .)")
        p.add_argument("--seed", type=int, default=None, help="override the config's seed")
    p_sweep.add_argument("--jobs", type=int, default=1, help="parallel workers (default 1)")

    p_verify = sub.add_parser("verify", help="run the built-in invariant checks")
    p_verify.add_argument("--seed", type=int, default=None, help="seed for generated instances")
    p_verify.add_argument(
        "--inject",
        default=None,
        metavar="CHECK",
        help="plant a deliberate fault in the named check (it must then fail)",
    )

    p_analyze.set_defaults(func=cmd_analyze)
    p_simulate.set_defaults(func=cmd_simulate)
    p_sweep.set_defaults(func=cmd_sweep)
    p_verify.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ToolkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
