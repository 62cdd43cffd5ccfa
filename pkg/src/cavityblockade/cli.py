"""
Command-line entry point.

Subcommands: ``solve``, ``sweep``, ``figure``, ``spectrum``, ``selfcheck``.
Every physical value is in units of the cavity decay rate (kappa = 1).

Exit codes: 0 success, 1 selfcheck failure, 2 configuration error,
3 numerical failure.
"""
import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path

from . import __version__, checks, dynamics, observables, output, presets, sweep
from .model import PARAM_FIELDS, ModelParams

EXIT_OK, EXIT_SELFCHECK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
FAILURE_FRACTION = 0.05


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Flat run configuration; JSON config files use exactly these keys plus the model fields."""

    params: ModelParams = field(default_factory=ModelParams)
    axis: str = "delta_p"
    start: float = -60.0
    stop: float = 60.0
    points: int = 241
    auto_converge: bool = False
    output: str = None
    threads: int = None
    svg: bool = False
    solver: str = "auto"
    t_final: float = 100.0
    integrator_rtol: float = 1e-8
    n_exc: int = 1
    include_control: bool = True

    def sweep_spec(self) -> sweep.SweepSpec:
        return sweep.SweepSpec(self.params, self.axis, self.start, self.stop, self.points,
                               self.auto_converge)

    def workers(self) -> int:
        return self.threads if self.threads else (os.cpu_count() or 1)


_RUN_KEYS = tuple(f.name for f in fields(RunConfig) if f.name != "params")
CONFIG_KEYS = PARAM_FIELDS + _RUN_KEYS
_BOOL_KEYS = {"auto_converge", "svg", "include_control"}
_INT_KEYS = {"fock_cutoff", "points", "threads", "n_exc"}
_STR_KEYS = {"axis", "output", "solver"}


def _coerce(key, value):
    if key in _BOOL_KEYS:
        if isinstance(value, bool):
            return value
        if isinstance(value, str) and value.lower() in ("true", "false", "1", "0"):
            return value.lower() in ("true", "1")
        raise ConfigError(f"{key} must be a boolean, got {value!r}")
    if key in _STR_KEYS:
        if value is None or isinstance(value, str):
            return value
        raise ConfigError(f"{key} must be a string, got {value!r}")
    if key in _INT_KEYS:
        if value is None and key == "threads":
            return None
        try:
            as_float = float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"{key} must be an integer, got {value!r}") from None
        if isinstance(value, bool) or not as_float.is_integer():
            raise ConfigError(f"{key} must be an integer, got {value!r}")
        return int(as_float)
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key} must be a number, got {value!r}") from None
    if isinstance(value, bool) or not math.isfinite(out):
        raise ConfigError(f"{key} must be a finite number, got {value!r}")
    return out


def load_config_file(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    return raw


def build_config(values: dict) -> RunConfig:
    """Validate a flat key/value mapping into a :class:`RunConfig`; unknown keys are rejected."""
    unknown = sorted(set(values) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    clean = {k: _coerce(k, v) for k, v in values.items()}
    try:
        params = ModelParams(**{k: clean[k] for k in PARAM_FIELDS if k in clean})
        cfg = RunConfig(params=params, **{k: clean[k] for k in _RUN_KEYS if k in clean})
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    if cfg.solver not in dynamics.SOLVE_METHODS:
        raise ConfigError(f"solver must be one of {dynamics.SOLVE_METHODS}")
    if cfg.threads is not None and cfg.threads < 1:
        raise ConfigError("threads must be >= 1")
    if not cfg.t_final > 0 or not cfg.integrator_rtol > 0:
        raise ConfigError("t_final and integrator_rtol must be > 0")
    return cfg


def _parse_set(items) -> dict:
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        try:
            out[key.strip()] = json.loads(value)
        except json.JSONDecodeError:
            out[key.strip()] = value
    return out


def resolve_config(args) -> RunConfig:
    values = load_config_file(args.config) if getattr(args, "config", None) else {}
    values.update(_parse_set(getattr(args, "set", None)))
    for key in ("output", "threads", "fock_cutoff", "n_exc"):
        value = getattr(args, key, None)
        if value is not None:
            values[key] = value
    for key in ("auto_converge", "svg"):
        if getattr(args, key, False):
            values[key] = True
    if getattr(args, "no_control", False):
        values["include_control"] = False
    return build_config(values)


def _emit(text: str, path):
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _record(method, stats: observables.PhotonStats, residual, cutoff) -> dict:
    return {
        "method": method,
        "mean_n": stats.mean_n,
        "g2": stats.g2,
        "g3": stats.g3,
        "g2_defined": stats.g2_defined,
        "g3_defined": stats.g3_defined,
        "residual": residual,
        "fock_cutoff": cutoff,
    }


def cmd_solve(args) -> int:
    cfg = resolve_config(args)
    params = cfg.params
    if cfg.auto_converge:
        params = params.replace(fock_cutoff=sweep.converge_cutoff(params))
    rho, info = dynamics.solve_model(params, full_output=True, method=cfg.solver)
    records = [_record(f"steady_state:{info.method}", observables.photon_stats(rho),
                       info.residual, params.fock_cutoff)]
    if args.via_time_evolution:
        rho_t = dynamics.evolve_model(params, cfg.t_final, rtol=cfg.integrator_rtol)
        L = dynamics.model_liouvillian(params)
        residual = float(abs(L @ dynamics.vec(rho_t)).max())
        records.append(_record(f"time_evolution:t={cfg.t_final:g}", observables.photon_stats(rho_t),
                               residual, params.fock_cutoff))
    _emit("".join(json.dumps(r, sort_keys=True) + "\n" for r in records), cfg.output)
    return EXIT_OK


def _sweep_metadata(spec: sweep.SweepSpec, **extra) -> dict:
    meta = {"params": spec.base.as_dict(), "axis": spec.axis, "start": spec.start,
            "stop": spec.stop, "points": spec.points, "auto_converge": spec.auto_converge,
            "units": "kappa = 1"}
    meta.update(extra)
    return meta


def _failed(rows) -> int:
    return sum(not r.converged for r in rows)


def cmd_sweep(args) -> int:
    cfg = resolve_config(args)
    try:
        spec = cfg.sweep_spec()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    rows = sweep.run_sweep(spec, workers=cfg.workers())
    _emit(output.csv_text(rows, _sweep_metadata(spec)), cfg.output)
    if cfg.svg and cfg.output:
        Path(cfg.output).with_suffix(".svg").write_text(
            output.svg_text(rows, "sweep", spec.axis), encoding="utf-8")
    return EXIT_NUMERIC if _failed(rows) > FAILURE_FRACTION * len(rows) else EXIT_OK


def run_figure(preset_id: str, out_dir, workers: int = 1, svg: bool = False,
               auto_converge: bool = False) -> tuple:
    """Write one CSV (and optional SVG) per preset variant; returns ``(paths, worst failure fraction)``."""
    preset = presets.get_preset(preset_id)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths, worst = [], 0.0
    for variant in preset.variants:
        spec = variant.spec
        if auto_converge:
            spec = sweep.SweepSpec(spec.base, spec.axis, spec.start, spec.stop, spec.points, True)
        rows = sweep.run_sweep(spec, workers=workers)
        worst = max(worst, _failed(rows) / len(rows))
        stem = f"{preset_id}_{variant.name}"
        meta = _sweep_metadata(spec, preset=preset_id, variant=variant.name,
                               description=preset.description)
        path = out_dir / f"{stem}.csv"
        path.write_text(output.csv_text(rows, meta), encoding="utf-8")
        paths.append(path)
        if svg:
            svg_path = out_dir / f"{stem}.svg"
            svg_path.write_text(output.svg_text(rows, f"{preset_id} {variant.name}", spec.axis),
                                encoding="utf-8")
            paths.append(svg_path)
    return paths, worst


def cmd_figure(args) -> int:
    cfg = resolve_config(args)
    try:
        presets.get_preset(args.preset)
    except KeyError as exc:
        raise ConfigError(exc.args[0]) from None
    paths, worst = run_figure(args.preset, cfg.output or ".", cfg.workers(), cfg.svg,
                              cfg.auto_converge)
    for p in paths:
        print(p)
    if worst > FAILURE_FRACTION:
        print(f"error: {worst:.1%} of grid points failed", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def spectrum_table(spec: observables.ManifoldSpectrum, min_overlap: float = 1e-6) -> str:
    lines = [f"# excitation manifold n_exc = {spec.n_exc}",
             f"{'eigenvalue':>14}  coupled  overlaps"]
    for k, value in enumerate(spec.eigenvalues):
        ov = spec.label_overlaps(k)
        text = ", ".join(f"{lab}: {w:.6f}" for lab, w in ov.items() if w > min_overlap)
        lines.append(f"{value:14.9f}  {'yes' if spec.cavity_coupled[k] else 'no ':>7}  {text}")
    return "\n".join(lines) + "\n"


def spectrum_json(spec: observables.ManifoldSpectrum) -> str:
    out = {
        "n_exc": spec.n_exc,
        "eigenvalues": spec.eigenvalues.tolist(),
        "cavity_coupled": spec.cavity_coupled.tolist(),
        "overlaps": [spec.label_overlaps(k) for k in range(spec.eigenvalues.size)],
    }
    return json.dumps(out, sort_keys=True) + "\n"


def cmd_spectrum(args) -> int:
    cfg = resolve_config(args)
    try:
        spec = observables.manifold_spectrum(cfg.params, cfg.n_exc, cfg.include_control)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    _emit(spectrum_json(spec) if args.json else spectrum_table(spec), cfg.output)
    return EXIT_OK


def cmd_selfcheck(args) -> int:
    results = checks.run_selfcheck()
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_SELFCHECK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cavityblockade", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, threads=False):
        p.add_argument("--config", metavar="PATH", help="JSON object of config keys")
        p.add_argument("--set", metavar="KEY=VALUE", action="append",
                       help="override one config key (repeatable)")
        p.add_argument("--output", metavar="PATH")
        p.add_argument("--fock-cutoff", type=int, metavar="N")
        if threads:
            p.add_argument("--threads", type=int, metavar="N",
                           help="worker processes for sweep points (default: CPU count)")

    p = sub.add_parser("solve", help="steady state at one parameter point")
    common(p)
    p.add_argument("--auto-converge", action="store_true")
    p.add_argument("--via-time-evolution", action="store_true",
                   help="also integrate from vacuum to t_final and report both records")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="one-axis parameter scan to CSV")
    common(p, threads=True)
    p.add_argument("--auto-converge", action="store_true")
    p.add_argument("--svg", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("figure", help="reproduce a figure preset")
    p.add_argument("preset", help=", ".join(presets.PRESETS))
    common(p, threads=True)
    p.add_argument("--auto-converge", action="store_true")
    p.add_argument("--svg", action="store_true")
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("spectrum", help="dressed states of one excitation manifold")
    common(p)
    p.add_argument("--n-exc", type=int, metavar="N")
    p.add_argument("--no-control", action="store_true", help="drop the control field")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("selfcheck", help="run the invariant checks")
    p.set_defaults(func=cmd_selfcheck)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except dynamics.SolverError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
