"""Command-line interface.

Subcommands map one to one onto library calls::

    wolfsim simulate     --scenario PLUCK-0S --out runs/pluck0
    wolfsim sweep        --scenario PLUCK-1S --out runs/map --resolution 9
    wolfsim sensitivity  --scenario PLUCK-1S --axis f_su --factors 0.8,1,1.2
    wolfsim analyze      cello.wav --segment 0:1.2 --segment 1.2:2.5

Exit codes: 0 success, 1 invalid input, 2 simulation failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import files
from .analysis import evaluate, note_spectrum
from .config import SCENARIOS, RunManifest, build_scenario, load_config
from .errors import ConfigError, WolfsimError
from .params import SuppressorParams
from .simulator import run_all_notes
from .sweep import (
    SENSITIVITY_AXES,
    cross_sweep_two,
    placement_sweep,
    reference_spectra,
    resolve_resolution,
    scenario_report,
    sensitivity_scan,
    sweep_axis,
)

log = logging.getLogger("wolfsim")

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME, EXIT_IO = 0, 1, 2, 3


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _segment(text: str) -> tuple[float, float]:
    try:
        a, b = text.split(":")
        return float(a), float(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected START:END in seconds, got {text!r}")


def _out_dir(path: str) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _flags(args) -> tuple[str, ...]:
    return tuple(
        f"--{k.replace('_', '-')}={v}"
        for k, v in sorted(vars(args).items())
        if k not in ("func", "scenario", "config", "out", "command") and v not in (None, False)
    )


def _manifest(args, out: Path, resolution=None) -> None:
    m = RunManifest(args.scenario, args.config, str(out), resolution, _flags(args))
    files.write_json(m.as_dict(), out / "manifest.json")


def cmd_simulate(args) -> int:
    cfg = build_scenario(args.scenario, args.config)
    out = _out_dir(args.out)
    recs = run_all_notes(cfg, engine=args.engine)
    reference = None
    if cfg.n_notes >= 2:
        if cfg.suppressors:
            reference = reference_spectra(cfg)
        else:
            p = cfg.indicators
            reference = [note_spectrum(r.body, r.sample_rate, p.log_floor) for r in recs]
    report = evaluate([r.body for r in recs], recs[0].sample_rate, cfg.indicators, reference)
    for r in recs:
        files.write_wav(r, out / f"note_{r.note:02d}.wav", args.decimate)
    files.write_json({"scenario": cfg.name, **report.as_dict()}, out / "report.json")
    _manifest(args, out)
    for k, j in enumerate(report.j_wolf, start=1):
        print(f"note {k}: j_wolf = {j:.4f}")
    print(f"J_wolf = {report.J_wolf:.4f}  J_sustain = {report.J_sustain:.4e}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = build_scenario(args.scenario, args.config)
    n = resolve_resolution(args.resolution, args.full_scale)
    axis = sweep_axis(n)
    out = _out_dir(args.out)
    if args.scenario == "BOW-2S":
        single = build_scenario("BOW-1S", args.config)
        ref = reference_spectra(cfg)
        baseline = scenario_report(single, ref)
        h = cross_sweep_two(cfg, baseline, axis, axis, workers=args.workers, reference=ref)
    else:
        if not cfg.suppressors:
            cfg = cfg.with_suppressors((SuppressorParams(),))
        h = placement_sweep(cfg, axis, axis, workers=args.workers)
    files.write_heatmap_csv(h, out / "heatmap.csv")
    _manifest(args, out, n)
    print(f"{n}x{n} cells, {len(h.errors)} failed -> {out / 'heatmap.csv'}")
    return EXIT_OK if not h.errors else EXIT_RUNTIME


def cmd_sensitivity(args) -> int:
    cfg = build_scenario(args.scenario, args.config)
    if len(cfg.suppressors) != 1:
        raise ConfigError("scenario must have exactly one suppressor", "scenario")
    if args.values:
        values = args.values
    else:
        base = getattr(cfg.suppressors[0], SENSITIVITY_AXES[args.axis])
        values = [f * base for f in args.factors]
    curve = sensitivity_scan(cfg, args.axis, values, workers=args.workers)
    out = _out_dir(args.out)
    files.write_curve_csv(curve, out / f"sensitivity_{args.axis}.csv")
    _manifest(args, out)
    for v, j in zip(curve.values, curve.j_wolf):
        print(f"{args.axis} = {v:.6g}: j_wolf = {j:.4f}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    params = load_config(args.config).indicators
    j = files.analyze_external(args.wav, params, args.segment or [])
    result = {"file": str(args.wav), "segments": [list(s) for s in args.segment or []], "j_wolf": j}
    if args.out:
        files.write_json(result, _out_dir(args.out) / "analysis.json")
    for k, v in enumerate(j, start=1):
        print(f"segment {k}: j_wolf = {v:.4f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wolfsim", description="Wolf-note simulation and analysis")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, scenario_default):
        p.add_argument("--scenario", choices=SCENARIOS, default=scenario_default)
        p.add_argument("--config", help="JSON file merged onto the default configuration")
        p.add_argument("--workers", type=int, default=None, help="worker processes (default: all cores)")

    p = sub.add_parser("simulate", help="simulate all notes of a scenario")
    common(p, "PLUCK-0S")
    p.add_argument("--out", required=True)
    p.add_argument("--decimate", type=int, default=1, help="integer WAV decimation factor")
    p.add_argument("--engine", choices=("numba", "numpy"), default="numba")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="suppressor placement heat maps")
    common(p, "PLUCK-1S")
    p.add_argument("--out", required=True)
    p.add_argument("--resolution", type=int, default=None, help="cells per side (default 9)")
    p.add_argument("--full-scale", action="store_true", help="45x45 cells; very slow")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("sensitivity", help="wolf indicator versus one suppressor parameter")
    common(p, "PLUCK-1S")
    p.add_argument("--out", required=True)
    p.add_argument("--axis", choices=tuple(SENSITIVITY_AXES), required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--values", type=_floats, help="absolute parameter values")
    g.add_argument("--factors", type=_floats, default=[0.8, 1.0, 1.2], help="multiples of the configured value")
    p.set_defaults(func=cmd_sensitivity)

    p = sub.add_parser("analyze", help="wolf indicator of segments of a WAV recording")
    p.add_argument("wav")
    p.add_argument("--segment", type=_segment, action="append", help="START:END in seconds; repeatable")
    p.add_argument("--config", help="JSON file providing indicator settings")
    p.add_argument("--out", help="directory for analysis.json")
    p.set_defaults(func=cmd_analyze, scenario=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        log.error("invalid input: %s", exc)
        return EXIT_INVALID
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return EXIT_IO
    except WolfsimError as exc:
        if isinstance(exc, files.AudioFormatError):
            log.error("invalid input: %s", exc)
            return EXIT_INVALID
        log.error("simulation failed: %s", exc)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
