"""Command-line front end.

    qpdc <design|jsa|schmidt|temporal|grating|measure> --config FILE [--out DIR] [--seed N]

Failures print a single line ``qpdc-error: <command>: <stage>: <message>``
to stderr and exit with status 2 (configuration) or 1 (computation).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import analysis, jsa, pipeline
from .config import ConfigError, dump_config, load_config, schema_json
from .io import (
    read_amplitude,
    read_curve_csv,
    read_matrix_csv,
    write_amplitude,
    write_curve_csv,
    write_json,
    write_matrix_csv,
)
from .grating import write_pattern

COMMANDS = {
    "design": "poling periods per odd order, operating point and analytic bandwidths (JSON to stdout)",
    "jsa": "joint spectral amplitude/intensity on the configured grid (CSV + JSON)",
    "schmidt": "Schmidt number, purity, entropy and leading coefficients (JSON)",
    "temporal": "joint temporal intensity and arrival-time-difference distribution (CSV + JSON)",
    "grating": "Fourier-coefficient table and mismatch sweeps of ideal/perturbed patterns (CSV)",
    "measure": "instrument-limited JSI, filter transmission, detector-convolved envelope, power fit",
}


class StageError(Exception):
    def __init__(self, stage, exc):
        super().__init__(f"{stage}: {exc}")
        self.stage = stage
        self.exc = exc


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (ConfigError, StageError):
        raise
    except (ValueError, OSError, KeyError) as exc:
        raise StageError(name, exc) from exc


def _prepare_out(args, cfg):
    out = Path(args.out or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    dump_config(cfg, out / "resolved_config.yaml")
    return out


def _emit(report):
    json.dump(report, sys.stdout, indent=2, default=float)
    sys.stdout.write("\n")


def _load_jsa(args, cfg):
    if args.input:
        ja = _stage("load", read_amplitude, args.input)
        return None, ja
    return _stage("jsa", pipeline.run_jsa, cfg)


def cmd_design(args, cfg):
    report = _stage("design", pipeline.design_report, cfg)
    if args.out:
        out = _prepare_out(args, cfg)
        write_json(out / "design.json", report)
    _emit(report)


def cmd_jsa(args, cfg):
    setup, ja = _stage("jsa", pipeline.run_jsa, cfg)
    out = _prepare_out(args, cfg)
    intensity = jsa.jsi(ja)
    write_matrix_csv(out / "jsi.csv", intensity, ja.signal_axis, ja.idler_axis, "jsi")
    write_amplitude(out / "jsa.json", ja)
    write_curve_csv(out / "marginal_signal.csv",
                    {"signal_THz": ja.signal_axis, "p": jsa.marginal(intensity, 0, ja.idler_spacing)})
    write_curve_csv(out / "marginal_idler.csv",
                    {"idler_THz": ja.idler_axis, "p": jsa.marginal(intensity, 1, ja.signal_spacing)})
    summary = _stage("summary", pipeline.jsa_summary, setup, ja)
    write_json(out / "jsa_summary.json", summary)
    _emit(summary)


def cmd_schmidt(args, cfg):
    _, ja = _load_jsa(args, cfg)
    spectrum = _stage("schmidt", analysis.schmidt_decompose, ja)
    report = spectrum.report(16)
    if args.out or not args.input:
        out = _prepare_out(args, cfg)
        write_json(out / "schmidt.json", report)
    _emit(report)


def cmd_temporal(args, cfg):
    setup, ja = _load_jsa(args, cfg)
    res = _stage("temporal", pipeline.run_temporal, cfg, ja, setup)
    out = _prepare_out(args, cfg)
    jta = res["jta"]
    write_matrix_csv(out / "jti.csv", jta.intensity(), jta.signal_axis, jta.idler_axis, "jti",
                     "signal_ps", "idler_ps")
    write_curve_csv(out / "time_difference.csv",
                    {"delay_ps": res["delays"], "p": res["p"], "p_convolved": res["p_convolved"]})
    write_json(out / "temporal_summary.json", res["summary"])
    _emit(res["summary"])


def cmd_grating(args, cfg):
    res = _stage("grating", pipeline.grating_tables, cfg)
    out = _prepare_out(args, cfg)
    write_curve_csv(out / "grating_coefficients.csv", res["table"])
    write_curve_csv(out / "grating_sweep.csv", res["sweep"])
    write_pattern(res["perturbed"], out / "pattern.txt")
    write_json(out / "grating_summary.json", res["summary"])
    _emit(res["summary"])


def cmd_measure(args, cfg):
    if args.input:
        src = Path(args.input)
        jsi_path = src / "jsi.csv" if src.is_dir() else src
        intensity, rows, cols, _ = _stage("load", read_matrix_csv, jsi_path)
        grid = _grid_from_axes(rows, cols)
        delays = p = None
        td = jsi_path.parent / "time_difference.csv"
        if td.exists():
            curve = _stage("load", read_curve_csv, td)
            delays, p = curve["delay_ps"], curve["p"]
    else:
        setup, ja = _stage("jsa", pipeline.run_jsa, cfg)
        grid = setup.grid
        intensity = jsa.jsi(ja)
        temporal = _stage("temporal", pipeline.run_temporal, cfg, ja, setup)
        delays, p = temporal["delays"], temporal["p"]
    res = _stage("measure", pipeline.run_measure, cfg, grid, intensity, delays, p)
    out = _prepare_out(args, cfg)
    write_matrix_csv(out / "measured_jsi.csv", res["measured"], grid.signal_axis, grid.idler_axis,
                     "measured_jsi")
    if "p_convolved" in res:
        write_curve_csv(out / "time_difference_measured.csv",
                        {"delay_ps": delays, "p": p, "p_convolved": res["p_convolved"]})
    write_json(out / "measure_summary.json", res["summary"])
    _emit(res["summary"])


def _grid_from_axes(rows, cols):
    ns, ni = rows.size, cols.size
    ds, di = rows[1] - rows[0], cols[1] - cols[0]
    return jsa.SpectralGrid(float(rows[ns // 2]), float(ds * ns), ns, float(cols[ni // 2]), float(di * ni), ni)


HANDLERS = {
    "design": cmd_design,
    "jsa": cmd_jsa,
    "schmidt": cmd_schmidt,
    "temporal": cmd_temporal,
    "grating": cmd_grating,
    "measure": cmd_measure,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="qpdc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name, help_text in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--config", help="YAML run configuration")
        p.add_argument("--out", help="output directory (overrides output_dir)")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--schema", action="store_true", help="print the configuration schema and exit")
        if name in ("schmidt", "temporal", "measure"):
            p.add_argument("--input", help="previously exported jsa.json (schmidt, temporal) "
                                           "or jsi.csv / jsa output directory (measure)")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.schema:
        print(schema_json())
        return 0
    try:
        if not args.config:
            raise ConfigError("--config: required")
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        HANDLERS[args.command](args, cfg)
    except ConfigError as exc:
        print(f"qpdc-error: {args.command}: config: {exc}", file=sys.stderr)
        return 2
    except StageError as exc:
        print(f"qpdc-error: {args.command}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
