"""Idler bandwidth and purity of the counter-propagating source versus pump duration.

    python scripts/pump_duration_sweep.py [--durations 1 2 5 10 20] [--out sweep.csv]
"""

import argparse
import dataclasses
from pathlib import Path

from qpdc import analysis, jsa, pipeline
from qpdc.config import load_config
from qpdc.io import write_curve_csv

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--durations", type=float, nargs="+", default=[1, 2, 5, 10, 20])
    ap.add_argument("--out", default=None, help="optional CSV path")
    args = ap.parse_args()

    base = load_config(CONFIGS / "paper.yaml")
    rows = {"duration_ps": [], "signal_fwhm_GHz": [], "idler_fwhm_GHz": [], "schmidt_number": [], "purity": []}
    print(f"{'tau/ps':>7} {'signal/GHz':>11} {'idler/GHz':>10} {'K':>7} {'purity':>7}")
    for tau in args.durations:
        cfg = dataclasses.replace(base, pump=dataclasses.replace(base.pump, duration_ps=tau))
        _, ja = pipeline.run_jsa(cfg)
        fs = jsa.marginal_fwhm(ja, "signal") * 1e3
        fi = jsa.marginal_fwhm(ja, "idler") * 1e3
        spec = analysis.schmidt_decompose(ja)
        for key, val in zip(rows, (tau, fs, fi, spec.schmidt_number, spec.purity)):
            rows[key].append(val)
        print(f"{tau:7.1f} {fs:11.1f} {fi:10.3f} {spec.schmidt_number:7.3f} {spec.purity:7.3f}")
    if args.out:
        write_curve_csv(args.out, rows)


if __name__ == "__main__":
    main()
