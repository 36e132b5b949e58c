"""Plain-text data exchange: CSV matrices and curves, JSON reports and amplitudes.

Matrix CSV layout::

    # qpdc-matrix v1,quantity=jsi,rows=signal_THz,cols=idler_THz
    ,<col axis values...>
    <row axis value>,<data...>
    ...

Numbers are written with 17 significant digits so files round-trip
exactly and repeated runs are byte-identical.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .jsa import JointAmplitude

__all__ = [
    "write_matrix_csv",
    "read_matrix_csv",
    "write_curve_csv",
    "read_curve_csv",
    "write_json",
    "amplitude_to_json",
    "amplitude_from_json",
    "write_amplitude",
    "read_amplitude",
]

MATRIX_TAG = "# qpdc-matrix v1"
AMPLITUDE_SCHEMA = "qpdc.amplitude/1"


def _fmt(x) -> str:
    return format(float(x), ".17g")


def write_matrix_csv(path, matrix, row_axis, col_axis, quantity="jsi",
                     row_label="signal_THz", col_label="idler_THz"):
    matrix = np.asarray(matrix, dtype=float)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([MATRIX_TAG, f"quantity={quantity}", f"rows={row_label}", f"cols={col_label}"])
        w.writerow([""] + [_fmt(c) for c in col_axis])
        for r, row in zip(row_axis, matrix):
            w.writerow([_fmt(r)] + [_fmt(v) for v in row])


def read_matrix_csv(path):
    """Returns ``(matrix, row_axis, col_axis, meta)``."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][0] != MATRIX_TAG:
        raise ValueError(f"{path}: not a qpdc matrix file")
    meta = dict(item.split("=", 1) for item in rows[0][1:])
    cols = np.array([float(v) for v in rows[1][1:]])
    data = np.array([[float(v) for v in r] for r in rows[2:]])
    return data[:, 1:], data[:, 0], cols, meta


def write_curve_csv(path, columns: dict):
    names = list(columns)
    arrays = [np.asarray(columns[n], dtype=float) for n in names]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for vals in zip(*arrays):
            w.writerow([_fmt(v) for v in vals])


def read_curve_csv(path) -> dict:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    names = rows[0]
    data = np.array([[float(v) for v in r] for r in rows[1:]])
    return {n: data[:, k] for k, n in enumerate(names)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def write_json(path, data):
    with open(path, "w") as fh:
        json.dump(_jsonable(data), fh, indent=2)
        fh.write("\n")


def amplitude_to_json(ja: JointAmplitude) -> dict:
    """Row-major (signal rows, idler columns) real and imaginary parts."""
    return {
        "schema": AMPLITUDE_SCHEMA,
        "domain": ja.domain,
        "signal_axis": ja.signal_axis.tolist(),
        "idler_axis": ja.idler_axis.tolist(),
        "real": ja.values.real.tolist(),
        "imag": ja.values.imag.tolist(),
    }


def amplitude_from_json(data: dict) -> JointAmplitude:
    if data.get("schema") != AMPLITUDE_SCHEMA:
        raise ValueError(f"expected schema '{AMPLITUDE_SCHEMA}', got {data.get('schema')!r}")
    values = np.asarray(data["real"], dtype=float) + 1j * np.asarray(data["imag"], dtype=float)
    return JointAmplitude(values, data["signal_axis"], data["idler_axis"], data["domain"])


def write_amplitude(path, ja: JointAmplitude):
    with open(path, "w") as fh:
        json.dump(amplitude_to_json(ja), fh)


def read_amplitude(path) -> JointAmplitude:
    return amplitude_from_json(json.loads(Path(path).read_text()))
