"""Run configuration: one YAML file, one dataclass per section.

Defaults reproduce the counter-propagating Ti:PPLN source (37 mm, 5th
order, 160 C, 2 ps pump at 765 nm). Unknown keys and wrongly typed values
are rejected with the offending dotted key in the message.
"""

from __future__ import annotations

import dataclasses
import json
import types
import typing
from dataclasses import dataclass, field
from pathlib import Path

import yaml

__all__ = [
    "ConfigError",
    "MaterialConfig",
    "ProcessConfig",
    "PumpConfig",
    "GridConfig",
    "GratingConfig",
    "FilterConfig",
    "InstrumentConfig",
    "RunConfig",
    "load_config",
    "config_from_dict",
    "config_schema",
    "dump_config",
]


class ConfigError(ValueError):
    pass


def _doc(text, **kw):
    return field(metadata={"doc": text}, **kw)


@dataclass
class MaterialConfig:
    file: str = _doc("shipped material name or path to a material YAML file", default="ln_congruent_e")
    delta_n: list = _doc("modal index correction, ascending polynomial coefficients in wavelength (um)",
                         default_factory=list)
    polarization: str = _doc("polarization label", default="e")


@dataclass
class ProcessConfig:
    direction: str = _doc("'co' or 'counter' (idler against the pump)", default="counter")
    order: int = _doc("QPM order m >= 1", default=5)
    period: typing.Union[float, str] = _doc("poling period in um, or 'solve'", default="solve")
    length_mm: float = _doc("interaction length in mm", default=37.0)
    temperature_C: float = _doc("crystal temperature in C", default=160.0)
    signal_wavelength_um: typing.Optional[float] = _doc(
        "design signal wavelength in um; null means degenerate (2x pump)", default=None)
    max_order: int = _doc("highest order listed by 'design'", default=5)


@dataclass
class PumpConfig:
    wavelength_um: float = _doc("pump center wavelength in um", default=0.765)
    kind: str = _doc("'pulsed' or 'cw'", default="pulsed")
    duration_ps: float = _doc("pulsed: intensity FWHM duration in ps", default=2.0)
    linewidth_MHz: float = _doc("cw: intensity FWHM linewidth in MHz", default=1.0)
    gdd_ps2: float = _doc("quadratic spectral phase in ps^2", default=0.0)


@dataclass
class GridConfig:
    signal_span_THz: float = _doc("signal axis span in THz", default=4.0)
    idler_span_THz: float = _doc("idler axis span in THz", default=0.02)
    n_signal: int = _doc("signal samples, even, >= 8", default=1024)
    n_idler: int = _doc("idler samples, even, >= 8", default=1024)
    signal_center_THz: typing.Optional[float] = _doc("null: phase-matched signal frequency", default=None)
    idler_center_THz: typing.Optional[float] = _doc("null: phase-matched idler frequency", default=None)


@dataclass
class GratingConfig:
    use_pattern: bool = _doc("compute the JSA from an explicit (possibly perturbed) domain pattern",
                             default=False)
    duty_cycle: float = _doc("fraction of each period with +1 orientation", default=0.5)
    period_jitter_um: float = _doc("std of Gaussian boundary displacement in um", default=0.0)
    transition_width_um: float = _doc("std of Gaussian domain-wall smoothing in um", default=0.0)
    cumulative: bool = _doc("accumulate boundary draws as a random walk", default=False)
    max_order: int = _doc("coefficient table runs over orders 1..max_order", default=6)
    sweep_points: int = _doc("samples of the mismatch sweep", default=2001)
    sweep_lobes: float = _doc("half-width of the sweep in units of 2 pi / L", default=20.0)


@dataclass
class FilterConfig:
    center_um: typing.Optional[float] = _doc("null: centered on the phase-matched wavelength", default=None)
    width_nm: float = _doc("FWHM in nm", default=8.0)
    shape: str = _doc("'rectangular' or 'gaussian'", default="rectangular")


@dataclass
class InstrumentConfig:
    signal_detector_fwhm_ps: float = _doc("signal detector Gaussian jitter FWHM, ps", default=84.853)
    idler_detector_fwhm_ps: float = _doc("idler detector Gaussian jitter FWHM, ps", default=84.853)
    tdc_bin_ps: float = _doc("TDC bin width, ps", default=1.0)
    delay_window_ps: float = _doc("full width of the coincidence delay window, ps", default=3000.0)
    signal_filter: FilterConfig = _doc("signal bandpass", default_factory=lambda: FilterConfig(width_nm=8.0))
    idler_filter: FilterConfig = _doc("idler bandpass", default_factory=lambda: FilterConfig(width_nm=1.2))
    dispersion_ps_per_nm: float = _doc("spectrometer fiber dispersion x length, ps/nm", default=500.0)
    spectrometer_detector_fwhm_ps: float = _doc("detector jitter used by the spectrometers, ps",
                                                default=100.0)
    power_scan: list = _doc("[[power_mW, counts], ...] for the power-law fit", default_factory=list)


@dataclass
class RunConfig:
    material: MaterialConfig = _doc("dispersion model", default_factory=MaterialConfig)
    process: ProcessConfig = _doc("PDC geometry", default_factory=ProcessConfig)
    pump: PumpConfig = _doc("pump laser", default_factory=PumpConfig)
    grid: GridConfig = _doc("frequency grid", default_factory=GridConfig)
    grating: GratingConfig = _doc("poling pattern and fabrication errors", default_factory=GratingConfig)
    instrument: InstrumentConfig = _doc("detection chain", default_factory=InstrumentConfig)
    output_dir: str = _doc("directory for data files", default="out")
    seed: int = _doc("random seed for fabrication errors", default=0)

    def __post_init__(self):
        _validate_values(self)

    def to_dict(self):
        return dataclasses.asdict(self)


REQUIRED_SECTIONS = ("material",)


def _type_name(tp):
    if tp is float:
        return "number"
    if tp is int:
        return "integer"
    if tp is str:
        return "string"
    if tp is bool:
        return "boolean"
    if tp is list:
        return "list"
    if dataclasses.is_dataclass(tp):
        return "mapping"
    args = typing.get_args(tp)
    if args:
        names = [("null" if a is type(None) else _type_name(a)) for a in args]
        return " or ".join(names)
    return str(tp)


def _coerce(value, tp, key):
    origin = typing.get_origin(tp)
    if origin in (typing.Union, getattr(types, "UnionType", None)):
        errors = []
        for arg in typing.get_args(tp):
            if arg is type(None):
                if value is None:
                    return None
                continue
            try:
                return _coerce(value, arg, key)
            except ConfigError as exc:
                errors.append(exc)
        raise ConfigError(f"{key}: expected {_type_name(tp)}, got {value!r}")
    if dataclasses.is_dataclass(tp):
        if not isinstance(value, dict):
            raise ConfigError(f"{key}: expected a mapping, got {value!r}")
        return _build(tp, value, key)
    if tp is bool:
        if isinstance(value, bool):
            return value
    elif tp is int:
        if isinstance(value, int) and not isinstance(value, bool):
            return value
    elif tp is float:
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return float(value)
    elif tp is str:
        if isinstance(value, str):
            return value
    elif tp is list:
        if isinstance(value, list):
            return value
    raise ConfigError(f"{key}: expected {_type_name(tp)}, got {value!r}")


def _build(cls, data, prefix):
    hints = typing.get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ConfigError(f"{prefix + '.' if prefix else ''}{sorted(unknown)[0]}: unknown key "
                          f"(expected one of {sorted(names)})")
    kwargs = {}
    for name, value in data.items():
        key = f"{prefix}.{name}" if prefix else name
        kwargs[name] = _coerce(value, hints[name], key)
    return cls(**kwargs)


def _check(cond, key, expected):
    if not cond:
        raise ConfigError(f"{key}: expected {expected}")


def _validate_values(cfg: RunConfig):
    p = cfg.process
    _check(p.direction in ("co", "counter"), "process.direction", "'co' or 'counter'")
    _check(p.order >= 1, "process.order", "integer >= 1")
    _check(p.period == "solve" or (isinstance(p.period, float) and p.period > 0),
           "process.period", "positive number (um) or 'solve'")
    _check(p.length_mm > 0, "process.length_mm", "positive number")
    _check(p.max_order >= 1, "process.max_order", "integer >= 1")
    _check(p.signal_wavelength_um is None or p.signal_wavelength_um > cfg.pump.wavelength_um,
           "process.signal_wavelength_um", "null or a wavelength longer than the pump")
    _check(cfg.pump.kind in ("pulsed", "cw"), "pump.kind", "'pulsed' or 'cw'")
    _check(cfg.pump.wavelength_um > 0, "pump.wavelength_um", "positive number")
    _check(cfg.pump.duration_ps > 0, "pump.duration_ps", "positive number")
    _check(cfg.pump.linewidth_MHz > 0, "pump.linewidth_MHz", "positive number")
    g = cfg.grid
    for name in ("n_signal", "n_idler"):
        n = getattr(g, name)
        _check(n >= 8 and n % 2 == 0, f"grid.{name}", "even integer >= 8")
    _check(g.signal_span_THz > 0, "grid.signal_span_THz", "positive number")
    _check(g.idler_span_THz > 0, "grid.idler_span_THz", "positive number")
    gr = cfg.grating
    _check(0 < gr.duty_cycle < 1, "grating.duty_cycle", "number in (0, 1)")
    _check(gr.period_jitter_um >= 0, "grating.period_jitter_um", "number >= 0")
    _check(gr.transition_width_um >= 0, "grating.transition_width_um", "number >= 0")
    _check(gr.max_order >= 1, "grating.max_order", "integer >= 1")
    _check(gr.sweep_points >= 3, "grating.sweep_points", "integer >= 3")
    _check(gr.sweep_lobes > 0, "grating.sweep_lobes", "positive number")
    ins = cfg.instrument
    _check(ins.signal_detector_fwhm_ps > 0, "instrument.signal_detector_fwhm_ps", "positive number")
    _check(ins.idler_detector_fwhm_ps > 0, "instrument.idler_detector_fwhm_ps", "positive number")
    _check(ins.tdc_bin_ps > 0, "instrument.tdc_bin_ps", "positive number")
    _check(ins.delay_window_ps > 0, "instrument.delay_window_ps", "positive number")
    _check(ins.dispersion_ps_per_nm != 0, "instrument.dispersion_ps_per_nm", "nonzero number")
    _check(ins.spectrometer_detector_fwhm_ps > 0, "instrument.spectrometer_detector_fwhm_ps",
           "positive number")
    for arm in ("signal_filter", "idler_filter"):
        flt = getattr(ins, arm)
        _check(flt.width_nm > 0, f"instrument.{arm}.width_nm", "positive number")
        _check(flt.shape in ("rectangular", "gaussian"), f"instrument.{arm}.shape",
               "'rectangular' or 'gaussian'")
    for k, pt in enumerate(ins.power_scan):
        _check(isinstance(pt, list) and len(pt) == 2
               and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in pt),
               f"instrument.power_scan[{k}]", "[power_mW, counts] pair of numbers")


def config_from_dict(data, require=REQUIRED_SECTIONS) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("config: expected a mapping at top level")
    for section in require:
        if section not in data:
            raise ConfigError(f"{section}: missing required section")
    return _build(RunConfig, data, "")


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"config: {path} is not valid YAML: {exc}") from exc
    cfg = config_from_dict(data or {})
    # relative material paths are resolved against the config file
    mat = Path(cfg.material.file)
    if mat.suffix and not mat.is_absolute() and (path.parent / mat).exists():
        cfg.material.file = str(path.parent / mat)
    return cfg


def dump_config(cfg: RunConfig, path):
    with open(path, "w") as fh:
        yaml.safe_dump(cfg.to_dict(), fh, sort_keys=False)


def config_schema(cls=RunConfig) -> dict:
    """Nested description of every key: type, default, meaning."""
    hints = typing.get_type_hints(cls)
    out = {}
    defaults = cls() if cls is not RunConfig else None
    for f in dataclasses.fields(cls):
        tp = hints[f.name]
        if dataclasses.is_dataclass(tp):
            out[f.name] = {"doc": f.metadata.get("doc", ""), "keys": config_schema(tp)}
            continue
        if defaults is not None:
            default = getattr(defaults, f.name)
        elif f.default is not dataclasses.MISSING:
            default = f.default
        else:
            default = f.default_factory()
        out[f.name] = {"type": _type_name(tp), "default": default, "doc": f.metadata.get("doc", "")}
    return out


def schema_json() -> str:
    return json.dumps(config_schema(), indent=2)
