"""Build model objects from a RunConfig and run each pipeline stage.

Every stage returns plain data (arrays and dicts); writing files is left
to the CLI.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import analysis, grating, jsa, measurement, qpm
from .config import RunConfig
from .dispersion import C_UM_THZ, WaveguideMode, group_index, load_material

__all__ = [
    "Setup",
    "build_setup",
    "design_report",
    "run_jsa",
    "jsa_summary",
    "run_temporal",
    "grating_tables",
    "run_measure",
]


@dataclass
class Setup:
    mode: WaveguideMode
    process: qpm.ProcessSpec
    point: qpm.PhaseMatchPoint
    pump: jsa.PumpSpec
    grid: jsa.SpectralGrid

    @property
    def modes(self):
        return self.mode, self.mode, self.mode


def build_mode(cfg: RunConfig) -> WaveguideMode:
    bulk = load_material(cfg.material.file)
    return WaveguideMode(bulk, tuple(float(c) for c in cfg.material.delta_n), cfg.material.polarization)


def _design_wavelengths(cfg: RunConfig):
    lp = cfg.pump.wavelength_um
    ls = cfg.process.signal_wavelength_um or 2 * lp
    li = float(qpm.idler_wavelength(lp, ls))
    lp = float(qpm.pump_wavelength(ls, li))
    return lp, ls, li


def build_setup(cfg: RunConfig) -> Setup:
    mode = build_mode(cfg)
    p = cfg.process
    lp, ls, li = _design_wavelengths(cfg)
    if p.period == "solve":
        period = qpm.solve_poling_period(lp, ls, li, p.order, p.direction, p.temperature_C, mode)
        dk = qpm.phase_mismatch(
            qpm.ProcessSpec.build(p.direction, p.order, period, p.length_mm, p.temperature_C, mode),
            ls, li)
        point = qpm.PhaseMatchPoint(lp, ls, li, float(dk))
    else:
        period = float(p.period)
        point = qpm.solve_operating_point(lp, period, p.order, p.direction, p.temperature_C, mode)
    process = qpm.ProcessSpec.build(p.direction, p.order, period, p.length_mm, p.temperature_C, mode)
    pump = jsa.PumpSpec(point.pump, cfg.pump.kind, cfg.pump.duration_ps, cfg.pump.linewidth_MHz,
                        cfg.pump.gdd_ps2)
    g = cfg.grid
    grid = jsa.SpectralGrid(
        g.signal_center_THz if g.signal_center_THz is not None else C_UM_THZ / point.signal,
        g.signal_span_THz, g.n_signal,
        g.idler_center_THz if g.idler_center_THz is not None else C_UM_THZ / point.idler,
        g.idler_span_THz, g.n_idler,
    )
    return Setup(mode, process, point, pump, grid)


def design_report(cfg: RunConfig) -> dict:
    setup = build_setup(cfg)
    p = cfg.process
    lp, ls, li = _design_wavelengths(cfg)
    periods = []
    for m in range(1, p.max_order + 1, 2):
        lam = qpm.solve_poling_period(lp, ls, li, m, p.direction, p.temperature_C, setup.mode)
        periods.append({"order": m, "period_um": lam, "grating_vector_per_um": 2 * np.pi * m / lam})
    pump_bw = jsa.pump_bandwidth(setup.pump) * 1e3 if setup.pump.kind is jsa.PumpKind.PULSED else None
    try:
        bw_s, bw_i = qpm.analytic_bandwidths(setup.process, setup.point, pump_bw)
        bandwidths = {"signal_GHz": bw_s, "idler_GHz": bw_i}
    except qpm.GroupIndexDegenerate as exc:
        bandwidths = {"error": str(exc)}
    T = p.temperature_C
    return {
        "direction": p.direction,
        "temperature_C": T,
        "length_mm": p.length_mm,
        "material": setup.mode.label,
        "periods": periods,
        "configured_order": p.order,
        "configured_period_um": setup.process.period,
        "operating_point": {
            "pump_um": setup.point.pump,
            "signal_um": setup.point.signal,
            "idler_um": setup.point.idler,
            "residual_per_um": setup.point.residual,
            "n_roots": setup.point.n_roots,
        },
        "group_index": {
            "pump": group_index(setup.mode, setup.point.pump, T),
            "signal": group_index(setup.mode, setup.point.signal, T),
            "idler": group_index(setup.mode, setup.point.idler, T),
        },
        "analytic_bandwidths": bandwidths,
    }


def build_pattern(cfg: RunConfig, setup: Setup, seed=None):
    gr = cfg.grating
    n_periods = max(1, int(round(setup.process.length_um / setup.process.period)))
    ideal = grating.ideal_pattern(setup.process.period, gr.duty_cycle, n_periods)
    model = grating.FabricationErrorModel(
        gr.duty_cycle, gr.period_jitter_um, gr.transition_width_um,
        cfg.seed if seed is None else seed, gr.cumulative)
    return ideal, grating.perturb_pattern(ideal, model)


def run_jsa(cfg: RunConfig, setup: Setup | None = None):
    setup = setup or build_setup(cfg)
    if cfg.grating.use_pattern:
        _, pattern = build_pattern(cfg, setup)
        ja = jsa.compute_jsa(setup.grid, setup.pump, setup.process, pattern,
                             cfg.grating.transition_width_um)
    else:
        ja = jsa.compute_jsa(setup.grid, setup.pump, setup.process)
    return setup, ja


def _safe_fwhm(fn, *args, scale=1.0):
    try:
        return fn(*args) * scale
    except jsa.FWHMError as exc:
        return str(exc)


def jsa_summary(setup: Setup, ja: jsa.JointAmplitude) -> dict:
    fs = _safe_fwhm(jsa.marginal_fwhm, ja, "signal", scale=1e3)
    fi = _safe_fwhm(jsa.marginal_fwhm, ja, "idler", scale=1e3)
    out = {
        "grid": setup.grid.describe(),
        "signal_marginal_fwhm_GHz": fs,
        "idler_marginal_fwhm_GHz": fi,
        "ridge_slope": jsa.ridge_slope(ja),
        "norm": ja.norm(),
    }
    if isinstance(fs, float) and isinstance(fi, float):
        out["bandwidth_ratio"] = fs / fi
    return out


def delay_axis(cfg: RunConfig):
    half = 0.5 * cfg.instrument.delay_window_ps
    step = cfg.instrument.tdc_bin_ps
    n = int(round(half / step))
    return step * np.arange(-n, n + 1)


def run_temporal(cfg: RunConfig, ja: jsa.JointAmplitude, setup: Setup | None = None) -> dict:
    jta = analysis.jsa_to_jta(ja)
    delays = delay_axis(cfg)
    _, p = analysis.time_difference_distribution(jta, delays)
    ins = cfg.instrument
    det_s = measurement.DetectorModel(ins.signal_detector_fwhm_ps, "signal")
    det_i = measurement.DetectorModel(ins.idler_detector_fwhm_ps, "idler")
    p_conv = measurement.convolve_detector(p, delays, det_s, det_i)
    ti, idler_marg = analysis.temporal_marginal(jta, "idler")
    summary = {
        "unconvolved_fwhm_ps": _safe_fwhm(jsa.fwhm, p, delays),
        "convolved_fwhm_ps": _safe_fwhm(jsa.fwhm, p_conv, delays),
        "detector_system_fwhm_ps": float(np.hypot(det_s.fwhm, det_i.fwhm)),
        "idler_temporal_marginal_fwhm_ps": _safe_fwhm(jsa.fwhm, idler_marg, ti),
        "norm": jta.norm(),
    }
    if setup is not None:
        T = setup.process.temperature
        L = setup.process.length_um
        ngp = group_index(setup.mode, setup.point.pump, T)
        ngs = group_index(setup.mode, setup.point.signal, T)
        ngi = group_index(setup.mode, setup.point.idler, T)
        summary["rectangle_width_pump_idler_ps"] = L * (ngp + ngi) / C_UM_THZ
        summary["rectangle_width_signal_idler_ps"] = L * (ngs + ngi) / C_UM_THZ
    return {"jta": jta, "delays": delays, "p": p, "p_convolved": p_conv, "summary": summary}


def grating_tables(cfg: RunConfig, setup: Setup | None = None) -> dict:
    setup = setup or build_setup(cfg)
    gr = cfg.grating
    period = setup.process.period
    orders = np.arange(1, gr.max_order + 1)
    g = grating.fourier_coefficient(orders, gr.duty_cycle)
    smooth = grating.smoothing_factor(orders, period, gr.transition_width_um)
    table = {
        "order": orders,
        "fourier_coefficient": g,
        "smoothing_factor": smooth,
        "effective_coefficient": g * smooth,
        "relative_efficiency": grating.relative_efficiency(orders, gr.duty_cycle),
    }
    ideal, perturbed = build_pattern(cfg, setup)
    L = ideal.total_length
    kg = 2 * np.pi * setup.process.order / period
    dk = kg + np.linspace(-1, 1, gr.sweep_points) * gr.sweep_lobes * 2 * np.pi / L
    amp_ideal = grating.pm_amplitude(ideal, dk, gr.transition_width_um)
    amp_pert = grating.pm_amplitude(perturbed, dk, gr.transition_width_um)
    sweep = {
        "dk_per_um": dk,
        "ideal_abs": np.abs(amp_ideal),
        "perturbed_abs": np.abs(amp_pert),
        "perturbed_real": amp_pert.real,
        "perturbed_imag": amp_pert.imag,
    }
    summary = {
        "period_um": period,
        "n_periods": len(ideal) // 2,
        "order": setup.process.order,
        "ideal_peak": float(np.max(np.abs(amp_ideal))),
        "perturbed_peak": float(np.max(np.abs(amp_pert))),
        "notes": list(perturbed.notes),
    }
    return {"table": table, "sweep": sweep, "summary": summary, "ideal": ideal, "perturbed": perturbed}


def _filter(fc, default_center):
    center = fc.center_um if fc.center_um is not None else default_center
    return measurement.SpectralFilter(center, fc.width_nm, fc.shape)


def run_measure(cfg: RunConfig, grid: jsa.SpectralGrid, intensity, delays=None, p=None) -> dict:
    """Instrument view of a JSI (and optionally a delay distribution)."""
    ins = cfg.instrument
    s_center = C_UM_THZ / grid.signal_center
    i_center = C_UM_THZ / grid.idler_center
    f_s = _filter(ins.signal_filter, s_center)
    f_i = _filter(ins.idler_filter, i_center)
    filtered, fraction = measurement.apply_filter(intensity, grid, f_s, f_i)
    det = measurement.DetectorModel(ins.spectrometer_detector_fwhm_ps, "spectrometer")
    spec_s = measurement.FiberSpectrometer(ins.dispersion_ps_per_nm, s_center, det)
    spec_i = measurement.FiberSpectrometer(ins.dispersion_ps_per_nm, i_center, det)
    measured, notices = measurement.simulate_measured_jsi(filtered, grid, spec_s, spec_i)
    ms = jsa.marginal(measured, 0, grid.idler_spacing)
    mi = jsa.marginal(measured, 1, grid.signal_spacing)
    summary = {
        "transmitted_fraction": fraction,
        "tof_resolution_nm": measurement.tof_resolution(spec_s),
        "measured_signal_fwhm_GHz": _safe_fwhm(jsa.fwhm, ms, grid.signal_axis, scale=1e3),
        "measured_idler_fwhm_GHz": _safe_fwhm(jsa.fwhm, mi, grid.idler_axis, scale=1e3),
        "notices": notices,
    }
    out = {"measured": measured, "filtered": filtered, "summary": summary}
    if p is not None:
        det_s = measurement.DetectorModel(ins.signal_detector_fwhm_ps, "signal")
        det_i = measurement.DetectorModel(ins.idler_detector_fwhm_ps, "idler")
        p_conv = measurement.convolve_detector(p, delays, det_s, det_i)
        summary["convolved_fwhm_ps"] = _safe_fwhm(jsa.fwhm, p_conv, delays)
        out["p_convolved"] = p_conv
    if ins.power_scan:
        summary["power_fit"] = measurement.power_scan_fit(ins.power_scan).to_dict()
    return out
