"""Instrument models: detector jitter, bandpass filters, time-of-flight spectrometers."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import gaussian_filter1d

from .dispersion import C_UM_THZ
from .jsa import SpectralGrid

__all__ = [
    "FWHM_TO_SIGMA",
    "DetectorModel",
    "FilterShape",
    "SpectralFilter",
    "FiberSpectrometer",
    "PowerFit",
    "convolve_detector",
    "tdc_histogram",
    "filter_transmission",
    "apply_filter",
    "tof_resolution",
    "simulate_measured_jsi",
    "power_scan_fit",
]

FWHM_TO_SIGMA = 1.0 / (2 * np.sqrt(2 * np.log(2)))


@dataclass(frozen=True)
class DetectorModel:
    fwhm: float  # ps, Gaussian timing response
    label: str = ""

    def __post_init__(self):
        if not self.fwhm > 0:
            raise ValueError(f"detector FWHM must be > 0 ps, got {self.fwhm}")


class FilterShape(str, enum.Enum):
    RECTANGULAR = "rectangular"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class SpectralFilter:
    center: float  # um
    width: float  # nm, FWHM
    shape: FilterShape = FilterShape.RECTANGULAR

    def __post_init__(self):
        object.__setattr__(self, "shape", FilterShape(self.shape))
        if not self.width > 0:
            raise ValueError(f"filter width must be > 0 nm, got {self.width}")


@dataclass(frozen=True)
class FiberSpectrometer:
    dispersion_times_length: float  # ps/nm, signed
    reference_wavelength: float  # um
    detector: DetectorModel

    def __post_init__(self):
        if self.dispersion_times_length == 0:
            raise ValueError("dispersion_times_length must be nonzero")


def convolve_detector(p, delays, detector_s: DetectorModel, detector_i: DetectorModel):
    """Smear p(dt) by the combined timing jitter of both detectors.

    The difference of two independent Gaussian jitters is Gaussian with
    FWHM sqrt(FWHM_s^2 + FWHM_i^2). ``delays`` must be uniform.
    """
    p = np.asarray(p, dtype=float)
    delays = np.asarray(delays, dtype=float)
    step = float(delays[1] - delays[0])
    if not np.allclose(np.diff(delays), step, rtol=1e-6):
        raise ValueError("delays must be uniformly spaced")
    fw = np.hypot(detector_s.fwhm, detector_i.fwhm)
    sigma = fw * FWHM_TO_SIGMA / step
    half_window = 0.5 * (delays[-1] - delays[0])
    if fw > half_window:
        raise ValueError(
            f"detector kernel FWHM {fw:.4g} ps exceeds half the delay window "
            f"({half_window:.4g} ps); enlarge the window"
        )
    if sigma < 1e-3:
        out = p.copy()
    else:
        radius = int(np.ceil(8 * sigma))
        x = np.arange(-radius, radius + 1)
        kernel = np.exp(-0.5 * (x / sigma) ** 2)
        kernel /= kernel.sum()
        out = np.convolve(p, kernel, mode="same")
    return out / out.sum()


def tdc_histogram(delays, p, bin_width=1.0):
    """Quantize a delay distribution into TDC bins of ``bin_width`` ps.

    Returns bin centers and the summed probability per bin.
    """
    delays = np.asarray(delays, dtype=float)
    lo = np.floor(delays.min() / bin_width) * bin_width
    hi = np.ceil(delays.max() / bin_width) * bin_width + bin_width
    edges = np.arange(lo, hi + 0.5 * bin_width, bin_width)
    hist, edges = np.histogram(delays, bins=edges, weights=p)
    return 0.5 * (edges[:-1] + edges[1:]), hist


def filter_transmission(flt: SpectralFilter, frequency):
    """Power transmission of ``flt`` at optical frequencies in THz."""
    wl_nm = 1e3 * C_UM_THZ / np.asarray(frequency, dtype=float)
    d = wl_nm - 1e3 * flt.center
    if flt.shape is FilterShape.RECTANGULAR:
        return (np.abs(d) <= 0.5 * flt.width).astype(float)
    return np.exp(-4 * np.log(2) * (d / flt.width) ** 2)


def apply_filter(intensity, grid: SpectralGrid, filter_s=None, filter_i=None):
    """Multiply a JSI by the signal and idler filter transmissions.

    ``None`` means all-pass. Returns the renormalized filtered JSI and
    the transmitted probability.
    """
    inten = np.asarray(intensity, dtype=float)
    ts = np.ones(grid.n_signal) if filter_s is None else filter_transmission(filter_s, grid.signal_axis)
    ti = np.ones(grid.n_idler) if filter_i is None else filter_transmission(filter_i, grid.idler_axis)
    out = inten * ts[:, None] * ti[None, :]
    before = inten.sum()
    after = out.sum()
    if after <= 0:
        raise ValueError("filters transmit zero probability")
    fraction = float(after / before)
    return out / (after * grid.cell_area), fraction


def tof_resolution(spectrometer: FiberSpectrometer) -> float:
    """Wavelength resolution in nm: detector jitter over |D * L|."""
    return spectrometer.detector.fwhm / abs(spectrometer.dispersion_times_length)


def _resolution_thz(spectrometer):
    dl_um = tof_resolution(spectrometer) * 1e-3
    lam = spectrometer.reference_wavelength
    return C_UM_THZ * dl_um / lam**2


def simulate_measured_jsi(intensity, grid: SpectralGrid, spec_s: FiberSpectrometer,
                          spec_i: FiberSpectrometer):
    """JSI as seen through two time-of-flight spectrometers.

    Each axis is smoothed with a Gaussian whose FWHM is the spectrometer
    resolution converted to frequency. Axes whose resolution is under
    one grid cell are left untouched and reported in ``notices``.
    Returns ``(measured, notices)``; ``measured`` is normalized to unit
    probability.
    """
    out = np.asarray(intensity, dtype=float)
    notices = []
    for axis, spec, spacing, name in (
        (0, spec_s, grid.signal_spacing, "signal"),
        (1, spec_i, grid.idler_spacing, "idler"),
    ):
        fw = _resolution_thz(spec)
        if fw < spacing:
            notices.append(f"{name}: resolution {fw * 1e3:.4g} GHz under one grid cell; resolution-limited-by-grid")
            continue
        out = gaussian_filter1d(out, fw * FWHM_TO_SIGMA / spacing, axis=axis, mode="constant", truncate=6.0)
    return out / (out.sum() * grid.cell_area), notices


@dataclass(frozen=True)
class PowerFit:
    exponent: float
    exponent_stderr: float
    amplitude: float  # intercept of log(counts) vs log(power)
    residual: float  # rms residual in log space

    def to_dict(self):
        return {
            "exponent": self.exponent,
            "exponent_stderr": self.exponent_stderr,
            "log_amplitude": self.amplitude,
            "rms_log_residual": self.residual,
        }


def power_scan_fit(points) -> PowerFit:
    """Least-squares fit of log(counts) = a + b log(power)."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 3:
        raise ValueError("need at least three (power, counts) pairs")
    if np.any(pts <= 0):
        raise ValueError("powers and counts must be positive")
    x, y = np.log(pts[:, 0]), np.log(pts[:, 1])
    design = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    dof = len(x) - 2
    s2 = float(resid @ resid) / dof if dof > 0 else 0.0
    cov = s2 * np.linalg.inv(design.T @ design)
    return PowerFit(
        exponent=float(coef[1]),
        exponent_stderr=float(np.sqrt(cov[1, 1])),
        amplitude=float(coef[0]),
        residual=float(np.sqrt(np.mean(resid**2))),
    )
