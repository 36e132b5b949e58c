"""Joint spectral amplitude on a signal x idler frequency grid.

Frequencies are ordinary frequencies in THz; the grid stores detuning
axes centered on configurable carrier frequencies. The JSA is

    f(nu_s, nu_i) = alpha(nu_s + nu_i) * phi(nu_s, nu_i)

normalized so that sum |f|^2 * cell_area = 1.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .dispersion import C_UM_THZ
from .grating import DomainPattern, pm_amplitude
from .qpm import (
    NoPhaseMatchedPoint,
    ProcessSpec,
    material_mismatch,
    phase_mismatch,
    solve_operating_point,
)

__all__ = [
    "GAUSSIAN_TBP",
    "SpectralGrid",
    "PumpKind",
    "PumpSpec",
    "JointAmplitude",
    "NoPhaseMatchingInWindow",
    "FWHMError",
    "pump_envelope",
    "pump_bandwidth",
    "compute_jsa",
    "jsi",
    "marginal",
    "fwhm",
    "marginal_fwhm",
    "ridge_slope",
]

# time-bandwidth product of a transform-limited Gaussian (intensity FWHMs)
GAUSSIAN_TBP = 2 * np.log(2) / np.pi


class NoPhaseMatchingInWindow(ValueError):
    pass


class FWHMError(ValueError):
    pass


@dataclass(frozen=True)
class SpectralGrid:
    """Uniform signal x idler frequency grid (THz).

    Axis values are ``center + (k - n/2) * span / n`` for ``k = 0..n-1``,
    so the center sits on sample ``n/2`` as expected by centered FFTs.
    """

    signal_center: float
    signal_span: float
    n_signal: int
    idler_center: float
    idler_span: float
    n_idler: int

    def __post_init__(self):
        for name in ("n_signal", "n_idler"):
            n = getattr(self, name)
            if int(n) != n or n < 8 or n % 2:
                raise ValueError(f"{name} must be an even integer >= 8, got {n}")
        if not (self.signal_span > 0 and self.idler_span > 0):
            raise ValueError("grid spans must be > 0")

    @staticmethod
    def _axis(center, span, n):
        return center + (np.arange(n) - n // 2) * (span / n)

    @property
    def signal_axis(self) -> np.ndarray:
        return self._axis(self.signal_center, self.signal_span, self.n_signal)

    @property
    def idler_axis(self) -> np.ndarray:
        return self._axis(self.idler_center, self.idler_span, self.n_idler)

    @property
    def signal_spacing(self) -> float:
        return self.signal_span / self.n_signal

    @property
    def idler_spacing(self) -> float:
        return self.idler_span / self.n_idler

    @property
    def cell_area(self) -> float:
        return self.signal_spacing * self.idler_spacing

    def mesh(self):
        return np.meshgrid(self.signal_axis, self.idler_axis, indexing="ij")

    def wavelength_axes(self):
        return C_UM_THZ / self.signal_axis, C_UM_THZ / self.idler_axis

    def describe(self) -> dict:
        return {
            "signal": {"center_THz": self.signal_center, "span_THz": self.signal_span, "n": self.n_signal},
            "idler": {"center_THz": self.idler_center, "span_THz": self.idler_span, "n": self.n_idler},
        }


class PumpKind(str, enum.Enum):
    PULSED = "pulsed"
    CW = "cw"


@dataclass(frozen=True)
class PumpSpec:
    """Pump center wavelength (um) and spectral envelope.

    Pulsed pumps take the intensity FWHM duration in ps; cw pumps the
    intensity linewidth in MHz. ``gdd`` (ps^2) adds a quadratic spectral
    phase and defaults to a transform-limited pulse.
    """

    wavelength: float
    kind: PumpKind = PumpKind.PULSED
    duration: float = 2.0
    linewidth: float = 1.0
    gdd: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", PumpKind(self.kind))
        if self.kind is PumpKind.PULSED and not self.duration > 0:
            raise ValueError(f"pulse duration must be > 0 ps, got {self.duration}")
        if self.kind is PumpKind.CW and not self.linewidth > 0:
            raise ValueError(f"cw linewidth must be > 0 MHz, got {self.linewidth}")

    @property
    def center_frequency(self) -> float:
        return C_UM_THZ / self.wavelength


def pump_bandwidth(pump: PumpSpec) -> float:
    """Spectral intensity FWHM of the pump in THz."""
    if pump.kind is PumpKind.PULSED:
        return GAUSSIAN_TBP / pump.duration
    return pump.linewidth * 1e-6


def pump_envelope(pump: PumpSpec, sum_frequency):
    """Peak-normalized Gaussian pump amplitude at nu_s + nu_i (THz)."""
    detuning = np.asarray(sum_frequency, dtype=float) - pump.center_frequency
    width = pump_bandwidth(pump)
    amp = np.exp(-2 * np.log(2) * (detuning / width) ** 2)
    if pump.gdd:
        amp = amp * np.exp(0.5j * pump.gdd * (2 * np.pi * detuning) ** 2)
    return amp


@dataclass(frozen=True, eq=False)
class JointAmplitude:
    """Complex amplitude on (signal, idler) axes.

    ``domain`` is ``"spectral"`` (axes in THz) or ``"temporal"`` (axes in ps).
    """

    values: np.ndarray
    signal_axis: np.ndarray
    idler_axis: np.ndarray
    domain: str = "spectral"

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        sa = np.asarray(self.signal_axis, dtype=float)
        ia = np.asarray(self.idler_axis, dtype=float)
        if values.shape != (sa.size, ia.size):
            raise ValueError(f"values shape {values.shape} does not match axes ({sa.size}, {ia.size})")
        if self.domain not in ("spectral", "temporal"):
            raise ValueError(f"unknown domain '{self.domain}'")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "signal_axis", sa)
        object.__setattr__(self, "idler_axis", ia)

    @classmethod
    def on_grid(cls, grid: SpectralGrid, values):
        return cls(values, grid.signal_axis, grid.idler_axis, "spectral")

    # end-to-end differences: adjacent samples near 200 THz lose ~1e-10 relative
    @property
    def signal_spacing(self) -> float:
        return float(self.signal_axis[-1] - self.signal_axis[0]) / (self.signal_axis.size - 1)

    @property
    def idler_spacing(self) -> float:
        return float(self.idler_axis[-1] - self.idler_axis[0]) / (self.idler_axis.size - 1)

    @property
    def cell_area(self) -> float:
        return self.signal_spacing * self.idler_spacing

    @property
    def shape(self):
        return self.values.shape

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.cell_area))

    def normalized(self) -> "JointAmplitude":
        return JointAmplitude(self.values / self.norm(), self.signal_axis, self.idler_axis, self.domain)

    def intensity(self) -> np.ndarray:
        return np.abs(self.values) ** 2


def _pattern_pm(pattern, dk, transition_width):
    """pm_amplitude over a large dk array via a spline table.

    The amplitude carries a linear phase exp(i dk L/2); removing it leaves
    a function that varies on the scale 2 pi / L, which a table with 32
    samples per lobe resolves to well below 1e-6.
    """
    flat = dk.ravel()
    L = pattern.total_length
    step = 2 * np.pi / (32 * L)
    lo, hi = float(flat.min()), float(flat.max())
    n_table = int(np.ceil((hi - lo) / step)) + 4
    if n_table >= flat.size:
        return pm_amplitude(pattern, dk, transition_width)
    table_dk = lo - step + step * np.arange(n_table)
    table = pm_amplitude(pattern, table_dk, transition_width) * np.exp(-0.5j * table_dk * L)
    re = CubicSpline(table_dk, table.real)(flat)
    im = CubicSpline(table_dk, table.imag)(flat)
    return ((re + 1j * im) * np.exp(0.5j * flat * L)).reshape(dk.shape)


def compute_jsa(grid: SpectralGrid, pump: PumpSpec, process: ProcessSpec,
                pattern: DomainPattern | None = None, transition_width=0.0) -> JointAmplitude:
    """Evaluate the normalized JSA on ``grid``.

    With ``pattern=None`` the phase-matching function is
    ``sinc(dk L / 2)`` for the uniform grating in ``process``. With an
    explicit domain pattern it is the pattern's phase-matching amplitude
    evaluated at the grating-free mismatch; ``process`` then supplies
    direction, modes and temperature only.
    """
    width = pump_bandwidth(pump)
    if width < max(grid.signal_spacing, grid.idler_spacing) and not np.isclose(
        grid.signal_spacing, grid.idler_spacing, rtol=1e-9
    ):
        raise ValueError(
            f"pump bandwidth {width:.3g} THz is below the grid spacing and signal/idler "
            "spacings differ; use equal spacings so the energy-conservation line hits grid points"
        )
    nu_s, nu_i = grid.mesh()
    ls, li = C_UM_THZ / nu_s, C_UM_THZ / nu_i
    if pattern is None:
        dk = phase_mismatch(process, ls, li)
        phi = np.sinc(dk * process.length_um / (2 * np.pi))
    else:
        dk = material_mismatch(process.direction, process.modes, process.temperature, ls, li)
        phi = _pattern_pm(pattern, dk, transition_width)
    values = pump_envelope(pump, nu_s + nu_i) * phi
    peak = float(np.max(np.abs(values)))
    # sinc tails stay above 1e-3 only within ~300 lobes of phase matching
    floor = 1e-3 if pattern is None else 1e-6
    if not peak > floor:
        raise NoPhaseMatchingInWindow(_miss_message(grid, pump, process))
    ja = JointAmplitude.on_grid(grid, values)
    return ja.normalized()


def _miss_message(grid, pump, process):
    msg = "grid misses phase matching: amplitude vanishes everywhere in the window"
    try:
        pt = solve_operating_point(pump.wavelength, process.period, process.order,
                                   process.direction, process.temperature, process.modes)
        msg += (f"; nearest phase-matched signal {pt.signal:.6f} um "
                f"({C_UM_THZ / pt.signal:.4f} THz), idler {pt.idler:.6f} um "
                f"({C_UM_THZ / pt.idler:.4f} THz)")
    except (NoPhaseMatchedPoint, ValueError):
        msg += "; no phase-matched point found in the default search window"
    return msg


def jsi(ja: JointAmplitude) -> np.ndarray:
    if ja.domain != "spectral":
        raise ValueError("jsi expects a spectral-domain amplitude")
    return ja.intensity()


def marginal(intensity, axis, other_spacing):
    """Marginal distribution along ``axis`` ("signal"/0 or "idler"/1)."""
    axis = {"signal": 0, "idler": 1}.get(axis, axis)
    if axis not in (0, 1):
        raise ValueError(f"axis must be 'signal', 'idler', 0 or 1, got {axis!r}")
    return np.sum(intensity, axis=1 - axis) * other_spacing


def fwhm(profile, x):
    """Full width at half maximum of the highest peak, by linear interpolation.

    ``x`` is either the sample positions or a scalar spacing.
    """
    y = np.asarray(profile, dtype=float)
    if np.ndim(x) == 0:
        x = np.arange(y.size) * float(x)
    x = np.asarray(x, dtype=float)
    k = int(np.argmax(y))
    half = 0.5 * y[k]
    left = k
    while left > 0 and y[left - 1] >= half:
        left -= 1
    if left == 0:
        raise FWHMError("FWHM undefined: profile does not fall below half maximum before the lower edge")
    right = k
    while right < y.size - 1 and y[right + 1] >= half:
        right += 1
    if right == y.size - 1:
        raise FWHMError("FWHM undefined: profile does not fall below half maximum before the upper edge")
    xl = np.interp(half, [y[left - 1], y[left]], [x[left - 1], x[left]])
    xr = np.interp(half, [y[right + 1], y[right]], [x[right + 1], x[right]])
    return float(xr - xl)


def marginal_fwhm(ja: JointAmplitude, axis):
    """FWHM of a marginal, in the axis units (THz for spectra, ps for time)."""
    axis = {"signal": 0, "idler": 1}.get(axis, axis)
    inten = ja.intensity()
    if axis == 0:
        return fwhm(marginal(inten, 0, ja.idler_spacing), ja.signal_axis)
    return fwhm(marginal(inten, 1, ja.signal_spacing), ja.idler_axis)


def ridge_slope(ja: JointAmplitude, threshold=0.1):
    """Slope d nu_i / d nu_s of the intensity ridge.

    For every signal row holding at least ``threshold`` of the peak row
    weight, the idler position of the row maximum is located with a
    parabolic refinement; a weighted straight line through those points
    gives the slope.
    """
    inten = ja.intensity()
    weights = inten.sum(axis=1)
    rows = np.nonzero(weights >= threshold * weights.max())[0]
    if rows.size < 2:
        raise ValueError("ridge spans fewer than two signal rows")
    peaks = []
    di = ja.idler_spacing
    for r in rows:
        row = inten[r]
        j = int(np.argmax(row))
        pos = ja.idler_axis[j]
        if 0 < j < row.size - 1:
            a, b, c = row[j - 1], row[j], row[j + 1]
            denom = a - 2 * b + c
            if denom != 0:
                pos += 0.5 * (a - c) / denom * di
        peaks.append(pos)
    slope, _ = np.polyfit(ja.signal_axis[rows], np.array(peaks), 1, w=np.sqrt(weights[rows]))
    return float(slope)
