"""Quasi-phase-matching for co- and counter-propagating PDC.

Sign conventions (idler index ``i``)::

    co:      dk = k_p - k_s - k_i - k_G
    counter: dk = k_p - k_s + k_i - k_G

with k_G = 2 pi m / period. In the counter-propagating geometry the idler
travels against the pump.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from .dispersion import C_UM_THZ, WaveguideMode, _as_mode, group_index, wavevector

__all__ = [
    "Direction",
    "ProcessSpec",
    "PhaseMatchPoint",
    "InfeasiblePhaseMatching",
    "NoPhaseMatchedPoint",
    "GroupIndexDegenerate",
    "SINC2_FWHM",
    "pump_wavelength",
    "grating_vector",
    "material_mismatch",
    "phase_mismatch",
    "solve_poling_period",
    "solve_operating_point",
    "analytic_bandwidths",
]

# FWHM of sinc^2(x) in x, divided by pi: 2 * 1.39156 / pi
SINC2_FWHM = 0.886


class Direction(str, enum.Enum):
    CO = "co"
    COUNTER = "counter"

    @property
    def idler_sign(self) -> int:
        return 1 if self is Direction.COUNTER else -1


class InfeasiblePhaseMatching(ValueError):
    pass


class NoPhaseMatchedPoint(ValueError):
    pass


class GroupIndexDegenerate(ValueError):
    pass


def _modes(modes):
    if isinstance(modes, (tuple, list)):
        if len(modes) != 3:
            raise ValueError("modes must be a single mode or a (pump, signal, idler) triple")
        return tuple(_as_mode(m) for m in modes)
    m = _as_mode(modes)
    return m, m, m


@dataclass(frozen=True)
class ProcessSpec:
    """PDC geometry: direction, QPM order, period (um), length (mm), temperature (C)."""

    direction: Direction
    order: int
    period: float
    length: float
    temperature: float
    pump_mode: WaveguideMode
    signal_mode: WaveguideMode
    idler_mode: WaveguideMode
    has_grating: bool = True

    def __post_init__(self):
        object.__setattr__(self, "direction", Direction(self.direction))
        if int(self.order) != self.order or self.order < 1:
            raise ValueError(f"order must be a positive integer, got {self.order}")
        if self.has_grating and not self.period > 0:
            raise ValueError(f"period must be > 0 um, got {self.period}")
        if not self.length > 0:
            raise ValueError(f"length must be > 0 mm, got {self.length}")

    @classmethod
    def build(cls, direction, order, period, length, temperature, modes, has_grating=True):
        p, s, i = _modes(modes)
        return cls(Direction(direction), int(order), float(period), float(length),
                   float(temperature), p, s, i, has_grating)

    @property
    def modes(self):
        return self.pump_mode, self.signal_mode, self.idler_mode

    @property
    def length_um(self) -> float:
        return self.length * 1e3

    def with_period(self, period):
        return replace(self, period=float(period))


@dataclass(frozen=True)
class PhaseMatchPoint:
    pump: float
    signal: float
    idler: float
    residual: float
    n_roots: int = 1

    def __post_init__(self):
        lhs = 1 / self.pump
        rhs = 1 / self.signal + 1 / self.idler
        if abs(lhs - rhs) > 1e-12 * lhs:
            raise ValueError("energy conservation violated: 1/lp != 1/ls + 1/li")


def pump_wavelength(signal, idler):
    signal = np.asarray(signal, dtype=float)
    idler = np.asarray(idler, dtype=float)
    return 1.0 / (1.0 / signal + 1.0 / idler)


def idler_wavelength(pump, signal):
    return 1.0 / (1.0 / np.asarray(pump, dtype=float) - 1.0 / np.asarray(signal, dtype=float))


def grating_vector(spec: ProcessSpec) -> float:
    if not spec.has_grating:
        return 0.0
    return 2 * np.pi * spec.order / spec.period


def material_mismatch(direction, modes, temperature, signal, idler):
    """k_p - k_s -/+ k_i without the grating contribution (rad/um)."""
    direction = Direction(direction)
    p, s, i = _modes(modes)
    pump = pump_wavelength(signal, idler)
    return (
        wavevector(p, pump, temperature)
        - wavevector(s, signal, temperature)
        + direction.idler_sign * wavevector(i, idler, temperature)
    )


def phase_mismatch(spec: ProcessSpec, signal, idler):
    """Phase mismatch (rad/um) at signal/idler wavelengths (um); pump from energy conservation."""
    dk = material_mismatch(spec.direction, spec.modes, spec.temperature, signal, idler)
    return dk - grating_vector(spec)


def _check_energy(pump, signal, idler, rtol=1e-9):
    lhs = 1 / pump
    rhs = 1 / signal + 1 / idler
    if abs(lhs - rhs) > rtol * lhs:
        raise ValueError(
            f"energy conservation violated: 1/{pump} != 1/{signal} + 1/{idler}"
        )


def solve_poling_period(pump, signal, idler, order, direction, temperature, modes):
    """Poling period (um) that phase-matches the given wavelength triple."""
    _check_energy(pump, signal, idler)
    dk = material_mismatch(direction, modes, temperature, signal, idler)
    if not np.isfinite(dk) or dk <= 0:
        raise InfeasiblePhaseMatching(
            f"{Direction(direction).value}-propagating QPM infeasible: "
            f"k_p - k_s {'+' if Direction(direction) is Direction.COUNTER else '-'} k_i = {dk:.6g} rad/um <= 0"
        )
    return int(order) * (2 * np.pi / dk)


def solve_operating_point(pump, period, order, direction, temperature, modes,
                          window=None, n_scan=2001, xtol=1e-12):
    """Signal/idler wavelengths phase-matched for a fixed pump and period.

    The signal wavelength is scanned over ``window`` (default
    ``[1.5, 4] * pump``) for sign changes of the mismatch; each bracket is
    refined with Brent's method. With several roots the one nearest
    degeneracy is returned and ``n_roots`` records how many were found.
    """
    if window is None:
        window = (1.5 * pump, 4.0 * pump)
    lo, hi = window
    if not 1.0 * pump < lo < hi:
        raise ValueError(f"invalid search window {window} for pump {pump} um")
    spec = ProcessSpec.build(direction, order, period, 1.0, temperature, modes)

    def f(ls):
        return phase_mismatch(spec, ls, idler_wavelength(pump, ls))

    grid = np.linspace(lo, hi, n_scan)
    values = f(grid)
    roots = list(grid[values == 0])
    change = np.nonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0)[0]
    for j in change:
        roots.append(brentq(f, grid[j], grid[j + 1], xtol=xtol, rtol=1e-15))
    if not roots:
        raise NoPhaseMatchedPoint(
            f"no phase-matched point in search window signal [{lo:.6g}, {hi:.6g}] um"
        )
    degenerate = 2 * pump
    ls = min(roots, key=lambda r: abs(r - degenerate))
    li = float(idler_wavelength(pump, ls))
    # re-derive pump from the pair so the record is self-consistent
    lp = float(pump_wavelength(ls, li))
    return PhaseMatchPoint(lp, float(ls), li, float(f(ls)), len(roots))


def analytic_bandwidths(spec: ProcessSpec, point: PhaseMatchPoint, pump_bandwidth_ghz=None):
    """First-order (signal, idler) FWHM bandwidths in GHz.

    The idler width is the cw-pump sinc^2 width
    ``0.886 c / (L |n_gs +/- n_gi|)`` with + for counter and - for co
    propagation. For a pulsed pump in the counter geometry the signal
    follows the pump bandwidth; otherwise both share the idler width.
    """
    ngs = group_index(spec.signal_mode, point.signal, spec.temperature)
    ngi = group_index(spec.idler_mode, point.idler, spec.temperature)
    denom = abs(ngs + spec.direction.idler_sign * ngi)
    if denom <= 1e-9 * (ngs + ngi):
        raise GroupIndexDegenerate("group-index degenerate; first-order estimate invalid")
    idler = SINC2_FWHM * C_UM_THZ / (spec.length_um * denom) * 1e3
    if spec.direction is Direction.COUNTER and pump_bandwidth_ghz is not None:
        signal = float(pump_bandwidth_ghz)
    else:
        signal = idler
    return signal, idler
