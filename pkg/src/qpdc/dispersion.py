"""Temperature-dependent Sellmeier dispersion for waveguide modes.

All wavelengths are vacuum wavelengths in micrometres, temperatures in
degrees Celsius, wavevectors in rad/um.

The functional form is the extended Sellmeier equation commonly used for
lithium niobate::

    n^2 = A + b1 f + (B + b2 f) / (lam^2 - (C + b3 f)^2)
            + (D + b4 f) / (lam^2 - E^2) - F lam^2

    f(T) = (T - T_ref) (T + T_offset)

Setting every coefficient except ``A`` to zero gives a constant-index
material, which is handy for closed-form checks downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

__all__ = [
    "C_UM_THZ",
    "WavelengthRangeError",
    "MaterialFileError",
    "SellmeierModel",
    "WaveguideMode",
    "refractive_index",
    "group_index",
    "wavevector",
    "numeric_group_index",
    "load_material",
    "material_from_dict",
    "default_material",
]

# speed of light in um * THz (= um / ps)
C_UM_THZ = 299.792458

COEFFICIENT_NAMES = ("A", "B", "C", "D", "E", "F")
THERMAL_NAMES = ("b1", "b2", "b3", "b4", "T_ref", "T_offset")

_MATERIAL_DIR = Path(__file__).parent / "materials"


class WavelengthRangeError(ValueError):
    """Raised when a wavelength falls outside a model's validity range."""


class MaterialFileError(ValueError):
    pass


@dataclass(frozen=True)
class SellmeierModel:
    coefficients: dict[str, float]
    thermal_terms: dict[str, float] = field(default_factory=dict)
    valid_range: tuple[float, float] = (0.4, 5.0)
    label: str = ""

    def __post_init__(self):
        unknown = set(self.coefficients) - set(COEFFICIENT_NAMES)
        if unknown:
            raise ValueError(f"unknown Sellmeier coefficients: {sorted(unknown)}")
        unknown = set(self.thermal_terms) - set(THERMAL_NAMES)
        if unknown:
            raise ValueError(f"unknown thermal terms: {sorted(unknown)}")
        lo, hi = self.valid_range
        if not 0 < lo < hi:
            raise ValueError(f"invalid valid_range {self.valid_range}")

    def _c(self, name):
        return float(self.coefficients.get(name, 0.0))

    def _t(self, name):
        return float(self.thermal_terms.get(name, 0.0))

    def thermal_function(self, temperature):
        return (temperature - self._t("T_ref")) * (temperature + self._t("T_offset"))

    def check_range(self, wavelength):
        lo, hi = self.valid_range
        wl = np.asarray(wavelength, dtype=float)
        wmin, wmax = float(np.min(wl)), float(np.max(wl))
        if wmin < lo:
            raise WavelengthRangeError(
                f"wavelength {wmin:.6g} um below lower bound {lo} um of '{self.label}'"
            )
        if wmax > hi:
            raise WavelengthRangeError(
                f"wavelength {wmax:.6g} um above upper bound {hi} um of '{self.label}'"
            )

    def _terms(self, wavelength, temperature):
        f = self.thermal_function(temperature)
        lam2 = np.square(wavelength)
        uv_weight = self._c("B") + self._t("b2") * f
        uv_pole = self._c("C") + self._t("b3") * f
        ir_weight = self._c("D") + self._t("b4") * f
        ir_pole = self._c("E")
        return f, lam2, uv_weight, uv_pole, ir_weight, ir_pole

    def index_squared(self, wavelength, temperature):
        f, lam2, uv_w, uv_p, ir_w, ir_p = self._terms(wavelength, temperature)
        return (
            self._c("A")
            + self._t("b1") * f
            + uv_w / (lam2 - uv_p**2)
            + ir_w / (lam2 - ir_p**2)
            - self._c("F") * lam2
        )

    def d_index_squared(self, wavelength, temperature):
        """Derivative of n^2 with respect to wavelength (1/um)."""
        _, lam2, uv_w, uv_p, ir_w, ir_p = self._terms(wavelength, temperature)
        lam = np.asarray(wavelength, dtype=float)
        return (
            -2 * lam * uv_w / (lam2 - uv_p**2) ** 2
            - 2 * lam * ir_w / (lam2 - ir_p**2) ** 2
            - 2 * self._c("F") * lam
        )

    def index(self, wavelength, temperature):
        return np.sqrt(self.index_squared(wavelength, temperature))


@dataclass(frozen=True)
class WaveguideMode:
    """Bulk Sellmeier model plus an additive modal index correction.

    ``delta_n`` holds polynomial coefficients in ascending powers of the
    wavelength (um). An empty tuple means the bulk index is used as is.
    """

    bulk: SellmeierModel
    delta_n: tuple[float, ...] = ()
    polarization: str = "e"

    def __post_init__(self):
        if self.delta_n:
            lo, hi = self.bulk.valid_range
            dn = self.index_correction(np.linspace(lo, hi, 201))
            if np.min(dn) < 0 or np.max(dn) > 0.05:
                raise ValueError(
                    "delta_n must stay within [0, 0.05] over the valid range, "
                    f"got [{np.min(dn):.4g}, {np.max(dn):.4g}]"
                )

    @property
    def valid_range(self):
        return self.bulk.valid_range

    @property
    def label(self):
        return self.bulk.label

    def index_correction(self, wavelength):
        if not self.delta_n:
            return np.zeros_like(np.asarray(wavelength, dtype=float))
        return np.polynomial.polynomial.polyval(wavelength, self.delta_n)

    def index_correction_derivative(self, wavelength):
        if len(self.delta_n) < 2:
            return np.zeros_like(np.asarray(wavelength, dtype=float))
        deriv = np.polynomial.polynomial.polyder(self.delta_n)
        return np.polynomial.polynomial.polyval(wavelength, deriv)


def _as_mode(mode):
    if isinstance(mode, SellmeierModel):
        return WaveguideMode(mode)
    return mode


def _scalar_or_array(x):
    return float(x) if np.ndim(x) == 0 else x


def refractive_index(mode, wavelength, temperature=24.5):
    """Effective index of ``mode`` at ``wavelength`` (um) and ``temperature`` (C)."""
    mode = _as_mode(mode)
    mode.bulk.check_range(wavelength)
    n = mode.bulk.index(wavelength, temperature) + mode.index_correction(wavelength)
    return _scalar_or_array(n)


def group_index(mode, wavelength, temperature=24.5):
    """Group index n - lam dn/dlam from the analytic derivative of the series."""
    mode = _as_mode(mode)
    mode.bulk.check_range(wavelength)
    lam = np.asarray(wavelength, dtype=float)
    n_bulk = mode.bulk.index(lam, temperature)
    dn = mode.bulk.d_index_squared(lam, temperature) / (2 * n_bulk)
    dn = dn + mode.index_correction_derivative(lam)
    n = n_bulk + mode.index_correction(lam)
    return _scalar_or_array(n - lam * dn)


def wavevector(mode, wavelength, temperature=24.5):
    """Wavevector magnitude 2 pi n / lam in rad/um."""
    n = refractive_index(mode, wavelength, temperature)
    return _scalar_or_array(2 * np.pi * np.asarray(n) / np.asarray(wavelength, dtype=float))


def numeric_group_index(mode, wavelength, temperature=24.5, step=1e-4):
    """Group index from a central difference of the refractive index.

    The stencil shrinks so that it never leaves the validity range; at
    a bound it falls back to a one-sided difference.
    """
    mode = _as_mode(mode)
    lo, hi = mode.valid_range
    lam = float(wavelength)
    mode.bulk.check_range(lam)
    h = min(step, lam - lo, hi - lam)
    if h > 0:
        up, down, span = lam + h, lam - h, 2 * h
    elif lam - lo <= 0:
        up, down, span = lam + step, lam, step
    else:
        up, down, span = lam, lam - step, step
    dn = (refractive_index(mode, up, temperature) - refractive_index(mode, down, temperature)) / span
    return refractive_index(mode, lam, temperature) - lam * dn


def material_from_dict(data: dict) -> SellmeierModel:
    allowed = {"label", "valid_range", "coefficients", "thermal", "source"}
    unknown = set(data) - allowed
    if unknown:
        raise MaterialFileError(f"unknown material keys: {sorted(unknown)}")
    for key in ("label", "valid_range", "coefficients"):
        if key not in data:
            raise MaterialFileError(f"material: missing required key '{key}'")
    vr = data["valid_range"]
    if not (isinstance(vr, (list, tuple)) and len(vr) == 2):
        raise MaterialFileError("material.valid_range: expected [min_um, max_um]")
    coeffs = data["coefficients"] or {}
    thermal = data.get("thermal") or {}
    bad = set(coeffs) - set(COEFFICIENT_NAMES)
    if bad:
        raise MaterialFileError(
            f"material.coefficients: unknown keys {sorted(bad)}, expected a subset of {COEFFICIENT_NAMES}"
        )
    bad = set(thermal) - set(THERMAL_NAMES)
    if bad:
        raise MaterialFileError(
            f"material.thermal: unknown keys {sorted(bad)}, expected a subset of {THERMAL_NAMES}"
        )
    return SellmeierModel(
        coefficients={k: float(v) for k, v in coeffs.items()},
        thermal_terms={k: float(v) for k, v in thermal.items()},
        valid_range=(float(vr[0]), float(vr[1])),
        label=str(data["label"]),
    )


def load_material(path) -> SellmeierModel:
    """Load a material YAML file; bare names resolve to the shipped materials."""
    p = Path(path)
    if not p.exists() and not p.suffix:
        p = _MATERIAL_DIR / f"{path}.yaml"
    with open(p) as fh:
        data = yaml.safe_load(fh)
    if not isinstance(data, dict):
        raise MaterialFileError(f"{p}: expected a mapping at top level")
    return material_from_dict(data)


def default_material() -> SellmeierModel:
    return load_material("ln_congruent_e")
