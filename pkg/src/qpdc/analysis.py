"""Separability and time-domain views of a joint amplitude."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .jsa import JointAmplitude

__all__ = [
    "SchmidtSpectrum",
    "schmidt_decompose",
    "jsa_to_jta",
    "jta_to_jsa",
    "time_difference_distribution",
    "temporal_marginal",
]


@dataclass(frozen=True, eq=False)
class SchmidtSpectrum:
    """Schmidt amplitudes, sorted nonincreasing, with sum of squares 1."""

    coefficients: np.ndarray

    @property
    def probabilities(self) -> np.ndarray:
        return self.coefficients**2

    @property
    def purity(self) -> float:
        return float(np.sum(self.probabilities**2))

    @property
    def schmidt_number(self) -> float:
        return 1.0 / self.purity

    @property
    def entropy(self) -> float:
        """Entanglement entropy in nats."""
        p = self.probabilities
        p = p[p > 0]
        return float(max(0.0, -np.sum(p * np.log(p))))

    def report(self, top=16) -> dict:
        return {
            "schmidt_number": self.schmidt_number,
            "purity": self.purity,
            "entropy_nats": self.entropy,
            "coefficients": [float(c) for c in self.coefficients[:top]],
        }


def schmidt_decompose(ja: JointAmplitude) -> SchmidtSpectrum:
    """Schmidt spectrum from the singular values of the cell-weighted amplitude."""
    if ja.domain != "spectral":
        raise ValueError("schmidt_decompose expects a spectral-domain amplitude")
    if not np.all(np.isfinite(ja.values)):
        raise ValueError("joint amplitude contains non-finite entries")
    weighted = ja.values * np.sqrt(ja.cell_area)
    sv = np.linalg.svd(weighted, compute_uv=False)
    sv = sv / np.sqrt(np.sum(sv**2))
    return SchmidtSpectrum(sv)


def _check_uniform(axis, name):
    d = np.diff(axis)
    if d.size == 0 or not np.allclose(d, d[0], rtol=1e-6, atol=0):
        raise ValueError(f"{name} axis is not uniform")
    return float(axis[-1] - axis[0]) / d.size


def _time_axis(n, spacing):
    return (np.arange(n) - n // 2) / (n * spacing)


def jsa_to_jta(ja: JointAmplitude) -> JointAmplitude:
    """Centered 2-D Fourier transform to the joint temporal amplitude.

    Uses g(t_s, t_i) = sum f(nu_s, nu_i) exp(-2 pi i (dnu_s t_s + dnu_i t_i))
    over detunings from the grid centers, scaled so that
    sum |g|^2 dt_s dt_i equals sum |f|^2 dnu_s dnu_i. Time axes are in ps.
    """
    if ja.domain != "spectral":
        raise ValueError("jsa_to_jta expects a spectral-domain amplitude")
    ds = _check_uniform(ja.signal_axis, "signal")
    di = _check_uniform(ja.idler_axis, "idler")
    ns, ni = ja.shape
    g = np.fft.fftshift(np.fft.fft2(np.fft.ifftshift(ja.values), norm="ortho"))
    ts, ti = _time_axis(ns, ds), _time_axis(ni, di)
    scale = np.sqrt(ds * di * ns * ds * ni * di)
    return JointAmplitude(g * scale, ts, ti, "temporal")


def jta_to_jsa(jta: JointAmplitude, signal_center=0.0, idler_center=0.0) -> JointAmplitude:
    """Inverse of :func:`jsa_to_jta`; carrier frequencies are re-attached from the arguments."""
    if jta.domain != "temporal":
        raise ValueError("jta_to_jsa expects a temporal-domain amplitude")
    dts = _check_uniform(jta.signal_axis, "signal")
    dti = _check_uniform(jta.idler_axis, "idler")
    ns, ni = jta.shape
    f = np.fft.fftshift(np.fft.ifft2(np.fft.ifftshift(jta.values), norm="ortho"))
    nus = signal_center + _time_axis(ns, dts)
    nui = idler_center + _time_axis(ni, dti)
    scale = np.sqrt(dts * dti * ns * dts * ni * dti)
    return JointAmplitude(f * scale, nus, nui, "spectral")


def time_difference_distribution(jta: JointAmplitude, delays=None):
    """Distribution of t_i - t_s, normalized to unit sum.

    ``p(dt) = sum_{t_s} JTI(t_s, t_s + dt)``, reading each row of the
    joint temporal intensity at ``t_s + dt`` with linear interpolation
    (zero outside the idler window). ``delays`` defaults to the idler
    time axis.
    """
    if jta.domain != "temporal":
        raise ValueError("time_difference_distribution expects a temporal-domain amplitude")
    inten = jta.intensity()
    ti = jta.idler_axis
    delays = ti.copy() if delays is None else np.asarray(delays, dtype=float)
    p = np.zeros(delays.size)
    for row, ts in zip(inten, jta.signal_axis):
        if not row.any():
            continue
        p += np.interp(ts + delays, ti, row, left=0.0, right=0.0)
    total = p.sum()
    if total <= 0:
        raise ValueError("temporal intensity does not overlap the requested delays")
    return delays, p / total


def temporal_marginal(jta: JointAmplitude, axis):
    axis = {"signal": 0, "idler": 1}.get(axis, axis)
    inten = jta.intensity()
    if axis == 0:
        return jta.signal_axis, inten.sum(axis=1) * jta.idler_spacing
    return jta.idler_axis, inten.sum(axis=0) * jta.signal_spacing
