"""Poling domain patterns and their phase-matching response.

A pattern is a sequence of domains with signed orientation. Its
phase-matching amplitude is the normalized Fourier integral of the
orientation profile,

    A(dk) = (1 / L) * integral_0^L s(z) exp(i dk z) dz,

evaluated in closed form domain by domain.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "DomainPattern",
    "FabricationErrorModel",
    "ideal_pattern",
    "perturb_pattern",
    "fourier_coefficient",
    "relative_efficiency",
    "smoothing_factor",
    "pm_amplitude",
    "orientation_profile",
    "write_pattern",
    "read_pattern",
]

PATTERN_HEADER = "# qpdc-domains v1"

# keeps the Δk x boundaries work array under ~64 MB of complex128
_CHUNK_ELEMENTS = 4_000_000


@dataclass(frozen=True, eq=False)
class DomainPattern:
    lengths: np.ndarray
    orientations: np.ndarray
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        lengths = np.asarray(self.lengths, dtype=float)
        orient = np.asarray(self.orientations, dtype=int)
        if lengths.ndim != 1 or lengths.shape != orient.shape or lengths.size == 0:
            raise ValueError("lengths and orientations must be non-empty 1-D arrays of equal size")
        if np.any(lengths <= 0):
            raise ValueError("all domain lengths must be > 0")
        if not np.all(np.abs(orient) == 1):
            raise ValueError("orientations must be +1 or -1")
        lengths.setflags(write=False)
        orient.setflags(write=False)
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "orientations", orient)
        object.__setattr__(self, "_total", float(np.sum(lengths)))

    @property
    def total_length(self) -> float:
        return self._total

    @property
    def boundaries(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum(self.lengths)])

    def __len__(self):
        return self.lengths.size

    def __eq__(self, other):
        if not isinstance(other, DomainPattern):
            return NotImplemented
        return np.array_equal(self.lengths, other.lengths) and np.array_equal(
            self.orientations, other.orientations
        )


@dataclass(frozen=True)
class FabricationErrorModel:
    duty_cycle: float = 0.5
    period_jitter_sigma: float = 0.0
    transition_width: float = 0.0
    rng_seed: int = 0
    cumulative: bool = False

    def __post_init__(self):
        if not 0 < self.duty_cycle < 1:
            raise ValueError(f"duty_cycle must be in (0, 1), got {self.duty_cycle}")
        if self.period_jitter_sigma < 0 or self.transition_width < 0:
            raise ValueError("error magnitudes must be >= 0")


def ideal_pattern(period, duty_cycle, n_periods, first=1):
    """``n_periods`` periods of a rectangular +/-1 profile starting with ``first``."""
    if n_periods < 1:
        raise ValueError("n_periods must be >= 1")
    if not 0 < duty_cycle < 1:
        raise ValueError(f"duty_cycle must be in (0, 1), got {duty_cycle}")
    pair = np.array([duty_cycle * period, (1 - duty_cycle) * period])
    lengths = np.tile(pair, int(n_periods))
    orient = np.tile([first, -first], int(n_periods))
    return DomainPattern(lengths, orient)


def perturb_pattern(pattern: DomainPattern, model: FabricationErrorModel) -> DomainPattern:
    """Randomly displace internal domain boundaries.

    Independent mode draws one Gaussian offset per boundary; cumulative
    mode integrates the draws into a random walk along the grating. The
    outer ends stay fixed. Boundaries that would cross are clamped so
    every domain keeps a small positive length.
    """
    sigma = model.period_jitter_sigma
    if sigma == 0 or len(pattern) < 2:
        return pattern
    rng = np.random.default_rng(model.rng_seed)
    z = pattern.boundaries
    total = z[-1]
    inner = z[1:-1]
    draws = rng.normal(0.0, sigma, size=inner.size)
    if model.cumulative:
        draws = np.cumsum(draws)
    moved = inner + draws

    eps = 1e-6 * float(np.min(pattern.lengths))
    idx = np.arange(1, inner.size + 1)
    # forward pass: z_j >= z_{j-1} + eps
    clamped = np.maximum.accumulate(moved - idx * eps) + idx * eps
    clamped = np.maximum(clamped, idx * eps)
    # backward pass: z_j <= total - (n - j) eps
    ridx = inner.size + 1 - idx
    clamped = np.minimum(clamped, total - ridx * eps)
    clamped = (np.minimum.accumulate((clamped + ridx * eps)[::-1]) - ridx[::-1] * eps)[::-1]

    n_clamped = int(np.count_nonzero(clamped != moved))
    notes = ()
    if n_clamped > 0.01 * inner.size:
        msg = (
            f"{n_clamped} of {inner.size} boundary draws ({100 * n_clamped / inner.size:.1f}%) "
            "needed clamping; jitter sigma is large compared with the domain length"
        )
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        notes = (msg,)
    lengths = np.diff(np.concatenate([[0.0], clamped, [total]]))
    return DomainPattern(lengths, pattern.orientations, notes)


def _reduced_phase(m, duty_cycle):
    # |sin(pi m d)| has period 1 in m d; reduce first so integer products give exact zeros
    x = np.mod(np.asarray(m, dtype=float) * duty_cycle, 1.0)
    return np.abs(np.sin(np.pi * x))


def fourier_coefficient(m, duty_cycle=0.5):
    """Magnitude of the m-th Fourier coefficient of a +/-1 rectangular profile."""
    m = np.asarray(m)
    if np.any(m < 1):
        raise ValueError("order must be >= 1")
    g = 2 * _reduced_phase(m, duty_cycle) / (m * np.pi)
    return float(g) if g.ndim == 0 else g


def relative_efficiency(m, duty_cycle=0.5):
    """(G_m / G_1)^2, conversion efficiency of order m relative to first order."""
    m = np.asarray(m, dtype=float)
    s1 = _reduced_phase(1, duty_cycle)
    r = _reduced_phase(m, duty_cycle) ** 2 / (m**2 * s1**2)
    return float(r) if r.ndim == 0 else r


def smoothing_factor(m, period, transition_width):
    """Damping of G_m when the profile is convolved with a Gaussian of std ``transition_width``."""
    if np.any(np.asarray(transition_width) < 0):
        raise ValueError("transition_width must be >= 0")
    r = np.exp(-2 * (np.pi * np.asarray(m) * transition_width / period) ** 2)
    return float(r) if r.ndim == 0 else r


def _boundary_weights(pattern):
    s = pattern.orientations
    w = np.empty(len(pattern) + 1)
    w[0] = -s[0]
    w[1:-1] = s[:-1] - s[1:]
    w[-1] = s[-1]
    z = pattern.boundaries
    keep = w != 0
    return z[keep], w[keep]


def pm_amplitude(pattern: DomainPattern, dk, transition_width=0.0):
    """Normalized phase-matching amplitude of ``pattern`` at mismatch ``dk`` (rad/um).

    Each domain contributes ``s_j (e^{i dk z_{j+1}} - e^{i dk z_j}) / (i dk)``;
    the sum telescopes into a weighted sum over boundaries. A Gaussian
    transition of std ``transition_width`` multiplies the result by
    ``exp(-(dk w)^2 / 2)`` exactly, since smoothing is a convolution.
    """
    dk_arr = np.atleast_1d(np.asarray(dk, dtype=float))
    flat = dk_arr.ravel()
    z, w = _boundary_weights(pattern)
    z_center = 0.5 * pattern.total_length
    zc = z - z_center
    out = np.empty(flat.size, dtype=complex)
    chunk = max(1, _CHUNK_ELEMENTS // max(1, z.size))
    for start in range(0, flat.size, chunk):
        d = flat[start:start + chunk]
        phase = np.exp(1j * np.outer(d, zc)) @ w
        small = np.abs(d) * pattern.total_length < 1e-8
        res = np.empty(d.size, dtype=complex)
        res[~small] = phase[~small] / (1j * d[~small])
        if np.any(small):
            # dk -> 0 limit: integral of the profile
            res[small] = float(np.dot(pattern.lengths, pattern.orientations))
        out[start:start + chunk] = res * np.exp(1j * d * z_center)
    out /= pattern.total_length
    if transition_width > 0:
        out *= np.exp(-0.5 * (flat * transition_width) ** 2)
    out = out.reshape(dk_arr.shape)
    return complex(out[0]) if np.ndim(dk) == 0 else out


def orientation_profile(pattern: DomainPattern, z, transition_width=0.0):
    """Sample the (optionally Gaussian-smoothed) orientation profile at positions ``z``."""
    from scipy.special import erf

    z = np.asarray(z, dtype=float)
    zb, w = _boundary_weights(pattern)
    if transition_width == 0:
        idx = np.searchsorted(pattern.boundaries, z, side="right") - 1
        inside = (z >= 0) & (z < pattern.total_length)
        out = np.zeros_like(z)
        out[inside] = pattern.orientations[idx[inside]]
        return out
    # s(z) = -sum_b w_b H(z - z_b); smoothing turns each step into an erf
    steps = 0.5 * (1 + erf((z[..., None] - zb) / (np.sqrt(2) * transition_width)))
    return -(steps @ w)


def write_pattern(pattern: DomainPattern, path):
    with open(path, "w") as fh:
        fh.write(PATTERN_HEADER + "\n")
        for length, s in zip(pattern.lengths, pattern.orientations):
            fh.write(f"{float(length)!r} {int(s):+d}\n")


def read_pattern(path) -> DomainPattern:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0].strip() != PATTERN_HEADER:
        raise ValueError(f"{path}: missing header '{PATTERN_HEADER}'")
    lengths, orient = [], []
    for lineno, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected 'length_um orientation'")
        lengths.append(float(parts[0]))
        orient.append(int(parts[1]))
    return DomainPattern(np.array(lengths), np.array(orient))
