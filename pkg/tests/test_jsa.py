import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qpdc import pipeline
from qpdc.dispersion import C_UM_THZ
from qpdc.grating import ideal_pattern
from qpdc.jsa import (
    GAUSSIAN_TBP,
    FWHMError,
    JointAmplitude,
    NoPhaseMatchingInWindow,
    PumpSpec,
    SpectralGrid,
    compute_jsa,
    fwhm,
    jsi,
    marginal,
    marginal_fwhm,
    pump_bandwidth,
    pump_envelope,
    ridge_slope,
)
from qpdc.qpm import ProcessSpec, analytic_bandwidths

LP = 0.765
NU_P = C_UM_THZ / LP


def toy_process(toy_mode, direction="counter", length=10.0):
    return ProcessSpec.build(direction, 1, LP / 2.2, length, 25.0, toy_mode)


def with_grid(cfg, **kw):
    return dataclasses.replace(cfg, grid=dataclasses.replace(cfg.grid, **kw))


def test_grid_axes_are_reproducible():
    g = SpectralGrid(195.0, 4.0, 1024, 196.0, 0.02, 512)
    assert g.signal_axis[512] == 195.0
    assert g.idler_axis[256] == 196.0
    assert np.array_equal(g.signal_axis, 195.0 + (np.arange(1024) - 512) * (4.0 / 1024))
    assert g.signal_spacing == 4.0 / 1024
    assert g.cell_area == pytest.approx(4.0 / 1024 * 0.02 / 512, rel=1e-15)
    assert SpectralGrid(195.0, 4.0, 1024, 196.0, 0.02, 512).signal_axis.tolist() == g.signal_axis.tolist()


@pytest.mark.parametrize("n", [4, 7, 9])
def test_grid_rejects_bad_sizes(n):
    with pytest.raises(ValueError):
        SpectralGrid(195.0, 1.0, n, 195.0, 1.0, 16)


def test_pump_spec_invariants():
    with pytest.raises(ValueError):
        PumpSpec(LP, "pulsed", duration=0.0)
    with pytest.raises(ValueError):
        PumpSpec(LP, "cw", linewidth=-1.0)


def test_pump_envelope_peak_is_one():
    for pump in (PumpSpec(LP), PumpSpec(LP, "cw"), PumpSpec(LP, gdd=0.3)):
        assert abs(pump_envelope(pump, NU_P)) == pytest.approx(1.0, abs=1e-15)


def test_pulsed_bandwidth_value():
    assert pump_bandwidth(PumpSpec(LP, duration=2.0)) == pytest.approx(0.441 / 2, rel=1e-3)
    assert GAUSSIAN_TBP == pytest.approx(0.4413, abs=1e-4)


def test_pump_envelope_intensity_fwhm_matches_bandwidth():
    pump = PumpSpec(LP, duration=2.0)
    nu = NU_P + np.linspace(-1, 1, 20001)
    assert fwhm(np.abs(pump_envelope(pump, nu)) ** 2, nu) == pytest.approx(pump_bandwidth(pump), rel=1e-6)
    cw = PumpSpec(LP, "cw", linewidth=1.0)
    nu = NU_P + np.linspace(-5e-6, 5e-6, 20001)
    assert fwhm(np.abs(pump_envelope(cw, nu)) ** 2, nu) == pytest.approx(1e-6, rel=1e-6)


@pytest.mark.parametrize("duration", [0.5, 2.0, 10.0])
def test_pump_envelope_fourier_recovers_duration(duration):
    pump = PumpSpec(LP, duration=duration)
    n = 2**16
    span = 40 * pump_bandwidth(pump)
    dnu = span / n
    detuning = (np.arange(n) - n // 2) * dnu
    field = np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(pump_envelope(pump, NU_P + detuning))))
    t = (np.arange(n) - n // 2) / (n * dnu)
    assert fwhm(np.abs(field) ** 2, t) == pytest.approx(duration, rel=0.01)


def test_gdd_stretches_the_pulse_but_keeps_the_spectrum():
    pump = PumpSpec(LP, duration=2.0, gdd=5.0)
    nu = NU_P + np.linspace(-1, 1, 4001)
    assert fwhm(np.abs(pump_envelope(pump, nu)) ** 2, nu) == pytest.approx(pump_bandwidth(pump), rel=1e-5)


def test_jsa_is_normalized(toy_mode):
    grid = SpectralGrid(NU_P / 2, 1.0, 128, NU_P / 2, 0.05, 128)
    ja = compute_jsa(grid, PumpSpec(LP), toy_process(toy_mode))
    assert ja.norm() == pytest.approx(1.0, abs=1e-12)
    assert np.sum(jsi(ja)) * grid.cell_area == pytest.approx(1.0, abs=1e-9)


def test_cw_toy_support_is_antidiagonal(toy_mode):
    grid = SpectralGrid(NU_P / 2, 0.05, 128, NU_P / 2, 0.05, 128)
    ja = compute_jsa(grid, PumpSpec(LP, "cw", linewidth=1.0), toy_process(toy_mode))
    nu_s, nu_i = grid.mesh()
    support = jsi(ja) > 1e-12 * jsi(ja).max()
    assert np.all(np.abs(nu_s + nu_i - NU_P)[support] < 2 * grid.signal_spacing)
    assert ridge_slope(ja) == pytest.approx(-1.0, abs=1e-6)


def test_cw_requires_equal_spacing(toy_mode):
    grid = SpectralGrid(NU_P / 2, 1.0, 64, NU_P / 2, 0.05, 64)
    with pytest.raises(ValueError, match="equal spacings"):
        compute_jsa(grid, PumpSpec(LP, "cw"), toy_process(toy_mode))


def test_missed_window_names_nearest_point(toy_mode):
    # signal window 10 THz away from degeneracy; sinc is down to its far tails
    grid = SpectralGrid(NU_P / 2 + 10, 0.2, 64, NU_P / 2 - 10, 0.02, 64)
    with pytest.raises(NoPhaseMatchingInWindow, match=r"nearest phase-matched signal 1\.530000 um"):
        compute_jsa(grid, PumpSpec(LP, duration=20.0), toy_process(toy_mode))


def test_jsi_definitions(toy_mode):
    grid = SpectralGrid(NU_P / 2, 1.0, 64, NU_P / 2, 0.05, 64)
    ja = compute_jsa(grid, PumpSpec(LP), toy_process(toy_mode))
    real = JointAmplitude.on_grid(grid, np.abs(ja.values))
    assert np.allclose(jsi(real), np.abs(ja.values) ** 2, rtol=0, atol=0)
    rotated = JointAmplitude.on_grid(grid, ja.values * np.exp(0.7j))
    assert np.allclose(jsi(rotated), jsi(ja), rtol=1e-14, atol=0)
    with pytest.raises(ValueError):
        jsi(JointAmplitude(ja.values, ja.signal_axis, ja.idler_axis, "temporal"))


def test_separable_gaussian_marginals():
    grid = SpectralGrid(195.0, 2.0, 512, 196.0, 0.04, 256)
    nu_s, nu_i = grid.mesh()
    ws, wi = 0.3, 0.006  # intensity FWHMs
    amp = np.exp(-2 * np.log(2) * ((nu_s - 195.0) / ws) ** 2 - 2 * np.log(2) * ((nu_i - 196.0) / wi) ** 2)
    ja = JointAmplitude.on_grid(grid, amp).normalized()
    assert marginal_fwhm(ja, "signal") == pytest.approx(ws, rel=0.01)
    assert marginal_fwhm(ja, "idler") == pytest.approx(wi, rel=0.01)
    ms = marginal(jsi(ja), "signal", grid.idler_spacing)
    assert np.sum(ms) * grid.signal_spacing == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        marginal(jsi(ja), "pump", 1.0)


def test_triangle_fwhm():
    y = np.maximum(0, 10 - np.abs(np.arange(-30, 31))).astype(float)
    assert fwhm(y, 1.0) == pytest.approx(10.0, abs=1e-12)
    assert fwhm(y, 0.25) == pytest.approx(2.5, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(half=st.integers(2, 40), pad=st.integers(1, 30))
def test_triangle_fwhm_any_width(half, pad):
    y = np.maximum(0, half - np.abs(np.arange(-half - pad, half + pad + 1))).astype(float)
    assert fwhm(y, 1.0) == pytest.approx(half, abs=1e-9)


def test_fwhm_edge_errors():
    x = np.arange(50.0)
    with pytest.raises(FWHMError, match="lower edge"):
        fwhm(np.exp(-x / 5), x)
    with pytest.raises(FWHMError, match="upper edge"):
        fwhm(np.exp(-(49 - x) / 5), x)


def test_paper_signal_marginal_follows_pump(paper_run):
    setup, ja = paper_run
    fs = marginal_fwhm(ja, "signal")
    assert fs == pytest.approx(pump_bandwidth(setup.pump), rel=0.30)


def test_cw_idler_marginal_matches_analytic_bandwidth(cw_run):
    setup, ja = cw_run
    _, idler_ghz = analytic_bandwidths(setup.process, setup.point)
    assert marginal_fwhm(ja, "idler") * 1e3 == pytest.approx(idler_ghz, rel=0.01)
    assert 1.0 < idler_ghz < 2.0


def test_grid_refinement_is_stable(paper_cfg, paper_run):
    _, coarse = paper_run
    _, fine = pipeline.run_jsa(with_grid(paper_cfg, n_signal=2048, n_idler=2048))
    a, b = marginal_fwhm(coarse, "idler"), marginal_fwhm(fine, "idler")
    assert abs(a - b) / b < 0.02


def test_counter_ridge_is_nearly_horizontal(paper_run):
    _, ja = paper_run
    assert abs(ridge_slope(ja)) < 0.05


def test_co_ridge_is_antidiagonal(co_run):
    _, ja = co_run
    assert ridge_slope(ja) < -0.1


def test_pattern_path_matches_sinc_for_ideal_grating(toy_mode):
    process = toy_process(toy_mode, length=2.0)
    grid = SpectralGrid(NU_P / 2, 1.0, 64, NU_P / 2, 0.25, 64)
    pump = PumpSpec(LP, duration=2.0)
    sinc = compute_jsa(grid, pump, process)
    n_periods = int(round(process.length_um / process.period))
    pattern = compute_jsa(grid, pump, process, ideal_pattern(process.period, 0.5, n_periods))
    # the pattern amplitude carries a linear phase (reference plane at z = 0)
    overlap = np.sum(np.abs(sinc.values) * np.abs(pattern.values)) * grid.cell_area
    assert overlap > 0.999
