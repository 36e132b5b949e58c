"""Design and simulation of quasi-phase-matched photon-pair sources."""

from .dispersion import (
    SellmeierModel,
    WaveguideMode,
    default_material,
    group_index,
    load_material,
    refractive_index,
    wavevector,
)
from .qpm import (
    Direction,
    PhaseMatchPoint,
    ProcessSpec,
    analytic_bandwidths,
    grating_vector,
    phase_mismatch,
    solve_operating_point,
    solve_poling_period,
)
from .grating import (
    DomainPattern,
    FabricationErrorModel,
    fourier_coefficient,
    ideal_pattern,
    perturb_pattern,
    pm_amplitude,
    smoothing_factor,
)
from .jsa import JointAmplitude, PumpSpec, SpectralGrid, compute_jsa, fwhm, jsi, marginal
from .analysis import SchmidtSpectrum, jsa_to_jta, schmidt_decompose, time_difference_distribution

__version__ = "0.1.0"
