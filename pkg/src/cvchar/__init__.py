"""cvchar: synthesis, single-homodyne measurement simulation, and full
covariance-matrix characterization of two-mode Gaussian optical states."""

__version__ = "0.1.0"

from .covariance import (
    OMEGA,
    CovarianceMatrix,
    StandardForm,
    SymplecticInvariants,
    SymplecticSpectrum,
    invariants,
    is_physical,
    partial_transpose,
    standard_form,
    symplectic_spectrum,
)
from .diagnostics import (
    DuanResult,
    EprResult,
    PhsResult,
    StateDiagnostics,
    conditional_entropies,
    diagnose,
    duan,
    entropy_f,
    epr,
    log_negativity,
    mutual_information,
    phs,
    purity,
    single_mode_entropy_from_purity,
    total_photons,
    von_neumann_entropy,
)
from .gaussianity import (
    GaussianityReport,
    PhaseBinning,
    gaussianity_report,
    kurtosis_excess,
    shapiro_wilk,
)
from .photon import (
    JointPMF,
    SingleModePMF,
    gaussian_characteristic,
    joint_pnm,
    laguerre,
    reduced_block,
    single_pnm,
)
from .reconstruction import (
    GateResult,
    Measured,
    ModeQuadratures,
    ReconstructedCM,
    assemble_cm,
    estimate_mode_quadratures,
    phase_error_inflation,
    physicality_gate,
    reconstruct_cross_block,
    reconstruct_diag_block,
)
from .synthesis import (
    HomodyneTrace,
    MeasurementConfig,
    OPOModelParams,
    cm_from_model,
    local_rotation,
    local_squeezer,
    mode_mixer,
    mode_quadrature_coefficients,
    sample_trace,
    shot_noise_trace,
    symplectic_defect,
    true_variance,
    two_mode_squeezer,
)
from .tomography import (
    KernelId,
    TomographicEstimate,
    estimate,
    kernel_eval,
    quadrature_mean,
    quadrature_variance,
)
from .tracefile import read_trace, write_trace
