"""Gaussian-probe metrology of gravitational decoherence in a mechanical mode."""

from .dynamics import (
    BathSpec,
    MirrorSpec,
    MomentState,
    PhysicalParams,
    evolve,
    lambda_g_from,
    lambda_T_from,
    moment_ode_oracle,
    noise_cov,
    propagator,
    steady_state,
)
from .gaussian import (
    TABLE_I_PROBES,
    Coherent,
    CovMat2,
    Displacement2,
    GaussianState,
    NonPhysicalStateError,
    SqueezedThermal,
    SqueezedVacuum,
    Thermal,
    energy,
    is_bona_fide,
    make_probe,
    purity,
    symplectic_eigenvalue,
)
from .metrology import (
    CrbReport,
    ModelInconsistencyError,
    NotIdentifiableError,
    QfiBreakdown,
    cramer_rao,
    dpurity_dlambda_g,
    dsigma_dlambda_g,
    gaussian_fidelity,
    homodyne_cfi,
    qfi,
    qfi_fidelity_oracle,
)

__version__ = "0.1.0"
