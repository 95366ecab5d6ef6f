"""Spin-boson squeezing toolkit: displacement-sensing bounds, measurement
protocols, and stroboscopic first-sideband state preparation."""

__version__ = "0.1.0"

from .errors import (
    DegeneratePhase,
    DimensionMismatch,
    IllConditioned,
    NoFeasibleP,
    NonSymmetricWeights,
    SchemaMismatch,
    SdsError,
    ToleranceNotMet,
    TruncationError,
    UnsupportedParity,
)
from .hilbert import (
    HybridSpace,
    Ket,
    LinOp,
    ModeSpace,
    SpinSpace,
    collective_spin,
    destroy,
    displacement,
    expectation,
    fidelity,
    hybrid,
    quadratures,
    recommended_n_max,
    spin_dependent_squeeze,
    squeeze,
)
from .metrology import (
    BoundsReport,
    DickeWeights,
    incompatibility_sds,
    mode_occupation_sds,
    polar_qfim,
    qfi_abs_beta,
    qfim_general,
    qfim_multiparam_sds,
    qfim_numeric,
    reference_limits,
    spin_states,
)

__all__ = [name for name in dir() if not name.startswith("_")]
