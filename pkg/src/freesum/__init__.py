"""Numerical free probability: measures, free convolution, Berry-Esseen type bounds."""
from .bai import (
    BaiBreakdown,
    BaiParameters,
    bai_bound_corollary,
    bai_bound_theorem,
    gamma_of,
    semicircle_smoothness_bound,
    semicircle_tail_bound,
)
from .errors import (
    ConfigError,
    ConvergenceError,
    DegreeTooLargeError,
    EigenConvergenceError,
    FreesumError,
    GateError,
    InequalityViolation,
    InvertibilityError,
    MeasureFormatError,
    ParameterError,
    PreconditionError,
    QuadratureError,
    ZeroDenominatorError,
    ZeroScaleError,
)
from .freeconv import (
    AtomList,
    SubordinationResult,
    convolution_atoms,
    free_clt_distribution,
    free_convolve,
    nfold_atoms,
    subordinate,
)
from .matrices import (
    HermitianMatrix,
    InequalityReport,
    SpectralDecomposition,
    build_self_normalized,
    check_operator_inequalities,
    voiculescu_check,
    hermitian_eigen,
    sample_gue,
    trace_resolvent,
)
from .measures import (
    Atomic,
    Empirical,
    FreePoisson,
    GridDensity,
    Measure,
    Semicircle,
    kolmogorov_distance,
)
from .rates import (
    LyapunovReport,
    MomentProfile,
    RateFit,
    Theorem,
    lindeberg_functional,
    lyapunov_report,
    precondition_gate,
    rate_fit,
    theorem_bound,
)
from .transforms import HalfPlanePoint, cauchy_transform, stieltjes_invert

__version__ = "0.1.0"
