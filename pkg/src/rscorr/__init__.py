"""Exact Rudin-Shapiro correlation spectra and growth-rate certificates."""

from .sequences import (
    CoefficientSequence,
    CorrelationSpectrum,
    RoundingMarginError,
    autocorrelate,
    crosscorrelate,
    generate,
    generate_pair,
    moment4,
    parseval_check,
)
from .lag_chain import (
    OmegaVector,
    admissible_word,
    classify,
    descend,
    omega_by_recursion,
    select_matrix,
    verify_recursion,
)
from .exactmat import (
    CanonicalForm,
    canonicalize,
    random_admissible_word,
    word_product,
)
from .spectral import (
    CubicRoots,
    EigenSystem,
    SpectralNorm,
    eigensystem,
    named_constants,
    solve_characteristic_cubic,
    spectral_norm,
)
from .certificates import (
    NormCertificate,
    ScaledMat,
    bound_word_norm,
    check_lemma4_mixed,
    check_lemma4_powers,
    sweep_lemma3,
)
from .analysis import (
    CrossingReport,
    GrowthRecord,
    LowerBoundTrace,
    crossing_count,
    growth_slope,
    growth_table,
    lower_bound_trace,
    mq_norms,
    verify_lower_bound_recursion,
)

__version__ = "0.1.0"
