"""Signal detection in spiked random matrix models."""

from ._core import (
    CltParams,
    DomainError,
    Error,
    NoiseFunctionals,
    NoiseModel,
    SupercriticalError,
    ValidationError,
    clt_params,
    count_outliers,
    eigenvalues_sym,
    gram_spectrum,
    lambda_g,
    mp_edges,
    optimal_alpha,
    run_test,
    simulate,
    statistic,
    synthesize,
    theoretical_error,
    transform_rect,
    transform_wigner,
)

__all__ = [name for name in dir() if not name.startswith("_")]
