"""Fast-slow lattice dynamics: Lax invariants and projective integration."""

from ._core import (
    InvalidInputError,
    NumericalFailure,
    average_drift,
    b_matrix,
    diffusion_stencil,
    drift_integrand,
    estimate_fast_period,
    fast_rhs,
    full_rhs,
    integrate,
    lax_matrix,
    lift,
    observable_gradient,
    observable_vector,
    product_invariants,
    rk4_step,
    run_multiscale,
    run_reference,
    trace_power,
)

__all__ = [
    "InvalidInputError",
    "NumericalFailure",
    "average_drift",
    "b_matrix",
    "diffusion_stencil",
    "drift_integrand",
    "estimate_fast_period",
    "fast_rhs",
    "full_rhs",
    "integrate",
    "lax_matrix",
    "lift",
    "observable_gradient",
    "observable_vector",
    "product_invariants",
    "rk4_step",
    "run_multiscale",
    "run_reference",
    "trace_power",
]
