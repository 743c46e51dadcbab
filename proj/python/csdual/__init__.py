"""Mixed spherical spin glasses: Parisi functional, its dual, and certified solves."""

from ._core import (
    Error,
    InfeasibleError,
    InputError,
    InvalidMeasureError,
    Measure,
    Model,
    ModelError,
    SingularPointError,
    certify,
    dual_value,
    gap_function,
    grid_oracle,
    mass_gradient,
    primal_value,
    rs_quick_tests,
    sign_pattern,
    solve,
)

__all__ = [
    "Error",
    "InfeasibleError",
    "InputError",
    "InvalidMeasureError",
    "Measure",
    "Model",
    "ModelError",
    "SingularPointError",
    "certify",
    "dual_value",
    "gap_function",
    "grid_oracle",
    "mass_gradient",
    "primal_value",
    "rs_quick_tests",
    "sign_pattern",
    "solve",
]
