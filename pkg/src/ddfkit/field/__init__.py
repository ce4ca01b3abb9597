from .adapters import (
    DeltaMixtureField,
    InducedFieldAdapter,
    ScaledDepthField,
    induced_field_adapter,
    nested_spheres_mixture,
)
from .base import CountingField, Field, FieldSample, FunctionField, depth_argmax
from .derivatives import (
    DegenerateNormal,
    DifferentialReport,
    DiscontinuityStraddled,
    FdConfig,
    differential_report,
    eikonal_residual,
    field_normals,
    grad_consistency_residual,
    grad_p,
    grad_p_scalar,
    grad_v,
    hessian_p,
    normal_from_gradient,
    tangent_basis,
    visibility_residual,
)

__all__ = [
    "CountingField",
    "DegenerateNormal",
    "DeltaMixtureField",
    "DifferentialReport",
    "DiscontinuityStraddled",
    "FdConfig",
    "Field",
    "FieldSample",
    "FunctionField",
    "InducedFieldAdapter",
    "ScaledDepthField",
    "depth_argmax",
    "differential_report",
    "eikonal_residual",
    "field_normals",
    "grad_consistency_residual",
    "grad_p",
    "grad_p_scalar",
    "grad_v",
    "hessian_p",
    "induced_field_adapter",
    "nested_spheres_mixture",
    "normal_from_gradient",
    "tangent_basis",
    "visibility_residual",
]
