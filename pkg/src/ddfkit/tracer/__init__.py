"""Materials and lighting for a Monte-Carlo path tracer that queries a DDF."""

from ..geometry.vecmath import reflect
from .lighting import ConstantEmission, ConstantEnvironment, GradientEnvironment, Lighting, TwoToneSky
from .materials import (
    DENSITY_CLAMP,
    BounceStats,
    Glossy,
    Lambertian,
    Material,
    Mirror,
    brdf_eval,
    gaussian_density,
    glossy_normaliser,
    sample_bounce,
    spectrum,
)
from .path import Iaddf, TraceConfig, path_trace_pixel, path_trace_rays, render_trace, row_rng, trace
from .postprocess import postprocess

__all__ = [
    "BounceStats",
    "ConstantEmission",
    "ConstantEnvironment",
    "DENSITY_CLAMP",
    "Glossy",
    "GradientEnvironment",
    "Iaddf",
    "Lambertian",
    "Lighting",
    "Material",
    "Mirror",
    "TraceConfig",
    "TwoToneSky",
    "brdf_eval",
    "gaussian_density",
    "glossy_normaliser",
    "path_trace_pixel",
    "path_trace_rays",
    "postprocess",
    "reflect",
    "render_trace",
    "row_rng",
    "sample_bounce",
    "spectrum",
    "trace",
]
