from .losses import (
    APPLICABILITY,
    LossWeights,
    loss_directed_eikonal,
    loss_min_distance,
    loss_normals,
    loss_visibility,
    loss_visibility_variance,
    loss_weight_transition,
    loss_weight_variance,
    total_shape_loss,
)
from .records import RECORD_DTYPE, read_binary, read_csv, write_binary, write_csv
from .sampler import DESK_COUNTS, FULL_COUNTS, LabeledBatch, SampleType, SamplerConfig, label, sample, sample_batch

__all__ = [
    "APPLICABILITY",
    "DESK_COUNTS",
    "LabeledBatch",
    "LossWeights",
    "FULL_COUNTS",
    "RECORD_DTYPE",
    "SampleType",
    "SamplerConfig",
    "label",
    "loss_directed_eikonal",
    "loss_min_distance",
    "loss_normals",
    "loss_visibility",
    "loss_visibility_variance",
    "loss_weight_transition",
    "loss_weight_variance",
    "read_binary",
    "read_csv",
    "sample",
    "sample_batch",
    "total_shape_loss",
    "write_binary",
    "write_csv",
]
