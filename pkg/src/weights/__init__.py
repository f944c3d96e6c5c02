from src.weights.sampling import (
    MomentEstimate,
    abs_moment,
    is_unit_mean,
    mean,
    mean_real_part,
    moment_estimate,
    moment_oracle,
    sample,
    sample_vectors,
    vector_abs_moments,
    vector_means,
)

__all__ = [
    "MomentEstimate",
    "abs_moment",
    "is_unit_mean",
    "mean",
    "mean_real_part",
    "moment_estimate",
    "moment_oracle",
    "sample",
    "sample_vectors",
    "vector_abs_moments",
    "vector_means",
]
