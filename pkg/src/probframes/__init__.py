"""Probabilistic frames: measures, frame operators, potentials and transport."""

__version__ = "0.1.0"

from .constructions import convolve, mix_with_delta0, product_measure
from .errors import (
    ConvergenceError,
    InvalidMeasureError,
    PreconditionError,
    ProbFrameError,
)
from .estimation import (
    MCReport,
    RowSpec,
    TylerResult,
    bingham_statistic,
    mc_verify_random_frame,
    sample_acg,
    tyler_iterate,
)
from .measures import (
    DiscreteMeasure,
    GaussianMixtureMeasure,
    Measure,
    fourth_moment,
    mean,
    sample,
    second_moment,
    support_rank,
)
from .operators import (
    FrameBounds,
    FrameOperator,
    GramMatrix,
    canonical_dual,
    canonical_tight,
    frame_bounds,
    frame_operator,
    gram_matrix,
    is_probabilistic_frame,
)
from .potential import (
    PotentialReport,
    frame_potential,
    is_spherical_2design,
    john_conditions,
    mixed_potential_ratio,
    symmetrize,
)
from .povm import PovmAtlas, build_povm, validate_povm
from .transport import (
    TransportPlan,
    embed_counting,
    embed_normalized,
    permutation_distance,
    wasserstein2,
)

__all__ = [
    "ConvergenceError",
    "DiscreteMeasure",
    "FrameBounds",
    "FrameOperator",
    "GaussianMixtureMeasure",
    "GramMatrix",
    "InvalidMeasureError",
    "MCReport",
    "Measure",
    "PotentialReport",
    "PovmAtlas",
    "PreconditionError",
    "ProbFrameError",
    "RowSpec",
    "TransportPlan",
    "TylerResult",
    "bingham_statistic",
    "build_povm",
    "canonical_dual",
    "canonical_tight",
    "convolve",
    "embed_counting",
    "embed_normalized",
    "fourth_moment",
    "frame_bounds",
    "frame_operator",
    "frame_potential",
    "gram_matrix",
    "is_probabilistic_frame",
    "is_spherical_2design",
    "john_conditions",
    "mc_verify_random_frame",
    "mean",
    "mix_with_delta0",
    "mixed_potential_ratio",
    "permutation_distance",
    "product_measure",
    "sample",
    "sample_acg",
    "second_moment",
    "support_rank",
    "symmetrize",
    "tyler_iterate",
    "validate_povm",
    "wasserstein2",
]
