"""Truncated Fock-space deformation machinery over complex subspace arrangements."""

__version__ = "0.1.0"

from .arrangement import (
    Arrangement,
    DeviationStats,
    IsometryCheck,
    IsometrySpectrum,
    Subspace,
    arrangement_from_bases,
    c_constant,
    deviation_stats,
    intersect,
    is_isometric_on,
    isometry_spectrum,
    orthonormalize,
    proj_product_norm,
    subspace_equal,
    subspace_sum,
)
from .deform import (
    DeformReport,
    DeformRow,
    IsometryWarning,
    TractabilityWarning,
    TruncatedDeformOp,
    TruncatedNorms,
    analytic_bound,
    build_t_op,
    gram_deviation,
    make_tilt_family,
    run_experiment,
    sandwich_check,
    truncated_norms,
)
from .fock import (
    DegreeSpace,
    MultiIndex,
    SymVector,
    TruncatedFunction,
    da_kernel,
    degree_space,
    embed_power,
    gram,
    gram_pencil_lb,
    homogeneous_component,
    multi_indices,
    multiplier_norm_lb,
    sample_ball,
    sym_dim,
    sym_power,
)
from .maxrep import (
    MaximalRepresentation,
    PairwiseReport,
    maximal_representation,
    null_extension,
    verify_pairwise,
)
from .moebius import (
    Automorphism,
    compose,
    defect_identity_residual,
    gram_defect_residual,
    inverse,
    kernel_identity_residual,
    kernel_scaling_residual,
    moebius_map,
    normalizing_factor,
    pseudohyperbolic,
    random_automorphism,
)
from .tractability import TractabilityVerdict, TraceRecord, classify
