"""Constructive geometry of balls in mixed norms: exact norm arithmetic,
affine-line designs, grid partitions, spreading operators, a block-sparse
approximation pipeline, width formulas, and a rigidity classifier."""

from .designs import (
    Design,
    DesignReport,
    GaloisField,
    affine_line_design,
    is_supported_order,
    repeat_design,
    verify_design,
)
from .norms import (
    BlockMatrix,
    BlockShape,
    Exponent,
    MixedNormParams,
    block_norm_vector,
    ceil_power,
    d0_mixed,
    extreme_points_inf1,
    float_pow,
    lq_norm,
    mixed_norm,
    normalized,
    pos_part,
    recip_gap,
    sample_ball,
)
from .partitions import (
    Partition,
    PartitionReport,
    good_partition,
    partition_from_sets,
    restrict,
    singleton_partition,
    verify_partition,
)
from .spread import (
    ApproxResult,
    KTermApproximation,
    OneColumnCheck,
    PipelineParams,
    SpreadOperator,
    apply_spread,
    approximate,
    best_k_term,
    check_one_column_bound,
    choose_pipeline_params,
    grouped_subspace_approximate,
    spread_error_coefficient,
    transposition_partition,
)
from .widths import (
    CertificateRecord,
    RegimeReport,
    WitnessRecord,
    b1_l2_width,
    classify,
    nonrigidity_witness,
    pietsch_stesin,
    rigidity_certificate,
)

__all__ = [
    "ApproxResult",
    "BlockMatrix",
    "BlockShape",
    "CertificateRecord",
    "Design",
    "DesignReport",
    "Exponent",
    "GaloisField",
    "KTermApproximation",
    "MixedNormParams",
    "OneColumnCheck",
    "Partition",
    "PartitionReport",
    "PipelineParams",
    "RegimeReport",
    "SpreadOperator",
    "WitnessRecord",
    "affine_line_design",
    "apply_spread",
    "approximate",
    "b1_l2_width",
    "best_k_term",
    "block_norm_vector",
    "ceil_power",
    "check_one_column_bound",
    "choose_pipeline_params",
    "classify",
    "d0_mixed",
    "extreme_points_inf1",
    "float_pow",
    "good_partition",
    "grouped_subspace_approximate",
    "is_supported_order",
    "lq_norm",
    "mixed_norm",
    "nonrigidity_witness",
    "normalized",
    "partition_from_sets",
    "pietsch_stesin",
    "pos_part",
    "recip_gap",
    "repeat_design",
    "restrict",
    "rigidity_certificate",
    "sample_ball",
    "singleton_partition",
    "spread_error_coefficient",
    "transposition_partition",
    "verify_design",
    "verify_partition",
]
