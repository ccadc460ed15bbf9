"""Exact set-family combinatorics: packing norms on tree segments,
admissibility over sequence grids, and branching tree systems."""

from .ci import (
    CiReport,
    ConditionResult,
    Decomposition,
    check_ci,
    check_condition_b,
    check_condition_c,
    disjointify,
    identity_envelope,
    report_to_dict,
)
from .core import (
    FiniteTree,
    FinVector,
    GroundSet,
    SetFamily,
    WeightedSet,
    branches_and_tails,
    canonical_member,
    dyadic_tree,
    sort_members,
    trace_set,
    tree_segments,
    unit_vector,
)
from .errors import (
    DecompositionError,
    EmptySupportError,
    GroundMismatchError,
    IndexOutOfRangeError,
    InputFormatError,
    InvalidComboError,
    InvalidEnvelopeError,
    InvalidEpsilonError,
    InvalidPartitionError,
    JsnormError,
    MissingStratumError,
    ResourceLimitError,
    UncoveredGammaError,
    UnknownMemberError,
)
from .norm import (
    DecreasingL2Seq,
    DualCombination,
    GreedyCertificate,
    NormResult,
    dual_eval,
    functional_eval,
    greedy_bound,
    greedy_extract,
    norm_oracle,
    norm_tree_dp,
    norm_weighted,
    sqrt_decimal,
    weighted_eval,
)
from .reznichenko import (
    PartitionWitness,
    ReznParams,
    ReznSystem,
    StageRecord,
    build,
    levels_partition,
    partition_search,
    segment_family,
    segment_strata,
    system_from_dict,
    system_to_dict,
    verify_system,
)
from .talagrand import (
    AdmissibilityFailure,
    AdmissibleSet,
    QePartitionWitness,
    SaturationResult,
    SeqGrid,
    admissible_family,
    eberleinize,
    is_admissible,
    qe_partition_search,
    saturation_partition,
    validate_partition,
)

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityFailure",
    "AdmissibleSet",
    "CiReport",
    "ConditionResult",
    "Decomposition",
    "DecompositionError",
    "DecreasingL2Seq",
    "DualCombination",
    "EmptySupportError",
    "FinVector",
    "FiniteTree",
    "GreedyCertificate",
    "GroundMismatchError",
    "GroundSet",
    "IndexOutOfRangeError",
    "InputFormatError",
    "InvalidComboError",
    "InvalidEnvelopeError",
    "InvalidEpsilonError",
    "InvalidPartitionError",
    "JsnormError",
    "MissingStratumError",
    "NormResult",
    "PartitionWitness",
    "QePartitionWitness",
    "ResourceLimitError",
    "ReznParams",
    "ReznSystem",
    "SaturationResult",
    "SeqGrid",
    "SetFamily",
    "StageRecord",
    "UncoveredGammaError",
    "UnknownMemberError",
    "WeightedSet",
    "admissible_family",
    "branches_and_tails",
    "build",
    "canonical_member",
    "check_ci",
    "check_condition_b",
    "check_condition_c",
    "disjointify",
    "dual_eval",
    "dyadic_tree",
    "eberleinize",
    "functional_eval",
    "greedy_bound",
    "greedy_extract",
    "identity_envelope",
    "is_admissible",
    "levels_partition",
    "norm_oracle",
    "norm_tree_dp",
    "norm_weighted",
    "partition_search",
    "qe_partition_search",
    "report_to_dict",
    "saturation_partition",
    "segment_family",
    "segment_strata",
    "sort_members",
    "sqrt_decimal",
    "system_from_dict",
    "system_to_dict",
    "trace_set",
    "tree_segments",
    "unit_vector",
    "validate_partition",
    "verify_system",
    "weighted_eval",
]
