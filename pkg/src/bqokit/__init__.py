"""Desk-scale toolkit for block combinatorics and minimal-bad-array descent."""

from .arrays import (
    BadnessVerdict,
    BlockArray,
    dot_order_violation,
    evaluate,
    is_bad,
    le_dot_prime,
    le_prime,
    lt_dot_prime,
    lt_prime,
    normalize_array,
)
from .blocks import (
    BlockReport,
    FinSeq,
    WindowedBlock,
    as_finseq,
    block_after,
    departure_maxima,
    is_barrier,
    is_prefix,
    is_proper_prefix,
    is_valid_block,
    kset_block,
    le_dot,
    least_departure,
    lenlex,
    lt_dot,
    normalize_refinement,
    patch_elements,
    schreier_block,
    singleton_block,
    surgery,
    triangle,
    validate_block,
)
from .errors import (
    BqoError,
    BudgetError,
    CoverageError,
    DomainError,
    PostconditionError,
    PreconditionError,
    StructureError,
)
from .gadget import (
    GadgetFamily,
    GadgetSpace,
    OmegaStar,
    build_extended,
    build_space,
    canonical_bad_array,
    decode,
    find_nontransitive_witness,
    substitute,
)
from .relations import (
    Enumeration,
    FiniteRelation,
    PartialRanking,
    RelationReport,
    check_relation,
    first_ranking_violation,
    linearize_ranking,
    pouzet_lift,
    powerset_lift,
    rado_order,
    rado_rows,
    validate_partial_ranking,
)
from .search import (
    Budget,
    DescentTrace,
    MinimalityVerdict,
    STEP_LIMIT,
    TERMINATED_MINIMAL,
    WINDOW_EXHAUSTED,
    descent_step,
    enumerate_blocks,
    enumerate_refinements,
    find_bad_array,
    find_bad_sequence,
    is_laver_minimal,
    is_simpson_minimal,
    limit_block,
    run_descent,
)

__version__ = "0.1.0"
