"""Incremental stable matching: closest stable matchings after preference changes."""

from .classic import (
    find_stable_sm,
    find_stable_sr,
    force_pair,
    is_stable_pair,
    matched_set,
    max_weight_stable_marriage,
    stable_pairs,
)
from .gadgets import (
    CharacterizationReport,
    ColoredGraph,
    GadgetSpec,
    apply_forbidden_pairs_gadget,
    apply_forced_pair_gadget,
    certify_clique_solution,
    check_stable_characterization,
    gen_isr_from_clique,
    lift_forbidden_solution,
    lift_forced_solution,
)
from .incremental import (
    Guess,
    GuessState,
    Perfectized,
    Rejection,
    guess_from_solution,
    initialization,
    perfectize,
    run_guess,
    solve_ism,
    solve_isr_xp,
)
from .model import (
    INFINITE,
    UNMATCHED,
    IncrementalInstance,
    Infeasible,
    InternalError,
    InvalidArgument,
    Matching,
    NoneExists,
    PreferenceList,
    PreferenceProfile,
    ResourceLimit,
    Solution,
    blocking_pairs,
    diff_count,
    is_blocking,
    is_stable,
    is_valid_matching,
    strictly_prefers,
    swap_distance,
    symmetric_difference,
    validate_instance,
    weakly_prefers,
)
from .oracle import brute_force_incremental, enumerate_stable
from .structured import (
    MasterList,
    OutlierPartition,
    boundary_violations,
    detect_master_lists,
    enumerate_with_outliers,
    follower_partition,
    outlier_partition,
    solve_isr_outliers,
    solve_strict_master_list,
    solve_weak_master_list_complete,
    weak_master_matching,
)
from .textio import ParseError, parse_graph, parse_instance, parse_matching, serialize_instance
from .ties import linearizations, solve_ismt_tiebreak, solve_ismt_xp

__version__ = "0.1.0"
