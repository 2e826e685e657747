"""Upper bounds on the rate of perfect k-hash codes."""

from .bounds import BoundReport, fk_bound, rate_bound_from_Mk, table_report
from .covering import CoverPartition, build_cover, collision_check, verify_partition, window_set
from .hashcode import (
    Code,
    empirical_dist,
    expected_tau_exact,
    hansel_check,
    hansel_graph,
    is_k_hash,
    parse_code,
    partition_by_prefix,
    symmetrized_expectation,
    tau_fraction,
)
from .maximizer import (
    CasePoint,
    MaxResult,
    case_point,
    compute_Mk,
    constrained_psi_max,
    global_check,
    maximize_case,
)
from .psipoly import big_psi, big_psi_grad, psi, psi_grad, psi_naive
from .simplex import ProbVector, make_prob_vector, sample_simplex, uniform

__version__ = "0.1.0"
