"""Relaxed greedy approximation over finite symmetric dictionaries."""

from .analysis import (
    BoundReport,
    ProductBound,
    best_m_term_error,
    check_divergence_floor,
    check_upper_bound,
    counterexample_floor,
    counterexample_instance,
    crga_bound,
    lower_bound_instance,
    partial_product,
    prga_bound,
    product_with_tail,
    rga_bound,
)
from .dictionary import (
    A1Element,
    A1MembershipError,
    AtomRef,
    Dictionary,
    DictionaryError,
    build_a1_element,
    canonical_dictionary,
    select_atom,
    validate,
)
from .engines import (
    Algorithm,
    AlgorithmConfig,
    IterationRecord,
    Trace,
    optimal_gamma,
    run,
    run_crga,
    run_pga,
    run_prga,
    run_rga,
)
from .estimator import GreedyApproximator
from .hilbert import DimensionMismatchError, combine, inner, norm_l1, norm_l2

__version__ = "0.1.0"
