"""Incompatibility measures for quantum observables.

Two families of measures are provided: a distinguishability measure Q
built on the accessible fidelity of the observables' eigenstates, and
disturbance measures Q_alpha comparing measurement statistics with and
without an intervening measurement. Entropic uncertainty bounds, convex
relaxations and an intercept-resend simulation complement them.
"""

from .bounds import BoundReport, audit_bound, qp_qf_lower, sdp_q_lower
from .distance import DirectionalResult, disturbance, q_alpha_directional, q_alpha_pair, q_alpha_set, qf_qubit_closed, qf_subspace_closed
from .entropy import fidelity_classical, l1_distance, linf_distance, measure_dist, renyi, shannon, successive_dist, tsallis
from .estimators import EntropicBound, IncompatibilityMeasure, check_observables
from .eur import EurResult, h2_corollary_bound, h2_mub_closed, h2_standard, t2_standard, t2_succ_avg, t2_successive
from .exceptions import *  # noqa: F401,F403
from .fidelity import (
    FidelityResult,
    RankOnePovm,
    avg_fidelity_element,
    constant_povm_check,
    fmax_ascent,
    fmax_direct_sum,
    q_mub_closed,
    q_qubit_closed,
    q_subspace_closed,
)
from .linalg import (
    BlochVector,
    DensityMatrix,
    Ensemble,
    Observable,
    PureState,
    direct_sum_ensemble,
    eigensystem,
    eigenstate_ensemble,
    mub_bases,
    overlap_matrix,
    qubit_observable,
    subspace_pair,
)
from .qkd import EveStrategy, SimResult, analytic_error_rate, optimal_strategy, simulate_error_rate
from .search import SearchConfig

__version__ = "0.1.0"
