"""Exact posterior laws of a Markov chain given its transition counts.

The package counts trajectories consistent with a matrix of one-step
transition frequencies (by Whittle's cofactor formula and by brute
enumeration), turns those counts into posterior laws of the first
transition, checks them by Monte Carlo, and measures their large-n
behaviour on typical events.
"""

__version__ = "0.1.0"

from .exceptions import (
    ConsistencyError,
    DegenerateModelError,
    FreqCondError,
    InvalidInputError,
    NullConditioningError,
    PreconditionError,
    ResourceLimitError,
    UndefinedRatioError,
)
from .model import (
    BalanceReport,
    FrequencyMatrix,
    MarkovModel,
    balance_report,
    frequency_of_trajectory,
    stationary_distribution,
)
from .enumeration import (
    count_paths_brute,
    count_with_term_brute,
    enumerate_chain_strings,
    iid_conditional_brute,
)
from .whittle import count_first_transition, whittle_count
from .posterior import (
    PosteriorTable,
    iid_pair_posterior,
    iid_posterior,
    markov_posterior,
    start_posterior,
)
from .simulate import mc_conditional_x1, verify_exact_vs_mc
from .asymptotics import ConvergenceReport, TypicalityConfig, convergence_sweep, typical_events

__all__ = [name for name in dir() if not name.startswith("_")]
