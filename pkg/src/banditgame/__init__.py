"""banditgame: uncoupled no-regret learning dynamics in zero-sum matrix games.

Self-play simulation of bandit learners (Tsallis-INF, Exp3, UCB1) with
exact equilibrium analysis, instance-difficulty constants, PSNE
identification, and reproducible seeded experiments.
"""

__version__ = "0.1.0"

from .dynamics import (RegretSummary, TrialRecord, boosted_identify,
                       identify_psne, identify_psne_mixed,
                       last_iterate_metrics, pseudo_regret, run_selfplay,
                       run_trials)
from .equilibrium import (EquilibriumSolution, InstanceConstants,
                          bregman_half_tsallis, duality_gap, gen_example_2x2,
                          gen_hard_psne_instance, gen_lower_bound_instance,
                          instance_constants, solve_ne)
from .errors import BanditGameError, SolverError, ValidationError
from .game import (load_matrix_text, sample_action, sample_outcome,
                   validate_matrix, validate_strategy)
from .learners import Exp3, FixedStrategy, TsallisInf, Ucb1, ftrl_solve, \
    make_learner
from .rng import RngStream, child_seed, splitmix64

__all__ = [
    "BanditGameError", "ValidationError", "SolverError",
    "RngStream", "child_seed", "splitmix64",
    "validate_matrix", "validate_strategy", "sample_action",
    "sample_outcome", "load_matrix_text",
    "ftrl_solve", "TsallisInf", "Exp3", "Ucb1", "FixedStrategy",
    "make_learner",
    "solve_ne", "duality_gap", "bregman_half_tsallis", "instance_constants",
    "gen_example_2x2", "gen_hard_psne_instance", "gen_lower_bound_instance",
    "EquilibriumSolution", "InstanceConstants",
    "run_selfplay", "run_trials", "pseudo_regret", "last_iterate_metrics",
    "identify_psne", "identify_psne_mixed", "boosted_identify",
    "TrialRecord", "RegretSummary",
]
