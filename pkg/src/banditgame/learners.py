"""Bandit learners behind a single uncoupled interface.

Each learner sees only its own actions and loss observations in [0, 2]
(row player: 1 - r_t, column player: 1 + r_t for realized outcome r_t);
it never sees the opponent or the payoff matrix.  The interface is
``strategy()`` (mixed strategy for the current round) followed by
``update(action, observation)``.

TsallisInf: FTRL with the 1/2-Tsallis entropy regularizer -2 sum sqrt(x_i)
and learning rate eta_t = 1/(2 sqrt(t)), importance-weighted loss estimates
accumulated unshifted (uniform loss shifts do not change the iterates).

Exp3: exponential weights over cumulative IW loss estimates with anytime
rate sqrt(ln m / (m t)).

Ucb1: deterministic point mass on the classical index mean + sqrt(2 ln t /
count) with observations remapped to [0, 1] rewards via r -> 1 - obs/2;
each arm is pulled once before the index rule applies, ties go to the
lowest index.
"""

from __future__ import annotations

import math

import numpy as np

from . import _kernels
from .errors import SolverError, ValidationError

FTRL_RESIDUAL_TOL = 1e-9
MIN_PLAY_PROB = 1e-15


def ftrl_solve(cum_loss, eta: float) -> np.ndarray:
    """Unique minimizer of <L, x> - (2/eta) sum sqrt(x_i) over the simplex.

    Closed form x_i = 1/(eta (L_i + lam))^2 with lam chosen so the
    coordinates sum to 1; solved by bracketed Newton (see _kernels).
    """
    L = np.ascontiguousarray(cum_loss, dtype=float)
    if L.ndim != 1 or L.size == 0:
        raise ValidationError(f"cum_loss must be a nonempty vector, got shape {L.shape}")
    if not np.all(np.isfinite(L)):
        raise ValidationError("cum_loss has non-finite coordinates")
    if not (eta > 0 and math.isfinite(eta)):
        raise ValidationError(f"eta must be positive and finite, got {eta}")
    x = np.empty_like(L)
    resid = _kernels.ftrl_weights(L, eta, x)
    if resid > FTRL_RESIDUAL_TOL:
        raise SolverError(f"FTRL lambda solve did not converge, residual {resid}")
    return x


def _check_observation(obs: float) -> float:
    if not (-1e-9 <= obs <= 2.0 + 1e-9):
        raise ValidationError(f"loss observation {obs} outside [0, 2]")
    return float(obs)


class TsallisInf:
    """Tsallis-INF: FTRL over IW loss estimates with eta_t = 1/(2 sqrt(t))."""

    kernel_kind = _kernels.KIND_TSALLIS

    def __init__(self, n_actions: int):
        if n_actions < 1:
            raise ValidationError("n_actions must be >= 1")
        self.n_actions = n_actions
        self.cum_loss = np.zeros(n_actions)
        self.round = 1
        self.last_strategy: np.ndarray | None = None

    def strategy(self) -> np.ndarray:
        eta = 0.5 / math.sqrt(self.round)
        self.last_strategy = ftrl_solve(self.cum_loss, eta)
        return self.last_strategy

    def update(self, action: int, observation: float) -> None:
        obs = _check_observation(observation)
        if self.last_strategy is None:
            raise SolverError("update() called before strategy()")
        p = self.last_strategy[action]
        if p < MIN_PLAY_PROB:
            raise SolverError(
                f"played action {action} has probability {p}; state corrupted")
        self.cum_loss[action] += obs / p
        self.round += 1


class Exp3:
    """Exponential weights with anytime rate sqrt(ln m / (m t))."""

    kernel_kind = _kernels.KIND_EXP3

    def __init__(self, n_actions: int):
        if n_actions < 1:
            raise ValidationError("n_actions must be >= 1")
        self.n_actions = n_actions
        self.cum_loss = np.zeros(n_actions)
        self.round = 1
        self.last_strategy: np.ndarray | None = None

    def strategy(self) -> np.ndarray:
        m = self.n_actions
        if m == 1:
            self.last_strategy = np.ones(1)
            return self.last_strategy
        eta = math.sqrt(math.log(m) / (m * self.round))
        x = np.empty(m)
        _kernels.exp3_weights(self.cum_loss, eta, x)
        self.last_strategy = x
        return x

    def update(self, action: int, observation: float) -> None:
        obs = _check_observation(observation)
        if self.last_strategy is None:
            raise SolverError("update() called before strategy()")
        p = self.last_strategy[action]
        if p < MIN_PLAY_PROB:
            raise SolverError(
                f"played action {action} has probability {p}; state corrupted")
        self.cum_loss[action] += obs / p
        self.round += 1


class Ucb1:
    """Classical UCB1 on rewards remapped to [0, 1]; plays a point mass."""

    kernel_kind = _kernels.KIND_UCB1

    def __init__(self, n_actions: int):
        if n_actions < 1:
            raise ValidationError("n_actions must be >= 1")
        self.n_actions = n_actions
        self.counts = np.zeros(n_actions, dtype=np.int64)
        self.reward_sums = np.zeros(n_actions)
        self.round = 1
        self.last_strategy: np.ndarray | None = None

    def strategy(self) -> np.ndarray:
        arm = _kernels.ucb1_choice(self.counts, self.reward_sums, self.round)
        x = np.zeros(self.n_actions)
        x[arm] = 1.0
        self.last_strategy = x
        return x

    def update(self, action: int, observation: float) -> None:
        obs = _check_observation(observation)
        self.counts[action] += 1
        self.reward_sums[action] += 1.0 - 0.5 * obs
        self.round += 1


class FixedStrategy:
    """Degenerate learner that plays a constant mixed strategy (no updates)."""

    kernel_kind = _kernels.KIND_FIXED

    def __init__(self, probs):
        from .game import validate_strategy
        self.probs = validate_strategy(probs)
        self.n_actions = self.probs.size
        self.round = 1
        self.last_strategy: np.ndarray | None = None

    def strategy(self) -> np.ndarray:
        self.last_strategy = self.probs
        return self.probs

    def update(self, action: int, observation: float) -> None:
        self.round += 1


LEARNERS = {"tsallis": TsallisInf, "exp3": Exp3, "ucb1": Ucb1}


def make_learner(name: str, n_actions: int):
    """Learner by name: tsallis, exp3, ucb1, or uniform (fixed uniform play)."""
    if name == "uniform":
        return FixedStrategy(np.full(n_actions, 1.0 / n_actions))
    try:
        return LEARNERS[name](n_actions)
    except KeyError:
        raise ValidationError(
            f"unknown learner {name!r}; choose from {sorted(LEARNERS) + ['uniform']}")
