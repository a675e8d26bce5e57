"""Self-play loop with bandit feedback, streaming aggregates, and PSNE
identification from play frequencies.

Each round both learners pick mixed strategies, actions are sampled
independently, a single +/-1 outcome r with mean A[i, j] is drawn, and the
row learner is fed loss 1 - r at its action while the column learner is
fed 1 + r (``two_samples=True`` draws a second independent outcome for the
column side instead).  Regret aggregates use the recorded mixed strategies
rather than realized actions, so every trial yields the exact conditional
expectation of the pseudo-regret.

Trial k of a batch uses the RNG stream derived from (master_seed, k);
aggregation across trials is indexed by k, so results are identical for
any degree of parallelism.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .equilibrium import EquilibriumSolution, bregman_half_tsallis, duality_gap
from .errors import SolverError, ValidationError
from .game import validate_matrix
from .rng import RngStream, child_seed

TRAJECTORY_CAP = 10_000


def checkpoint_times(T: int) -> np.ndarray:
    """Powers of two up to T, plus T itself."""
    ts = []
    t = 1
    while t < T:
        ts.append(t)
        t *= 2
    ts.append(T)
    return np.asarray(ts, dtype=np.int64)


@dataclass
class TrialRecord:
    """Streaming aggregates of one self-play trial.

    row_profile[i] = sum_t (A y_t)[i] (cumulative expected payoff of row
    action i against the opponent's played strategies); col_profile[j] =
    sum_t (A' x_t)[j]; value_sum = sum_t x_t' A y_t.  Checkpoints hold the
    round-t strategies and the most-played action pair so far, at
    geometrically spaced rounds.
    """

    horizon: int
    seed: int
    row_profile: np.ndarray
    col_profile: np.ndarray
    value_sum: float
    row_counts: np.ndarray
    col_counts: np.ndarray
    avg_x: np.ndarray
    avg_y: np.ndarray
    checkpoints: list  # [(t, x_t, y_t)]
    checkpoint_modes: list  # [(t, argmax row count, argmax col count)]
    trajectory: list | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        d = {
            "horizon": self.horizon,
            "seed": self.seed,
            "row_profile": list(self.row_profile),
            "col_profile": list(self.col_profile),
            "value_sum": self.value_sum,
            "row_counts": [int(c) for c in self.row_counts],
            "col_counts": [int(c) for c in self.col_counts],
            "avg_x": list(self.avg_x),
            "avg_y": list(self.avg_y),
            "checkpoints": [
                {"t": int(t), "x": list(x), "y": list(y)}
                for t, x, y in self.checkpoints
            ],
            "checkpoint_modes": [
                {"t": int(t), "i": int(i), "j": int(j)}
                for t, i, j in self.checkpoint_modes
            ],
        }
        if self.trajectory is not None:
            d["trajectory"] = [
                {"t": int(t), "x": list(x), "y": list(y)}
                for t, x, y in self.trajectory
            ]
        return d


@dataclass
class RegretSummary:
    """Pseudo-regret of both players plus the average-iterate duality gap."""

    reg_row: float
    reg_col: float
    dgap_avg: float


def _kernel_capable(learner) -> bool:
    kind = getattr(learner, "kernel_kind", None)
    return kind is not None and getattr(learner, "round", 0) == 1


def run_selfplay(A, row_learner, col_learner, T: int, seed: int, *,
                 two_samples: bool = False, store_trajectory: bool = False,
                 force_python: bool = False) -> TrialRecord:
    """One deterministic self-play trial of horizon T.

    Uses a compiled kernel for the built-in learner kinds; any learner
    exposing strategy()/update() works through the Python loop (also
    selected by ``force_python`` or ``store_trajectory``).  Both paths draw
    the same RNG sequence and agree to float roundoff.
    """
    A = validate_matrix(A)
    m, n = A.shape
    if T < 1:
        raise ValidationError(f"horizon T must be >= 1, got {T}")
    if getattr(row_learner, "n_actions", m) != m or getattr(col_learner, "n_actions", n) != n:
        raise ValidationError("learner action counts do not match the matrix")
    if store_trajectory and T > TRAJECTORY_CAP:
        raise ValidationError(
            f"trajectory storage is capped at T <= {TRAJECTORY_CAP}, got {T}")

    use_kernel = (not force_python and not store_trajectory
                  and _kernel_capable(row_learner) and _kernel_capable(col_learner))
    if use_kernel:
        return _run_kernel(A, row_learner, col_learner, T, seed, two_samples)
    return _run_python(A, row_learner, col_learner, T, seed, two_samples,
                       store_trajectory)


def _run_kernel(A, row_learner, col_learner, T, seed, two_samples):
    m, n = A.shape
    row_fixed = getattr(row_learner, "probs", np.zeros(m))
    col_fixed = getattr(col_learner, "probs", np.zeros(n))
    ck = checkpoint_times(T)
    out = _kernels.selfplay(
        np.ascontiguousarray(A), T,
        row_learner.kernel_kind, col_learner.kernel_kind,
        np.ascontiguousarray(row_fixed, dtype=float),
        np.ascontiguousarray(col_fixed, dtype=float),
        np.uint64(seed), ck, two_samples)
    (row_profile, col_profile, value_sum, row_counts, col_counts,
     sum_x, sum_y, ck_x, ck_y, ck_i, ck_j, err_round,
     row_L, col_L, row_cnt, col_cnt, row_rs, col_rs) = out
    if err_round:
        raise SolverError(f"learner state corrupted at round {err_round}")

    for learner, L, cnt, rs in ((row_learner, row_L, row_cnt, row_rs),
                                (col_learner, col_L, col_cnt, col_rs)):
        if hasattr(learner, "cum_loss"):
            learner.cum_loss[:] = L
        if hasattr(learner, "counts"):
            learner.counts[:] = cnt
            learner.reward_sums[:] = rs
        learner.round = T + 1

    checkpoints = [(int(t), ck_x[k].copy(), ck_y[k].copy())
                   for k, t in enumerate(ck)]
    modes = [(int(t), int(ck_i[k]), int(ck_j[k])) for k, t in enumerate(ck)]
    return TrialRecord(
        horizon=T, seed=int(seed), row_profile=row_profile,
        col_profile=col_profile, value_sum=float(value_sum),
        row_counts=row_counts, col_counts=col_counts,
        avg_x=sum_x / T, avg_y=sum_y / T,
        checkpoints=checkpoints, checkpoint_modes=modes)


def _run_python(A, row_learner, col_learner, T, seed, two_samples,
                store_trajectory):
    m, n = A.shape
    rng = RngStream(seed)
    row_profile = np.zeros(m)
    col_profile = np.zeros(n)
    row_counts = np.zeros(m, dtype=np.int64)
    col_counts = np.zeros(n, dtype=np.int64)
    sum_x = np.zeros(m)
    sum_y = np.zeros(n)
    value_sum = 0.0
    ck = checkpoint_times(T)
    ptr = 0
    checkpoints = []
    modes = []
    trajectory = [] if store_trajectory else None

    for t in range(1, T + 1):
        try:
            x = row_learner.strategy()
            y = col_learner.strategy()
        except SolverError as exc:
            raise SolverError(f"round {t}: {exc}") from exc

        w = A @ y
        row_profile += w
        col_profile += A.T @ x
        value_sum += float(x @ w)
        sum_x += x
        sum_y += y

        at_ck = ptr < len(ck) and t == ck[ptr]
        if at_ck:
            checkpoints.append((t, x.copy(), y.copy()))
        if store_trajectory:
            trajectory.append((t, x.copy(), y.copy()))

        i_t = _kernels.sample_cdf(np.ascontiguousarray(x), rng.uniform())
        j_t = _kernels.sample_cdf(np.ascontiguousarray(y), rng.uniform())
        row_counts[i_t] += 1
        col_counts[j_t] += 1

        a = A[i_t, j_t]
        r_row = 1.0 if rng.uniform() < 0.5 * (1.0 + a) else -1.0
        r_col = (1.0 if rng.uniform() < 0.5 * (1.0 + a) else -1.0) \
            if two_samples else r_row

        try:
            row_learner.update(i_t, 1.0 - r_row)
            col_learner.update(j_t, 1.0 + r_col)
        except SolverError as exc:
            raise SolverError(f"round {t}: {exc}") from exc

        if at_ck:
            modes.append((t, int(np.argmax(row_counts)), int(np.argmax(col_counts))))
            ptr += 1

    return TrialRecord(
        horizon=T, seed=int(seed), row_profile=row_profile,
        col_profile=col_profile, value_sum=value_sum,
        row_counts=row_counts, col_counts=col_counts,
        avg_x=sum_x / T, avg_y=sum_y / T,
        checkpoints=checkpoints, checkpoint_modes=modes,
        trajectory=trajectory)


def pseudo_regret(record: TrialRecord, A) -> RegretSummary:
    """Exact conditional pseudo-regret of both players from the recorded
    mixed-strategy aggregates; the best fixed deviation is a vertex, so the
    max/min over profiles suffices."""
    A = validate_matrix(A)
    if record.row_profile.shape != (A.shape[0],) or \
            record.col_profile.shape != (A.shape[1],):
        raise ValidationError("record dimensions do not match the matrix")
    reg_row = float(np.max(record.row_profile) - record.value_sum)
    reg_col = float(record.value_sum - np.min(record.col_profile))
    return RegretSummary(reg_row=reg_row, reg_col=reg_col,
                         dgap_avg=(reg_row + reg_col) / record.horizon)


def last_iterate_metrics(record: TrialRecord, sol: EquilibriumSolution, A):
    """Per checkpoint t: (t, D(x*, x_t) + D(y*, y_t), DGap(x_t, y_t))."""
    if not record.checkpoints:
        raise ValidationError("record has no checkpoints")
    A = validate_matrix(A)
    out = []
    for t, x, y in record.checkpoints:
        breg = (bregman_half_tsallis(sol.x_star, x)
                + bregman_half_tsallis(sol.y_star, y))
        out.append((t, breg, duality_gap(A, x, y)))
    return out


def identify_psne(record: TrialRecord) -> tuple[int, int]:
    """Most frequently played action pair; ties go to the lowest index."""
    if record.row_counts.sum() == 0:
        raise ValidationError("record has no realized actions")
    return int(np.argmax(record.row_counts)), int(np.argmax(record.col_counts))


def identify_psne_mixed(record: TrialRecord) -> tuple[int, int]:
    """Variant using average mixed-strategy mass instead of realized play."""
    return int(np.argmax(record.avg_x)), int(np.argmax(record.avg_y))


def default_threads() -> int:
    env = os.environ.get("BANDITGAME_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValidationError(f"BANDITGAME_THREADS must be an integer, got {env!r}")
    return min(8, os.cpu_count() or 1)


def run_trials(A, row_factory, col_factory, T: int, n_trials: int,
               master_seed: int, threads: int | None = None,
               two_samples: bool = False) -> list[TrialRecord]:
    """n_trials independent self-play trials; trial k gets the child stream
    of (master_seed, k).  Results are ordered by trial index regardless of
    the thread schedule."""
    A = validate_matrix(A)
    if n_trials < 1:
        raise ValidationError(f"n_trials must be >= 1, got {n_trials}")
    m, n = A.shape

    def one(k: int) -> TrialRecord:
        return run_selfplay(A, row_factory(m), col_factory(n), T,
                            child_seed(master_seed, k), two_samples=two_samples)

    workers = threads if threads is not None else default_threads()
    if workers <= 1 or n_trials == 1:
        return [one(k) for k in range(n_trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, range(n_trials)))


def boosted_identify(A, row_factory, col_factory, T: int, S: int,
                     master_seed: int, threads: int | None = None) -> tuple[int, int]:
    """Majority vote of identify_psne over S independent trials (per side);
    ties go to the lowest index."""
    if S < 1:
        raise ValidationError(f"S must be >= 1, got {S}")
    A = validate_matrix(A)
    records = run_trials(A, row_factory, col_factory, T, S, master_seed,
                         threads=threads)
    votes = [identify_psne(r) for r in records]
    i_hat = int(np.argmax(np.bincount([v[0] for v in votes], minlength=A.shape[0])))
    j_hat = int(np.argmax(np.bincount([v[1] for v in votes], minlength=A.shape[1])))
    return i_hat, j_hat
