"""Exact game analysis: Nash equilibria, duality gap, Bregman divergence,
gap constants, and the benchmark instance generators.

solve_ne uses the classical LP formulation for matrix games.  With the
payoffs shifted to be strictly positive (A + 2, entries in [1, 3]), the
column player's equilibrium solves  max 1'q  s.t. (A+2) q <= 1, q >= 0,
with game value 1/sum(q) and y* = q/sum(q); the row player's strategy is
read off the optimal dual variables.  The LP is solved with a dense
tableau simplex under Bland's pivoting rule (anti-cycling, deterministic).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SolverError, ValidationError
from .game import validate_matrix, validate_strategy

SUPPORT_THRESHOLD = 1e-8
DEGENERATE_GAP = 1e-12
NE_GAP_TOL = 1e-8


@dataclass
class EquilibriumSolution:
    """One Nash equilibrium of a matrix game plus its value and supports."""

    x_star: np.ndarray
    y_star: np.ndarray
    value: float
    support_I: tuple
    support_J: tuple
    is_pure: bool

    def to_dict(self) -> dict:
        return {
            "x_star": list(self.x_star),
            "y_star": list(self.y_star),
            "value": self.value,
            "support_I": list(self.support_I),
            "support_J": list(self.support_J),
            "is_pure": self.is_pure,
        }


@dataclass
class InstanceConstants:
    """Gap-based difficulty constants of a game at a solved equilibrium.

    delta[i] = v - (A y*)[i] and delta_prime[j] = (A' x*)[j] - v are the
    per-action suboptimality gaps; omega / omega_prime sum their reciprocals
    over non-support actions; gamma = sum sqrt(x*) - 1 (zero iff pure);
    delta_min is the smallest positive gap; opt is the identification
    sample-complexity denominator sum 1/gap^2 over non-support actions.
    """

    delta: np.ndarray
    delta_prime: np.ndarray
    omega: float
    omega_prime: float
    gamma: float
    gamma_prime: float
    delta_min: float
    opt: float
    degenerate: bool = field(default=False)

    def to_dict(self) -> dict:
        return {
            "delta": list(self.delta),
            "delta_prime": list(self.delta_prime),
            "omega": self.omega,
            "omega_prime": self.omega_prime,
            "gamma": self.gamma,
            "gamma_prime": self.gamma_prime,
            "delta_min": self.delta_min,
            "opt": self.opt,
            "degenerate": self.degenerate,
        }


def duality_gap(A, x, y) -> float:
    """max_i (A y)_i - min_j (A' x)_j; zero exactly at Nash equilibria.

    Equals the max over mixed deviations because the objective is linear,
    so the extremes sit at simplex vertices.
    """
    A = np.asarray(A, dtype=float)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != (A.shape[0],) or y.shape != (A.shape[1],):
        raise ValidationError(
            f"dimension mismatch: A is {A.shape}, x has {x.shape}, y has {y.shape}")
    return float(np.max(A @ y) - np.min(A.T @ x))


def bregman_half_tsallis(target, base) -> float:
    """Bregman divergence of the 1/2-Tsallis entropy:
    sum_i (sqrt(target_i) - sqrt(base_i))^2 / sqrt(base_i)."""
    t = np.asarray(target, dtype=float)
    b = np.asarray(base, dtype=float)
    if t.shape != b.shape:
        raise ValidationError(f"shape mismatch: {t.shape} vs {b.shape}")
    if np.any(b <= 0):
        raise ValidationError("base strategy has a zero coordinate; divergence undefined")
    sq_t = np.sqrt(t)
    sq_b = np.sqrt(b)
    return float(np.sum((sq_t - sq_b) ** 2 / sq_b))


def _simplex_maximize(A_pos: np.ndarray):
    """max 1'q s.t. A_pos q <= 1, q >= 0 for strictly positive A_pos.

    Returns (q, dual p).  Dense tableau simplex, Bland's rule for both the
    entering and the leaving variable, so termination is guaranteed.
    """
    m, n = A_pos.shape
    tab = np.zeros((m + 1, n + m + 1))
    tab[0, :n] = -1.0  # minimize -1'q
    tab[1:, :n] = A_pos
    tab[1:, n:n + m] = np.eye(m)
    tab[1:, -1] = 1.0
    basis = list(range(n, n + m))

    max_pivots = 50 * (m + n) * max(m, n)
    for _ in range(max_pivots):
        enter = -1
        for j in range(n + m):
            if tab[0, j] < -1e-9:
                enter = j
                break
        if enter < 0:
            break
        col = tab[1:, enter]
        best_ratio = np.inf
        leave = -1
        for r in range(m):
            if col[r] > 1e-12:
                ratio = tab[r + 1, -1] / col[r]
                if ratio < best_ratio - 1e-12 or (
                        abs(ratio - best_ratio) <= 1e-12
                        and (leave < 0 or basis[r] < basis[leave])):
                    best_ratio = ratio
                    leave = r
        if leave < 0:
            raise SolverError("matrix-game LP unbounded; this indicates a bug")
        piv = tab[leave + 1, enter]
        tab[leave + 1] /= piv
        for r in range(m + 1):
            if r != leave + 1 and tab[r, enter] != 0.0:
                tab[r] -= tab[r, enter] * tab[leave + 1]
        basis[leave] = enter
    else:
        raise SolverError("simplex pivot guard exceeded; cycling suspected (bug)")

    q = np.zeros(n)
    for r, b in enumerate(basis):
        if b < n:
            q[b] = tab[r + 1, -1]
    p = tab[0, n:n + m].copy()  # reduced costs of slacks = dual variables
    return q, p


def solve_ne(A) -> EquilibriumSolution:
    """One Nash equilibrium (x*, y*, v) with max_x min_y x'Ay = v = min_y max_x."""
    A = validate_matrix(A)
    m, n = A.shape
    q, p = _simplex_maximize(A + 2.0)
    sq = q.sum()
    sp = p.sum()
    if sq <= 0 or sp <= 0:
        raise SolverError("degenerate LP solution for matrix game (bug)")
    y_star = np.maximum(q, 0.0) / sq
    y_star /= y_star.sum()
    x_star = np.maximum(p, 0.0) / sp
    x_star /= x_star.sum()
    value = float(x_star @ A @ y_star)
    gap = duality_gap(A, x_star, y_star)
    if gap > NE_GAP_TOL:
        raise SolverError(f"LP solution fails the equilibrium check: gap {gap}")
    support_I = tuple(int(i) for i in np.flatnonzero(x_star > SUPPORT_THRESHOLD))
    support_J = tuple(int(j) for j in np.flatnonzero(y_star > SUPPORT_THRESHOLD))
    return EquilibriumSolution(
        x_star=x_star, y_star=y_star, value=value,
        support_I=support_I, support_J=support_J,
        is_pure=(len(support_I) == 1 and len(support_J) == 1))


def instance_constants(A, sol: EquilibriumSolution) -> InstanceConstants:
    """Gap constants of A at the equilibrium ``sol`` (see class docstring).

    When a non-support gap is below the degeneracy threshold (non-unique or
    degenerate equilibrium) the reciprocal sums are reported as +inf with
    the degenerate flag set.  A clearly negative non-support gap means
    ``sol`` is not an equilibrium of A and is an error.
    """
    A = validate_matrix(A)
    v = sol.value
    delta = v - A @ sol.y_star
    delta_prime = A.T @ sol.x_star - v
    in_I = np.zeros(A.shape[0], dtype=bool)
    in_I[list(sol.support_I)] = True
    in_J = np.zeros(A.shape[1], dtype=bool)
    in_J[list(sol.support_J)] = True

    degenerate = False
    for gaps, mask in ((delta, in_I), (delta_prime, in_J)):
        off = gaps[~mask]
        if np.any(off < -1e-9):
            raise ValidationError("negative non-support gap: sol is not an NE of A")
        if np.any(off <= DEGENERATE_GAP):
            degenerate = True

    if degenerate:
        omega = omega_prime = float("inf")
    else:
        omega = float(np.sum(1.0 / delta[~in_I])) if np.any(~in_I) else 0.0
        omega_prime = (float(np.sum(1.0 / delta_prime[~in_J]))
                       if np.any(~in_J) else 0.0)

    gamma = float(np.sum(np.sqrt(np.maximum(sol.x_star, 0.0))) - 1.0)
    gamma_prime = float(np.sum(np.sqrt(np.maximum(sol.y_star, 0.0))) - 1.0)

    pos = np.concatenate([delta[~in_I], delta_prime[~in_J]])
    pos = pos[pos > DEGENERATE_GAP]
    delta_min = float(pos.min()) if pos.size else float("inf")

    if degenerate:
        opt = float("inf")
    else:
        opt = float(np.sum(1.0 / delta[~in_I] ** 2)
                    + np.sum(1.0 / delta_prime[~in_J] ** 2))

    return InstanceConstants(
        delta=delta, delta_prime=delta_prime, omega=omega,
        omega_prime=omega_prime, gamma=gamma, gamma_prime=gamma_prime,
        delta_min=delta_min, opt=opt, degenerate=degenerate)


def gen_example_2x2(epsilon: float) -> np.ndarray:
    """The 2x2 benchmark [[0, 3e], [1-e, 2e]] with unique mixed NE
    x* = (1-3e, 3e), y* = (e, 1-e); requires 0 < e < 1/3."""
    if not (0.0 < epsilon < 1.0 / 3.0):
        raise ValidationError(f"epsilon must lie in (0, 1/3), got {epsilon}")
    return validate_matrix([[0.0, 3.0 * epsilon],
                            [1.0 - epsilon, 2.0 * epsilon]])


def gen_hard_psne_instance(m: int, n: int, d_min: float, d_1: float) -> np.ndarray:
    """Hard PSNE-identification instance with the pure equilibrium at (0, 0).

    Row/column 0 carry gaps 2*d_min (action 1) and 2*d_1 (actions >= 2);
    the lower-right block is the skew-symmetric +/-1 tournament.  Requires
    m, n >= 3, 0 < d_min <= d_1, and 2*d_1 <= 1 to keep entries in [-1, 1].
    """
    if m < 3 or n < 3:
        raise ValidationError(f"m and n must be >= 3, got {m}, {n}")
    if not (0.0 < d_min <= d_1):
        raise ValidationError(f"need 0 < d_min <= d_1, got d_min={d_min}, d_1={d_1}")
    if 2.0 * d_1 > 1.0:
        raise ValidationError(f"need 2*d_1 <= 1, got d_1={d_1}")
    A = np.zeros((m, n))
    A[0, 1] = 2.0 * d_min
    A[1, 0] = -2.0 * d_min
    A[0, 2:] = 2.0 * d_1
    A[2:, 0] = -2.0 * d_1
    # lower-right block: +1 above the diagonal, -1 below, 0 on it
    sub = A[1:, 1:]
    ii, jj = np.indices(sub.shape)
    sub[jj > ii] = 1.0
    sub[jj < ii] = -1.0
    return validate_matrix(A)


def gen_lower_bound_instance(delta, delta_prime) -> np.ndarray:
    """Rank-one gap instance A = 1 delta_prime' - delta 1' with the pure
    equilibrium at the zero coordinates of the two gap vectors."""
    d = np.asarray(delta, dtype=float)
    dp = np.asarray(delta_prime, dtype=float)
    if d.ndim != 1 or dp.ndim != 1 or d.size == 0 or dp.size == 0:
        raise ValidationError("delta and delta_prime must be nonempty vectors")
    for name, v in (("delta", d), ("delta_prime", dp)):
        if np.any(v < 0) or np.any(v > 0.25):
            raise ValidationError(f"{name} entries must lie in [0, 1/4]")
        if not np.any(v == 0):
            raise ValidationError(f"{name} must contain a zero coordinate")
    A = np.ones((d.size, 1)) * dp[None, :] - d[:, None] * np.ones((1, dp.size))
    return validate_matrix(A)
