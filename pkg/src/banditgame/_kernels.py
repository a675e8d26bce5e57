"""Numba-compiled inner loops.

Everything here mirrors the pure-Python implementations exactly:

- ``sm64_u01`` is bit-identical to ``rng.RngStream.uniform`` (same SplitMix64
  counter scheme, same 53-bit float conversion).
- ``ftrl_weights`` is the one and only FTRL solver; the Python-facing
  ``learners.ftrl_solve`` calls it directly.
- ``selfplay`` fuses the round loop of ``dynamics.run_selfplay`` for the
  built-in learner kinds.  The Python fallback loop performs the identical
  sequence of RNG draws and arithmetic, so the two paths agree to float
  roundoff (tested).

Learner kind codes: 0 = Tsallis-INF, 1 = Exp3, 2 = UCB1, 3 = fixed strategy.
"""

import math

import numpy as np
from numba import njit, uint64

_U1 = uint64(1)
_GOLDEN = uint64(0x9E3779B97F4A7C15)
_MIX1 = uint64(0xBF58476D1CE4E5B9)
_MIX2 = uint64(0x94D049BB133111EB)

KIND_TSALLIS = 0
KIND_EXP3 = 1
KIND_UCB1 = 2
KIND_FIXED = 3


@njit(cache=True)
def sm64_u01(seed, counter):
    """53-bit uniform in [0,1): output `counter` of SplitMix64 stream `seed`."""
    z = seed + (counter + _U1) * _GOLDEN
    z ^= z >> uint64(30)
    z *= _MIX1
    z ^= z >> uint64(27)
    z *= _MIX2
    z ^= z >> uint64(31)
    return (z >> uint64(11)) * 2.0**-53


@njit(cache=True)
def sample_cdf(probs, u):
    """Index i with probability probs[i], by CDF inversion of u in [0,1)."""
    c = 0.0
    last = probs.shape[0] - 1
    for i in range(last):
        c += probs[i]
        if u < c:
            return i
    return last


@njit(cache=True)
def ftrl_weights(cum_loss, eta, x):
    """Minimize <L, x> + (1/eta) * (-2 sum sqrt(x_i)) over the simplex.

    Writes the minimizer into ``x`` and returns the final KKT residual
    |sum_i 1/(eta (L_i + lam))^2 - 1|.  The stationarity condition gives
    x_i = 1/(eta (L_i + lam))^2 with lam the root of that sum equalling 1;
    the root is bracketed in [-minL + 1/eta, -minL + sqrt(m)/eta] and found
    by Newton guarded by bisection.  Losses are re-centered at their minimum
    first (the solution is shift-invariant) to keep lam well-conditioned.
    """
    m = cum_loss.shape[0]
    if m == 1:
        x[0] = 1.0
        return 0.0
    lmin = cum_loss[0]
    for i in range(1, m):
        if cum_loss[i] < lmin:
            lmin = cum_loss[i]
    lo = 1.0 / eta
    hi = math.sqrt(m) / eta
    lam = 0.5 * (lo + hi)
    g = 1.0
    for _ in range(200):
        g = -1.0
        dg = 0.0
        for i in range(m):
            d = eta * (cum_loss[i] - lmin + lam)
            inv2 = 1.0 / (d * d)
            g += inv2
            dg -= 2.0 * eta * inv2 / d
        if abs(g) <= 1e-12:
            break
        if g > 0.0:
            lo = lam
        else:
            hi = lam
        step = lam - g / dg
        if lo < step < hi:
            lam = step
        else:
            lam = 0.5 * (lo + hi)
    s = 0.0
    for i in range(m):
        d = eta * (cum_loss[i] - lmin + lam)
        x[i] = 1.0 / (d * d)
        s += x[i]
    for i in range(m):
        x[i] /= s
    return abs(g)


@njit(cache=True)
def exp3_weights(cum_loss, eta, x):
    """Exponential weights over negated cumulative losses, max-shifted."""
    m = cum_loss.shape[0]
    lmin = cum_loss[0]
    for i in range(1, m):
        if cum_loss[i] < lmin:
            lmin = cum_loss[i]
    s = 0.0
    for i in range(m):
        x[i] = math.exp(-eta * (cum_loss[i] - lmin))
        s += x[i]
    for i in range(m):
        x[i] /= s
    return 0.0


@njit(cache=True)
def ucb1_choice(counts, reward_sums, t):
    """UCB1 arm at round t: round-robin for t <= m, then the index rule."""
    m = counts.shape[0]
    if t <= m:
        return t - 1
    best = 0
    best_idx = -1.0e308
    logt = math.log(t)
    for i in range(m):
        idx = reward_sums[i] / counts[i] + math.sqrt(2.0 * logt / counts[i])
        if idx > best_idx:
            best_idx = idx
            best = i
    return best


@njit(cache=True)
def _strategy(kind, t, cum_loss, counts, reward_sums, fixed, x):
    m = x.shape[0]
    if kind == 0:
        return ftrl_weights(cum_loss, 0.5 / math.sqrt(t), x)
    if kind == 1:
        return exp3_weights(cum_loss, math.sqrt(math.log(m) / (m * t)), x)
    if kind == 2:
        for i in range(m):
            x[i] = 0.0
        x[ucb1_choice(counts, reward_sums, t)] = 1.0
        return 0.0
    for i in range(m):
        x[i] = fixed[i]
    return 0.0


@njit(cache=True)
def _update(kind, played, obs, cum_loss, counts, reward_sums, x):
    """Feed one loss observation in [0,2]; returns False on corrupted state."""
    if kind == 0 or kind == 1:
        p = x[played]
        if p < 1e-15:
            return False
        cum_loss[played] += obs / p
    elif kind == 2:
        counts[played] += 1
        reward_sums[played] += 1.0 - 0.5 * obs
    return True


@njit(cache=True, nogil=True)
def selfplay(A, T, row_kind, col_kind, row_fixed, col_fixed, seed, ck_times,
             two_samples):
    """Run one self-play trial; see dynamics.run_selfplay for the contract.

    Returns streaming aggregates plus the final learner states so the Python
    wrapper can sync its learner objects.  err_round > 0 flags the round at
    which a learner state was found corrupted (never expected in practice).
    """
    m = A.shape[0]
    n = A.shape[1]
    row_profile = np.zeros(m)
    col_profile = np.zeros(n)
    row_counts = np.zeros(m, dtype=np.int64)
    col_counts = np.zeros(n, dtype=np.int64)
    sum_x = np.zeros(m)
    sum_y = np.zeros(n)
    value_sum = 0.0

    row_L = np.zeros(m)
    col_L = np.zeros(n)
    row_cnt = np.zeros(m, dtype=np.int64)
    col_cnt = np.zeros(n, dtype=np.int64)
    row_rs = np.zeros(m)
    col_rs = np.zeros(n)

    n_ck = ck_times.shape[0]
    ck_x = np.zeros((n_ck, m))
    ck_y = np.zeros((n_ck, n))
    ck_i = np.zeros(n_ck, dtype=np.int64)
    ck_j = np.zeros(n_ck, dtype=np.int64)

    x = np.zeros(m)
    y = np.zeros(n)
    ctr = uint64(0)
    ptr = 0
    err_round = 0

    for t in range(1, T + 1):
        r1 = _strategy(row_kind, t, row_L, row_cnt, row_rs, row_fixed, x)
        r2 = _strategy(col_kind, t, col_L, col_cnt, col_rs, col_fixed, y)
        if r1 > 1e-9 or r2 > 1e-9:
            err_round = t
            break

        # streaming aggregates use the mixed strategies (exact conditional
        # expectations), not the realized actions
        xay = 0.0
        for i in range(m):
            w = 0.0
            for j in range(n):
                w += A[i, j] * y[j]
            row_profile[i] += w
            xay += x[i] * w
            sum_x[i] += x[i]
        for j in range(n):
            w = 0.0
            for i in range(m):
                w += A[i, j] * x[i]
            col_profile[j] += w
            sum_y[j] += y[j]
        value_sum += xay

        at_ck = ptr < n_ck and t == ck_times[ptr]
        if at_ck:
            for i in range(m):
                ck_x[ptr, i] = x[i]
            for j in range(n):
                ck_y[ptr, j] = y[j]

        u = sm64_u01(seed, ctr)
        ctr += _U1
        i_t = sample_cdf(x, u)
        u = sm64_u01(seed, ctr)
        ctr += _U1
        j_t = sample_cdf(y, u)
        row_counts[i_t] += 1
        col_counts[j_t] += 1

        a = A[i_t, j_t]
        u = sm64_u01(seed, ctr)
        ctr += _U1
        r_row = 1.0 if u < 0.5 * (1.0 + a) else -1.0
        if two_samples:
            u = sm64_u01(seed, ctr)
            ctr += _U1
            r_col = 1.0 if u < 0.5 * (1.0 + a) else -1.0
        else:
            r_col = r_row

        ok1 = _update(row_kind, i_t, 1.0 - r_row, row_L, row_cnt, row_rs, x)
        ok2 = _update(col_kind, j_t, 1.0 + r_col, col_L, col_cnt, col_rs, y)
        if not (ok1 and ok2):
            err_round = t
            break

        if at_ck:
            bi = 0
            for i in range(1, m):
                if row_counts[i] > row_counts[bi]:
                    bi = i
            bj = 0
            for j in range(1, n):
                if col_counts[j] > col_counts[bj]:
                    bj = j
            ck_i[ptr] = bi
            ck_j[ptr] = bj
            ptr += 1

    return (row_profile, col_profile, value_sum, row_counts, col_counts,
            sum_x, sum_y, ck_x, ck_y, ck_i, ck_j, err_round,
            row_L, col_L, row_cnt, col_cnt, row_rs, col_rs)
