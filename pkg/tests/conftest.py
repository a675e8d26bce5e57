"""Shared independent oracles used to cross-check the fast implementations."""

import itertools

import numpy as np
import pytest


def bisection_ftrl_oracle(cum_loss, eta, iters=200):
    """Independent pure-bisection solve of the FTRL stationarity condition.

    x_i = 1/(eta (L_i + lam))^2 with lam the root of sum(x) = 1 inside the
    bracket [-minL + 1/eta, -minL + sqrt(m)/eta].  Deliberately shares no
    code with the Newton implementation under test.
    """
    L = np.asarray(cum_loss, dtype=float)
    m = L.size
    lo = -L.min() + 1.0 / eta
    hi = -L.min() + np.sqrt(m) / eta
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if np.sum(1.0 / (eta * (L + mid)) ** 2) > 1.0:
            lo = mid
        else:
            hi = mid
    lam = 0.5 * (lo + hi)
    x = 1.0 / (eta * (L + lam)) ** 2
    return x / x.sum()


def support_enumeration_oracle(A, tol=1e-9):
    """Nash equilibrium of a small matrix game by enumerating support pairs.

    For each equal-size support pair, solves the indifference linear systems
    and keeps the first pair satisfying feasibility and the equilibrium
    inequalities.  Adequate for generic (nondegenerate) random games.
    """
    A = np.asarray(A, dtype=float)
    m, n = A.shape
    for k in range(1, min(m, n) + 1):
        for I in itertools.combinations(range(m), k):
            for J in itertools.combinations(range(n), k):
                # x supported on I making J indifferent; y supported on J
                # making I indifferent
                Mx = np.zeros((k + 1, k + 1))
                Mx[:k, :k] = A[np.ix_(I, J)].T
                Mx[:k, k] = -1.0
                Mx[k, :k] = 1.0
                bx = np.zeros(k + 1)
                bx[k] = 1.0
                My = np.zeros((k + 1, k + 1))
                My[:k, :k] = A[np.ix_(I, J)]
                My[:k, k] = -1.0
                My[k, :k] = 1.0
                try:
                    sol_x = np.linalg.solve(Mx, bx)
                    sol_y = np.linalg.solve(My, bx)
                except np.linalg.LinAlgError:
                    continue
                xI, v = sol_x[:k], sol_x[k]
                yJ, w = sol_y[:k], sol_y[k]
                if np.any(xI < -tol) or np.any(yJ < -tol) or abs(v - w) > 1e-7:
                    continue
                x = np.zeros(m)
                x[list(I)] = np.maximum(xI, 0.0)
                y = np.zeros(n)
                y[list(J)] = np.maximum(yJ, 0.0)
                x /= x.sum()
                y /= y.sum()
                if np.max(A @ y) - v > 1e-7 or v - np.min(A.T @ x) > 1e-7:
                    continue
                return x, y, float(x @ A @ y)
    raise AssertionError("support enumeration found no equilibrium")


@pytest.fixture
def nprng():
    return np.random.default_rng(987654321)
