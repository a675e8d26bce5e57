"""Core game data: payoff matrix validation, strategy checks, sampling.

A game is an m x n real matrix with entries in [-1, 1]: the entry A[i, j]
is the expected reward of the row player (and expected loss of the column
player) when actions (i, j) are played.  Realized outcomes are +/-1
Bernoulli with the matching mean.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError
from .rng import RngStream

SIMPLEX_TOL = 1e-9


def validate_matrix(entries) -> np.ndarray:
    """Validate and return a payoff matrix as a float array.

    Rejects ragged input, empty matrices, non-finite values, and any entry
    outside [-1, 1] (naming the offending index).
    """
    arr = np.asarray(entries, dtype=object)
    if arr.dtype == object or arr.ndim != 2:
        try:
            arr = np.asarray(entries, dtype=float)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"matrix entries must be a rectangular numeric array: {exc}")
    else:
        arr = arr.astype(float)
    if arr.ndim != 2:
        raise ValidationError(f"matrix must be 2-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ValidationError("matrix must be nonempty")
    if not np.all(np.isfinite(arr)):
        i, j = np.argwhere(~np.isfinite(arr))[0]
        raise ValidationError(f"non-finite entry at ({i}, {j})")
    bad = np.argwhere(np.abs(arr) > 1.0)
    if bad.size:
        i, j = bad[0]
        raise ValidationError(f"entry {arr[i, j]} at ({i}, {j}) outside [-1, 1]")
    return arr


def validate_strategy(probs, tol: float = SIMPLEX_TOL) -> np.ndarray:
    """Validate a mixed strategy; renormalize when the sum is within tol of 1."""
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValidationError(f"strategy must be a nonempty vector, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValidationError("strategy has non-finite coordinates")
    if np.any(p < 0):
        i = int(np.argwhere(p < 0)[0, 0])
        raise ValidationError(f"negative probability {p[i]} at index {i}")
    s = p.sum()
    if abs(s - 1.0) > tol:
        raise ValidationError(f"strategy sums to {s}, outside 1 +/- {tol}")
    return p / s


def sample_action(strategy, rng: RngStream) -> int:
    """Draw an action index from a mixed strategy, by CDF inversion."""
    p = validate_strategy(strategy)
    return _sample_cdf(p, rng.uniform())


def _sample_cdf(probs: np.ndarray, u: float) -> int:
    # must match _kernels.sample_cdf exactly
    c = 0.0
    last = len(probs) - 1
    for i in range(last):
        c += probs[i]
        if u < c:
            return i
    return last


def sample_outcome(a: float, rng: RngStream) -> float:
    """+/-1 Bernoulli outcome with mean ``a``: +1 w.p. (1+a)/2, -1 otherwise."""
    if not np.isfinite(a) or abs(a) > 1.0:
        raise ValidationError(f"outcome mean {a} outside [-1, 1]")
    return 1.0 if rng.uniform() < 0.5 * (1.0 + a) else -1.0


def load_matrix_text(path) -> np.ndarray:
    """Load a matrix from plain text: first line "m n", then m rows of n decimals."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ValidationError(f"{path}: empty matrix file")
    head = lines[0].split()
    if len(head) != 2:
        raise ValidationError(f"{path}: line 1 must be 'm n', got {lines[0]!r}")
    try:
        m, n = int(head[0]), int(head[1])
    except ValueError:
        raise ValidationError(f"{path}: line 1 must hold two integers, got {lines[0]!r}")
    if m < 1 or n < 1 or len(lines) - 1 != m:
        raise ValidationError(f"{path}: expected {m} data rows, found {len(lines) - 1}")
    rows = []
    for k, ln in enumerate(lines[1:], start=2):
        parts = ln.split()
        if len(parts) != n:
            raise ValidationError(f"{path}: line {k} has {len(parts)} entries, expected {n}")
        try:
            rows.append([float(v) for v in parts])
        except ValueError as exc:
            raise ValidationError(f"{path}: line {k}: {exc}")
    return validate_matrix(rows)


def save_matrix_text(A, path) -> None:
    """Inverse of load_matrix_text."""
    A = np.asarray(A, dtype=float)
    with open(path, "w") as fh:
        fh.write(f"{A.shape[0]} {A.shape[1]}\n")
        for row in A:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")
