"""Exception hierarchy for banditgame."""


class BanditGameError(Exception):
    """Base class for all banditgame errors."""


class ValidationError(BanditGameError, ValueError):
    """Invalid input: out-of-range entries, bad shapes, bad parameters."""


class SolverError(BanditGameError, RuntimeError):
    """A numerical solver failed to converge or detected corrupted state."""
