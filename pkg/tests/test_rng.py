import numpy as np
import pytest

from banditgame import _kernels
from banditgame.rng import RngStream, child_seed, splitmix64


def test_same_seed_same_sequence():
    s0 = RngStream(123)
    a = [s0.next_u64() for _ in range(5)]
    s1 = RngStream(123)
    s2 = RngStream(123)
    assert [s1.next_u64() for _ in range(5)] == [s2.next_u64() for _ in range(5)]
    assert a == [splitmix64(123, k) for k in range(5)]


def test_counter_based_random_access():
    s = RngStream(99)
    seq = [s.next_u64() for _ in range(10)]
    assert splitmix64(99, 7) == seq[7]


def test_python_matches_kernel():
    rng = np.random.default_rng(0)
    for _ in range(200):
        seed = int(rng.integers(0, 2**64, dtype=np.uint64))
        ctr = int(rng.integers(0, 2**32))
        py = (splitmix64(seed, ctr) >> 11) * 2.0**-53
        nb = _kernels.sm64_u01(np.uint64(seed), np.uint64(ctr))
        assert py == nb
    for seed in (0, 1, 2**64 - 1):
        assert (splitmix64(seed, 0) >> 11) * 2.0**-53 == \
            _kernels.sm64_u01(np.uint64(seed), np.uint64(0))


def test_uniform_range_and_mean():
    s = RngStream(2024)
    us = [s.uniform() for _ in range(20000)]
    assert all(0.0 <= u < 1.0 for u in us)
    assert abs(np.mean(us) - 0.5) < 0.01


def test_child_streams_are_distinct():
    seeds = {child_seed(42, k) for k in range(1000)}
    assert len(seeds) == 1000
    # child derivation is what spawn() uses
    assert RngStream(42).spawn(3).seed == child_seed(42, 3)


def test_child_index_validation():
    from banditgame.errors import ValidationError
    with pytest.raises(ValidationError):
        child_seed(1, -1)
