import math

import numpy as np
import pytest

from banditgame import (RngStream, ValidationError, load_matrix_text,
                        sample_action, sample_outcome, validate_matrix,
                        validate_strategy)
from banditgame.game import _sample_cdf, save_matrix_text

TEST_SEED = 1234567


class TestValidateMatrix:
    def test_zero_matrix_accepted(self):
        A = validate_matrix([[0.0, 0.0], [0.0, 0.0]])
        assert A.shape == (2, 2)

    def test_out_of_range_entry_names_index(self):
        with pytest.raises(ValidationError, match=r"\(0, 1\)"):
            validate_matrix([[0.0, 1.5], [0.0, 0.0]])

    def test_example_game_accepted(self):
        A = validate_matrix([[0.0, 0.3], [0.9, 0.2]])
        assert A[1, 0] == 0.9

    def test_ragged_rejected(self):
        with pytest.raises(ValidationError):
            validate_matrix([[0.0, 0.1], [0.2]])

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            validate_matrix(np.zeros((0, 3)))

    def test_nan_rejected(self):
        with pytest.raises(ValidationError):
            validate_matrix([[0.0, float("nan")]])


class TestValidateStrategy:
    def test_renormalizes_within_tolerance(self):
        p = validate_strategy([0.5, 0.5 + 5e-10])
        assert p.sum() == pytest.approx(1.0, abs=1e-15)

    def test_rejects_outside_tolerance(self):
        with pytest.raises(ValidationError):
            validate_strategy([0.5, 0.6])

    def test_rejects_negative(self):
        with pytest.raises(ValidationError):
            validate_strategy([-0.1, 1.1])


class TestSampleAction:
    def test_point_mass_first(self):
        rng = RngStream(TEST_SEED)
        assert all(sample_action([1.0, 0.0, 0.0], rng) == 0 for _ in range(50))

    def test_point_mass_last(self):
        rng = RngStream(TEST_SEED)
        assert all(sample_action([0.0, 1.0], rng) == 1 for _ in range(50))

    def test_fair_coin_frequency(self):
        rng = RngStream(TEST_SEED)
        n = 10**5
        probs = np.array([0.5, 0.5])
        hits = sum(1 for _ in range(n) if _sample_cdf(probs, rng.uniform()) == 0)
        assert abs(hits / n - 0.5) < 0.01

    def test_empirical_distribution_linfty_bound(self):
        # Hoeffding-scale bound at the pinned seed
        rng = RngStream(TEST_SEED)
        probs = np.array([0.1, 0.2, 0.3, 0.25, 0.15])
        n = 10**5
        counts = np.zeros(5)
        for _ in range(n):
            counts[_sample_cdf(probs, rng.uniform())] += 1
        bound = 3.0 * math.sqrt(math.log(2 * 5) / n)
        assert np.max(np.abs(counts / n - probs)) < bound

    def test_index_in_range(self, nprng):
        rng = RngStream(TEST_SEED)
        for _ in range(100):
            m = int(nprng.integers(1, 8))
            p = nprng.dirichlet(np.ones(m))
            assert 0 <= sample_action(p, rng) < m


class TestSampleOutcome:
    def test_degenerate_plus(self):
        rng = RngStream(TEST_SEED)
        assert all(sample_outcome(1.0, rng) == 1.0 for _ in range(100))

    def test_degenerate_minus(self):
        rng = RngStream(TEST_SEED)
        assert all(sample_outcome(-1.0, rng) == -1.0 for _ in range(100))

    def test_zero_mean(self):
        rng = RngStream(TEST_SEED)
        n = 10**5
        mean = sum(sample_outcome(0.0, rng) for _ in range(n)) / n
        assert abs(mean) < 0.02

    def test_mean_tracks_parameter(self):
        rng = RngStream(TEST_SEED)
        n = 10**5
        for a in (-0.7, 0.3, 0.85):
            mean = sum(sample_outcome(a, rng) for _ in range(n)) / n
            assert abs(mean - a) < 3.0 / math.sqrt(n)

    def test_out_of_range_rejected(self):
        with pytest.raises(ValidationError):
            sample_outcome(1.5, RngStream(0))


class TestMatrixFile:
    def test_round_trip(self, tmp_path):
        A = validate_matrix([[0.0, 0.3], [0.9, 0.2]])
        path = tmp_path / "game.txt"
        save_matrix_text(A, path)
        B = load_matrix_text(path)
        assert np.array_equal(A, B)

    def test_bad_row_count(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("2 2\n0 0\n")
        with pytest.raises(ValidationError, match="expected 2 data rows"):
            load_matrix_text(path)

    def test_bad_entry_names_line(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("2 2\n0 0\n0 oops\n")
        with pytest.raises(ValidationError, match="line 3"):
            load_matrix_text(path)
