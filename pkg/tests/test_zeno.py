"""Tests for the repeated-measurement freezing experiment."""

import math

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from qhandshake.core import Amplitude, RandomSource, derive_seed, norm_sq
from qhandshake.zeno import (
    EXCITED,
    GROUND,
    MeasureOutcome,
    TwoLevelState,
    evolve,
    expected_survival,
    measure,
    zeno_run,
    zeno_trial,
)

small_angles = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)


class TestTwoLevelState:
    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError):
            TwoLevelState(Amplitude(1.0), Amplitude(1.0))

    def test_basis_states(self):
        assert norm_sq(GROUND.a) == 1.0
        assert norm_sq(EXCITED.b) == 1.0


class TestEvolve:
    def test_zero_angle_is_identity(self):
        s = evolve(GROUND, 0.7)
        assert evolve(s, 0.0) == s

    def test_quarter_turn_maps_ground_to_excited(self):
        s = evolve(GROUND, math.pi / 2.0)
        assert norm_sq(s.b) == pytest.approx(1.0, abs=1e-12)
        assert norm_sq(s.a) == pytest.approx(0.0, abs=1e-12)

    @given(small_angles, small_angles)
    def test_rotations_compose(self, theta, start):
        s = evolve(GROUND, start)
        once = evolve(s, theta)
        twice = evolve(evolve(s, theta / 2.0), theta / 2.0)
        assert twice.a.re == pytest.approx(once.a.re, abs=1e-12)
        assert twice.a.im == pytest.approx(once.a.im, abs=1e-12)
        assert twice.b.re == pytest.approx(once.b.re, abs=1e-12)
        assert twice.b.im == pytest.approx(once.b.im, abs=1e-12)

    @given(small_angles)
    def test_norm_preserved(self, theta):
        s = evolve(GROUND, theta)
        assert norm_sq(s.a) + norm_sq(s.b) == pytest.approx(1.0, abs=1e-12)


class TestMeasure:
    def test_ground_always_zero(self):
        rng = RandomSource(1)
        for _ in range(50):
            outcome, collapsed = measure(GROUND, rng)
            assert outcome is MeasureOutcome.ZERO
            assert collapsed == GROUND

    def test_excited_always_one(self):
        rng = RandomSource(2)
        for _ in range(50):
            outcome, collapsed = measure(EXCITED, rng)
            assert outcome is MeasureOutcome.ONE
            assert collapsed == EXCITED

    def test_equal_superposition_is_fair(self):
        s = evolve(GROUND, math.pi / 4.0)
        trials = 100_000
        rng = RandomSource(314159)
        zeros = sum(measure(s, rng)[0] is MeasureOutcome.ZERO for _ in range(trials))
        sigma = math.sqrt(0.25 / trials)
        assert abs(zeros / trials - 0.5) <= 3.0 * sigma

    def test_collapse_is_exact(self):
        s = evolve(GROUND, 0.3)
        rng = RandomSource(3)
        for _ in range(20):
            _, collapsed = measure(s, rng)
            assert collapsed in (GROUND, EXCITED)


class TestZenoRun:
    def test_single_measurement_at_quarter_turn_never_survives(self):
        emp = zeno_run(math.pi / 2.0, 1, 50_000, RandomSource(10))
        assert emp == 0.0

    def test_three_measurements_match_closed_form(self):
        # (cos^2(pi/6))^3 = (3/4)^3 = 27/64
        trials = 100_000
        emp = zeno_run(math.pi / 2.0, 3, trials, RandomSource(11))
        p = 27.0 / 64.0
        sigma = math.sqrt(p * (1.0 - p) / trials)
        assert abs(emp - p) <= 3.0 * sigma

    def test_sixty_four_measurements_match_closed_form(self):
        trials = 100_000
        emp = zeno_run(math.pi / 2.0, 64, trials, RandomSource(12))
        p = math.cos(math.pi / 128.0) ** 128
        sigma = math.sqrt(p * (1.0 - p) / trials)
        assert abs(emp - p) <= 3.0 * sigma

    def test_survival_climbs_with_n(self):
        trials = 10_000
        theta = math.pi / 2.0
        ns = [1, 2, 4, 8, 16, 32, 64]
        emps, sigmas = [], []
        for idx, n in enumerate(ns):
            emp = zeno_run(theta, n, trials, RandomSource(derive_seed(13, idx)))
            p = expected_survival(theta, n)
            emps.append(emp)
            sigmas.append(math.sqrt(max(p * (1.0 - p), 1e-12) / trials))
        for k in range(len(ns) - 1):
            assert emps[k + 1] >= emps[k] - 3.0 * (sigmas[k] + sigmas[k + 1])

    def test_matches_literal_trial_loop(self):
        theta, n, trials = math.pi / 2.0, 4, 20_000
        vectorized = zeno_run(theta, n, trials, RandomSource(14))
        scalar_rng = RandomSource(15)
        scalar = sum(zeno_trial(theta, n, scalar_rng) for _ in range(trials)) / trials
        p = expected_survival(theta, n)
        sigma = math.sqrt(p * (1.0 - p) / trials)
        assert abs(vectorized - p) <= 3.0 * sigma
        assert abs(scalar - p) <= 3.0 * sigma

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            zeno_run(1.0, 0, 100, RandomSource(1))
        with pytest.raises(ValueError):
            zeno_run(1.0, 1, 0, RandomSource(1))
        with pytest.raises(ValueError):
            zeno_trial(1.0, 0, RandomSource(1))


class TestExpectedSurvival:
    def test_closed_form_values(self):
        assert expected_survival(math.pi / 2.0, 1) == pytest.approx(0.0, abs=1e-30)
        assert expected_survival(math.pi / 2.0, 3) == pytest.approx(27.0 / 64.0, rel=1e-12)

    def test_strictly_increasing_in_n(self):
        for theta in (0.3, 1.0, math.pi / 2.0):
            values = [expected_survival(theta, n) for n in (1, 2, 4, 8, 16, 64, 256, 1024)]
            assert all(b > a for a, b in zip(values, values[1:]))

    def test_limit_approaches_one(self):
        assert expected_survival(math.pi / 2.0, 1024) >= 0.997
