"""Learning rules, the asynchronous step law, sampling, and exact paths."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from hdgames import (
    ActionProfile,
    BestResponseRule,
    FunctionalStaticGame,
    History,
    InertialRule,
    InitialDistribution,
    LiftedStaticGame,
    LogLinearRule,
    NumericError,
    TabularStaticGame,
    enumerate_path_measure,
    path_probability,
    random_game_ensemble,
    sample_step,
    simulate_path,
    step_distribution,
    verify_rule_properties,
)


def p(text):
    return ActionProfile.from_string(text)


def pair_game(u0: float, u1: float) -> TabularStaticGame:
    """Single agent with payoff u0 for action 0 and u1 for action 1."""
    return TabularStaticGame(1, [[u0, u1]])


class TestIndividualStep:
    def test_indifferent_is_even(self):
        rule = LogLinearRule(0.7)
        game = pair_game(1.3, 1.3)
        assert rule.action_probabilities(0, p("0"), game.utility) == (0.5, 0.5)

    def test_unit_gap_at_unit_temperature(self):
        rule = LogLinearRule(1.0)
        game = pair_game(0.0, 1.0)
        p0, p1 = rule.action_probabilities(0, p("1"), game.utility)
        assert p1 == pytest.approx(math.e / (1.0 + math.e), abs=1e-12)
        assert p1 == pytest.approx(0.731059, abs=1e-6)

    def test_best_response_strict(self):
        rule = BestResponseRule()
        game = pair_game(1.0, 2.0)
        assert rule.action_probabilities(0, p("0"), game.utility) == (0.0, 1.0)

    def test_best_response_tie(self):
        rule = BestResponseRule()
        game = pair_game(2.0, 2.0)
        assert rule.action_probabilities(0, p("0"), game.utility) == (0.5, 0.5)

    def test_nonfinite_payoffs_rejected(self):
        rule = LogLinearRule(1.0)
        game = pair_game(float("nan"), 1.0)
        with pytest.raises(NumericError):
            rule.action_probabilities(0, p("0"), game.utility)

    def test_temperature_guard(self):
        with pytest.raises(ValueError):
            LogLinearRule(0.0)

    def test_overflow_safe(self):
        rule = LogLinearRule(1e-3)
        game = pair_game(0.0, 5000.0)
        p0, p1 = rule.action_probabilities(0, p("0"), game.utility)
        assert p1 == 1.0 and p0 == 0.0

    def test_low_temperature_concentrates(self):
        # A payoff gap of 0.1 at temperature 1e-3 leaves the better action
        # short of certainty by well under 1e-6.
        rule = LogLinearRule(1e-3)
        game = pair_game(0.0, 0.1)
        _, p1 = rule.action_probabilities(0, p("0"), game.utility)
        assert p1 >= 1.0 - 1e-6

    @given(st.floats(-50, 50), st.floats(-50, 50), st.floats(-100, 100))
    def test_shift_invariance(self, u0, u1, shift):
        rule = LogLinearRule(0.5)
        base = rule.action_probabilities(0, p("0"), pair_game(u0, u1).utility)
        shifted = rule.action_probabilities(
            0, p("0"), pair_game(u0 + shift, u1 + shift).utility
        )
        assert base[0] == pytest.approx(shifted[0], abs=1e-12)
        assert base[1] == pytest.approx(shifted[1], abs=1e-12)


class TestStepDistribution:
    def test_two_indifferent_agents(self):
        game = TabularStaticGame(2, np.zeros((2, 4)))
        dist = step_distribution(LogLinearRule(1.0), p("00"), game.utility)
        assert dist.prob(p("00")) == pytest.approx(0.5)
        assert dist.prob(p("10")) == pytest.approx(0.25)
        assert dist.prob(p("01")) == pytest.approx(0.25)

    def test_single_agent_matches_individual(self):
        rule = LogLinearRule(0.5)
        game = pair_game(0.0, 1.0)
        dist = step_distribution(rule, p("0"), game.utility)
        p0, p1 = rule.action_probabilities(0, p("0"), game.utility)
        assert dist.prob(p("0")) == pytest.approx(p0)
        assert dist.prob(p("1")) == pytest.approx(p1)

    def test_best_response_absorbs_strict_equilibrium(self):
        # Mutual coordination on 1 is strictly best for both agents.
        table = np.array([[0.0, 0.0, 0.0, 1.0], [0.0, 0.0, 0.0, 1.0]])
        game = TabularStaticGame(2, table)
        dist = step_distribution(BestResponseRule(), p("11"), game.utility)
        assert dist.prob(p("11")) == 1.0

    @given(st.integers(0, 10_000))
    @settings(max_examples=40, deadline=None)
    def test_distribution_invariants_on_random_games(self, seed):
        game = random_game_ensemble(1, seed=seed)[0]
        rule = LogLinearRule(0.3)
        for mask in range(1 << game.n):
            origin = ActionProfile(game.n, mask)
            dist = step_distribution(rule, origin, game.utility)
            total = sum(dist.entries.values())
            assert abs(total - 1.0) <= 1e-12
            for target, prob in dist.entries.items():
                assert prob >= 0.0
                assert (target.mask ^ origin.mask).bit_count() <= 1


class TestSampling:
    def test_reproducible_under_seed(self):
        game = random_game_ensemble(1, seed=5)[0]
        rule = BestResponseRule()
        runs = []
        for _ in range(2):
            rng = np.random.default_rng(123)
            path = simulate_path(game, rule, InitialDistribution.uniform(game.n), 20, rng)
            runs.append([q.mask for q in path])
        assert runs[0] == runs[1]

    def test_absorbing_state_stays_put(self):
        table = np.array([[0.0, 0.0, 0.0, 1.0], [0.0, 0.0, 0.0, 1.0]])
        game = TabularStaticGame(2, table)
        rng = np.random.default_rng(0)
        top = p("11")
        for _ in range(50):
            assert sample_step(BestResponseRule(), top, game.utility, rng) == top

    def test_empirical_frequencies_match_exact_law(self):
        # Two indifferent agents: (stay, flip-1, flip-2) = (0.5, 0.25, 0.25);
        # one million draws stay within 3 binomial sigma per outcome, and a
        # chi-square test at alpha=0.001 does not reject.
        game = TabularStaticGame(2, np.zeros((2, 4)))
        rule = LogLinearRule(1.0)
        origin = p("00")
        rng = np.random.default_rng(7)
        draws = 1_000_000
        counts = {}
        for _ in range(draws):
            out = sample_step(rule, origin, game.utility, rng)
            counts[out] = counts.get(out, 0) + 1
        exact = step_distribution(rule, origin, game.utility)
        observed, expected = [], []
        for target, prob in exact.items_canonical():
            if prob == 0.0:
                continue
            observed.append(counts.get(target, 0))
            expected.append(prob * draws)
            sigma = math.sqrt(draws * prob * (1 - prob))
            assert abs(counts.get(target, 0) - prob * draws) <= 3 * sigma
        _, p_value = stats.chisquare(observed, expected)
        assert p_value > 0.001


class TestSimulatePath:
    def test_length_one_draws_from_initial(self):
        game = random_game_ensemble(1, seed=9)[0]
        start = ActionProfile.zeros(game.n)
        rng = np.random.default_rng(1)
        path = simulate_path(
            game, LogLinearRule(1.0), InitialDistribution.point(start), 1, rng
        )
        assert path.length == 1 and path[0] == start

    def test_degenerate_history_dependence_matches_static(self):
        game = random_game_ensemble(1, seed=31)[0]
        rule = LogLinearRule(0.4)
        initial = InitialDistribution.uniform(game.n)
        static_path = simulate_path(game, rule, initial, 30, np.random.default_rng(77))
        lifted_path = simulate_path(
            LiftedStaticGame(game), rule, initial, 30, np.random.default_rng(77)
        )
        assert static_path == lifted_path


class TestPathProbability:
    def test_multi_flip_jump_is_impossible(self):
        game = TabularStaticGame(2, np.zeros((2, 4)))
        jump = History((p("00"), p("11")))
        assert path_probability(
            game, LogLinearRule(1.0), InitialDistribution.uniform(2), jump
        ) == 0.0

    def test_length_one_is_initial_mass(self):
        game = TabularStaticGame(2, np.zeros((2, 4)))
        one = History((p("10"),))
        assert path_probability(
            game, LogLinearRule(1.0), InitialDistribution.uniform(2), one
        ) == pytest.approx(0.25)

    @pytest.mark.parametrize("n,length", [(2, 3), (3, 4), (3, 6)])
    def test_path_measure_normalizes(self, n, length):
        rng = np.random.default_rng(n * 100 + length)
        game = TabularStaticGame(n, rng.uniform(-2, 2, (n, 1 << n)))
        rule = LogLinearRule(0.6)
        initial = InitialDistribution.uniform(n)
        total = sum(
            prob for _, prob in enumerate_path_measure(game, rule, initial, length)
        )
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_enumeration_agrees_with_direct_product(self):
        game = random_game_ensemble(1, seed=2)[0]
        rule = LogLinearRule(0.5)
        initial = InitialDistribution.uniform(game.n)
        for path, prob in enumerate_path_measure(game, rule, initial, 3):
            assert path_probability(game, rule, initial, path) == pytest.approx(
                prob, rel=1e-12
            )


class TestRuleProperties:
    def test_log_linear_passes(self):
        games = random_game_ensemble(50, seed=6)
        assert verify_rule_properties(LogLinearRule(0.8), games).passed

    def test_best_response_passes(self):
        games = random_game_ensemble(50, seed=6)
        assert verify_rule_properties(BestResponseRule(), games).passed

    def test_inertial_rule_fails_locality_only(self):
        games = random_game_ensemble(20, seed=6)
        report = verify_rule_properties(InertialRule(0.9), games)
        assert not report.passed
        assert report.individual_ok
        assert not report.local_ok
        assert report.monotone_ok
        assert report.first_failure["check"] == "local"


def test_initial_distribution_validation():
    with pytest.raises(ValueError):
        InitialDistribution(2, {ActionProfile.zeros(2): 0.5})
    half = {ActionProfile.zeros(2): 0.5, ActionProfile.ones(2): 0.5}
    dist = InitialDistribution(2, half)
    assert dist.prob(ActionProfile.zeros(2)) == 0.5
    assert dist.prob(ActionProfile.from_string("10")) == 0.0
