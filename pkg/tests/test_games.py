"""Alignment checking between a history-dependent game and its reference."""

import pytest

from hdgames import (
    AlignedPair,
    BudgetError,
    CtiConfig,
    FunctionalStaticGame,
    Graph,
    LiftedStaticGame,
    TabularStaticGame,
    ValueSpec,
    check_alignment,
    cti_game,
    cti_pair,
    cti_reference,
)
from hdgames.games import HistoryGame


def small_cti(n=3, v_kind="bounded-uniform"):
    value = (
        ValueSpec(kind="constant", v=0.45)
        if v_kind == "constant"
        else ValueSpec(kind="bounded-uniform", base=0.4, width=0.1, epsilon=0.001)
    )
    return CtiConfig(graph=Graph.ring(n), costs=(0.4,) * n, value=value)


def test_identical_games_align_when_payoffs_are_opponent_monotone():
    # The alignment conditions compare against every dominated opponent
    # profile, so a game equals-its-own-reference passes exactly when its
    # 1-payoffs never fall and its 0-payoffs never rise in opponents' play.
    static = cti_reference(small_cti(n=2, v_kind="constant"))
    pair = AlignedPair(LiftedStaticGame(static), static)
    report = check_alignment(pair, max_len=2)
    assert report.passed
    assert report.method == "exhaustive"


def test_identical_games_can_still_fail_alignment():
    # A 0-action payoff that grows with opponents' 1-play breaks the second
    # condition even though dynamic and reference coincide.
    static = FunctionalStaticGame(2, lambda a, i: float(a.count_ones()))
    pair = AlignedPair(LiftedStaticGame(static), static)
    report = check_alignment(pair, max_len=2)
    assert not report.passed
    assert report.counterexample.condition == 2


def test_cti_pair_aligns():
    report = check_alignment(cti_pair(small_cti(), seed=11), max_len=3)
    assert report.passed
    assert report.histories_checked == 8 + 64 + 512


def test_shifted_down_game_reports_counterexample():
    cfg = small_cti(n=2, v_kind="constant")
    reference = cti_reference(cfg)

    class ShiftedDown(HistoryGame):
        n = 2

        def utility(self, history, profile, agent):
            u = reference.utility(profile, agent)
            return u - 1.0 if profile.action(agent) == 1 else u

    report = check_alignment(AlignedPair(ShiftedDown(), reference), max_len=2)
    assert not report.passed
    ce = report.counterexample
    assert ce.condition == 1
    assert ce.history.length == 1  # violated already on the shortest histories


def test_budget_guard():
    pair = cti_pair(small_cti(n=3), seed=0)
    with pytest.raises(BudgetError):
        check_alignment(pair, max_len=20)


def test_sampled_mode_is_labeled():
    pair = cti_pair(small_cti(n=3), seed=1)
    report = check_alignment(pair, max_len=20, samples=50, seed=4)
    assert report.passed
    assert report.method == "sampled"


def test_tabular_game_shape_guard():
    with pytest.raises(ValueError):
        TabularStaticGame(2, [[0.0, 1.0]])


def test_cti_game_helper_matches_reference_for_constant_process():
    cfg = small_cti(n=3, v_kind="constant")
    dynamic = cti_game(cfg)
    reference = cti_reference(cfg)
    from hdgames import History, enumerate_profiles

    for start in enumerate_profiles(3):
        history = History((start,))
        for profile in enumerate_profiles(3):
            for agent in range(3):
                assert dynamic.utility(history, profile, agent) == pytest.approx(
                    reference.utility(profile, agent)
                )
