"""Game models: static and history-dependent utility oracles, and the
alignment checker relating a history-dependent game to its static reference.

A static game maps (profile, agent) to a payoff; a history-dependent game
additionally receives the full path of play.  An aligned pair is a
history-dependent game together with a static reference such that, whenever
the path's last profile dominates the static profile on opponents, playing 1
pays at least as much in the dynamic game and playing 0 at most as much.
"""

from __future__ import annotations

import itertools
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import BudgetError
from .profiles import (
    ActionProfile,
    History,
    enumerate_profiles,
)

#: Slack for alignment inequalities, absorbing float summation noise only.
ALIGNMENT_TOL = 1e-12


class StaticGame(ABC):
    """Utility oracle over fixed payoffs."""

    n: int

    @abstractmethod
    def utility(self, profile: ActionProfile, agent: int) -> float:
        """Payoff of ``agent`` (0-based) at ``profile``."""


class HistoryGame(ABC):
    """Utility oracle whose payoffs depend on the path of play."""

    n: int

    @abstractmethod
    def utility(self, history: History, profile: ActionProfile, agent: int) -> float:
        """Payoff of ``agent`` at candidate ``profile`` given ``history``."""


class FunctionalStaticGame(StaticGame):
    def __init__(self, n: int, fn: Callable[[ActionProfile, int], float]):
        self.n = n
        self._fn = fn

    def utility(self, profile: ActionProfile, agent: int) -> float:
        return self._fn(profile, agent)


class TabularStaticGame(StaticGame):
    """Dense payoff table, one row per agent and one column per profile mask."""

    def __init__(self, n: int, table: np.ndarray):
        table = np.asarray(table, dtype=float)
        if table.shape != (n, 1 << n):
            raise ValueError(f"payoff table must be (n, 2^n), got {table.shape}")
        self.n = n
        self.table = table

    def utility(self, profile: ActionProfile, agent: int) -> float:
        return float(self.table[agent, profile.mask])


class LiftedStaticGame(HistoryGame):
    """A static game viewed as a (degenerate) history-dependent one."""

    def __init__(self, static: StaticGame):
        self.n = static.n
        self.static = static

    def utility(self, history: History, profile: ActionProfile, agent: int) -> float:
        return self.static.utility(profile, agent)


def random_game_ensemble(
    count: int, seed: int, n_range: tuple[int, int] = (1, 4), scale: float = 2.0
) -> list[TabularStaticGame]:
    """Seeded ensemble of random payoff tables for rule-property sweeps."""
    rng = np.random.default_rng(seed)
    games = []
    for _ in range(count):
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        games.append(TabularStaticGame(n, rng.uniform(-scale, scale, (n, 1 << n))))
    return games


@dataclass(frozen=True)
class AlignedPair:
    """History-dependent game plus its static reference."""

    dynamic: HistoryGame
    reference: StaticGame

    def __post_init__(self) -> None:
        if self.dynamic.n != self.reference.n:
            raise ValueError("dynamic and reference games must share the agent set")

    @property
    def n(self) -> int:
        return self.reference.n


@dataclass(frozen=True)
class AlignmentCounterexample:
    history: History
    profile: ActionProfile
    agent: int
    condition: int  # 1: dynamic 1-payoff fell below reference; 2: 0-payoff rose above
    dynamic_value: float
    reference_value: float


@dataclass(frozen=True)
class AlignmentReport:
    passed: bool
    method: str  # "exhaustive" or "sampled"
    histories_checked: int
    comparisons: int
    counterexample: Optional[AlignmentCounterexample] = None

    def to_dict(self) -> dict:
        out = {
            "passed": self.passed,
            "method": self.method,
            "histories_checked": self.histories_checked,
            "comparisons": self.comparisons,
        }
        if self.counterexample is not None:
            ce = self.counterexample
            out["counterexample"] = {
                "history": [p.to_string() for p in ce.history],
                "profile": ce.profile.to_string(),
                "agent": ce.agent + 1,
                "condition": ce.condition,
                "dynamic_value": ce.dynamic_value,
                "reference_value": ce.reference_value,
            }
        return out


def _check_one_history(pair: AlignedPair, alpha: History) -> Optional[AlignmentCounterexample]:
    n = pair.n
    last = alpha.last
    for agent in range(n):
        opp_ones = [j for j in range(n) if j != agent and last.action(j) == 1]
        dyn_one = pair.dynamic.utility(alpha, last.with_action(agent, 1), agent)
        dyn_zero = pair.dynamic.utility(alpha, last.with_action(agent, 0), agent)
        # Opponent profiles dominated by the path's last profile: every subset
        # of that profile's 1-playing opponents.
        for k in range(len(opp_ones) + 1):
            for subset in itertools.combinations(opp_ones, k):
                mask = 0
                for j in subset:
                    mask |= 1 << j
                base = ActionProfile(n, mask)
                ref_one = pair.reference.utility(base.with_action(agent, 1), agent)
                ref_zero = pair.reference.utility(base.with_action(agent, 0), agent)
                if dyn_one < ref_one - ALIGNMENT_TOL:
                    return AlignmentCounterexample(
                        alpha, base.with_action(agent, 1), agent, 1, dyn_one, ref_one
                    )
                if dyn_zero > ref_zero + ALIGNMENT_TOL:
                    return AlignmentCounterexample(
                        alpha, base.with_action(agent, 0), agent, 2, dyn_zero, ref_zero
                    )
    return None


def check_alignment(
    pair: AlignedPair,
    max_len: int,
    budget: int = 10**7,
    samples: Optional[int] = None,
    seed: int = 0,
) -> AlignmentReport:
    """Verify the two alignment inequalities over histories up to ``max_len``.

    Exhaustive over all |A|^T histories per length T when |A|^max_len fits the
    budget; otherwise raises unless ``samples`` asks for seeded uniform
    sampling, whose verdict is reported as "sampled", never as a proof.
    """
    n = pair.n
    state_count = 1 << n
    exhaustive_size = state_count**max_len
    comparisons = 0
    if samples is None:
        if exhaustive_size > budget:
            raise BudgetError(
                f"|A|^T = {exhaustive_size} exceeds budget {budget}; "
                "pass samples= to check a random subset"
            )
        checked = 0
        states = enumerate_profiles(n)
        for length in range(1, max_len + 1):
            for combo in itertools.product(states, repeat=length):
                alpha = History(combo)
                checked += 1
                comparisons += n
                ce = _check_one_history(pair, alpha)
                if ce is not None:
                    return AlignmentReport(False, "exhaustive", checked, comparisons, ce)
        return AlignmentReport(True, "exhaustive", checked, comparisons)

    rng = np.random.default_rng(seed)
    for k in range(samples):
        length = int(rng.integers(1, max_len + 1))
        masks = rng.integers(0, state_count, size=length)
        alpha = History(tuple(ActionProfile(n, int(m)) for m in masks))
        comparisons += n
        ce = _check_one_history(pair, alpha)
        if ce is not None:
            return AlignmentReport(False, "sampled", k + 1, comparisons, ce)
    return AlignmentReport(True, "sampled", samples, comparisons)
