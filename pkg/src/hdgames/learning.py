"""Learning rules and the asynchronous update process they induce.

A rule gives, for one agent handed the revision opportunity, a distribution
over that agent's two actions as a function of its payoff environment.  The
asynchronous process picks a uniformly random agent each step and lets the
rule move only that agent's bit.  The module provides the induced one-step
transition law, stochastic simulation, exact path probabilities, and a
verifier for the three structural rule properties (valid individual
distribution, locality in the agent's own payoff pair, and monotonicity
under uniform payoff boosts).
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Sequence, Union

import numpy as np

from .errors import NumericError
from .games import HistoryGame, StaticGame, TabularStaticGame
from .profiles import ActionProfile, History, sort_key

UtilityFn = Callable[[ActionProfile, int], float]

PROB_TOL = 1e-12


class LearningRule(ABC):
    """Distribution over one agent's next action, given the revision turn."""

    @abstractmethod
    def action_probabilities(
        self, agent: int, profile: ActionProfile, utility: UtilityFn
    ) -> tuple[float, float]:
        """Return (p(action 0), p(action 1)) for ``agent`` at ``profile``."""


class LogLinearRule(LearningRule):
    """Softmax over the agent's own payoff pair at temperature ``tau``.

    Computed with a max shift before exponentiation so large payoff gaps
    cannot overflow.
    """

    def __init__(self, tau: float):
        if not tau > 0:
            raise ValueError(f"temperature must be positive, got {tau}")
        self.tau = tau

    def action_probabilities(self, agent, profile, utility):
        u0 = utility(profile.with_action(agent, 0), agent)
        u1 = utility(profile.with_action(agent, 1), agent)
        if not (math.isfinite(u0) and math.isfinite(u1)):
            raise NumericError(f"non-finite payoffs ({u0}, {u1}) for agent {agent}")
        m = max(u0, u1)
        e0 = math.exp((u0 - m) / self.tau)
        e1 = math.exp((u1 - m) / self.tau)
        z = e0 + e1
        return e0 / z, e1 / z


class BestResponseRule(LearningRule):
    """Uniform choice over the agent's payoff maximizers.

    Payoffs closer than ``tie_tol`` count as tied and are mixed evenly.
    """

    def __init__(self, tie_tol: float = 1e-9):
        self.tie_tol = tie_tol

    def action_probabilities(self, agent, profile, utility):
        u0 = utility(profile.with_action(agent, 0), agent)
        u1 = utility(profile.with_action(agent, 1), agent)
        if not (math.isfinite(u0) and math.isfinite(u1)):
            raise NumericError(f"non-finite payoffs ({u0}, {u1}) for agent {agent}")
        if abs(u0 - u1) <= self.tie_tol:
            return 0.5, 0.5
        return (1.0, 0.0) if u0 > u1 else (0.0, 1.0)


class InertialRule(LearningRule):
    """Deliberately non-local counterexample: keeps the current action with
    fixed probability regardless of payoffs."""

    def __init__(self, keep_prob: float = 0.9):
        if not 0 <= keep_prob <= 1:
            raise ValueError("keep_prob must lie in [0, 1]")
        self.keep_prob = keep_prob

    def action_probabilities(self, agent, profile, utility):
        if profile.action(agent) == 0:
            return self.keep_prob, 1.0 - self.keep_prob
        return 1.0 - self.keep_prob, self.keep_prob


@dataclass(frozen=True)
class TransitionDistribution:
    """One-step law of the asynchronous process from ``origin``.

    Supported on the origin and its one-flip neighbors; validated to be a
    probability vector on construction.
    """

    origin: ActionProfile
    entries: dict[ActionProfile, float]

    def __post_init__(self) -> None:
        total = 0.0
        for target, p in self.entries.items():
            if p < -PROB_TOL:
                raise NumericError(
                    f"negative transition probability {p} to {target.to_string()}"
                )
            if target != self.origin and (target.mask ^ self.origin.mask).bit_count() > 1:
                raise NumericError(
                    f"support leaks outside unilateral moves: {target.to_string()}"
                )
            total += p
        if abs(total - 1.0) > 1e-12:
            raise NumericError(f"transition mass {total} != 1")

    def prob(self, target: ActionProfile) -> float:
        return self.entries.get(target, 0.0)

    def items_canonical(self):
        return sorted(self.entries.items(), key=lambda kv: sort_key(kv[0]))


def action_distribution(
    rule: LearningRule, agent: int, profile: ActionProfile, utility: UtilityFn
) -> tuple[float, float]:
    """One agent's revision distribution; thin named wrapper over the rule."""
    return rule.action_probabilities(agent, profile, utility)


def step_distribution(
    rule: LearningRule, profile: ActionProfile, utility: UtilityFn
) -> TransitionDistribution:
    """Full asynchronous one-step law: uniform agent draw composed with the
    drawn agent's rule; staying mass aggregates agents re-picking their bit."""
    n = profile.n
    inv = 1.0 / n
    entries: dict[ActionProfile, float] = {}
    stay = 0.0
    for agent in range(n):
        p0, p1 = rule.action_probabilities(agent, profile, utility)
        keep, move = (p0, p1) if profile.action(agent) == 0 else (p1, p0)
        stay += inv * keep
        entries[profile.flip(agent)] = inv * move
    entries[profile] = stay
    return TransitionDistribution(profile, entries)


def step_probability(
    rule: LearningRule,
    profile: ActionProfile,
    utility: UtilityFn,
    target: ActionProfile,
) -> float:
    """Probability of one asynchronous step landing on ``target``."""
    diff = (profile.mask ^ target.mask).bit_count()
    if diff > 1:
        return 0.0
    n = profile.n
    if diff == 1:
        agent = (profile.mask ^ target.mask).bit_length() - 1
        pair = rule.action_probabilities(agent, profile, utility)
        return pair[target.action(agent)] / n
    stay = 0.0
    for agent in range(n):
        pair = rule.action_probabilities(agent, profile, utility)
        stay += pair[profile.action(agent)]
    return stay / n


@dataclass(frozen=True)
class InitialDistribution:
    """Start-state law; ``entries=None`` denotes the uniform distribution."""

    n: int
    entries: Optional[dict[ActionProfile, float]] = None

    def __post_init__(self) -> None:
        if self.entries is not None:
            total = 0.0
            for a, p in self.entries.items():
                if a.n != self.n:
                    raise ValueError("entry width mismatch")
                if p < 0:
                    raise ValueError(f"negative initial probability {p}")
                total += p
            if abs(total - 1.0) > 1e-12:
                raise ValueError(f"initial mass {total} != 1")

    @classmethod
    def uniform(cls, n: int) -> "InitialDistribution":
        return cls(n, None)

    @classmethod
    def point(cls, profile: ActionProfile) -> "InitialDistribution":
        return cls(profile.n, {profile: 1.0})

    def prob(self, profile: ActionProfile) -> float:
        if self.entries is None:
            return 1.0 / (1 << self.n)
        return self.entries.get(profile, 0.0)

    def support(self) -> list[ActionProfile]:
        if self.entries is None:
            from .profiles import enumerate_profiles

            return enumerate_profiles(self.n)
        return sorted((a for a, p in self.entries.items() if p > 0), key=sort_key)

    def sample(self, rng: np.random.Generator) -> ActionProfile:
        # Uniform start consumes one integer; explicit laws consume one
        # uniform walked over the canonically ordered support.
        if self.entries is None:
            return ActionProfile(self.n, int(rng.integers(0, 1 << self.n)))
        u = float(rng.random())
        acc = 0.0
        supp = self.support()
        for a in supp:
            acc += self.entries[a]
            if u < acc:
                return a
        return supp[-1]


Game = Union[StaticGame, HistoryGame]


def _utility_at(game: Game, history: History) -> UtilityFn:
    if isinstance(game, StaticGame):
        return game.utility
    return lambda profile, agent: game.utility(history, profile, agent)


def sample_step(
    rule: LearningRule,
    profile: ActionProfile,
    utility: UtilityFn,
    rng: np.random.Generator,
) -> ActionProfile:
    """Draw one asynchronous step.

    Consumes exactly one integer (the agent) and one uniform (the action,
    taken as 0 when the uniform falls below p0), in that order.
    """
    agent = int(rng.integers(0, profile.n))
    p0, _ = rule.action_probabilities(agent, profile, utility)
    action = 0 if float(rng.random()) < p0 else 1
    return profile.with_action(agent, action)


def simulate_path(
    game: Game,
    rule: LearningRule,
    initial: InitialDistribution,
    length: int,
    rng: np.random.Generator,
) -> History:
    """Sample a path of ``length`` profiles; each step's payoffs come from the
    running history for history-dependent games, from the fixed table for
    static ones."""
    if length < 1:
        raise ValueError("path length must be at least 1")
    profiles = [initial.sample(rng)]
    for _ in range(length - 1):
        history = History(tuple(profiles))
        utility = _utility_at(game, history)
        profiles.append(sample_step(rule, profiles[-1], utility, rng))
    return History(tuple(profiles))


def path_probability(
    game: Game,
    rule: LearningRule,
    initial: InitialDistribution,
    path: History,
) -> float:
    """Exact probability of ``path``: the start-state mass times the product
    of one-step probabilities, each evaluated with history-aware payoffs."""
    prob = initial.prob(path[0])
    for t in range(path.length - 1):
        if prob == 0.0:
            return 0.0
        utility = _utility_at(game, path.prefix(t + 1))
        prob *= step_probability(rule, path[t], utility, path[t + 1])
    return prob


def enumerate_path_measure(
    game: Game,
    rule: LearningRule,
    initial: InitialDistribution,
    length: int,
) -> Iterator[tuple[History, float]]:
    """Yield every positive-probability path of ``length`` with its exact
    probability, sharing prefix work across the enumeration tree."""
    static_kernel: dict[int, list[tuple[ActionProfile, float]]] = {}

    def kernel(prefix: tuple[ActionProfile, ...]) -> list[tuple[ActionProfile, float]]:
        state = prefix[-1]
        if isinstance(game, StaticGame):
            cached = static_kernel.get(state.mask)
            if cached is None:
                dist = step_distribution(rule, state, game.utility)
                cached = [(a, p) for a, p in dist.items_canonical() if p > 0]
                static_kernel[state.mask] = cached
            return cached
        history = History(prefix)
        utility = _utility_at(game, history)
        dist = step_distribution(rule, state, utility)
        return [(a, p) for a, p in dist.items_canonical() if p > 0]

    def walk(prefix: tuple[ActionProfile, ...], prob: float):
        if len(prefix) == length:
            yield History(prefix), prob
            return
        for nxt, q in kernel(prefix):
            yield from walk(prefix + (nxt,), prob * q)

    for start in initial.support():
        p0 = initial.prob(start)
        if p0 > 0:
            yield from walk((start,), p0)


@dataclass(frozen=True)
class RulePropertyReport:
    """Outcome of the structural rule checks over a game ensemble."""

    passed: bool
    individual_ok: bool
    local_ok: bool
    monotone_ok: bool
    games_checked: int
    first_failure: Optional[dict] = field(default=None)

    def to_dict(self) -> dict:
        out = {
            "passed": self.passed,
            "individual": self.individual_ok,
            "local": self.local_ok,
            "monotone": self.monotone_ok,
            "games_checked": self.games_checked,
        }
        if self.first_failure:
            out["first_failure"] = self.first_failure
        return out


def verify_rule_properties(
    rule: LearningRule,
    games: Sequence[TabularStaticGame],
    l_grid: Sequence[float] = (0.0, 0.1, 1.0, 10.0),
) -> RulePropertyReport:
    """Check, over every (game, profile, agent) in the ensemble, that the rule
    is a valid individual distribution, depends only on the agent's own payoff
    pair (probed by flipping the agent's bit and by perturbing every payoff
    entry outside that pair), and never loses probability on an action whose
    payoffs are uniformly raised."""
    individual_ok = local_ok = monotone_ok = True
    failure: Optional[dict] = None

    def record(kind: str, game_idx: int, profile: ActionProfile, agent: int, detail: str):
        nonlocal failure
        if failure is None:
            failure = {
                "check": kind,
                "game": game_idx,
                "profile": profile.to_string(),
                "agent": agent + 1,
                "detail": detail,
            }

    for gi, game in enumerate(games):
        n = game.n
        from .profiles import enumerate_profiles

        for profile in enumerate_profiles(n):
            for agent in range(n):
                p0, p1 = rule.action_probabilities(agent, profile, game.utility)
                if p0 < -PROB_TOL or p1 < -PROB_TOL or abs(p0 + p1 - 1.0) > PROB_TOL:
                    individual_ok = False
                    record("individual", gi, profile, agent, f"({p0}, {p1})")
                    continue

                flipped = profile.flip(agent)
                q0, q1 = rule.action_probabilities(agent, flipped, game.utility)
                if (q0, q1) != (p0, p1):
                    local_ok = False
                    record(
                        "local", gi, profile, agent,
                        f"own-bit flip changed ({p0}, {p1}) -> ({q0}, {q1})",
                    )

                opp_mask = profile.mask & ~(1 << agent)

                def perturbed(p: ActionProfile, j: int, _a=agent, _m=opp_mask, _g=game):
                    if j == _a and (p.mask & ~(1 << _a)) == _m:
                        return _g.utility(p, j)
                    return _g.utility(p, j) + 7.0

                r0, r1 = rule.action_probabilities(agent, profile, perturbed)
                if (r0, r1) != (p0, p1):
                    local_ok = False
                    record(
                        "local", gi, profile, agent,
                        "non-local payoff perturbation changed the distribution",
                    )

                for boosted_action in (0, 1):
                    base = p0 if boosted_action == 0 else p1
                    for bonus in l_grid:

                        def raised(p: ActionProfile, j: int, _a=agent, _x=boosted_action,
                                   _l=bonus, _g=game):
                            u = _g.utility(p, j)
                            if j == _a and p.action(_a) == _x:
                                u += _l
                            return u

                        s0, s1 = rule.action_probabilities(agent, profile, raised)
                        boosted = s0 if boosted_action == 0 else s1
                        if boosted < base - PROB_TOL:
                            monotone_ok = False
                            record(
                                "monotone", gi, profile, agent,
                                f"+{bonus} on action {boosted_action} dropped "
                                f"{base} -> {boosted}",
                            )

    passed = individual_ok and local_ok and monotone_ok
    return RulePropertyReport(
        passed, individual_ok, local_ok, monotone_ok, len(games), failure
    )
