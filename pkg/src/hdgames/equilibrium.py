"""Static-game analysis: potential recovery, potential maximizers, strict
Nash detection, exact stationary distributions, and Monte-Carlo consensus
estimates.

The potential checker integrates payoff differences along a spanning tree of
the one-flip graph and then verifies the defining difference identity on
every deviation edge, so a returned potential is certified rather than
assumed.  Stationary vectors come from iterated application of the explicit
transition matrix (time-doubling for small chains, plain vector iteration
above 2^11 states) and can be compared against the closed-form Gibbs weights.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import BudgetError, NumericError
from .games import StaticGame, HistoryGame
from .learning import InitialDistribution, LearningRule, LogLinearRule, simulate_path
from .profiles import ActionProfile, enumerate_profiles

MAX_EXACT_STATES = 1 << 14
DENSE_DOUBLING_LIMIT = 1 << 11


@dataclass(frozen=True)
class PotentialFunction:
    """Exact potential values per profile, anchored at the all-zeros state."""

    values: dict[ActionProfile, float]

    @property
    def n(self) -> int:
        return next(iter(self.values)).n

    def value(self, profile: ActionProfile) -> float:
        return self.values[profile]

    def centered(self) -> dict[ActionProfile, float]:
        """Values shifted to zero mean, for additive-constant comparisons."""
        mean = sum(self.values.values()) / len(self.values)
        return {a: v - mean for a, v in self.values.items()}


@dataclass(frozen=True)
class PotentialViolation:
    profile: ActionProfile
    agent: int
    utility_delta: float
    potential_delta: float

    def to_dict(self) -> dict:
        return {
            "profile": self.profile.to_string(),
            "agent": self.agent + 1,
            "utility_delta": self.utility_delta,
            "potential_delta": self.potential_delta,
        }


@dataclass(frozen=True)
class PotentialCheck:
    potential: Optional[PotentialFunction]
    violation: Optional[PotentialViolation]
    max_edge_error: float

    @property
    def passed(self) -> bool:
        return self.violation is None

    def to_dict(self) -> dict:
        out = {"passed": self.passed, "max_edge_error": self.max_edge_error}
        if self.violation is not None:
            out["violation"] = self.violation.to_dict()
        return out


def check_exact_potential(game: StaticGame, tol: float = 1e-9) -> PotentialCheck:
    """Recover a candidate potential along a breadth-first spanning tree from
    the all-zeros profile, then verify the difference identity on every
    unilateral deviation edge."""
    n = game.n
    if (1 << n) > MAX_EXACT_STATES:
        raise BudgetError(f"2^{n} states exceed the exact-analysis cap")
    values: dict[int, float] = {0: 0.0}
    queue = deque([ActionProfile.zeros(n)])
    while queue:
        current = queue.popleft()
        for agent in range(n):
            neighbor = current.flip(agent)
            if neighbor.mask in values:
                continue
            delta = game.utility(neighbor, agent) - game.utility(current, agent)
            values[neighbor.mask] = values[current.mask] + delta
            queue.append(neighbor)

    worst = 0.0
    violation = None
    for profile in enumerate_profiles(n):
        for agent in range(n):
            if profile.action(agent) == 1:
                continue  # each edge checked once, from its lower endpoint
            upper = profile.flip(agent)
            du = game.utility(upper, agent) - game.utility(profile, agent)
            dphi = values[upper.mask] - values[profile.mask]
            err = abs(du - dphi)
            if err > worst:
                worst = err
                if err > tol and violation is None:
                    violation = PotentialViolation(profile, agent, du, dphi)
    if violation is not None:
        return PotentialCheck(None, violation, worst)
    potential = PotentialFunction(
        {ActionProfile(n, m): v for m, v in values.items()}
    )
    return PotentialCheck(potential, None, worst)


def potential_maximizers(
    potential: PotentialFunction, tie_tol: float = 1e-12
) -> tuple[ActionProfile, ...]:
    """Exact argmax set; values within ``tie_tol`` of the peak all count."""
    peak = max(potential.values.values())
    from .profiles import sort_key

    return tuple(
        sorted(
            (a for a, v in potential.values.items() if v >= peak - tie_tol),
            key=sort_key,
        )
    )


def is_strict_nash(
    game: StaticGame, profile: ActionProfile, margin: float = 1e-9
) -> bool:
    """True when every unilateral deviation strictly loses (by > margin)."""
    for agent in range(game.n):
        here = game.utility(profile, agent)
        away = game.utility(profile.flip(agent), agent)
        if here - away <= margin:
            return False
    return True


def transition_matrix(game: StaticGame, rule: LearningRule) -> np.ndarray:
    """Dense one-step matrix of the asynchronous process, mask-indexed."""
    n = game.n
    size = 1 << n
    if size > DENSE_DOUBLING_LIMIT:
        raise BudgetError(f"2^{n} states exceed the dense-matrix cap")
    matrix = np.zeros((size, size))
    inv = 1.0 / n
    for mask in range(size):
        profile = ActionProfile(n, mask)
        stay = 0.0
        for agent in range(n):
            p0, p1 = rule.action_probabilities(agent, profile, game.utility)
            pair = (p0, p1)
            stay += pair[profile.action(agent)]
            matrix[mask, mask ^ (1 << agent)] = inv * pair[1 - profile.action(agent)]
        matrix[mask, mask] = inv * stay
    return matrix


def _sparse_transition_matrix(game: StaticGame, rule: LearningRule):
    from scipy import sparse

    n = game.n
    size = 1 << n
    if size > MAX_EXACT_STATES:
        raise BudgetError(f"2^{n} states exceed the exact-analysis cap")
    rows, cols, data = [], [], []
    inv = 1.0 / n
    for mask in range(size):
        profile = ActionProfile(n, mask)
        stay = 0.0
        for agent in range(n):
            p0, p1 = rule.action_probabilities(agent, profile, game.utility)
            pair = (p0, p1)
            stay += pair[profile.action(agent)]
            rows.append(mask)
            cols.append(mask ^ (1 << agent))
            data.append(inv * pair[1 - profile.action(agent)])
        rows.append(mask)
        cols.append(mask)
        data.append(inv * stay)
    return sparse.csr_matrix((data, (rows, cols)), shape=(size, size))


def stationary_distribution(
    game: StaticGame,
    rule: LearningRule,
    tol: float = 1e-12,
    max_iter: int = 10**6,
) -> dict[ActionProfile, float]:
    """Stationary law of the induced chain by iterated matrix application.

    Chains of at most 2^11 states are driven by repeated squaring (the
    time-doubled matrix), which survives the metastable mixing of small
    temperatures; larger chains fall back to vector iteration with the
    documented iteration cap.
    """
    n = game.n
    size = 1 << n
    if size <= DENSE_DOUBLING_LIMIT:
        matrix = transition_matrix(game, rule)
        power = matrix
        for _ in range(128):
            spread = float(np.max(power.max(axis=0) - power.min(axis=0)))
            if spread < tol:
                break
            power = power @ power
            # Renormalize rows against drift from repeated multiplication.
            power /= power.sum(axis=1, keepdims=True)
        else:
            raise NumericError("time-doubling failed to contract the chain")
        vector = power.mean(axis=0)
    else:
        matrix = _sparse_transition_matrix(game, rule)
        vector = np.full(size, 1.0 / size)
        for _ in range(max_iter):
            nxt = vector @ matrix
            if float(np.abs(nxt - vector).sum()) < tol:
                vector = nxt
                break
            vector = nxt
        else:
            raise NumericError(f"power iteration did not reach {tol} in {max_iter} steps")
    residual = float(np.abs(vector @ matrix - vector).sum())
    if residual > 100 * tol:
        raise NumericError(f"stationary residual {residual} above tolerance")
    vector = vector / vector.sum()
    return {ActionProfile(n, mask): float(vector[mask]) for mask in range(size)}


def gibbs_distribution(
    potential: PotentialFunction, tau: float
) -> dict[ActionProfile, float]:
    """Closed-form stationary law exp(potential/tau), normalized."""
    if not tau > 0:
        raise ValueError("temperature must be positive")
    peak = max(potential.values.values())
    weights = {a: math.exp((v - peak) / tau) for a, v in potential.values.items()}
    total = sum(weights.values())
    return {a: w / total for a, w in weights.items()}


def total_variation(
    p: dict[ActionProfile, float], q: dict[ActionProfile, float]
) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(a, 0.0) - q.get(a, 0.0)) for a in keys)


@dataclass(frozen=True)
class StabilityEstimate:
    """Monte-Carlo estimate of the terminal all-ones probability.

    Empirical at fixed temperature and horizon; no vanishing-temperature or
    infinite-time limit is asserted.
    """

    tau: Optional[float]
    horizon: int
    trials: int
    estimate: float
    stderr: float

    def to_dict(self) -> dict:
        return {
            "tau": self.tau,
            "horizon": self.horizon,
            "trials": self.trials,
            "estimate": self.estimate,
            "stderr": self.stderr,
        }


def estimate_all_ones_probability(
    game: Union[StaticGame, HistoryGame],
    rule: LearningRule,
    initial: InitialDistribution,
    horizon: int,
    trials: int,
    rng: np.random.Generator,
) -> StabilityEstimate:
    """Fraction of sampled paths ending in the all-ones profile, with
    binomial standard error."""
    if trials < 1:
        raise ValueError("need at least one trial")
    n = game.n
    top = ActionProfile.ones(n)
    hits = 0
    for _ in range(trials):
        path = simulate_path(game, rule, initial, horizon, rng)
        if path.last == top:
            hits += 1
    p = hits / trials
    stderr = math.sqrt(p * (1.0 - p) / trials)
    tau = rule.tau if isinstance(rule, LogLinearRule) else None
    return StabilityEstimate(tau, horizon, trials, p, stderr)
