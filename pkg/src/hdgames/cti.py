"""Threat-intelligence sharing on a network with time-varying information
value.

Each firm decides whether to share with its graph neighbors; sharing costs a
fixed fee and pays the current value of every sharing neighbor's
intelligence.  The value process may drift with time but is bounded below,
and the bound defines a static reference game that the dynamic game aligns
with; the reference is an exact potential game whose structure pins down
strict equilibria and the stochastically selected profile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .games import AlignedPair, FunctionalStaticGame, HistoryGame, StaticGame
from .graphs import Graph
from .learning import InitialDistribution, LogLinearRule, sample_step
from .profiles import ActionProfile, History, enumerate_profiles
from .records import (
    STREAM_DYNAMIC,
    STREAM_STATIC,
    STREAM_VALUES,
    TrialRecord,
    run_trials,
)

_CHUNK = 256


class ValueProcess:
    """Realized per-step intelligence values; deterministic in (seed, step)."""

    lower_bound: float

    def value(self, step: int, agent: int) -> float:
        raise NotImplementedError


class ConstantValue(ValueProcess):
    def __init__(self, v: float):
        self.lower_bound = v
        self._v = v

    def value(self, step: int, agent: int) -> float:
        return self._v


class ScheduleValue(ValueProcess):
    """Fixed per-step values; steps beyond the schedule repeat its last entry."""

    def __init__(self, values: Sequence[float]):
        if not values:
            raise ValueError("schedule needs at least one value")
        self._values = tuple(float(v) for v in values)
        self.lower_bound = min(self._values)

    def value(self, step: int, agent: int) -> float:
        idx = min(step - 1, len(self._values) - 1)
        return self._values[idx]


class BoundedUniformValue(ValueProcess):
    """base + Uniform[0, width] + epsilon, redrawn each step.

    One shared draw per step by default; ``per_firm`` switches to independent
    draws per firm.  Draws extend chunkwise from a single generator, so the
    value at a given step never depends on how far the process has been
    evaluated.
    """

    def __init__(
        self,
        base: float,
        width: float,
        epsilon: float,
        seed,
        n: int,
        per_firm: bool = False,
    ):
        if width < 0 or epsilon <= 0:
            raise ValueError("width must be >= 0 and epsilon > 0")
        self.lower_bound = base + epsilon
        self._base = base
        self._width = width
        self._epsilon = epsilon
        self._per_firm = per_firm
        self._n = n
        self._rng = np.random.default_rng(np.random.SeedSequence(seed))
        self._draws: list = []

    def _ensure(self, step: int) -> None:
        while len(self._draws) < step:
            if self._per_firm:
                block = self._rng.uniform(0.0, self._width, size=(_CHUNK, self._n))
                self._draws.extend(block)
            else:
                block = self._rng.uniform(0.0, self._width, size=_CHUNK)
                self._draws.extend(float(x) for x in block)

    def value(self, step: int, agent: int) -> float:
        self._ensure(step)
        draw = self._draws[step - 1]
        x = float(draw[agent]) if self._per_firm else draw
        return self._base + x + self._epsilon


@dataclass(frozen=True)
class ValueSpec:
    """Declarative value-process description (picklable, trial-seedable)."""

    kind: str  # "constant" | "bounded-uniform" | "schedule"
    v: Optional[float] = None
    base: Optional[float] = None
    width: Optional[float] = None
    epsilon: Optional[float] = None
    values: Optional[tuple[float, ...]] = None
    per_firm: bool = False

    def __post_init__(self) -> None:
        if self.kind == "constant":
            if self.v is None or self.v <= 0:
                raise ValueError("constant process needs v > 0")
        elif self.kind == "bounded-uniform":
            if self.base is None or self.width is None or self.epsilon is None:
                raise ValueError("bounded-uniform needs base, width, epsilon")
        elif self.kind == "schedule":
            if not self.values or min(self.values) <= 0:
                raise ValueError("schedule needs positive values")
        else:
            raise ValueError(f"unknown value process kind {self.kind!r}")

    @property
    def lower_bound(self) -> float:
        if self.kind == "constant":
            return self.v
        if self.kind == "bounded-uniform":
            return self.base + self.epsilon
        return min(self.values)

    def realize(self, n: int, seed=0) -> ValueProcess:
        if self.kind == "constant":
            return ConstantValue(self.v)
        if self.kind == "schedule":
            return ScheduleValue(self.values)
        return BoundedUniformValue(
            self.base, self.width, self.epsilon, seed, n, self.per_firm
        )


@dataclass(frozen=True)
class CtiConfig:
    graph: Graph
    costs: tuple[float, ...]
    value: ValueSpec

    def __post_init__(self) -> None:
        if len(self.costs) != self.graph.n:
            raise ValueError("one cost per firm required")
        if any(c < 0 for c in self.costs):
            raise ValueError("costs must be nonnegative")

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def lower_bound(self) -> float:
        return self.value.lower_bound


class CtiGame(HistoryGame):
    """History-dependent sharing game driven by a realized value process."""

    def __init__(self, cfg: CtiConfig, process: ValueProcess):
        self.n = cfg.n
        self.cfg = cfg
        self.process = process

    def utility(self, history: History, profile: ActionProfile, agent: int) -> float:
        if profile.action(agent) == 0:
            return 0.0
        step = history.length
        gain = -self.cfg.costs[agent]
        for j in self.cfg.graph.neighbors(agent):
            if profile.action(j):
                gain += self.process.value(step, j)
        return gain


def cti_game(cfg: CtiConfig, seed=0) -> CtiGame:
    return CtiGame(cfg, cfg.value.realize(cfg.n, seed))


def cti_reference(cfg: CtiConfig) -> StaticGame:
    """Static game with every value frozen at the declared lower bound."""
    floor = cfg.lower_bound

    def payoff(profile: ActionProfile, agent: int) -> float:
        if profile.action(agent) == 0:
            return 0.0
        shared = sum(
            1 for j in cfg.graph.neighbors(agent) if profile.action(j)
        )
        return -cfg.costs[agent] + shared * floor

    return FunctionalStaticGame(cfg.n, payoff)


def cti_pair(cfg: CtiConfig, seed=0) -> AlignedPair:
    return AlignedPair(cti_game(cfg, seed), cti_reference(cfg))


def cti_potential_value(cfg: CtiConfig, profile: ActionProfile) -> float:
    """Closed-form potential of the reference game: unpaid costs plus half
    the floor value of every mutually sharing edge endpoint."""
    floor = cfg.lower_bound
    total = 0.0
    for i in range(cfg.n):
        if profile.action(i) == 0:
            total += cfg.costs[i]
        else:
            shared = sum(
                1 for j in cfg.graph.neighbors(i) if profile.action(j)
            )
            total += 0.5 * shared * floor
    return total


def cti_potential(cfg: CtiConfig):
    """Tabulated closed-form potential over the full profile space."""
    from .equilibrium import PotentialFunction

    return PotentialFunction(
        {a: cti_potential_value(cfg, a) for a in enumerate_profiles(cfg.n)}
    )


@dataclass(frozen=True)
class CtiConditionReport:
    """Per-firm threshold checks on the value floor.

    ``strict_nash_ok``: floor beats cost/degree everywhere, making all-share a
    strict equilibrium of the reference.  ``sole_maximizer_ok``: floor beats
    2*cost/degree everywhere, making all-share the unique potential peak.
    Firms without neighbors make either condition unsatisfiable (reported,
    never divided by zero).
    """

    lower_bound: float
    strict_nash_ok: bool
    sole_maximizer_ok: bool
    per_firm: tuple[dict, ...]

    def to_dict(self) -> dict:
        return {
            "lower_bound": self.lower_bound,
            "strict_nash_ok": self.strict_nash_ok,
            "sole_maximizer_ok": self.sole_maximizer_ok,
            "per_firm": list(self.per_firm),
        }


def cti_condition_check(cfg: CtiConfig) -> CtiConditionReport:
    floor = cfg.lower_bound
    rows = []
    nash_ok = maximizer_ok = True
    for i in range(cfg.n):
        degree = cfg.graph.degree(i)
        if degree == 0:
            satisfiable = cfg.costs[i] == 0
            rows.append(
                {
                    "firm": i + 1,
                    "degree": 0,
                    "strict_nash": False,
                    "sole_maximizer": False,
                    "note": "isolated firm: thresholds unsatisfiable"
                    if not satisfiable
                    else "isolated firm with zero cost",
                }
            )
            nash_ok = maximizer_ok = False
            continue
        nash_i = floor > cfg.costs[i] / degree
        max_i = floor > 2.0 * cfg.costs[i] / degree
        rows.append(
            {
                "firm": i + 1,
                "degree": degree,
                "strict_nash": nash_i,
                "sole_maximizer": max_i,
            }
        )
        nash_ok &= nash_i
        maximizer_ok &= max_i
    return CtiConditionReport(floor, nash_ok, maximizer_ok, tuple(rows))


def figure_one_config() -> CtiConfig:
    """Shipped sharing-experiment setup: ring of 10 firms, cost 0.4 each,
    value 0.4 + Uniform[0, 0.1] + 0.001 (floor 0.401)."""
    return CtiConfig(
        graph=Graph.ring(10),
        costs=(0.4,) * 10,
        value=ValueSpec(kind="bounded-uniform", base=0.4, width=0.1, epsilon=0.001),
    )


@dataclass(frozen=True)
class CtiTrialTask:
    cfg: CtiConfig
    model: str
    trial: int
    seed: int
    tau: float
    horizon: int


def run_cti_trial(task: CtiTrialTask) -> TrialRecord:
    """One seeded trial of the sharing experiment.

    The dynamic model redraws values each step from a stream keyed by
    (seed, trial); the static model plays the frozen reference.  Sampling
    consumes one integer then one uniform per step, after one draw for the
    start state.
    """
    cfg, n = task.cfg, task.cfg.n
    rule = LogLinearRule(task.tau)
    if task.model == "dynamic":
        rng = np.random.default_rng(
            np.random.SeedSequence((task.seed, STREAM_DYNAMIC, task.trial))
        )
        process = cfg.value.realize(n, (task.seed, STREAM_VALUES, task.trial))
        graph, costs = cfg.graph, cfg.costs

        def utility_at(step: int):
            values = [process.value(step, j) for j in range(n)]

            def payoff(profile: ActionProfile, agent: int) -> float:
                if profile.action(agent) == 0:
                    return 0.0
                gain = -costs[agent]
                for j in graph.neighbors(agent):
                    if profile.action(j):
                        gain += values[j]
                return gain

            return payoff

    else:
        rng = np.random.default_rng(
            np.random.SeedSequence((task.seed, STREAM_STATIC, task.trial))
        )
        reference = cti_reference(cfg)

        def utility_at(step: int):
            return reference.utility

    initial = InitialDistribution.uniform(n)
    profile = initial.sample(rng)
    top = ActionProfile.ones(n)
    counts, at_top = [], []
    for step in range(1, task.horizon + 1):
        counts.append(profile.count_ones())
        at_top.append(int(profile == top))
        if step < task.horizon:
            profile = sample_step(rule, profile, utility_at(step), rng)
    return TrialRecord(task.model, task.trial, tuple(counts), tuple(at_top))


def figure_one_experiment(
    cfg: Optional[CtiConfig] = None,
    tau: float = 0.1,
    trials: int = 25,
    horizon: int = 500,
    seed: int = 1,
    parallelism: int = 1,
) -> list[TrialRecord]:
    """Dynamic and frozen-floor runs of the sharing experiment, trial-seeded
    for bit reproducibility."""
    cfg = cfg or figure_one_config()
    tasks = [
        CtiTrialTask(cfg, model, trial, seed, tau, horizon)
        for model in ("dynamic", "static")
        for trial in range(trials)
    ]
    return run_trials(run_cti_trial, tasks, parallelism)
