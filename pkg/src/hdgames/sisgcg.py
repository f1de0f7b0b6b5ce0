"""Coordination on a network coupled to a mean-field susceptible-infected
epidemic.

Agents choose between a cautious convention (1) and a careless one (0); the
population's mix sets the infection rate of a scalar SIS flow, and the
current infected fraction in turn boosts the payoff of coordinating on
caution.  Freezing the infected fraction at its long-run floor (one minus
curing-over-cautious-infection ratio) yields a static coordination reference
game the coupled model aligns with once the epidemic has entered its
invariant band.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NumericError
from .games import AlignedPair, FunctionalStaticGame, HistoryGame, StaticGame
from .graphs import Graph
from .learning import InitialDistribution, LearningRule, LogLinearRule, sample_step
from .profiles import ActionProfile, History, enumerate_profiles
from .records import STREAM_DYNAMIC, STREAM_STATIC, TrialRecord, run_trials


@dataclass(frozen=True)
class SisgcgConfig:
    graph: Graph
    gamma: float  # curing rate
    beta0: float  # infection rate of careless agents
    beta1: float  # infection rate of cautious agents
    lam: float  # baseline willingness to be cautious
    s0: float  # initial susceptible fraction
    substeps: int = 100  # integrator substeps per learning period

    def __post_init__(self) -> None:
        if not (0 < self.beta1 < self.beta0):
            raise ValueError("need 0 < beta1 < beta0")
        if self.gamma <= 0:
            raise ValueError("curing rate must be positive")
        if not (0 < self.lam <= 1):
            raise ValueError("willingness must lie in (0, 1]")
        if not (0 <= self.s0 <= 1):
            raise ValueError("initial susceptible fraction must lie in [0, 1]")
        if self.substeps < 1:
            raise ValueError("need at least one integrator substep")

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def susceptible_floor(self) -> float:
        """Long-run cap on the susceptible fraction once caution dominates."""
        return self.gamma / self.beta1

    @property
    def infected_floor(self) -> float:
        return 1.0 - self.susceptible_floor


def beta_of_profile(cfg: SisgcgConfig, profile: ActionProfile) -> float:
    """Population-average infection rate under the current profile."""
    ones = profile.count_ones()
    return (ones * cfg.beta1 + (profile.n - ones) * cfg.beta0) / profile.n


def sis_step(cfg: SisgcgConfig, susceptible: float, beta: float, dt: float = 1.0) -> float:
    """Advance dS/dt = (1-S)(gamma - beta*S) over ``dt`` with classic
    fourth-order Runge-Kutta at the configured substep count.

    The flow keeps [0, 1] invariant; discretization spill beyond 1e-9 is an
    error, smaller spill is clamped.
    """
    gamma = cfg.gamma
    h = dt / cfg.substeps
    s = susceptible

    def f(x: float) -> float:
        return (1.0 - x) * (gamma - beta * x)

    for _ in range(cfg.substeps):
        k1 = f(s)
        k2 = f(s + 0.5 * h * k1)
        k3 = f(s + 0.5 * h * k2)
        k4 = f(s + h * k3)
        delta = h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        if abs(delta) > 0.5:
            raise NumericError(
                f"integrator step moved S by {delta}; increase substeps ({cfg.substeps})"
            )
        s += delta
    if s < -1e-9 or s > 1.0 + 1e-9:
        raise NumericError(f"susceptible fraction left [0,1]: {s}")
    return min(max(s, 0.0), 1.0)


def sis_trajectory(cfg: SisgcgConfig, history: History) -> tuple[float, ...]:
    """Susceptible fractions S[0..T]; profile t governs unit interval t."""
    out = [cfg.s0]
    for profile in history:
        out.append(sis_step(cfg, out[-1], beta_of_profile(cfg, profile)))
    return tuple(out)


def convention_utility(
    cfg: SisgcgConfig, infected: float, profile: ActionProfile, agent: int
) -> float:
    """Coordination payoff: cautious play earns (lam + infected) per cautious
    neighbor, careless play earns 1 per careless neighbor."""
    if not 0 <= infected <= 1:
        raise ValueError(f"infected fraction must lie in [0,1], got {infected}")
    cautious = profile.action(agent) == 1
    matches = 0
    for j in cfg.graph.neighbors(agent):
        if profile.action(j) == (1 if cautious else 0):
            matches += 1
    return matches * (cfg.lam + infected) if cautious else float(matches)


class SisgcgGame(HistoryGame):
    """History-dependent coordination game; the infected fraction is the SIS
    flow integrated through every profile of the history (memoized per
    prefix, so enumeration over a path tree costs one integration per node).
    """

    def __init__(self, cfg: SisgcgConfig):
        self.n = cfg.n
        self.cfg = cfg
        self._s_cache: dict[tuple[int, ...], float] = {}

    def susceptible_after(self, history: History) -> float:
        key = tuple(p.mask for p in history)
        cached = self._s_cache.get(key)
        if cached is not None:
            return cached
        if len(key) == 1:
            prev = self.cfg.s0
        else:
            prev = self.susceptible_after(history.prefix(history.length - 1))
        s = sis_step(self.cfg, prev, beta_of_profile(self.cfg, history.last))
        self._s_cache[key] = s
        return s

    def utility(self, history: History, profile: ActionProfile, agent: int) -> float:
        infected = 1.0 - self.susceptible_after(history)
        return convention_utility(self.cfg, infected, profile, agent)


def gcg_reference(cfg: SisgcgConfig) -> StaticGame:
    """Coordination game with the infected fraction frozen at its floor."""
    infected = cfg.infected_floor

    def payoff(profile: ActionProfile, agent: int) -> float:
        return convention_utility(cfg, infected, profile, agent)

    return FunctionalStaticGame(cfg.n, payoff)


def gcg_potential(cfg: SisgcgConfig):
    """Edge-sum coordination potential of the reference game, tabulated.

    Candidate only: callers certify it through the exact-potential checker
    rather than trusting the construction.
    """
    from .equilibrium import PotentialFunction

    weight = cfg.lam + cfg.infected_floor
    values = {}
    for profile in enumerate_profiles(cfg.n):
        total = 0.0
        for i, j in cfg.graph.edges:
            ai, aj = profile.action(i), profile.action(j)
            if ai and aj:
                total += weight
            elif not ai and not aj:
                total += 1.0
        values[profile] = total
    return PotentialFunction(values)


def sisgcg_pair(cfg: SisgcgConfig) -> AlignedPair:
    """Coupled model with its frozen-floor reference.  Alignment holds once
    (and wherever) the susceptible fraction sits at or below its floor."""
    return AlignedPair(SisgcgGame(cfg), gcg_reference(cfg))


@dataclass(frozen=True)
class HypothesisReport:
    """Config-time checks behind the stability claim for all-cautious play.

    ``stated_threshold_ok`` records the inequality lam + gamma/beta1 > 1 as
    printed in the source analysis; ``sole_maximizer_ok`` is the enumerable
    fact that actually decides the reference game's unique potential peak
    (lam + infected_floor > 1).  The two differ unless gamma/beta1 = 1/2.
    """

    endemic_ok: bool  # beta1 > gamma, so the floor is a real epidemic level
    initial_infection_ok: bool  # I(0) > 0
    stated_threshold_ok: bool
    sole_maximizer_ok: bool
    maximizer_margin: float  # (lam + infected_floor) - 1, per coordinated edge

    @property
    def stability_claim(self) -> bool:
        return self.endemic_ok and self.initial_infection_ok and self.sole_maximizer_ok

    def to_dict(self) -> dict:
        return {
            "endemic_ok": self.endemic_ok,
            "initial_infection_ok": self.initial_infection_ok,
            "stated_threshold_ok": self.stated_threshold_ok,
            "sole_maximizer_ok": self.sole_maximizer_ok,
            "maximizer_margin": self.maximizer_margin,
            "stability_claim": self.stability_claim,
        }


def hypothesis_check(cfg: SisgcgConfig) -> HypothesisReport:
    margin = cfg.lam + cfg.infected_floor - 1.0
    return HypothesisReport(
        endemic_ok=cfg.beta1 > cfg.gamma,
        initial_infection_ok=cfg.s0 < 1.0,
        stated_threshold_ok=cfg.lam + cfg.susceptible_floor > 1.0,
        sole_maximizer_ok=margin > 1e-12,
        maximizer_margin=margin,
    )


@dataclass(frozen=True)
class InvarianceReport:
    """Entry time into the susceptible band [0, floor] and the worst
    excursion above it afterwards."""

    threshold: float
    entry_index: Optional[int]
    max_excursion: float
    passed: bool
    note: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "entry_index": self.entry_index,
            "max_excursion": self.max_excursion,
            "passed": self.passed,
            "note": self.note,
        }


def invariance_check(
    cfg: SisgcgConfig,
    susceptible: tuple[float, ...],
    entry_tol: float = 1e-9,
    stay_tol: float = 1e-6,
) -> InvarianceReport:
    """Locate the first time the susceptible fraction reaches its floor and
    confirm it never escapes afterwards (within integrator tolerance)."""
    threshold = cfg.susceptible_floor
    if susceptible and susceptible[0] >= 1.0:
        return InvarianceReport(
            threshold, None, 0.0, False,
            note="hypothesis violated: positive initial infection required",
        )
    entry = None
    for t, s in enumerate(susceptible):
        if s <= threshold + entry_tol:
            entry = t
            break
    if entry is None:
        return InvarianceReport(
            threshold, None, 0.0, False, note="never entered the invariant band"
        )
    excursion = max(
        (s - threshold for s in susceptible[entry:]), default=0.0
    )
    return InvarianceReport(threshold, entry, max(excursion, 0.0), excursion <= stay_tol)


def simulate(
    cfg: SisgcgConfig,
    rule: LearningRule,
    initial: InitialDistribution,
    horizon: int,
    rng: np.random.Generator,
) -> tuple[History, tuple[float, ...]]:
    """Interleave one epidemic unit interval with one revision per step.

    Returns the action path (length ``horizon``) and the susceptible
    trajectory S[0..horizon]; the decision leaving step t sees the infected
    fraction at the end of interval t.
    """
    profile = initial.sample(rng)
    susceptible = [cfg.s0]
    profiles = [profile]
    for step in range(1, horizon + 1):
        s = sis_step(cfg, susceptible[-1], beta_of_profile(cfg, profile))
        susceptible.append(s)
        if step < horizon:
            infected = 1.0 - s

            def payoff(p: ActionProfile, agent: int, _i=infected) -> float:
                return convention_utility(cfg, _i, p, agent)

            profile = sample_step(rule, profile, payoff, rng)
            profiles.append(profile)
    return History(tuple(profiles)), tuple(susceptible)


def figure_two_config(lambda_epsilon: float = 1e-3, lam: Optional[float] = None) -> SisgcgConfig:
    """Shipped epidemic-coordination setup: ring of 15, gamma 0.25, careless
    rate 0.9, cautious rate 0.45; willingness sits lambda_epsilon above the
    coordination tie unless given explicitly."""
    gamma, beta1 = 0.25, 0.45
    if lam is None:
        lam = (1.0 - gamma / beta1) + lambda_epsilon
    return SisgcgConfig(
        graph=Graph.ring(15),
        gamma=gamma,
        beta0=0.9,
        beta1=beta1,
        lam=lam,
        s0=0.99,
        substeps=100,
    )


@dataclass(frozen=True)
class SisgcgTrialTask:
    cfg: SisgcgConfig
    model: str
    trial: int
    seed: int
    tau: float
    horizon: int


def run_sisgcg_trial(task: SisgcgTrialTask) -> TrialRecord:
    """One seeded trial; the static model plays the frozen-floor reference
    and reports no infection column."""
    cfg, n = task.cfg, task.cfg.n
    rule = LogLinearRule(task.tau)
    initial = InitialDistribution.uniform(n)
    top = ActionProfile.ones(n)
    if task.model == "dynamic":
        rng = np.random.default_rng(
            np.random.SeedSequence((task.seed, STREAM_DYNAMIC, task.trial))
        )
        path, susceptible = simulate(cfg, rule, initial, task.horizon, rng)
        counts = tuple(p.count_ones() for p in path)
        at_top = tuple(int(p == top) for p in path)
        infected = tuple(1.0 - s for s in susceptible[1:])
        return TrialRecord(task.model, task.trial, counts, at_top, infected)
    rng = np.random.default_rng(
        np.random.SeedSequence((task.seed, STREAM_STATIC, task.trial))
    )
    reference = gcg_reference(cfg)
    profile = initial.sample(rng)
    counts, at_top_list = [], []
    for step in range(1, task.horizon + 1):
        counts.append(profile.count_ones())
        at_top_list.append(int(profile == top))
        if step < task.horizon:
            profile = sample_step(rule, profile, reference.utility, rng)
    return TrialRecord(task.model, task.trial, tuple(counts), tuple(at_top_list))


def figure_two_experiment(
    cfg: Optional[SisgcgConfig] = None,
    tau: float = 0.3,
    trials: int = 40,
    horizon: int = 500,
    seed: int = 1,
    parallelism: int = 1,
) -> list[TrialRecord]:
    """Coupled and frozen-floor runs of the epidemic-coordination experiment."""
    cfg = cfg or figure_two_config()
    tasks = [
        SisgcgTrialTask(cfg, model, trial, seed, tau, horizon)
        for model in ("dynamic", "static")
        for trial in range(trials)
    ]
    return run_trials(run_sisgcg_trial, tasks, parallelism)
