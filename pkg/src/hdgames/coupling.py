"""Monotone couplings between a static reference chain and the
history-dependent chain it is aligned with.

The one-step table joins the reference law at a profile ``a`` with the
dynamic law at a history whose last profile dominates ``a``; its support
lives on ordered pairs and both marginals reproduce the respective one-step
kernels.  Chaining the tables along time couples the two path measures,
which yields exact stochastic-dominance oracles over increasing path
functionals and upper path sets, plus the layered identity equating the
expectation gap to coupled boundary-crossing mass.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import AlignmentViolationError, BudgetError, DimensionError, OrderError
from .games import AlignedPair
from .learning import (
    InitialDistribution,
    LearningRule,
    TransitionDistribution,
    enumerate_path_measure,
    step_distribution,
)
from .profiles import (
    ActionProfile,
    History,
    deviating_agent,
    mirror_deviation,
    partition_sets,
    path_leq,
    profile_leq,
)

#: Negative cell magnitudes clamped silently (float cancellation).
CLAMP_TOL = 1e-12
#: Negative cell magnitudes that certify a hypothesis violation.
HARD_NEG_TOL = 1e-9

Cell = tuple[ActionProfile, ActionProfile]


@dataclass(frozen=True)
class OneStepCoupling:
    """Sparse joint table over (reference move, dynamic move) pairs.

    ``static_kernel`` and ``dynamic_kernel`` are the independently computed
    marginal laws the table must reproduce; ``clamped`` records the largest
    negative magnitude zeroed during construction.
    """

    base: ActionProfile
    history: History
    cells: dict[Cell, float]
    static_kernel: TransitionDistribution
    dynamic_kernel: TransitionDistribution
    clamped: float = 0.0

    def mass(self, static_move: ActionProfile, dynamic_move: ActionProfile) -> float:
        return self.cells.get((static_move, dynamic_move), 0.0)

    def total_mass(self) -> float:
        return sum(self.cells.values())


def _conditional_pairs(
    rule: LearningRule, profile: ActionProfile, utility
) -> list[tuple[float, float]]:
    return [
        rule.action_probabilities(agent, profile, utility)
        for agent in range(profile.n)
    ]


def one_step_coupling(
    pair: AlignedPair,
    rule: LearningRule,
    base: ActionProfile,
    history: History,
) -> OneStepCoupling:
    """Build the explicit monotone coupling between the reference law at
    ``base`` and the dynamic law at ``history`` (requires base <= last).

    Cell recipe, with i the agent flipped in the relevant move and sets
    taken from partition_sets(base, last):

    * (base, z') for z' raising last:         (p_dyn_i(1) - p_ref_i(1)) / n
    * (base, z') for z' lowering inside:      p_dyn_i(z'_i) / n
    * (z, last) for z lowering base:          (p_ref_i(0) - p_dyn_i(0)) / n
    * (z, last) for z raising inside:         p_ref_i(z_i) / n
    * (z, mirror(z)) for z raising outside:   p_ref_i(1) / n
    * (z, mirror(z)) for z lowering base:     p_dyn_i(0) / n
    * (base, last):                           remaining mass (see below)

    Differences that cancel below -1e-12 are clamped to zero; anything below
    -1e-9 raises, certifying the inputs are not an aligned pair driven by a
    local monotone rule.
    """
    last = history.last
    if base.n != last.n:
        raise DimensionError("profile widths differ")
    if not profile_leq(base, last):
        raise OrderError(
            f"{base.to_string()} is not componentwise below {last.to_string()}"
        )
    n = base.n
    inv = 1.0 / n

    ref_utility = pair.reference.utility
    dyn_utility = lambda p, i: pair.dynamic.utility(history, p, i)
    ref = _conditional_pairs(rule, base, ref_utility)
    dyn = _conditional_pairs(rule, last, dyn_utility)

    static_kernel = step_distribution(rule, base, ref_utility)
    dynamic_kernel = step_distribution(rule, last, dyn_utility)

    parts = partition_sets(base, last)
    cells: dict[Cell, float] = {}
    clamped = 0.0

    def put(cell: Cell, value: float) -> None:
        nonlocal clamped
        if value < -HARD_NEG_TOL:
            raise AlignmentViolationError(
                f"coupling cell ({cell[0].to_string()}, {cell[1].to_string()}) "
                f"= {value}: inputs are not an aligned pair under a monotone rule"
            )
        if value < 0.0:
            clamped = max(clamped, -value)
            value = 0.0
        assert cell not in cells
        cells[cell] = value

    for target in parts.up_high:
        i = deviating_agent(last, target) - 1
        put((base, target), inv * (dyn[i][1] - ref[i][1]))
    for target in parts.down_inside:
        i = deviating_agent(last, target) - 1
        put((base, target), inv * dyn[i][target.action(i)])
    for move in parts.down_low:
        i = deviating_agent(base, move) - 1
        put((move, last), inv * (ref[i][0] - dyn[i][0]))
    for move in parts.up_inside:
        i = deviating_agent(base, move) - 1
        put((move, last), inv * ref[i][move.action(i)])
    for move in parts.up_outside:
        i = deviating_agent(base, move) - 1
        put((move, mirror_deviation(base, last, move)), inv * ref[i][1])
    for move in parts.down_low:
        i = deviating_agent(base, move) - 1
        put((move, mirror_deviation(base, last, move)), inv * dyn[i][0])

    corner = float(n)
    for move in parts.up_inside + parts.down_low:
        i = deviating_agent(base, move) - 1
        corner -= ref[i][move.action(i)]
    for target in parts.down_inside + parts.up_high:
        i = deviating_agent(last, target) - 1
        corner -= dyn[i][target.action(i)]
    put((base, last), inv * corner)

    return OneStepCoupling(base, history, cells, static_kernel, dynamic_kernel, clamped)


@dataclass(frozen=True)
class CouplingReport:
    """Per-condition worst violations for one coupling table."""

    negativity: float
    mass_error: float
    static_marginal_error: float
    dynamic_marginal_error: float
    order_violation: float
    witnesses: dict = field(default_factory=dict)

    def max_violation(self) -> float:
        return max(
            self.negativity,
            self.mass_error,
            self.static_marginal_error,
            self.dynamic_marginal_error,
            self.order_violation,
        )

    def passed(self, tol: float = 1e-12) -> bool:
        return self.max_violation() <= tol

    def to_dict(self) -> dict:
        return {
            "negativity": self.negativity,
            "mass_error": self.mass_error,
            "static_marginal_error": self.static_marginal_error,
            "dynamic_marginal_error": self.dynamic_marginal_error,
            "order_violation": self.order_violation,
            "max_violation": self.max_violation(),
            "witnesses": dict(self.witnesses),
        }


def verify_coupling(coupling: OneStepCoupling) -> CouplingReport:
    """Check nonnegativity, unit mass, both marginal equations against the
    independently computed kernels, and support monotonicity."""
    witnesses: dict = {}

    negativity = coupling.clamped
    for (x, y), value in coupling.cells.items():
        if value < -negativity:
            negativity = -value
            witnesses["negativity"] = (x.to_string(), y.to_string())

    mass_error = abs(coupling.total_mass() - 1.0)

    row_sums: dict[ActionProfile, float] = {}
    col_sums: dict[ActionProfile, float] = {}
    order_violation = 0.0
    for (x, y), value in coupling.cells.items():
        row_sums[x] = row_sums.get(x, 0.0) + value
        col_sums[y] = col_sums.get(y, 0.0) + value
        if value > order_violation and not profile_leq(x, y):
            order_violation = value
            witnesses["order"] = (x.to_string(), y.to_string())

    static_err = 0.0
    for state in set(row_sums) | set(coupling.static_kernel.entries):
        err = abs(row_sums.get(state, 0.0) - coupling.static_kernel.prob(state))
        if err > static_err:
            static_err = err
            witnesses["static_marginal"] = state.to_string()

    dynamic_err = 0.0
    for state in set(col_sums) | set(coupling.dynamic_kernel.entries):
        err = abs(col_sums.get(state, 0.0) - coupling.dynamic_kernel.prob(state))
        if err > dynamic_err:
            dynamic_err = err
            witnesses["dynamic_marginal"] = state.to_string()

    return CouplingReport(
        negativity, mass_error, static_err, dynamic_err, order_violation, witnesses
    )


@dataclass(frozen=True)
class SweepReport:
    couplings_checked: int
    max_violation: float
    worst: Optional[dict] = None

    def passed(self, tol: float = 1e-12) -> bool:
        return self.max_violation <= tol

    def to_dict(self) -> dict:
        out = {
            "couplings_checked": self.couplings_checked,
            "max_violation": self.max_violation,
            "passed": self.passed(),
        }
        if self.worst:
            out["worst"] = self.worst
        return out


def sweep_one_step_couplings(
    pair: AlignedPair,
    rule: LearningRule,
    max_len: int,
    budget: int = 10**6,
) -> SweepReport:
    """Build and verify the coupling for every (profile, history) with the
    profile below the history's last state, over all histories up to
    ``max_len``."""
    from .profiles import enumerate_histories, enumerate_profiles

    n = pair.n
    total_histories = sum((1 << n) ** t for t in range(1, max_len + 1))
    if total_histories > budget:
        raise BudgetError(
            f"{total_histories} histories exceed sweep budget {budget}"
        )
    states = enumerate_profiles(n)
    checked = 0
    worst_violation = -1.0
    worst: Optional[dict] = None
    for length in range(1, max_len + 1):
        for alpha in enumerate_histories(n, length):
            last = alpha.last
            for base in states:
                if not profile_leq(base, last):
                    continue
                coupling = one_step_coupling(pair, rule, base, alpha)
                report = verify_coupling(coupling)
                checked += 1
                violation = report.max_violation()
                if violation > worst_violation:
                    worst_violation = violation
                    worst = {
                        "base": base.to_string(),
                        "history": [p.to_string() for p in alpha],
                        "report": report.to_dict(),
                    }
    return SweepReport(checked, max(worst_violation, 0.0), worst)


class PathCoupling:
    """Joint law over (reference path, dynamic path) pairs obtained by
    chaining one-step couplings along the dynamic history."""

    def __init__(self, pair: AlignedPair, rule: LearningRule, initial: InitialDistribution):
        self.pair = pair
        self.rule = rule
        self.initial = initial
        self._cache: dict[tuple[int, tuple[int, ...]], OneStepCoupling] = {}

    def _step_table(self, base: ActionProfile, history: History) -> OneStepCoupling:
        key = (base.mask, tuple(p.mask for p in history))
        table = self._cache.get(key)
        if table is None:
            table = one_step_coupling(self.pair, self.rule, base, history)
            self._cache[key] = table
        return table

    def probability(self, static_path: History, dynamic_path: History) -> float:
        """Exact joint probability of the path pair; zero unless the paths
        start together and the dynamic path dominates step by step."""
        if static_path.length != dynamic_path.length:
            raise DimensionError("coupled paths must have equal length")
        if static_path[0] != dynamic_path[0]:
            return 0.0
        prob = self.initial.prob(static_path[0])
        for t in range(static_path.length - 1):
            if prob == 0.0:
                return 0.0
            table = self._step_table(static_path[t], dynamic_path.prefix(t + 1))
            prob *= table.mass(static_path[t + 1], dynamic_path[t + 1])
        return prob


#: Increasing path functionals safe for the dominance direction.  Decreasing
#: observables (e.g. counts of 0-plays) must not be added here.
def _ones_at_end(path: History) -> int:
    return path.last.count_ones()


def _total_ones(path: History) -> int:
    return sum(p.count_ones() for p in path)


def _hit_all_ones(path: History) -> int:
    top_mask = (1 << path.n) - 1
    return int(any(p.mask == top_mask for p in path))


INCREASING_FUNCTIONALS: tuple[tuple[str, Callable[[History], int]], ...] = (
    ("ones_at_end", _ones_at_end),
    ("total_ones", _total_ones),
    ("hit_all_ones", _hit_all_ones),
)


def random_upper_sets(
    n: int, length: int, count: int, seed: int, roots_per_set: int = 2
) -> list[tuple[str, Callable[[History], int]]]:
    """Indicators of up-closures of small random path antichains (seeded)."""
    rng = np.random.default_rng(seed)
    sets = []
    for k in range(count):
        roots = [
            History(
                tuple(
                    ActionProfile(n, int(m))
                    for m in rng.integers(0, 1 << n, size=length)
                )
            )
            for _ in range(roots_per_set)
        ]

        def member(path: History, _roots=tuple(roots)) -> int:
            return int(any(path_leq(root, path) for root in _roots))

        sets.append((f"upper_set_{k}", member))
    return sets


@dataclass(frozen=True)
class DominanceReport:
    """Exact enumeration outcome: every dynamic-side value must weakly
    dominate its static counterpart."""

    passed: bool
    length: int
    all_ones_dynamic: float
    all_ones_static: float
    entries: tuple[dict, ...]
    first_violation: Optional[dict] = None

    def to_dict(self) -> dict:
        out = {
            "passed": self.passed,
            "length": self.length,
            "all_ones_dynamic": self.all_ones_dynamic,
            "all_ones_static": self.all_ones_static,
            "entries": list(self.entries),
        }
        if self.first_violation:
            out["first_violation"] = self.first_violation
        return out


def _support_size(n: int, length: int) -> int:
    return (1 << n) * (n + 1) ** (length - 1)


def dominance_report(
    pair: AlignedPair,
    rule: LearningRule,
    initial: InitialDistribution,
    length: int,
    upper_sets: int = 5,
    seed: int = 2024,
    budget: int = 2_000_000,
    tol: float = 1e-12,
) -> DominanceReport:
    """Enumerate both path measures exactly and compare the all-ones terminal
    probability, the expectations of the increasing-functional library, and
    the probabilities of seeded random upper path sets."""
    n = pair.n
    if _support_size(n, length) > budget:
        raise BudgetError("path support exceeds enumeration budget")
    dynamic = list(enumerate_path_measure(pair.dynamic, rule, initial, length))
    static = list(enumerate_path_measure(pair.reference, rule, initial, length))

    top = ActionProfile.ones(n)
    dyn_top = sum(p for path, p in dynamic if path.last == top)
    stat_top = sum(p for path, p in static if path.last == top)

    observables = list(INCREASING_FUNCTIONALS) + random_upper_sets(
        n, length, upper_sets, seed
    )
    entries = []
    first_violation = None
    passed = dyn_top >= stat_top - tol
    if not passed:
        first_violation = {"name": "all_ones_at_end", "dynamic": dyn_top, "static": stat_top}
    for name, fn in observables:
        dyn_val = sum(p * fn(path) for path, p in dynamic)
        stat_val = sum(p * fn(path) for path, p in static)
        ok = dyn_val >= stat_val - tol
        entries.append(
            {"name": name, "dynamic": dyn_val, "static": stat_val, "holds": ok}
        )
        if not ok:
            passed = False
            if first_violation is None:
                first_violation = entries[-1]
    return DominanceReport(
        passed, length, dyn_top, stat_top, tuple(entries), first_violation
    )


@dataclass(frozen=True)
class GapIdentityReport:
    """Both sides of the layered expectation-gap identity."""

    expectation_gap: float
    coupled_layer_mass: float

    @property
    def discrepancy(self) -> float:
        return abs(self.expectation_gap - self.coupled_layer_mass)

    def to_dict(self) -> dict:
        return {
            "expectation_gap": self.expectation_gap,
            "coupled_layer_mass": self.coupled_layer_mass,
            "discrepancy": self.discrepancy,
        }


def gap_identity_report(
    pair: AlignedPair,
    rule: LearningRule,
    initial: InitialDistribution,
    length: int,
    functional: Callable[[History], int],
    budget: int = 2_000_000,
) -> GapIdentityReport:
    """Compare E_dynamic(Z) - E_static(Z) with the coupled mass of pairs
    straddling each level set of Z, summed over levels."""
    n = pair.n
    if _support_size(n, length) ** 2 > budget * budget:
        raise BudgetError("path-pair support exceeds enumeration budget")
    dynamic = list(enumerate_path_measure(pair.dynamic, rule, initial, length))
    static = list(enumerate_path_measure(pair.reference, rule, initial, length))

    gap = sum(p * functional(path) for path, p in dynamic) - sum(
        p * functional(path) for path, p in static
    )

    coupling = PathCoupling(pair, rule, initial)
    max_level = 0
    values_static = [(path, functional(path)) for path, _ in static]
    values_dynamic = [(path, functional(path)) for path, _ in dynamic]
    for _, v in values_static + values_dynamic:
        max_level = max(max_level, v)
    layer_mass = [0.0] * max(max_level, 1)
    for s_path, s_val in values_static:
        for d_path, d_val in values_dynamic:
            if d_path[0] != s_path[0] or d_val <= s_val:
                continue
            mass = coupling.probability(s_path, d_path)
            if mass == 0.0:
                continue
            for level in range(s_val, d_val):
                layer_mass[level] += mass
    return GapIdentityReport(gap, sum(layer_mass))


@dataclass(frozen=True)
class MarginalReport:
    """Worst errors when the chained coupling's marginals are summed out and
    compared with the directly enumerated path measures."""

    static_error: float
    dynamic_error: float
    mass_error: float

    def max_violation(self) -> float:
        return max(self.static_error, self.dynamic_error, self.mass_error)

    def passed(self, tol: float = 1e-12) -> bool:
        return self.max_violation() <= tol

    def to_dict(self) -> dict:
        return {
            "static_error": self.static_error,
            "dynamic_error": self.dynamic_error,
            "mass_error": self.mass_error,
            "max_violation": self.max_violation(),
        }


def path_coupling_marginals(
    pair: AlignedPair,
    rule: LearningRule,
    initial: InitialDistribution,
    length: int,
    budget: int = 2_000_000,
) -> MarginalReport:
    """Exact enumeration of the chained coupling against both path measures."""
    n = pair.n
    if _support_size(n, length) > budget:
        raise BudgetError("path support exceeds enumeration budget")
    dynamic = list(enumerate_path_measure(pair.dynamic, rule, initial, length))
    static = list(enumerate_path_measure(pair.reference, rule, initial, length))
    coupling = PathCoupling(pair, rule, initial)

    total = 0.0
    row_sums = [0.0] * len(static)
    col_sums = [0.0] * len(dynamic)
    for si, (s_path, _) in enumerate(static):
        for di, (d_path, _) in enumerate(dynamic):
            if s_path[0] != d_path[0]:
                continue
            mass = coupling.probability(s_path, d_path)
            if mass > 0.0:
                total += mass
                row_sums[si] += mass
                col_sums[di] += mass

    static_error = max(
        abs(row_sums[si] - prob) for si, (_, prob) in enumerate(static)
    )
    dynamic_error = max(
        abs(col_sums[di] - prob) for di, (_, prob) in enumerate(dynamic)
    )
    return MarginalReport(static_error, dynamic_error, abs(total - 1.0))
