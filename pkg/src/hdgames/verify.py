"""Batched desk-scale verification suites over the shipped configurations.

Each property runs an exhaustive (or exactly enumerated) check and reports
its worst violation; the batch result serializes to JSON.  A test-only fault
hook swaps in a corrupted fixture for a named property so the reporting path
itself stays honest.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

from .coupling import (
    dominance_report,
    gap_identity_report,
    path_coupling_marginals,
    sweep_one_step_couplings,
)
from .cti import CtiConfig, ValueSpec, cti_pair, cti_potential, cti_reference
from .equilibrium import (
    check_exact_potential,
    gibbs_distribution,
    potential_maximizers,
    stationary_distribution,
    total_variation,
)
from .errors import AlignmentViolationError
from .games import (
    AlignedPair,
    FunctionalStaticGame,
    LiftedStaticGame,
    check_alignment,
)
from .graphs import Graph
from .learning import InitialDistribution, LogLinearRule
from .profiles import (
    ActionProfile,
    deviating_agent,
    enumerate_profiles,
    mirror_deviation,
    partition_sets,
    profile_leq,
    unilateral_neighbors,
)
from .sisgcg import SisgcgConfig, gcg_potential, gcg_reference, sisgcg_pair

SCOPES = ("core", "coupling", "equilibrium", "all")


@dataclass
class PropertyResult:
    name: str
    passed: bool
    max_violation: Optional[float] = None
    detail: dict = field(default_factory=dict)
    runtime_s: float = 0.0

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "passed": self.passed,
            "runtime_s": round(self.runtime_s, 3),
        }
        if self.max_violation is not None:
            out["max_violation"] = self.max_violation
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class VerificationReport:
    scope: str
    properties: list[PropertyResult]

    @property
    def passed(self) -> bool:
        return all(p.passed for p in self.properties)

    def to_dict(self) -> dict:
        return {
            "scope": self.scope,
            "passed": self.passed,
            "properties": [p.to_dict() for p in self.properties],
        }


def _small_cti(n: int, graph_kind: str, value_kind: str) -> CtiConfig:
    graph = Graph.ring(n) if graph_kind == "ring" else Graph.complete(n)
    if value_kind == "constant":
        value = ValueSpec(kind="constant", v=0.45)
    else:
        value = ValueSpec(kind="bounded-uniform", base=0.4, width=0.1, epsilon=0.001)
    return CtiConfig(graph=graph, costs=(0.4,) * n, value=value)


def _small_sisgcg(n: int) -> SisgcgConfig:
    # The start state sits inside the invariant susceptible band so the
    # alignment inequalities hold on every short history.
    return SisgcgConfig(
        graph=Graph.ring(n), gamma=0.25, beta0=0.9, beta1=0.45,
        lam=(1.0 - 0.25 / 0.45) + 1e-3, s0=0.27, substeps=50,
    )


def _misaligned_cti_pair() -> AlignedPair:
    # Corrupted fixture: values realized below the declared floor.
    cfg_true = _small_cti(3, "ring", "constant")
    low = CtiConfig(
        graph=cfg_true.graph, costs=cfg_true.costs,
        value=ValueSpec(kind="constant", v=0.30),
    )
    from .cti import cti_game

    return AlignedPair(cti_game(low), cti_reference(cfg_true))


def _check_order_laws() -> PropertyResult:
    for n in (1, 2, 3, 4):
        states = enumerate_profiles(n)
        for a in states:
            if not profile_leq(a, a):
                return PropertyResult("profile-order-laws", False,
                                      detail={"reflexivity": a.to_string()})
            for b in states:
                if profile_leq(a, b) and profile_leq(b, a) and a != b:
                    return PropertyResult("profile-order-laws", False,
                                          detail={"antisymmetry": [a.to_string(), b.to_string()]})
                for c in states:
                    if profile_leq(a, b) and profile_leq(b, c) and not profile_leq(a, c):
                        return PropertyResult(
                            "profile-order-laws", False,
                            detail={"transitivity": [a.to_string(), b.to_string(), c.to_string()]},
                        )
    return PropertyResult("profile-order-laws", True, 0.0)


def _check_partition_bijection() -> PropertyResult:
    checked = 0
    for n in (1, 2, 3, 4):
        states = enumerate_profiles(n)
        for lower in states:
            for upper in states:
                if not profile_leq(lower, upper):
                    continue
                parts = partition_sets(lower, upper)
                checked += 1
                low_union = set(parts.down_low) | set(parts.up_inside) | set(parts.up_outside)
                high_union = set(parts.up_high) | set(parts.down_inside) | set(parts.down_outside)
                ok = (
                    low_union == set(unilateral_neighbors(lower))
                    and high_union == set(unilateral_neighbors(upper))
                    and len(low_union) == n == len(high_union)
                    and len(parts.down_low) == len(parts.down_outside)
                    and len(parts.up_outside) == len(parts.up_high)
                    and len(parts.up_inside) == len(parts.down_inside)
                )
                if ok:
                    mirrored = {
                        mirror_deviation(lower, upper, z) for z in parts.down_low
                    }
                    ok &= mirrored == set(parts.down_outside)
                    mirrored = {
                        mirror_deviation(lower, upper, z) for z in parts.up_outside
                    }
                    ok &= mirrored == set(parts.up_high)
                    mirrored = {
                        mirror_deviation(lower, upper, z) for z in parts.up_inside
                    }
                    ok &= mirrored == set(parts.down_inside)
                    ok &= all(
                        deviating_agent(lower, z)
                        == deviating_agent(upper, mirror_deviation(lower, upper, z))
                        for z in unilateral_neighbors(lower)
                    )
                if not ok:
                    return PropertyResult(
                        "partition-bijection", False,
                        detail={"lower": lower.to_string(), "upper": upper.to_string()},
                    )
    return PropertyResult("partition-bijection", True, 0.0, {"pairs": checked})


def _check_alignment_cti(fault: bool) -> PropertyResult:
    if fault:
        pair = _misaligned_cti_pair()
    else:
        pair = cti_pair(_small_cti(3, "ring", "bounded-uniform"), seed=11)
    report = check_alignment(pair, max_len=3)
    return PropertyResult("alignment-cti", report.passed, detail=report.to_dict())


def _check_alignment_sisgcg() -> PropertyResult:
    pair = sisgcg_pair(_small_sisgcg(3))
    report = check_alignment(pair, max_len=3)
    return PropertyResult("alignment-sisgcg", report.passed, detail=report.to_dict())


def _sweep_cti(fault: bool, budget: int) -> PropertyResult:
    rule = LogLinearRule(0.1)
    worst = 0.0
    checked = 0
    if fault:
        try:
            report = sweep_one_step_couplings(_misaligned_cti_pair(), rule, 3, budget)
            return PropertyResult(
                "one-step-sweep-cti", report.passed(), report.max_violation,
                report.to_dict(),
            )
        except AlignmentViolationError as exc:
            return PropertyResult("one-step-sweep-cti", False, detail={"error": str(exc)})
    detail = {}
    for n in (2, 3, 4):
        for graph_kind in ("ring", "complete"):
            for value_kind in ("constant", "bounded-uniform"):
                pair = cti_pair(_small_cti(n, graph_kind, value_kind), seed=5)
                report = sweep_one_step_couplings(pair, rule, 3, budget)
                worst = max(worst, report.max_violation)
                checked += report.couplings_checked
    detail["couplings_checked"] = checked
    return PropertyResult("one-step-sweep-cti", worst <= 1e-12, worst, detail)


def _sweep_sisgcg(budget: int) -> PropertyResult:
    rule = LogLinearRule(0.3)
    worst = 0.0
    checked = 0
    for n in (2, 3):
        pair = sisgcg_pair(_small_sisgcg(n))
        report = sweep_one_step_couplings(pair, rule, 3, budget)
        worst = max(worst, report.max_violation)
        checked += report.couplings_checked
    return PropertyResult(
        "one-step-sweep-sisgcg", worst <= 1e-12, worst,
        {"couplings_checked": checked},
    )


def _path_marginals(budget: int) -> PropertyResult:
    rule = LogLinearRule(0.2)
    worst = 0.0
    for n, length in ((2, 4), (3, 3)):
        pair = cti_pair(_small_cti(n, "ring", "bounded-uniform"), seed=3)
        report = path_coupling_marginals(
            pair, rule, InitialDistribution.uniform(n), length, budget
        )
        worst = max(worst, report.max_violation())
    return PropertyResult("path-coupling-marginals", worst <= 1e-12, worst)


def _dominance(fault: bool, budget: int) -> PropertyResult:
    rule = LogLinearRule(0.2)
    pair = cti_pair(_small_cti(3, "ring", "bounded-uniform"), seed=9)
    if fault:
        # Corrupted fixture: the "dynamic" side plays a strictly worse
        # sharing value than the declared floor, reversing the direction.
        weak = _small_cti(3, "ring", "constant")
        weak_low = CtiConfig(
            graph=weak.graph, costs=weak.costs,
            value=ValueSpec(kind="constant", v=0.2),
        )
        pair = AlignedPair(
            dynamic=LiftedStaticGame(cti_reference(weak_low)),
            reference=cti_reference(weak),
        )
    report = dominance_report(
        pair, rule, InitialDistribution.uniform(3), length=5, budget=budget
    )
    return PropertyResult("dominance-oracle", report.passed, detail=report.to_dict())


def _gap_identity(budget: int) -> PropertyResult:
    rule = LogLinearRule(0.2)
    worst = 0.0
    from .coupling import INCREASING_FUNCTIONALS

    for n, length in ((2, 3), (3, 3)):
        pair = cti_pair(_small_cti(n, "ring", "bounded-uniform"), seed=4)
        initial = InitialDistribution.uniform(n)
        for _, fn in INCREASING_FUNCTIONALS:
            report = gap_identity_report(pair, rule, initial, length, fn, budget)
            worst = max(worst, report.discrepancy)
    return PropertyResult("gap-identity", worst <= 1e-10, worst)


def _potential_cti(fault: bool) -> PropertyResult:
    cfg = CtiConfig(
        graph=Graph.ring(10), costs=(0.4,) * 10,
        value=ValueSpec(kind="constant", v=0.401),
    )
    reference = cti_reference(cfg)
    if fault:
        clean = reference

        def perturbed(profile, agent):
            bump = 0.05 if (agent == 0 and profile.mask == 5) else 0.0
            return clean.utility(profile, agent) + bump

        reference = FunctionalStaticGame(10, perturbed)
    check = check_exact_potential(reference)
    if not check.passed:
        return PropertyResult("cti-potential", False, check.max_edge_error,
                              check.to_dict())
    closed = cti_potential(cfg)
    recovered = check.potential.centered()
    target = closed.centered()
    worst = max(abs(recovered[a] - target[a]) for a in recovered)
    maximizers = potential_maximizers(closed)
    sole_top = maximizers == (ActionProfile.ones(10),)
    return PropertyResult(
        "cti-potential", worst <= 1e-9 and sole_top, worst,
        {"sole_maximizer_all_ones": sole_top},
    )


def _potential_gcg() -> PropertyResult:
    cfg = _small_sisgcg(3)
    check = check_exact_potential(gcg_reference(cfg))
    if not check.passed:
        return PropertyResult("gcg-potential", False, check.max_edge_error,
                              check.to_dict())
    closed = gcg_potential(cfg).centered()
    recovered = check.potential.centered()
    worst = max(abs(recovered[a] - closed[a]) for a in recovered)
    return PropertyResult("gcg-potential", worst <= 1e-9, worst)


def _stationary_gibbs() -> PropertyResult:
    cfg = CtiConfig(
        graph=Graph.ring(8), costs=(0.4,) * 8,
        value=ValueSpec(kind="constant", v=0.5),
    )
    reference = cti_reference(cfg)
    check = check_exact_potential(reference)
    if not check.passed:
        return PropertyResult("stationary-gibbs", False, check.max_edge_error)
    worst = 0.0
    for tau in (1.0, 0.3, 0.1):
        stationary = stationary_distribution(reference, LogLinearRule(tau))
        gibbs = gibbs_distribution(check.potential, tau)
        worst = max(worst, total_variation(stationary, gibbs))
    return PropertyResult("stationary-gibbs", worst <= 1e-9, worst)


def run_verifications(
    scope: str = "all",
    budget: int = 10**6,
    inject_fault: Optional[str] = None,
) -> VerificationReport:
    """Run the selected verification suites and collect per-property verdicts.

    ``inject_fault`` (test-only) replaces the named property's fixture with a
    corrupted one; the property is then expected to report failure.
    """
    if scope not in SCOPES:
        raise ValueError(f"scope must be one of {SCOPES}")
    jobs = []
    if scope in ("core", "all"):
        jobs += [
            lambda: _check_order_laws(),
            lambda: _check_partition_bijection(),
            lambda: _check_alignment_cti(inject_fault == "alignment-cti"),
            lambda: _check_alignment_sisgcg(),
        ]
    if scope in ("coupling", "all"):
        jobs += [
            lambda: _sweep_cti(inject_fault == "one-step-sweep-cti", budget),
            lambda: _sweep_sisgcg(budget),
            lambda: _path_marginals(budget),
            lambda: _dominance(inject_fault == "dominance-oracle", budget),
            lambda: _gap_identity(budget),
        ]
    if scope in ("equilibrium", "all"):
        jobs += [
            lambda: _potential_cti(inject_fault == "cti-potential"),
            lambda: _potential_gcg(),
            lambda: _stationary_gibbs(),
        ]
    results = []
    for job in jobs:
        start = time.perf_counter()
        result = job()
        result.runtime_s = time.perf_counter() - start
        results.append(result)
    return VerificationReport(scope, results)
