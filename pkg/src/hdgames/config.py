"""Experiment configuration: JSON loading, validation, defaults.

Every run must carry an explicit seed (no wall-clock seeding); defaults the
source setups leave open (horizon, uniform start, initial susceptible
fraction) are materialized here and flagged so summaries can echo them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from .cti import CtiConfig, ValueSpec
from .errors import ConfigError
from .graphs import Graph
from .sisgcg import SisgcgConfig

EXPERIMENTS = ("cti-fig1", "sis-fig2", "custom")
FAMILIES = ("cti", "sisgcg")

_TOP_KEYS = {
    "experiment", "family", "seed", "trials", "T", "tau", "parallelism", "out",
    "graph", "costs", "value",
    "gamma", "beta0", "beta1", "lambda_epsilon", "lambda", "S0", "substeps",
}
_GRAPH_KEYS = {"kind", "n", "edges"}
_VALUE_KEYS = {"kind", "v", "base", "width", "epsilon", "values", "per_firm"}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    family: str
    seed: int
    trials: int
    horizon: int
    tau: float
    parallelism: int
    out: Optional[str]
    cti: Optional[CtiConfig]
    sis: Optional[SisgcgConfig]
    extrapolated: tuple[str, ...]

    def resolved(self) -> dict:
        """Fully materialized settings for provenance echoing."""
        out: dict = {
            "experiment": self.experiment,
            "family": self.family,
            "seed": self.seed,
            "trials": self.trials,
            "T": self.horizon,
            "tau": self.tau,
            "parallelism": self.parallelism,
            "initial_distribution": "uniform",
            "extrapolated_defaults": list(self.extrapolated),
        }
        if self.family == "cti":
            cfg = self.cti
            value = {
                "kind": cfg.value.kind,
                "per_firm": cfg.value.per_firm,
            }
            if cfg.value.kind == "constant":
                value["v"] = cfg.value.v
            elif cfg.value.kind == "bounded-uniform":
                value.update(
                    base=cfg.value.base, width=cfg.value.width, epsilon=cfg.value.epsilon
                )
            else:
                value["values"] = list(cfg.value.values)
            out.update(
                graph={"kind": "explicit", "n": cfg.n,
                       "edges": sorted(map(list, cfg.graph.edges))},
                costs=list(cfg.costs),
                value=value,
                value_lower_bound=cfg.lower_bound,
            )
        else:
            cfg = self.sis
            out.update(
                graph={"kind": "explicit", "n": cfg.n,
                       "edges": sorted(map(list, cfg.graph.edges))},
                gamma=cfg.gamma,
                beta0=cfg.beta0,
                beta1=cfg.beta1,
                **{"lambda": cfg.lam},
                S0=cfg.s0,
                substeps=cfg.substeps,
                susceptible_floor=cfg.susceptible_floor,
                infected_floor=cfg.infected_floor,
            )
        return out


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigError(message)


def _check_keys(mapping: dict, allowed: set, where: str) -> None:
    for key in mapping:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in {where}")


def _build_graph(raw: Union[dict, None], default_n: int, default_kind: str) -> Graph:
    raw = raw or {"kind": default_kind, "n": default_n}
    _check_keys(raw, _GRAPH_KEYS, "graph")
    kind = raw.get("kind", default_kind)
    n = raw.get("n", default_n)
    _require(isinstance(n, int) and n >= 1, "graph.n must be a positive integer")
    if kind == "ring":
        return Graph.ring(n)
    if kind == "complete":
        return Graph.complete(n)
    if kind == "edge-list":
        edges = raw.get("edges")
        _require(isinstance(edges, list), "graph.kind=edge-list needs graph.edges")
        try:
            return Graph.from_edges(n, [tuple(e) for e in edges])
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bad graph.edges: {exc}") from exc
    raise ConfigError(f"unknown graph.kind {kind!r}")


def _build_value(raw: Union[dict, None]) -> ValueSpec:
    raw = raw or {"kind": "bounded-uniform", "base": 0.4, "width": 0.1, "epsilon": 0.001}
    _check_keys(raw, _VALUE_KEYS, "value")
    kind = raw.get("kind", "bounded-uniform")
    try:
        if kind == "constant":
            return ValueSpec(kind="constant", v=raw.get("v"),
                             per_firm=bool(raw.get("per_firm", False)))
        if kind == "bounded-uniform":
            return ValueSpec(
                kind="bounded-uniform",
                base=raw.get("base", 0.4),
                width=raw.get("width", 0.1),
                epsilon=raw.get("epsilon", 0.001),
                per_firm=bool(raw.get("per_firm", False)),
            )
        if kind == "schedule":
            values = raw.get("values")
            _require(isinstance(values, list) and values, "value.values must be a list")
            return ValueSpec(kind="schedule", values=tuple(float(v) for v in values))
    except ValueError as exc:
        raise ConfigError(f"bad value process: {exc}") from exc
    raise ConfigError(f"unknown value.kind {kind!r}")


def build_config(raw: dict, overrides: Optional[dict] = None) -> ExperimentConfig:
    """Validate a raw mapping (plus CLI overrides) into a full config."""
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    raw = dict(raw)
    if overrides:
        raw.update({k: v for k, v in overrides.items() if v is not None})
    _check_keys(raw, _TOP_KEYS, "configuration")

    experiment = raw.get("experiment")
    _require(experiment in EXPERIMENTS,
             f"experiment must be one of {EXPERIMENTS}, got {experiment!r}")
    if experiment == "custom":
        family = raw.get("family")
        _require(family in FAMILIES, f"custom experiment needs family in {FAMILIES}")
    else:
        family = "cti" if experiment == "cti-fig1" else "sisgcg"
        _require(raw.get("family") in (None, family),
                 f"family conflicts with experiment {experiment}")

    _require("seed" in raw, "seed is required (wall-clock seeding is not supported)")
    seed = raw["seed"]
    _require(isinstance(seed, int), "seed must be an integer")

    trials = raw.get("trials", 25 if family == "cti" else 40)
    _require(isinstance(trials, int) and trials >= 1, "trials must be >= 1")
    extrapolated = []
    if "T" not in raw:
        extrapolated.append("T=500")
    horizon = raw.get("T", 500)
    _require(isinstance(horizon, int) and horizon >= 1, "T must be >= 1")
    tau = raw.get("tau", 0.1 if family == "cti" else 0.3)
    _require(isinstance(tau, (int, float)) and tau > 0, "tau must be > 0")
    parallelism = raw.get("parallelism", 1)
    _require(isinstance(parallelism, int) and parallelism >= 1,
             "parallelism must be >= 1")
    out = raw.get("out")
    extrapolated.append("initial=uniform")

    cti_cfg = None
    sis_cfg = None
    if family == "cti":
        for key in ("gamma", "beta0", "beta1", "lambda_epsilon", "lambda", "S0", "substeps"):
            _require(key not in raw, f"key {key!r} does not apply to the cti family")
        graph = _build_graph(raw.get("graph"), default_n=10, default_kind="ring")
        costs_raw = raw.get("costs", 0.4)
        if isinstance(costs_raw, (int, float)):
            costs = (float(costs_raw),) * graph.n
        else:
            _require(isinstance(costs_raw, list) and len(costs_raw) == graph.n,
                     "costs must be a scalar or one entry per firm")
            costs = tuple(float(c) for c in costs_raw)
        value = _build_value(raw.get("value"))
        try:
            cti_cfg = CtiConfig(graph=graph, costs=costs, value=value)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    else:
        for key in ("costs", "value"):
            _require(key not in raw, f"key {key!r} does not apply to the sisgcg family")
        graph = _build_graph(raw.get("graph"), default_n=15, default_kind="ring")
        gamma = float(raw.get("gamma", 0.25))
        beta0 = float(raw.get("beta0", 0.9))
        beta1 = float(raw.get("beta1", 0.45))
        _require(gamma > 0, "gamma must be > 0")
        _require(0 < beta1 < beta0,
                 "infection rates must satisfy 0 < beta1 < beta0")
        lam = raw.get("lambda")
        if lam is None:
            lam = (1.0 - gamma / beta1) + float(raw.get("lambda_epsilon", 1e-3))
        else:
            _require("lambda_epsilon" not in raw,
                     "give either lambda or lambda_epsilon, not both")
            lam = float(lam)
        _require(0 < lam <= 1, "lambda must lie in (0, 1]")
        if "S0" not in raw:
            extrapolated.append("S0=0.99")
        s0 = float(raw.get("S0", 0.99))
        _require(0 <= s0 <= 1, "S0 must lie in [0, 1]")
        substeps = raw.get("substeps", 100)
        _require(isinstance(substeps, int) and substeps >= 1, "substeps must be >= 1")
        try:
            sis_cfg = SisgcgConfig(
                graph=graph, gamma=gamma, beta0=beta0, beta1=beta1,
                lam=lam, s0=s0, substeps=substeps,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    return ExperimentConfig(
        experiment=experiment,
        family=family,
        seed=seed,
        trials=trials,
        horizon=horizon,
        tau=float(tau),
        parallelism=parallelism,
        out=out,
        cti=cti_cfg,
        sis=sis_cfg,
        extrapolated=tuple(extrapolated),
    )


def parse_config(path: Union[str, Path], overrides: Optional[dict] = None) -> ExperimentConfig:
    """Load and validate a JSON config file."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return build_config(raw, overrides)


def default_config(experiment: str, **overrides) -> ExperimentConfig:
    """Config for a named experiment with defaults filled in."""
    raw: dict = {"experiment": experiment, "seed": 1}
    return build_config(raw, overrides)
