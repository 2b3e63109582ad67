"""Strict-schema JSON run configuration.

Unknown keys are rejected, every error names the offending key, and the
parsed config is echoed verbatim into the metrics report for
reproducibility.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields

from .errors import ConfigError, ValidationError
from .experiments import (
    BENDER_VARIANTS,
    CLOAK_VARIANTS,
    BenderScenario,
    CloakScenario,
)
from .transforms import (
    BenderSpec,
    CloakSpec,
    Mapping,
    affine_mapping,
    bender_mapping,
    cloak_mapping,
    identity_mapping,
    scale_mapping,
)

SCENARIOS = ("cloak", "bender", "pullback", "convergence")


@dataclass
class RunConfig:
    scenario: str
    raw: dict  # parsed document with defaults applied
    payload: object  # scenario-specific object (CloakScenario, BenderScenario, dict)


def _scenario_from_doc(doc: dict, cls, extra_keys=()):
    allowed = {f.name for f in fields(cls)} | set(extra_keys) | {"scenario"}
    for key in doc:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} for scenario {doc['scenario']!r}")
    kwargs = {}
    for f in fields(cls):
        if f.name in doc:
            v = doc[f.name]
            kwargs[f.name] = tuple(v) if isinstance(v, list) else v
    try:
        return cls(**kwargs)
    except (ValidationError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


_MAPS = {
    "identity": lambda p: identity_mapping(domain=tuple(p.get("domain", (0, 1, 0, 1)))),
    "scale": lambda p: scale_mapping(p.get("s", 2.0), domain=tuple(p.get("domain", (0, 1, 0, 1)))),
    "affine": lambda p: affine_mapping(
        p.get("matrix", [[1, 0], [0, 1]]),
        p.get("offset", (0, 0)),
        domain=tuple(p.get("domain", (0, 1, 0, 1))),
    ),
    "cloak": lambda p: cloak_mapping(
        CloakSpec(
            center=tuple(p.get("center", (0, 0))),
            a=p.get("a", 1.0),
            b=p.get("b", 2.0),
            epsilon=p.get("epsilon", 1e-3),
        )
    ),
    "bender": lambda p: bender_mapping(
        BenderSpec(
            k=p.get("k", 1.0),
            a=p.get("a", 1.0),
            phi=p.get("phi", math.pi / 2),
            r1=p.get("r1", 1.0),
        )
    ),
}

_MAP_KEYS = {
    "identity": {"domain"},
    "scale": {"s", "domain"},
    "affine": {"matrix", "offset", "domain"},
    "cloak": {"center", "a", "b", "epsilon"},
    "bender": {"k", "a", "phi", "r1"},
}


def build_mapping(name: str, params: dict) -> Mapping:
    if name not in _MAPS:
        raise ConfigError(f"unknown map {name!r}; built-ins: {sorted(_MAPS)}")
    unknown = set(params) - _MAP_KEYS[name]
    if unknown:
        raise ConfigError(f"unknown map parameter {sorted(unknown)[0]!r} for map {name!r}")
    try:
        return _MAPS[name](params)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc


def parse_config(text: str) -> RunConfig:
    """Parse and validate a JSON config document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}")
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    scenario = doc.get("scenario")
    if scenario not in SCENARIOS:
        raise ConfigError(f"key 'scenario' must be one of {SCENARIOS}, got {scenario!r}")

    if scenario == "cloak":
        payload = _scenario_from_doc(doc, CloakScenario, extra_keys={"variants", "epsilons"})
        variants = doc.get("variants", list(CLOAK_VARIANTS))
        bad = set(variants) - set(CLOAK_VARIANTS)
        if bad:
            raise ConfigError(f"key 'variants': unknown cloak variant {sorted(bad)[0]!r}")
    elif scenario == "bender":
        payload = _scenario_from_doc(doc, BenderScenario, extra_keys={"variants"})
        variants = doc.get("variants", list(BENDER_VARIANTS))
        bad = set(variants) - set(BENDER_VARIANTS)
        if bad:
            raise ConfigError(f"key 'variants': unknown bender variant {sorted(bad)[0]!r}")
        if "eq11-paper" in variants and (
            abs(payload.phi - math.pi / 2) > 1e-12 or abs(payload.k - 1.0) > 1e-12
        ):
            raise ConfigError(
                "key 'phi'/'k': the eq11-paper variant is only defined for phi = pi/2, k = 1"
            )
    elif scenario == "pullback":
        allowed = {"scenario", "map", "map_params", "grids", "beta"}
        unknown = set(doc) - allowed
        if unknown:
            raise ConfigError(f"unknown key {sorted(unknown)[0]!r} for scenario 'pullback'")
        payload = {
            "map": doc.get("map", "scale"),
            "map_params": doc.get("map_params", {}),
            "grids": doc.get("grids", [32, 64, 128]),
            "beta": doc.get("beta", 4.0),
        }
        build_mapping(payload["map"], payload["map_params"])  # validate early
    else:  # convergence
        allowed = {"scenario", "benchmark", "grids"}
        unknown = set(doc) - allowed
        if unknown:
            raise ConfigError(f"unknown key {sorted(unknown)[0]!r} for scenario 'convergence'")
        benchmark = doc.get("benchmark", "sinh")
        if benchmark not in ("sinh", "rod-transient"):
            raise ConfigError(f"key 'benchmark': unknown benchmark {benchmark!r}")
        payload = {"benchmark": benchmark, "grids": doc.get("grids", [16, 32, 64])}

    raw = dict(doc)
    return RunConfig(scenario=scenario, raw=raw, payload=payload)
