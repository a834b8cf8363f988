#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Run configuration for the toy-waves harness.

Configuration documents are line-oriented:

    # comment
    [model]
    alpha = 1.5
    epsilon = 0.05

Every key lives in a section, has a type and a documented default, and is
listed in KEYS. Unknown keys, type mismatches and model invariant
violations raise ConfigError.
"""

import logging
import math
import os
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

from dotenv import load_dotenv

from ..core.errors import ConfigError, ParameterError
from ..core.integrator import GENERATORS, SCHEMES, StepperConfig
from ..core.model import FLAVORS, CutoffChi, ModelParams, build_cutoff

logger = logging.getLogger(__name__)

EXPERIMENT_NAMES = (
    "linear-decay",
    "sobolev-decay",
    "nonlinear-l2",
    "energy-cap",
    "energy-cap-alt",
    "energy-grav",
    "lifespan-sweep",
    "commutator-suite",
    "bernstein-suite",
    "oracle-check",
)

SECTIONS = ("run", "model", "cutoff", "stepper", "suite", "lifespan")
THREADS_VARIABLE = "TOYWAVES_THREADS"

KEYS: Dict[str, Dict[str, Any]] = {
    # Run
    "run.experiment": {
        "type": "choice", "choices": EXPERIMENT_NAMES, "default": "linear-decay",
        "description": "Experiment to run",
    },
    "run.seed": {"type": "int", "default": 0, "description": "Seed for all random data"},
    "run.output": {"type": "str", "default": "results", "description": "Output directory"},
    "run.resolutions": {
        "type": "ints", "default": (32, 64, 128, 256),
        "description": "Band limits K swept by the ratio suites",
    },
    "run.epsilons": {
        "type": "floats", "default": (0.1, 0.05, 0.025),
        "description": "Epsilon sweep of the uniformity experiments",
    },
    "run.alphas": {
        "type": "floats", "default": (0.5, 1.5),
        "description": "Dispersion orders of the linear and commutator experiments",
    },
    "run.quotient_floor": {
        "type": "float", "default": 0.05,
        "description": "Floor on growth quotients, as a fraction of sup |d/dx W| of the same run",
    },
    "run.baselines": {
        "type": "str", "default": os.path.join("baselines", "regression.json"),
        "description": "Committed regression baselines",
    },

    # Model
    "model.alpha": {"type": "float", "default": 1.5, "description": "Dispersion order, 0 < alpha <= 2"},
    "model.epsilon": {"type": "float", "default": 0.1, "description": "Small parameter, 0 < eps <= 1"},
    "model.smoothing_order": {"type": "int", "default": 4, "description": "N in W = Re <D>^-N"},
    "model.sigma": {"type": "float", "default": 3.0, "description": "Regularity of the data"},
    "model.flavor": {
        "type": "choice", "choices": tuple(FLAVORS), "default": "cap_time",
        "description": "Energy flavor",
    },
    "model.transport": {"type": "bool", "default": True, "description": "Transport term on"},
    "model.resolution": {"type": "int", "default": 128, "description": "Band limit K of simulations"},
    "model.dealias": {"type": "bool", "default": True, "description": "Dealiased products"},

    # Cutoff
    "cutoff.enabled": {"type": "bool", "default": True, "description": "Damping on"},
    "cutoff.a": {"type": "float", "default": math.pi / 2, "description": "Left end of the sponge"},
    "cutoff.b": {"type": "float", "default": 3 * math.pi / 2, "description": "Right end of the sponge"},
    "cutoff.delta": {"type": "float", "default": math.pi / 8, "description": "Transition width"},
    "cutoff.amplitude": {"type": "float", "default": 1.0, "description": "Plateau height"},
    "cutoff.resolution": {"type": "int", "default": 256, "description": "Band limit of the cutoff spectrum"},

    # Stepper
    "stepper.scheme": {
        "type": "choice", "choices": SCHEMES, "default": "lawson_rk4",
        "description": "Time stepping scheme",
    },
    "stepper.dt": {"type": "float", "default": 0.01, "description": "Base step"},
    "stepper.safety": {"type": "float", "default": 0.1, "description": "Safety factor c_s"},
    "stepper.t_end": {"type": "float", "default": 1.0, "description": "Final time"},
    "stepper.stride": {
        "type": "int", "default": 0,
        "description": "Steps between samples; 0 keeps about 512 samples per run",
    },
    "stepper.dispersive_safety": {
        "type": "float", "default": 0.5,
        "description": "Largest h * s * K^alpha when the explicit part couples modes",
    },
    "stepper.self_check": {
        "type": "bool", "default": True,
        "description": "Rerun one trajectory per experiment at half the step",
    },
    "stepper.halving_tolerance": {
        "type": "float", "default": 1e-6,
        "description": "Largest relative change of a diagnostic when the step is halved",
    },

    # Suite
    "suite.lemmas": {
        "type": "strs", "default": ("L3.1", "L3.2", "L3.4"),
        "description": "Lemmas measured by commutator-suite (L3.1, L3.2, L3.4, A.2)",
    },
    "suite.ks": {"type": "ints", "default": (1, 2, 3, 4), "description": "Commutator powers k"},
    "suite.s": {"type": "float", "default": 0.0, "description": "Sobolev index s"},
    "suite.r": {
        "type": "auto_float", "default": None,
        "description": "Regularity of f; auto uses max(2, s + k*alpha)",
    },
    "suite.ensemble": {"type": "int", "default": 100, "description": "Members per ensemble"},
    "suite.low_pass": {"type": "float", "default": 1.0, "description": "Split threshold of [L, f]"},
    "suite.algebra_s": {"type": "float", "default": 1.0, "description": "Index of the algebra check"},
    "suite.p_min": {"type": "int", "default": 1, "description": "Smallest dyadic level"},
    "suite.p_max": {"type": "int", "default": 6, "description": "Largest dyadic level"},
    "suite.oracle_resolution": {"type": "int", "default": 16, "description": "K of the dense oracle"},
    "suite.oracle_trials": {"type": "int", "default": 50, "description": "Random inputs per operator"},

    # Lifespan
    "lifespan.epsilons": {
        "type": "floats", "default": (0.2, 0.1, 0.05, 0.025),
        "description": "Data sizes of the lifespan sweep",
    },
    "lifespan.theta": {"type": "float", "default": 2.0, "description": "Growth factor ending a run"},
    "lifespan.data_scale": {"type": "float", "default": 1.0, "description": "||U0||_sigma / eps"},
    "lifespan.horizon": {"type": "float", "default": 20.0, "description": "t_max * eps"},
    "lifespan.generator": {
        "type": "choice", "choices": tuple(GENERATORS), "default": "random",
        "description": "Initial data generator",
    },
    "lifespan.damping": {"type": "bool", "default": False, "description": "Sponge on in the lifespan sweep"},
    "lifespan.resolution": {"type": "int", "default": 32, "description": "Band limit K of the lifespan sweep"},
    "lifespan.dt": {"type": "float", "default": 0.02, "description": "Base step of the lifespan sweep"},
    "lifespan.min_scaled": {
        "type": "float", "default": 1.0,
        "description": "Smallest accepted T * eps; censored runs count as lower bounds",
    },
}

TRUE_WORDS = {"true", "yes", "on", "1"}
FALSE_WORDS = {"false", "no", "off", "0"}


def _parse_value(key: str, text: str) -> Any:
    spec = KEYS[key]
    kind = spec["type"]
    text = text.strip()
    try:
        if kind == "float":
            return float(text)
        if kind == "int":
            return int(text)
        if kind == "bool":
            lowered = text.lower()
            if lowered in TRUE_WORDS:
                return True
            if lowered in FALSE_WORDS:
                return False
            raise ValueError(text)
        if kind == "str":
            return text
        if kind == "choice":
            if text not in spec["choices"]:
                raise ConfigError(f"expected one of {', '.join(spec['choices'])}, got {text!r}", key)
            return text
        if kind == "auto_float":
            return None if text.lower() == "auto" else float(text)
        items = [item.strip() for item in text.split(",") if item.strip()]
        if not items:
            raise ValueError(text)
        if kind == "floats":
            return tuple(float(item) for item in items)
        if kind == "ints":
            return tuple(int(item) for item in items)
        return tuple(items)
    except ValueError:
        raise ConfigError(f"expected {kind}, got {text!r}", key) from None


def _format_value(key: str, value: Any) -> str:
    kind = KEYS[key]["type"]
    if kind == "bool":
        return "true" if value else "false"
    if kind == "auto_float":
        return "auto" if value is None else repr(float(value))
    if kind == "float":
        return repr(float(value))
    if kind in ("floats", "ints", "strs"):
        return ", ".join(repr(float(item)) if kind == "floats" else str(item) for item in value)
    return str(value)


def resolve_key(name: str) -> str:
    """
    Map `section.key` or a bare key unique across sections to its full name.

    Raises:
        ConfigError: for unknown or ambiguous keys.
    """
    if name in KEYS:
        return name
    if "." not in name:
        matches = [key for key in KEYS if key.split(".", 1)[1] == name]
        if len(matches) == 1:
            return matches[0]
        if len(matches) > 1:
            raise ConfigError(f"ambiguous key; use one of {', '.join(matches)}", name)
    raise ConfigError("unknown key", name)


@dataclass(eq=False)
class RunConfig:
    """
    Fully populated configuration.

    Attributes:
        values: Value per full key name.
        defaulted: Keys whose value came from the defaults.
    """

    values: Dict[str, Any]
    defaulted: FrozenSet[str] = field(default_factory=frozenset)

    def __getitem__(self, key: str) -> Any:
        return self.values[resolve_key(key)]

    def __eq__(self, other) -> bool:
        return isinstance(other, RunConfig) and self.values == other.values

    @property
    def experiment(self) -> str:
        return self.values["run.experiment"]

    @property
    def seed(self) -> int:
        return self.values["run.seed"]

    @property
    def output(self) -> str:
        return self.values["run.output"]

    @property
    def resolutions(self) -> Tuple[int, ...]:
        return self.values["run.resolutions"]

    def cutoff(self, max_wavenumber: Optional[int] = None) -> Optional[CutoffChi]:
        """The configured sponge, or None when damping is disabled."""
        if not self.values["cutoff.enabled"]:
            return None
        return build_cutoff(
            self.values["cutoff.a"],
            self.values["cutoff.b"],
            self.values["cutoff.delta"],
            max_wavenumber=max_wavenumber or self.values["cutoff.resolution"],
            amplitude=self.values["cutoff.amplitude"],
        )

    def model_params(self, **overrides) -> ModelParams:
        kwargs = {
            "alpha": self.values["model.alpha"],
            "epsilon": self.values["model.epsilon"],
            "smoothing_order": self.values["model.smoothing_order"],
            "sigma": self.values["model.sigma"],
            "flavor": self.values["model.flavor"],
            "transport": self.values["model.transport"],
            "dealias": self.values["model.dealias"],
        }
        if "cutoff" not in overrides:
            kwargs["cutoff"] = self.cutoff()
        kwargs.update(overrides)
        return ModelParams(**kwargs)

    def stepper(self, **overrides) -> StepperConfig:
        kwargs = {
            "scheme": self.values["stepper.scheme"],
            "dt": self.values["stepper.dt"],
            "safety": self.values["stepper.safety"],
            "t_end": self.values["stepper.t_end"],
            "stride": self.values["stepper.stride"],
            "dispersive_safety": self.values["stepper.dispersive_safety"],
            "dealias": self.values["model.dealias"],
        }
        kwargs.update(overrides)
        return StepperConfig(**kwargs)

    def with_overrides(self, assignments: Mapping[str, str]) -> "RunConfig":
        """A copy with `key -> text` assignments parsed and validated."""
        values = dict(self.values)
        defaulted = set(self.defaulted)
        for name, text in assignments.items():
            key = resolve_key(name)
            values[key] = _parse_value(key, text)
            defaulted.discard(key)
        config = RunConfig(values, frozenset(defaulted))
        validate(config)
        return config


def validate(config: RunConfig):
    """
    Check model, cutoff and stepper invariants.

    Raises:
        ConfigError: naming the violated constraint.
    """
    values = config.values
    try:
        config.model_params(cutoff=None)
        config.stepper()
        config.cutoff(max_wavenumber=0)
    except ParameterError as exc:
        raise ConfigError(str(exc)) from None
    for key in ("model.resolution", "cutoff.resolution", "lifespan.resolution", "suite.ensemble",
                "suite.oracle_trials"):
        if values[key] < 1:
            raise ConfigError(f"{values[key]} violates value >= 1", key)
    if any(K < 1 for K in values["run.resolutions"]):
        raise ConfigError("resolutions must be positive", "run.resolutions")
    if any(not 0.0 < eps <= 1.0 for eps in values["run.epsilons"] + values["lifespan.epsilons"]):
        raise ConfigError("epsilons must lie in (0, 1]", "run.epsilons")
    if values["lifespan.theta"] <= 1.0:
        raise ConfigError(f"theta={values['lifespan.theta']} violates theta > 1", "lifespan.theta")
    for key in ("stepper.halving_tolerance", "lifespan.min_scaled"):
        if not values[key] > 0.0:
            raise ConfigError(f"{key}={values[key]} violates value > 0", key)
    if values["suite.p_min"] > values["suite.p_max"]:
        raise ConfigError("p_min must not exceed p_max", "suite.p_min")


def parse_config(text: str) -> RunConfig:
    """
    Parse a configuration document.

    Args:
        text: The document; lines are `[section]`, `key = value`, comments
            starting with `#`, or blank. Keys outside a section must be
            written as `section.key`.

    Returns:
        The RunConfig with defaults applied and provenance recorded.

    Raises:
        ConfigError: for unknown or duplicate keys, malformed lines, type
            mismatches and invariant violations.
    """
    parsed: Dict[str, Any] = {}
    section: Optional[str] = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in SECTIONS:
                raise ConfigError(f"unknown section [{section}] on line {number}")
            continue
        if "=" not in line:
            raise ConfigError(f"line {number} is not 'key = value': {raw.strip()!r}")
        name, value = (part.strip() for part in line.split("=", 1))
        key = f"{section}.{name}" if section and "." not in name else name
        if key not in KEYS:
            raise ConfigError("unknown key", key)
        if key in parsed:
            raise ConfigError(f"duplicate key on line {number}", key)
        parsed[key] = _parse_value(key, value)

    values = {key: spec["default"] for key, spec in KEYS.items()}
    values.update(parsed)
    config = RunConfig(values, frozenset(set(KEYS) - set(parsed)))
    validate(config)
    return config


def load_config(path: Optional[str] = None) -> RunConfig:
    """Read and parse a configuration file; None gives the defaults."""
    if path is None:
        return parse_config("")
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as exc:
        raise ConfigError(f"cannot read configuration: {exc}") from None
    logger.info("Loaded configuration from %s", path)
    return parse_config(text)


def parse_assignments(assignments: Iterable[str]) -> Dict[str, str]:
    """Split `key=value` strings from the command line."""
    result = {}
    for assignment in assignments:
        if "=" not in assignment:
            raise ConfigError(f"override {assignment!r} is not key=value")
        name, value = assignment.split("=", 1)
        result[name.strip()] = value.strip()
    return result


def emit_config(config: RunConfig, comments: bool = True) -> str:
    """Write a document that parses back to an equal RunConfig."""
    lines: List[str] = []
    for section in SECTIONS:
        if lines:
            lines.append("")
        lines.append(f"[{section}]")
        for key, spec in KEYS.items():
            prefix, name = key.split(".", 1)
            if prefix != section:
                continue
            if comments:
                lines.append(f"# {spec['description']}")
            lines.append(f"{name} = {_format_value(key, config.values[key])}")
    return "\n".join(lines) + "\n"


def thread_count() -> int:
    """Worker threads for sweeps from TOYWAVES_THREADS (a .env file is honoured)."""
    load_dotenv()
    text = os.environ.get(THREADS_VARIABLE, "1")
    try:
        count = int(text)
    except ValueError:
        raise ConfigError(f"expected int, got {text!r}", THREADS_VARIABLE) from None
    if count < 1:
        raise ConfigError(f"{count} violates threads >= 1", THREADS_VARIABLE)
    return count
