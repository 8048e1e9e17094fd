"""Scenario configuration: a flat ``key = value`` file plus overrides.

Example::

    # singlet, no-choice experiment, analytic only
    scenario = fixed_povm
    state = singlet
    quartet = optimal          # or four angles in degrees: A, a, B, b
    mixing_weight = 0.5
    trials = 0
    seed = 1
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, fields, replace
from pathlib import Path

SCENARIOS = {
    "projective_choice": "projective spin measurements, setting pair chosen per trial",
    "fixed_povm": "one fixed four-outcome POVM per particle, no setting choices",
    "fixed_povm_lhv": "instruction-set local model fed the fixed-POVM quantum table",
    "advance_announced": "settings announced before production; source samples outcome pairs",
}
STATES = ("singlet", "maximally_mixed", "product_00")


class ConfigError(ValueError):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str = "fixed_povm"
    state: str = "singlet"
    quartet: str | tuple[float, float, float, float] = "optimal"
    mixing_weight: float = 0.5
    trials: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError("scenario", f"unknown scenario {self.scenario!r}; choose from {', '.join(SCENARIOS)}")
        if self.state not in STATES:
            raise ConfigError("state", f"unknown state {self.state!r}; choose from {', '.join(STATES)}")
        if isinstance(self.quartet, str):
            if self.quartet != "optimal":
                raise ConfigError("quartet", f"expected 'optimal' or four angles, got {self.quartet!r}")
        else:
            angles = tuple(self.quartet)
            if len(angles) != 4:
                raise ConfigError("quartet", f"expected four angles (A, a, B, b), got {len(angles)}")
            if not all(isinstance(x, (int, float)) and math.isfinite(x) for x in angles):
                raise ConfigError("quartet", "angles must be finite numbers")
            object.__setattr__(self, "quartet", tuple(float(x) for x in angles))
        if not (isinstance(self.mixing_weight, (int, float)) and 0 < self.mixing_weight < 1):
            raise ConfigError("mixing_weight", f"must lie in (0, 1), got {self.mixing_weight!r}")
        if isinstance(self.trials, bool) or not isinstance(self.trials, int) or self.trials < 0:
            raise ConfigError("trials", f"must be an integer >= 0, got {self.trials!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError("seed", f"must be a nonnegative integer, got {self.seed!r}")

    def as_dict(self) -> dict:
        q = self.quartet if isinstance(self.quartet, str) else list(self.quartet)
        return {"scenario": self.scenario, "state": self.state, "quartet": q,
                "mixing_weight": self.mixing_weight, "trials": self.trials, "seed": self.seed}


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    try:
        if key == "quartet":
            if raw.lower() == "optimal":
                return "optimal"
            return tuple(float(x) for x in raw.replace(",", " ").split())
        if key == "mixing_weight":
            return float(raw)
        if key in ("trials", "seed"):
            return int(raw)
    except ValueError:
        raise ConfigError(key, f"cannot parse {raw!r}") from None
    return raw


def parse_config_text(text: str) -> dict:
    """Parse flat ``key = value`` text into typed values (not yet validated)."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    try:
        parser.read_string("[scenario]\n" + text)
    except configparser.Error as exc:
        raise ConfigError("<file>", str(exc).splitlines()[0]) from None
    known = {f.name for f in fields(ScenarioConfig)}
    values = {}
    for key, raw in parser["scenario"].items():
        if key not in known:
            raise ConfigError(key, "unknown key")
        values[key] = _parse_value(key, raw)
    return values


def load_config(path: str | Path | None = None, **overrides) -> ScenarioConfig:
    """Read a config file (if given) and apply non-None ``overrides`` on top."""
    values = {}
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
        values = parse_config_text(text)
    values.update({k: v for k, v in overrides.items() if v is not None})
    return ScenarioConfig(**values)


def with_overrides(cfg: ScenarioConfig, **overrides) -> ScenarioConfig:
    return replace(cfg, **{k: v for k, v in overrides.items() if v is not None})
