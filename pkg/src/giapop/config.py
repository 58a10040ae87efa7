"""JSON run-configuration schema, parsing, and the run manifest.

Schema (all sections are objects; unknown keys anywhere are rejected):

    {
      "model":      {"r0", "K", "beta_d", "beta_m", "w_m", "sigma"},
      "observer":   {"lambda", "gamma"},
      "controller": {"strategy", plus per-strategy keys:
                     adaptive: "r0_bar", "beta_m_bar", "beta_d_low", "eta", "delta"
                     constant: "delta"
                     schedule: "schedule_csv"},
      "sim":        {"t_end", "dt", "record_stride", "x1_0", "x2_0",
                     "x2_hat_0", "profile", "x2_0_bound"} (all optional),
      "ranges":     {param: [low, high] for all six model params} (optional)
    }
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import NamedTuple

from .analysis import UncertaintyRanges
from .control import AdaptiveConfig, ControllerConfig
from .csvio import read_schedule_csv
from .errors import ValidationError
from .model import ModelParams
from .observer import ObserverParams
from .sim import SimConfig

DATA_DIR = Path(__file__).parent / "data"
DEFAULT_CONFIG = DATA_DIR / "default_config.json"

_MODEL_KEYS = ("r0", "K", "beta_d", "beta_m", "w_m", "sigma")
_OBSERVER_KEYS = ("lambda", "gamma")
_CONTROLLER_KEYS = ("strategy", "r0_bar", "beta_m_bar", "beta_d_low", "eta",
                    "delta", "schedule_csv")
_SIM_KEYS = ("t_end", "dt", "record_stride", "x1_0", "x2_0", "x2_hat_0",
             "profile", "x2_0_bound")
_SECTIONS = ("model", "observer", "controller", "sim", "ranges")

CONTROLLER_STRATEGIES = ("zero", "constant", "adaptive", "schedule")


class ParsedConfig(NamedTuple):
    model: ModelParams
    observer: ObserverParams
    controller: ControllerConfig
    sim: SimConfig
    ranges: UncertaintyRanges | None


def tool_version() -> str:
    try:
        return version("giapop")
    except PackageNotFoundError:
        return "0+unknown"


def _require_number(section: str, key: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{section}.{key} must be a number, got {value!r}")
    return float(value)


def _check_keys(section: str, data: dict, allowed, required=()) -> None:
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ValidationError(
            f"unknown keys in section '{section}': {', '.join(unknown)}")
    missing = sorted(set(required) - set(data))
    if missing:
        raise ValidationError(
            f"section '{section}' is missing required keys: {', '.join(missing)}")


def _load_json(path: Path) -> dict:
    if not path.exists():
        raise ValidationError(f"config file not found: {path}")
    text = path.read_text()
    if not text.strip():
        return {}
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValidationError(
            f"config parse error at line {e.lineno}, column {e.colno}: {e.msg}") from e
    if not isinstance(data, dict):
        raise ValidationError("config root must be a JSON object")
    return data


def _parse_controller(section: dict, strategy: str | None,
                      schedule_csv: str | None, config_dir: Path) -> ControllerConfig:
    _check_keys("controller", section, _CONTROLLER_KEYS)
    if strategy is None:
        strategy = section.get("strategy")
        if strategy is None:
            raise ValidationError("section 'controller' is missing required keys: strategy")
    if strategy not in CONTROLLER_STRATEGIES:
        raise ValidationError(
            f"controller.strategy must be one of {CONTROLLER_STRATEGIES}, got {strategy!r}")

    if strategy == "zero":
        return ControllerConfig("zero")
    if strategy == "constant":
        if "delta" not in section:
            raise ValidationError("constant strategy needs controller.delta")
        return ControllerConfig("constant", delta=_require_number("controller", "delta", section["delta"]))
    if strategy == "adaptive":
        needed = ("r0_bar", "beta_m_bar", "beta_d_low", "eta", "delta")
        missing = sorted(set(needed) - set(section))
        if missing:
            raise ValidationError(
                f"adaptive strategy needs controller keys: {', '.join(missing)}")
        vals = {k: _require_number("controller", k, section[k]) for k in needed}
        return ControllerConfig("adaptive", adaptive=AdaptiveConfig(**vals))
    # schedule
    src = schedule_csv if schedule_csv is not None else section.get("schedule_csv")
    if src is None:
        raise ValidationError("schedule strategy needs controller.schedule_csv or an explicit file")
    if not isinstance(src, str):
        raise ValidationError(f"controller.schedule_csv must be a string, got {src!r}")
    sched_path = Path(src)
    if not sched_path.is_absolute() and not sched_path.exists():
        sched_path = config_dir / sched_path
    return ControllerConfig("schedule", schedule=read_schedule_csv(sched_path))


def parse_config(path, *, strategy: str | None = None, profile: str | None = None,
                 schedule_csv: str | None = None) -> ParsedConfig:
    """Parse and validate a JSON run configuration.

    strategy/profile/schedule_csv override the corresponding config
    entries (the CLI flags land here). Every malformed input raises
    ValidationError; nothing is silently defaulted except the optional
    sim keys, which fall back to the standard run geometry.
    """
    path = Path(path)
    data = _load_json(path)

    for name in ("model", "observer", "controller", "sim"):
        if name not in data:
            raise ValidationError(f"missing required section: {name}")
    unknown = sorted(set(data) - set(_SECTIONS))
    if unknown:
        raise ValidationError(f"unknown top-level sections: {', '.join(unknown)}")
    for name in data:
        if not isinstance(data[name], dict):
            raise ValidationError(f"section '{name}' must be a JSON object")

    _check_keys("model", data["model"], _MODEL_KEYS, required=_MODEL_KEYS)
    model = ModelParams(**{k: _require_number("model", k, data["model"][k])
                           for k in _MODEL_KEYS})

    _check_keys("observer", data["observer"], _OBSERVER_KEYS, required=_OBSERVER_KEYS)
    observer = ObserverParams(
        lam=_require_number("observer", "lambda", data["observer"]["lambda"]),
        gamma=_require_number("observer", "gamma", data["observer"]["gamma"]))

    controller = _parse_controller(data["controller"], strategy, schedule_csv,
                                   path.parent)

    _check_keys("sim", data["sim"], _SIM_KEYS)
    sim_kwargs = {}
    for key in _SIM_KEYS:
        if key in data["sim"]:
            if key == "profile":
                if not isinstance(data["sim"][key], str):
                    raise ValidationError("sim.profile must be a string")
                sim_kwargs[key] = data["sim"][key]
            elif key == "record_stride":
                v = data["sim"][key]
                if isinstance(v, bool) or not isinstance(v, int):
                    raise ValidationError(f"sim.record_stride must be an integer, got {v!r}")
                sim_kwargs[key] = v
            else:
                sim_kwargs[key] = _require_number("sim", key, data["sim"][key])
    if profile is not None:
        sim_kwargs["profile"] = profile
    sim = SimConfig(**sim_kwargs)

    ranges = None
    if "ranges" in data:
        _check_keys("ranges", data["ranges"], _MODEL_KEYS, required=_MODEL_KEYS)
        parsed = {}
        for k in _MODEL_KEYS:
            v = data["ranges"][k]
            if (not isinstance(v, list) or len(v) != 2
                    or any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in v)):
                raise ValidationError(f"ranges.{k} must be a [low, high] number pair")
            parsed[k] = (float(v[0]), float(v[1]))
        ranges = UncertaintyRanges(**parsed)

    return ParsedConfig(model, observer, controller, sim, ranges)


def config_hash(path) -> str:
    """sha256 of the canonicalized config: stable under reformatting."""
    data = _load_json(Path(path))
    canonical = json.dumps(data, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


@dataclass(frozen=True)
class RunManifest:
    """Provenance record written next to every emitted CSV."""

    config_path: str
    profile: str | None
    warnings: tuple[str, ...]
    outputs: tuple[str, ...]
    tool_version: str
    config_hash: str


def write_manifest(manifest: RunManifest, path) -> None:
    with open(path, "w", newline="") as f:
        json.dump(asdict(manifest), f, indent=2)
        f.write("\n")
