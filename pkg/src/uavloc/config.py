"""YAML study configuration: defaults, presets, overrides, validation.

Resolution order is file values over preset values over built-in defaults.
Unknown keys are rejected with their full path so typos cannot silently
fall back to a default.
"""

from __future__ import annotations

import math
from dataclasses import replace
from pathlib import Path

import yaml

from .channel import EnvironmentParams, environment_preset
from .estimation import SearchConfig
from .experiments import ExperimentConfig, SweepSpec
from .geometry import ConstellationSpec, NodePosition
from .localization import SolverConfig


class ConfigError(ValueError):
    """Configuration file cannot be parsed or violates a constraint."""


#: Default sweep grids as (start, stop, step), stop inclusive.
DEFAULT_GRIDS = {
    "altitude": (100.0, 3000.0, 50.0),
    "inter_distance": (100.0, 1000.0, 50.0),
    "anchor_count": (3.0, 30.0, 3.0),
}

#: Per-variable constellation defaults: the altitude study uses the
#: three-anchor, 500 m triangle; the count study grows 100 m triangles in
#: 20 m increments. The spacing study sweeps base_side itself.
_DEFAULT_BASE_SIDE = {"altitude": 500.0, "inter_distance": 500.0, "anchor_count": 100.0}
_DEFAULT_SIDE_INCREMENT = {"altitude": 0.0, "inter_distance": 0.0, "anchor_count": 20.0}

_ENVIRONMENT_KEYS = {"preset", "a_los", "b_los", "a_nlos", "b_nlos",
                     "a_o", "b_o", "a_1", "b_1", "k_ref", "c_offset"}
_CONSTELLATION_KEYS = {"n_anchors", "base_side", "altitude", "side_increment",
                       "centroid", "coverage_radius"}
_SWEEP_KEYS = {"variable", "values", "start", "stop", "step"}
_SEARCH_KEYS = {"d_max", "grid_points", "tol"}
_SOLVER_KEYS = {"max_iter", "step_tol", "damping0", "grid_radius"}
_TOP_KEYS = {"environment", "seed", "trials", "node_count", "deployment_radius",
             "samples_per_anchor", "eval_distance", "eval_azimuths",
             "constellation", "sweep", "search", "solver"}


def grid_from_range(start: float, stop: float, step: float) -> tuple[float, ...]:
    """Inclusive arithmetic grid; stop is included when it lands on the step."""
    if step <= 0.0:
        raise ConfigError("sweep.step must be > 0")
    if stop < start:
        raise ConfigError("sweep.stop must be >= sweep.start")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(start + k * step for k in range(n))


def _reject_unknown(section: dict, allowed: set, where: str) -> None:
    for key in section:
        if key not in allowed:
            prefix = f"{where}." if where else ""
            raise ConfigError(f"unknown config key {prefix}{key!r}")


def _as_mapping(value, where: str) -> dict:
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(f"config section {where!r} must be a mapping")
    return value


def _resolve_environment(raw, preset: str | None) -> EnvironmentParams:
    if raw is None:
        return environment_preset(preset or "urban")
    if isinstance(raw, str):
        return environment_preset(raw)
    section = _as_mapping(raw, "environment")
    _reject_unknown(section, _ENVIRONMENT_KEYS, "environment")
    base = section.get("preset")
    overrides = {k: float(v) for k, v in section.items() if k != "preset"}
    if base is not None:
        return replace(environment_preset(str(base)), **overrides)
    missing = {"a_los", "b_los", "a_nlos", "b_nlos", "a_o", "b_o", "a_1", "b_1"} \
        - set(overrides)
    if missing:
        raise ConfigError("environment mapping without a preset must give all "
                          f"channel constants; missing {sorted(missing)}")
    return EnvironmentParams(**overrides)


def _resolve_constellation(raw, variable: str) -> ConstellationSpec:
    section = _as_mapping(raw, "constellation")
    _reject_unknown(section, _CONSTELLATION_KEYS, "constellation")
    centroid = section.get("centroid", [0.0, 0.0])
    if not (isinstance(centroid, (list, tuple)) and len(centroid) == 2):
        raise ConfigError("constellation.centroid must be a [x, y] pair")
    kwargs = {
        "n_anchors": int(section.get("n_anchors", 3)),
        "base_side": float(section.get("base_side", _DEFAULT_BASE_SIDE[variable])),
        "altitude": float(section.get("altitude", 1000.0)),
        "side_increment": float(section.get("side_increment",
                                            _DEFAULT_SIDE_INCREMENT[variable])),
        "centroid": NodePosition(float(centroid[0]), float(centroid[1])),
    }
    if "coverage_radius" in section:
        kwargs["coverage_radius"] = float(section["coverage_radius"])
    return ConstellationSpec(**kwargs)


def _resolve_sweep(raw, variable: str | None) -> SweepSpec:
    section = _as_mapping(raw, "sweep")
    _reject_unknown(section, _SWEEP_KEYS, "sweep")
    file_variable = section.get("variable")
    if file_variable is not None and variable is not None \
            and file_variable != variable:
        raise ConfigError(f"config sweeps {file_variable!r} but the command "
                          f"requires {variable!r}")
    resolved = file_variable or variable or "altitude"
    if resolved not in DEFAULT_GRIDS:
        raise ConfigError(f"sweep.variable must be one of "
                          f"{sorted(DEFAULT_GRIDS)}, got {resolved!r}")
    has_values = section.get("values") is not None
    has_range = any(section.get(k) is not None for k in ("start", "stop", "step"))
    if has_values and has_range:
        raise ConfigError("sweep accepts either values or start/stop/step, not both")
    if has_values:
        values = tuple(float(v) for v in section["values"])
    elif has_range:
        try:
            start = float(section["start"])
            stop = float(section["stop"])
            step = float(section["step"])
        except KeyError as exc:
            raise ConfigError(f"sweep range needs start, stop and step "
                              f"(missing {exc.args[0]!r})") from None
        values = grid_from_range(start, stop, step)
    else:
        values = grid_from_range(*DEFAULT_GRIDS[resolved])
    try:
        return SweepSpec(variable=resolved, values=values)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path=None, preset: str | None = None,
                seed_override: int | None = None,
                variable: str | None = None) -> ExperimentConfig:
    """Fully resolved study config from an optional YAML file.

    `preset` selects the environment when the file does not name one;
    `variable` pins the sweep variable (normally from the CLI command) and
    supplies its default grid and constellation geometry. `seed_override`
    wins over any seed in the file.
    """
    raw = {}
    if path is not None:
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        try:
            loaded = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            mark = getattr(exc, "problem_mark", None)
            where = f" (line {mark.line + 1})" if mark is not None else ""
            raise ConfigError(f"cannot parse config {path}{where}: {exc}") from exc
        raw = _as_mapping(loaded, str(path))
    _reject_unknown(raw, _TOP_KEYS, "")

    sweep = _resolve_sweep(raw.get("sweep"), variable)
    search_sec = _as_mapping(raw.get("search"), "search")
    _reject_unknown(search_sec, _SEARCH_KEYS, "search")
    solver_sec = _as_mapping(raw.get("solver"), "solver")
    _reject_unknown(solver_sec, _SOLVER_KEYS, "solver")

    seed = seed_override if seed_override is not None else int(raw.get("seed", 0))
    try:
        return ExperimentConfig(
            environment=_resolve_environment(raw.get("environment"), preset),
            constellation=_resolve_constellation(raw.get("constellation"),
                                                 sweep.variable),
            sweep=sweep,
            node_count=int(raw.get("node_count", 1000)),
            deployment_radius=float(raw.get("deployment_radius", 1000.0)),
            samples_per_anchor=int(raw.get("samples_per_anchor", 5)),
            trials=int(raw.get("trials", 1)),
            seed=seed,
            eval_distance=float(raw.get("eval_distance", 650.0)),
            eval_azimuths=int(raw.get("eval_azimuths", 8)),
            search=SearchConfig(**{k: float(v) if k != "grid_points" else int(v)
                                   for k, v in search_sec.items()}),
            solver=SolverConfig(**{k: int(v) if k == "max_iter" else float(v)
                                   for k, v in solver_sec.items()}),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def default_config(variable: str = "altitude",
                   preset: str = "urban", **overrides) -> ExperimentConfig:
    """Built-in defaults for one sweep variable, optionally overridden.

    Overrides replace whole fields of the resolved ExperimentConfig (for
    example sweep=SweepSpec(...), trials=5).
    """
    cfg = load_config(path=None, preset=preset, variable=variable)
    return replace(cfg, **overrides) if overrides else cfg
