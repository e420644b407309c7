"""Scenario configuration, ground truth and synthetic landmark measurements."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import lie
from .charts import CHART_KINDS, COMPONENT
from .errors import ConfigError
from .lie import GroupElement
from .system import LandmarkSet, SE2Localisation, output

PRECISIONS = {"single": np.float32, "double": np.float64}
RNG_NAME = "numpy.random.PCG64"
STEP_TOL = 1e-9


@dataclass
class FilterSpec:
    """One filter of a run: chart kind and origin, optional explicit tuning.

    Unset ``Q``, ``R``, ``Sigma0`` and ``initial_X`` fall back to the
    scenario-level values, or are derived by origin transport when the
    scenario asks for matched filters.
    """

    chart: str = COMPONENT
    origin: GroupElement = field(default_factory=GroupElement.identity)
    Q: np.ndarray | None = None
    R: np.ndarray | None = None
    Sigma0: np.ndarray | None = None
    initial_X: GroupElement | None = None


@dataclass
class ScenarioConfig:
    initial_pose: GroupElement = field(
        default_factory=lambda: GroupElement.make(0.0, (0.7, 0.5))
    )
    velocity: tuple = (0.4, 0.5, 0.0)
    duration: float = 20.0
    dt: float = 0.1
    landmark_count: int = 5
    landmark_seed: int = 2022
    noise_std: float = 0.0
    noise_seed: int = 1
    precision: str = "double"
    # common initial estimate of every filter
    initial_estimate: GroupElement = field(
        default_factory=lambda: GroupElement.make(0.3, (1.2, 0.5))
    )
    Q: np.ndarray | None = None
    R: np.ndarray | None = None
    Sigma0: np.ndarray | None = None
    matched_filters: bool = True
    filters: list = field(default_factory=lambda: [FilterSpec()])

    def __post_init__(self):
        self.velocity = tuple(float(v) for v in self.velocity)
        if len(self.velocity) != 3:
            raise ConfigError("velocity needs three components (omega, v1, v2)")
        if not self.dt > 0:
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if self.duration < 0:
            raise ConfigError(f"duration must be non-negative, got {self.duration}")
        ratio = self.duration / self.dt
        if abs(ratio - round(ratio)) > STEP_TOL * max(1.0, ratio):
            raise ConfigError(
                f"duration {self.duration} is not a whole number of steps of {self.dt}"
            )
        if int(self.landmark_count) < 1:
            raise ConfigError("landmark_count must be at least 1")
        if self.precision not in PRECISIONS:
            raise ConfigError(f"precision must be one of {sorted(PRECISIONS)}")
        if self.noise_std < 0:
            raise ConfigError("noise_std must be non-negative")
        for spec in self.filters:
            if spec.chart not in CHART_KINDS:
                raise ConfigError(f"unknown chart kind {spec.chart!r}")
        n = 2 * int(self.landmark_count)
        if self.Q is None:
            self.Q = 0.1 * np.eye(3)
        if self.R is None:
            self.R = 0.3 * np.eye(n)
        if self.Sigma0 is None:
            self.Sigma0 = np.eye(3)
        self.Q = _matrix(self.Q, (3, 3), "Q")
        self.R = _matrix(self.R, (n, n), "R")
        self.Sigma0 = _matrix(self.Sigma0, (3, 3), "Sigma0")

    @property
    def steps(self) -> int:
        return int(round(self.duration / self.dt))

    @property
    def dtype(self):
        return np.dtype(PRECISIONS[self.precision])


def _matrix(value, shape, name):
    m = np.asarray(value, dtype=float)
    if m.shape != shape:
        raise ConfigError(f"{name} must have shape {shape}, got {m.shape}")
    return m


def study_origins() -> list[GroupElement]:
    return [GroupElement.make(0.0, (s, s)) for s in (1e3, 1e4, 1e5)]


def default_scenario() -> ScenarioConfig:
    """Circular-arc run with five random landmarks and three offset origins."""
    return ScenarioConfig(
        filters=[FilterSpec(COMPONENT, origin) for origin in study_origins()]
    )


def generate_landmarks(config: ScenarioConfig) -> LandmarkSet:
    rng = np.random.default_rng(config.landmark_seed)
    points = rng.standard_normal((config.landmark_count, 2))
    return LandmarkSet(points.astype(config.dtype))


def build_system(config: ScenarioConfig) -> SE2Localisation:
    return SE2Localisation(generate_landmarks(config))


def integrate_truth(config: ScenarioConfig) -> list[GroupElement]:
    """Poses at ``t = k dt``, ``k = 0..steps``, from ``P <- P exp(dt U)``."""
    dtype = config.dtype
    step = lie.exp(dtype.type(config.dt) * np.asarray(config.velocity, dtype=dtype))
    poses = [config.initial_pose.astype(dtype)]
    for _ in range(config.steps):
        poses.append(lie.compose(poses[-1], step))
    return poses


def synthesize_measurements(
    truth, landmarks: LandmarkSet, noise_std: float = 0.0, seed: int = 1
) -> np.ndarray:
    """Stacked landmark outputs, one row per pose, with optional Gaussian noise."""
    ys = np.stack([output(pose, landmarks) for pose in truth])
    if noise_std > 0:
        rng = np.random.default_rng(seed)
        ys = ys + (noise_std * rng.standard_normal(ys.shape)).astype(ys.dtype)
    return ys


# -- JSON config ----------------------------------------------------------

_POSE_KEYS = {"theta", "x"}


def _pose_from_json(value, where):
    if not isinstance(value, dict) or set(value) != _POSE_KEYS:
        raise ConfigError(f"{where}: a pose is an object with keys 'theta' and 'x'")
    return GroupElement.make(float(value["theta"]), [float(v) for v in value["x"]])


def _pose_to_json(pose):
    return {"theta": float(pose.theta), "x": [float(v) for v in pose.x]}


def _check_keys(data, allowed, where):
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected an object")
    unknown = set(data) - set(allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")


_FILTER_FIELDS = [f.name for f in fields(FilterSpec)]
_SCENARIO_FIELDS = [f.name for f in fields(ScenarioConfig)]
_POSE_FIELDS = {"initial_pose", "initial_estimate", "origin", "initial_X"}
_MATRIX_FIELDS = {"Q", "R", "Sigma0"}


def _values_from_json(data, where):
    out = {}
    for key, value in data.items():
        if value is None:
            out[key] = None
        elif key in _POSE_FIELDS:
            out[key] = _pose_from_json(value, f"{where}.{key}")
        elif key in _MATRIX_FIELDS:
            out[key] = np.asarray(value, dtype=float)
        else:
            out[key] = value
    return out


def config_from_dict(data: dict) -> ScenarioConfig:
    _check_keys(data, _SCENARIO_FIELDS, "config")
    values = _values_from_json(data, "config")
    if "filters" in values:
        specs = []
        for i, item in enumerate(values["filters"]):
            _check_keys(item, _FILTER_FIELDS, f"config.filters[{i}]")
            specs.append(FilterSpec(**_values_from_json(item, f"filters[{i}]")))
        values["filters"] = specs
    try:
        return ScenarioConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def _json_value(key, value):
    if value is None:
        return None
    if key in _POSE_FIELDS:
        return _pose_to_json(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, tuple):
        return list(value)
    return value


def config_to_dict(config: ScenarioConfig) -> dict:
    data = {}
    for f in fields(ScenarioConfig):
        value = getattr(config, f.name)
        if f.name == "filters":
            data["filters"] = [
                {g.name: _json_value(g.name, getattr(spec, g.name)) for g in fields(FilterSpec)}
                for spec in value
            ]
        else:
            data[f.name] = _json_value(f.name, value)
    return data


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    return config_from_dict(data)


def with_overrides(config: ScenarioConfig, **overrides) -> ScenarioConfig:
    """Copy of ``config`` with non-None overrides applied and re-validated."""
    values = {k: v for k, v in overrides.items() if v is not None}
    return replace(config, **values)
