"""Run a bank of filters on one simulated localisation record."""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import lie
from .charts import component_chart, make_chart
from .errors import NonFiniteState
from .filter import FilterState, GainConfig, filter_step, state_estimate
from .lie import GroupElement
from .scenario import (
    RNG_NAME,
    FilterSpec,
    ScenarioConfig,
    build_system,
    config_to_dict,
    integrate_truth,
    synthesize_measurements,
)
from .symmetry import transport_filter

FILTER_COLUMNS = ("theta_est", "x_est", "y_est", "pos_err", "ang_err")


@dataclass
class RunRecord:
    """Per-step truth and filter estimates.

    ``estimates`` has shape ``(filters, rows, 3)`` holding ``(theta, x, y)``;
    ``sigma_diag`` has shape ``(filters, rows, 3)`` and is not part of the
    CSV, so it is ``None`` for records read back from disk.
    """

    times: np.ndarray
    truth: np.ndarray
    estimates: np.ndarray
    pos_err: np.ndarray
    ang_err: np.ndarray
    sigma_diag: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)

    @property
    def n_filters(self) -> int:
        return self.estimates.shape[0]

    def header(self) -> list[str]:
        cols = ["t", "theta_true", "x_true", "y_true"]
        for i in range(1, self.n_filters + 1):
            cols += [f"{name}_{i}" for name in FILTER_COLUMNS]
        return cols

    def table(self) -> np.ndarray:
        parts = [self.times[:, None], self.truth]
        for i in range(self.n_filters):
            parts += [self.estimates[i], self.pos_err[i][:, None], self.ang_err[i][:, None]]
        return np.hstack(parts)


def _pose_row(pose: GroupElement) -> list[float]:
    return [float(pose.theta), float(pose.x[0]), float(pose.x[1])]


def initial_filters(config: ScenarioConfig, system) -> list[FilterState]:
    """Build the configured filter bank at ``t = 0``.

    With ``matched_filters`` every filter is the origin transport of one
    reference filter about the identity, so all start from the same estimate
    with mutually consistent ``Sigma0`` and ``Q``.
    """
    dtype = config.dtype
    charts = [make_chart(spec.chart, spec.origin, system) for spec in config.filters]
    if config.matched_filters:
        for spec in config.filters:
            if spec.Q is not None or spec.Sigma0 is not None or spec.initial_X is not None:
                raise ValueError(
                    "matched filters derive Q, Sigma0 and initial_X; do not set them per filter"
                )
        reference = FilterState(
            config.initial_estimate.astype(np.float64),
            config.Sigma0,
            component_chart(GroupElement.identity()),
            GainConfig(config.Q, config.R),
        )
        states = []
        for spec, chart in zip(config.filters, charts):
            state = transport_filter(reference, chart, system)
            if spec.R is not None:
                state = replace(state, gains=GainConfig(state.gains.Q, spec.R))
            states.append(state.astype(dtype))
        return states

    states = []
    for spec, chart in zip(config.filters, charts):
        X0 = spec.initial_X
        if X0 is None:
            X0 = system.relative(chart.origin, config.initial_estimate.astype(np.float64))
        gains = GainConfig(
            config.Q if spec.Q is None else spec.Q,
            config.R if spec.R is None else spec.R,
        )
        sigma = config.Sigma0 if spec.Sigma0 is None else spec.Sigma0
        states.append(FilterState(X0.astype(dtype), np.asarray(sigma, dtype=dtype), chart, gains))
    return states


def run(config: ScenarioConfig) -> RunRecord:
    dtype = config.dtype
    system = build_system(config)
    truth = integrate_truth(config)
    ys = synthesize_measurements(truth, system.landmarks, config.noise_std, config.noise_seed)
    u = np.asarray(config.velocity, dtype=dtype)
    states = initial_filters(config, system)

    n_rows, n_filters = len(truth), len(states)
    estimates = np.zeros((n_filters, n_rows, 3))
    sigma_diag = np.zeros((n_filters, n_rows, 3))
    digests = [hashlib.sha256() for _ in states]

    for k in range(n_rows):
        for i, state in enumerate(states):
            estimates[i, k] = _pose_row(state_estimate(state, system))
            sigma_diag[i, k] = np.diag(state.Sigma)
        if k + 1 == n_rows:
            break
        y = ys[k]
        for i, state in enumerate(states):
            digests[i].update(y.tobytes())
            try:
                states[i] = filter_step(state, u, y, system, config.dt)
            except NonFiniteState as exc:
                raise NonFiniteState(
                    f"filter {i + 1} became non-finite at step {k + 1}",
                    filter_index=i,
                    step=k + 1,
                ) from exc

    checksums = {d.hexdigest() for d in digests}
    assert len(checksums) <= 1, "filters consumed different measurement streams"

    truth_arr = np.array([_pose_row(p) for p in truth])
    pos_err = np.linalg.norm(estimates[:, :, 1:] - truth_arr[None, :, 1:], axis=2)
    ang_err = np.abs(lie.wrap_angle(estimates[:, :, 0] - truth_arr[None, :, 0]))
    metadata = {
        "rng": RNG_NAME,
        "landmark_seed": config.landmark_seed,
        "noise_seed": config.noise_seed,
        "precision": config.precision,
        "landmarks": system.landmarks.points.astype(float).tolist(),
        "measurement_sha256": checksums.pop() if checksums else None,
        "config": config_to_dict(config),
    }
    return RunRecord(
        np.arange(n_rows) * config.dt,
        truth_arr,
        estimates,
        pos_err,
        ang_err,
        sigma_diag,
        metadata,
    )


# -- CSV and plotting -------------------------------------------------------


def write_csv(record: RunRecord, path) -> Path:
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            fh.write("# " + json.dumps(record.metadata, sort_keys=True) + "\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(record.header())
            for row in record.table():
                writer.writerow([repr(float(v)) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write run record to {path}: {exc}") from exc
    return path


def read_csv(path) -> RunRecord:
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise OSError(f"cannot read run record {path}: {exc}") from exc
    metadata = {}
    if lines and lines[0].startswith("#"):
        metadata = json.loads(lines[0][1:])
        lines = lines[1:]
    rows = list(csv.reader(lines))
    header, body = rows[0], rows[1:]
    n_filters = (len(header) - 4) // len(FILTER_COLUMNS)
    data = np.array(body, dtype=float).reshape(len(body), len(header))
    estimates = np.zeros((n_filters, len(body), 3))
    pos_err = np.zeros((n_filters, len(body)))
    ang_err = np.zeros((n_filters, len(body)))
    for i in range(n_filters):
        base = 4 + i * len(FILTER_COLUMNS)
        estimates[i] = data[:, base:base + 3]
        pos_err[i] = data[:, base + 3]
        ang_err[i] = data[:, base + 4]
    return RunRecord(data[:, 0], data[:, 1:4], estimates, pos_err, ang_err, None, metadata)


def emit_plot_script(record: RunRecord, path, csv_name: str = "run.csv") -> Path:
    """Write a gnuplot script drawing trajectories and absolute errors from the CSV."""
    path = Path(path)
    n = record.n_filters
    traj = [f"'{csv_name}' using 3:4 with lines lw 2 title 'true'"]
    pos = []
    ang = []
    for i in range(n):
        base = 5 + i * len(FILTER_COLUMNS)
        traj.append(f"'{csv_name}' using {base + 1}:{base + 2} with lines title 'EqF {i + 1}'")
        pos.append(f"'{csv_name}' using 1:{base + 3} with lines title 'EqF {i + 1}'")
        ang.append(f"'{csv_name}' using 1:{base + 4} with lines title 'EqF {i + 1}'")
    script = "\n".join([
        "set datafile separator ','",
        "set datafile commentschars '#'",
        "set key autotitle columnhead",
        "set terminal pngcairo size 900,700",
        "set output 'trajectory.png'",
        "set xlabel 'x [m]'",
        "set ylabel 'y [m]'",
        "set size ratio -1",
        "plot " + ", \\\n     ".join(traj),
        "set size noratio",
        "set output 'errors.png'",
        "set multiplot layout 2,1",
        "set logscale y",
        "set xlabel 't [s]'",
        "set ylabel 'position error [m]'",
        "plot " + ", \\\n     ".join(pos),
        "set ylabel 'angle error [rad]'",
        "plot " + ", \\\n     ".join(ang),
        "unset multiplot",
        "",
    ])
    try:
        path.write_text(script)
    except OSError as exc:
        raise OSError(f"cannot write plot script to {path}: {exc}") from exc
    return path


# -- precision study ---------------------------------------------------------


@dataclass
class PrecisionStudy:
    """Deviation of each filter from a double-precision identity-origin reference."""

    origins: list
    deviation: np.ndarray  # (filters, rows) position deviation in meters
    angle_deviation: np.ndarray
    record: RunRecord
    reference: RunRecord

    @property
    def mean_deviation(self) -> np.ndarray:
        return self.deviation.mean(axis=1)


def sweep_precision(config: ScenarioConfig, precision: str = "single") -> PrecisionStudy:
    """Run the configured filter bank and compare with a double reference.

    The reference is a single filter about the identity with the scenario's
    tuning, run in double precision on the same scenario.
    """
    if not config.matched_filters:
        raise ValueError("the precision study needs matched filters")
    study_cfg = replace(config, precision=precision)
    ref_cfg = replace(config, precision="double", filters=[FilterSpec()])
    record = run(study_cfg)
    reference = run(ref_cfg)
    ref_est = reference.estimates[0]
    deviation = np.linalg.norm(record.estimates[:, :, 1:] - ref_est[None, :, 1:], axis=2)
    angle_dev = np.abs(lie.wrap_angle(record.estimates[:, :, 0] - ref_est[None, :, 0]))
    return PrecisionStudy(
        [spec.origin for spec in config.filters], deviation, angle_dev, record, reference
    )
