"""CSV writers/readers and run manifests."""

from __future__ import annotations

import csv
import json
import platform
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from . import __version__
from .core import SimParams, SwarmState
from .montecarlo import SweepTable
from .survival import Frame, TrialRecord, padded_survived

SWEEP_COLUMNS = (
    "n", "strategy", "trials", "p_eaten_mean", "p_eaten_std",
    "p_eaten_q25", "p_eaten_q50", "p_eaten_q75",
    "t_alive_mean", "t_alive_std", "n_eaten_mean",
)
METRICS_COLUMNS = ("step", "diameter", "velocity_std", "n_groups", "n_survived", "p_eaten", "t_bar_alive")


def fmt(x: float) -> str:
    """17 significant digits: parses back to the identical double."""
    return format(float(x), ".17g")


def _axis_columns(prefix: str, dims: int) -> List[str]:
    return [f"{prefix}{k}" for k in range(1, dims + 1)]


def _open_for_write(path):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        return path.open("w", newline="", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def write_school(state: SwarmState, path) -> Path:
    cols = ["id"] + _axis_columns("x", state.dims) + _axis_columns("v", state.dims)
    with _open_for_write(path) as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for i in range(state.n):
            w.writerow([i] + [fmt(c) for c in state.positions[i]] + [fmt(c) for c in state.velocities[i]])
    return Path(path)


def read_school(path) -> SwarmState:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    dims = sum(1 for c in rows[0] if c.startswith("x"))
    x = np.array([[float(r[f"x{k}"]) for k in range(1, dims + 1)] for r in rows])
    v = np.array([[float(r[f"v{k}"]) for k in range(1, dims + 1)] for r in rows])
    return SwarmState(x, v)


def write_trajectory(record: TrialRecord, path) -> Path:
    """One row per agent per recorded frame; eaten prey stay listed with ``alive = 0``."""
    if not record.frames:
        raise ValueError("record holds no frames; run with keep_frames=True")
    dims = record.frames[0].positions.shape[1]
    cols = ["step", "agent_id", "kind", "alive"] + _axis_columns("x", dims) + _axis_columns("v", dims)
    with _open_for_write(path) as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for fr in record.frames:
            for i in range(len(fr.positions)):
                w.writerow([fr.step, i, "prey", int(fr.alive[i])]
                           + [fmt(c) for c in fr.positions[i]] + [fmt(c) for c in fr.velocities[i]])
            w.writerow([fr.step, len(fr.positions), "predator", 1]
                       + [fmt(c) for c in fr.predator_position] + [fmt(c) for c in fr.predator_velocity])
    return Path(path)


def read_trajectory(path) -> List[Frame]:
    frames: Dict[int, dict] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        dims = sum(1 for c in reader.fieldnames if c.startswith("x"))
        for row in reader:
            step = int(row["step"])
            fr = frames.setdefault(step, {"prey": [], "pred": None})
            pos = [float(row[f"x{k}"]) for k in range(1, dims + 1)]
            vel = [float(row[f"v{k}"]) for k in range(1, dims + 1)]
            if row["kind"] == "prey":
                fr["prey"].append((int(row["agent_id"]), bool(int(row["alive"])), pos, vel))
            elif row["kind"] == "predator":
                fr["pred"] = (pos, vel)
            else:
                raise ValueError(f"{path}: unknown agent kind {row['kind']!r}")
    out = []
    for step in sorted(frames):
        prey = sorted(frames[step]["prey"])
        pred = frames[step]["pred"]
        out.append(Frame(
            step=step,
            positions=np.array([p[2] for p in prey]).reshape(len(prey), dims),
            velocities=np.array([p[3] for p in prey]).reshape(len(prey), dims),
            alive=np.array([p[1] for p in prey], dtype=bool),
            predator_position=np.array(pred[0]) if pred else np.full(dims, np.nan),
            predator_velocity=np.array(pred[1]) if pred else np.full(dims, np.nan),
        ))
    return out


def write_survival(record: TrialRecord, path) -> Path:
    """``step, n_survived`` for steps 0..t_max; early-ended runs are padded."""
    with _open_for_write(path) as fh:
        w = csv.writer(fh)
        w.writerow(["step", "n_survived"])
        for t, n in enumerate(padded_survived(record)):
            w.writerow([t, int(n)])
    return Path(path)


def read_survival(path) -> np.ndarray:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return np.array([int(r["n_survived"]) for r in rows], dtype=int)


def write_sweep(table: SweepTable, path) -> Path:
    with _open_for_write(path) as fh:
        w = csv.writer(fh)
        w.writerow(SWEEP_COLUMNS)
        for r in table.rows:
            w.writerow([r.n, r.strategy.value, r.trials] + [fmt(getattr(r, c)) for c in SWEEP_COLUMNS[3:]])
    return Path(path)


def read_sweep(path) -> List[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def write_metrics(rows: List[tuple], path) -> Path:
    with _open_for_write(path) as fh:
        w = csv.writer(fh)
        w.writerow(METRICS_COLUMNS)
        for step, diam, vstd, groups, n_surv, pe, tbar in rows:
            w.writerow([step, fmt(diam), fmt(vstd), groups, n_surv, fmt(pe), fmt(tbar)])
    return Path(path)


@dataclass
class RunManifest:
    """Everything needed to replay a subcommand bit-exactly."""

    subcommand: str
    params: dict
    seed: Optional[int]
    preset: Optional[str] = None
    options: dict = field(default_factory=dict)
    outputs: List[str] = field(default_factory=list)
    duration_s: float = 0.0
    version: str = __version__
    python: str = field(default_factory=platform.python_version)
    numpy: str = np.__version__

    def write(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return path

    @classmethod
    def read(cls, path) -> "RunManifest":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(**data)

    def sim_params(self) -> SimParams:
        from .config import loads_config

        lines = [f"{k} = {'none' if v is None else v}" for k, v in self.params.items()]
        return loads_config("\n".join(lines))
