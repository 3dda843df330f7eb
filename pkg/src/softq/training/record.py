"""The persisted result of one training run."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

METRIC_COLUMNS = ("epoch", "loss", "train_acc", "test_acc")


@dataclass
class EpochMetrics:
    epoch: int
    loss: float
    train_acc: float
    test_acc: float


class TrainingDiverged(RuntimeError):
    pass


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


@dataclass
class RunRecord:
    model: str
    config: dict
    seed: int
    epochs: list[EpochMetrics] = field(default_factory=list)
    wall_time: float = 0.0
    final: dict = field(default_factory=dict)

    @property
    def final_test_acc(self) -> float:
        return self.epochs[-1].test_acc if self.epochs else float("nan")

    @property
    def final_train_acc(self) -> float:
        return self.epochs[-1].train_acc if self.epochs else float("nan")

    @property
    def losses(self) -> np.ndarray:
        return np.array([e.loss for e in self.epochs])

    def topology(self):
        from softq.network.topology import NetworkTopology

        return NetworkTopology.from_dict(self.final)

    def to_dict(self, include_wall_time: bool = True) -> dict:
        d = {
            "model": self.model,
            "config": _jsonable(self.config),
            "seed": self.seed,
            "epochs": [asdict(e) for e in self.epochs],
            "final": _jsonable(self.final),
        }
        if include_wall_time:
            d["wall_time"] = self.wall_time
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        return cls(d["model"], d["config"], d["seed"], [EpochMetrics(**e) for e in d["epochs"]],
                   d.get("wall_time", 0.0), d.get("final", {}))

    def write_metrics_csv(self, path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as f:
            w = csv.writer(f)
            w.writerow(METRIC_COLUMNS)
            for e in self.epochs:
                w.writerow([e.epoch, repr(e.loss), repr(e.train_acc), repr(e.test_acc)])
        return path

    def save(self, out_dir, stem: str = "run") -> dict:
        """Write the record and its metrics CSV; soft networks also get ``<stem>_topology.json``."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = {"record": out / f"{stem}.json", "metrics": out / f"{stem}_metrics.csv"}
        paths["record"].write_text(json.dumps(self.to_dict(), indent=1))
        self.write_metrics_csv(paths["metrics"])
        if "layer_sizes" in self.final and "edges" in self.final:
            paths["topology"] = out / f"{stem}_topology.json"
            self.topology().save(paths["topology"])
        return paths

    @classmethod
    def load(cls, path) -> "RunRecord":
        return cls.from_dict(json.loads(Path(path).read_text()))
