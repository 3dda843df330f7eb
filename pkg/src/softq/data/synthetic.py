"""Small labelled datasets: XOR and the circles / moons benchmarks."""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from sklearn.datasets import make_circles, make_moons

from softq.network.encoding import FEATURE_RANGE


@dataclass(frozen=True)
class Dataset:
    """Features in the encoder's domain plus integer class labels.

    ``targets(n_outputs)`` turns the labels into training targets: a scalar
    column for single-output networks, one-hot rows otherwise.
    """

    features: np.ndarray
    labels: np.ndarray
    n_classes: int = 2
    split: str = "train"
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        x = np.asarray(self.features, dtype=float)
        y = np.asarray(self.labels, dtype=int)
        if x.ndim != 2 or x.shape[0] == 0:
            raise ValueError(f"features must be a non-empty N x d array, got {x.shape}")
        if y.shape != (x.shape[0],):
            raise ValueError(f"{y.shape[0] if y.ndim else 0} labels for {x.shape[0]} samples")
        lo, hi = FEATURE_RANGE
        if not np.all(np.isfinite(x)) or x.min() < lo or x.max() > hi:
            raise ValueError(f"features must lie in [{lo}, {hi}]")
        if y.min() < 0 or y.max() >= self.n_classes:
            raise ValueError(f"labels must lie in 0..{self.n_classes - 1}")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "features", x)
        object.__setattr__(self, "labels", y)

    def __len__(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def targets(self, n_outputs: int = 1) -> np.ndarray:
        if n_outputs == 1:
            if self.n_classes != 2:
                raise ValueError("a single output neuron only fits a two-class dataset")
            return self.labels[:, None].astype(float)
        if n_outputs != self.n_classes:
            raise ValueError(f"{n_outputs} outputs for {self.n_classes} classes")
        return np.eye(self.n_classes)[self.labels]

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_classes)

    def digest(self) -> str:
        h = hashlib.sha256(self.features.tobytes())
        h.update(self.labels.tobytes())
        return h.hexdigest()[:16]

    def to_csv(self, path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as f:
            w = csv.writer(f)
            w.writerow([f"x{k + 1}" for k in range(self.n_features)] + ["label"])
            for x, y in zip(self.features, self.labels):
                w.writerow([repr(float(v)) for v in x] + [int(y)])
        return path


def xor_dataset() -> tuple[Dataset, Dataset]:
    """The XOR truth table; the same four points serve as train and test set."""
    x = np.array([[0, 0], [0, 1], [1, 0], [1, 1]], dtype=float)
    y = np.array([0, 1, 1, 0])
    prov = {"generator": "xor"}
    return Dataset(x, y, 2, "train", prov), Dataset(x, y, 2, "test", prov)


def _balanced(n: int) -> tuple[int, int]:
    return n - n // 2, n // 2


def _scale_jointly(parts, feature_range):
    lo_t, hi_t = feature_range
    allx = np.vstack(parts)
    lo, hi = allx.min(axis=0), allx.max(axis=0)
    out = [lo_t + (hi_t - lo_t) * (x - lo) / (hi - lo) for x in parts]
    return [np.clip(x, lo_t, hi_t) for x in out]


def _two_split(maker, kind, n_train, n_test, seed, feature_range, **kw):
    if n_train <= 0 or n_test <= 0:
        raise ValueError("split sizes must be positive")
    ss = np.random.SeedSequence(seed)
    s_train, s_test = (int(c.generate_state(1)[0]) for c in ss.spawn(2))
    xa, ya = maker(n_samples=_balanced(n_train), random_state=s_train, **kw)
    xb, yb = maker(n_samples=_balanced(n_test), random_state=s_test, **kw)
    xa, xb = _scale_jointly([xa, xb], feature_range)
    prov = {"generator": kind, "seed": seed, "feature_range": list(feature_range), **kw}
    return Dataset(xa, ya, 2, "train", prov), Dataset(xb, yb, 2, "test", prov)


def circles_dataset(n_train: int = 200, n_test: int = 100, seed: int = 0, noise: float = 0.05,
                    factor: float = 0.5, feature_range=(-1.0, 1.0)) -> tuple[Dataset, Dataset]:
    """Two noisy concentric circles (outer radius 1, inner ``factor``), class 1 inside.

    Both splits are min-max scaled together. The default range is centred on
    zero: with angle encoding a perceptron's output is multilinear in the
    inputs' read-out probabilities, which cannot single out the middle of a
    range where those probabilities are monotone.
    """
    return _two_split(make_circles, "circles", n_train, n_test, seed, feature_range,
                      noise=noise, factor=factor)


def moons_dataset(n_train: int = 200, n_test: int = 100, seed: int = 0, noise: float = 0.1,
                  feature_range=(0.0, 1.0)) -> tuple[Dataset, Dataset]:
    """Two interleaving half moons, both splits min-max scaled together."""
    return _two_split(make_moons, "moons", n_train, n_test, seed, feature_range, noise=noise)
