"""Running an :class:`ExperimentConfig` from data loading to evaluation."""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from softq.baselines.mlp import MlpModel, mlp_train
from softq.baselines.pqc import PqcCircuit, pqc_forward, pqc_train
from softq.config import ExperimentConfig, NoiseConfig
from softq.data.mnist import load_from_dir, make_subdataset
from softq.data.synthetic import Dataset, circles_dataset, moons_dataset, xor_dataset
from softq.network.decision import decide_batch
from softq.network.meanfield import mean_field_probs
from softq.network.oracle import enumeration_oracle
from softq.network.topology import NetworkTopology
from softq.network.trajectory import trajectory_probs
from softq.noise.channels import NoisePolicy
from softq.training.record import RunRecord
from softq.training.trainer import TrainConfig, train_network

DATA_ENV = "SOFTQ_DATA_DIR"
ENGINES = ("meanfield", "trajectory", "oracle")


class DataError(RuntimeError):
    """The requested dataset is missing or unreadable."""


def data_root() -> Path:
    return Path(os.environ.get(DATA_ENV, Path.home() / ".softq" / "data"))


def noise_policy(cfg: NoiseConfig) -> NoisePolicy:
    return NoisePolicy(cfg.channel, cfg.p, cfg.injection, cfg.stochastic_realization)


def load_datasets(cfg: ExperimentConfig, root: Path | None = None) -> tuple[Dataset, Dataset]:
    d = cfg.data
    seed = 0 if d.seed is None else d.seed
    if cfg.task == "xor":
        return xor_dataset()
    if cfg.task == "circles":
        return circles_dataset(d.n_train, d.n_test, seed, 0.05 if d.noise is None else d.noise)
    if cfg.task == "moons":
        return moons_dataset(d.n_train, d.n_test, seed, 0.1 if d.noise is None else d.noise)
    root = data_root() if root is None else Path(root)
    try:
        train_imgs, test_imgs = load_from_dir(root)
    except (FileNotFoundError, ValueError) as exc:
        raise DataError(f"MNIST not available under {root} ({exc}); run `softq fetch-mnist` "
                        f"or set {DATA_ENV}") from None
    return make_subdataset(train_imgs, d.classes, d.per_class_cap, seed, test_imgs, d.side,
                           test_cap=d.test_cap)


def n_outputs(cfg: ExperimentConfig, train: Dataset) -> int:
    if cfg.outputs is not None:
        return cfg.outputs
    return 1 if train.n_classes == 2 and cfg.task != "mnist" else train.n_classes


def soft_layer_sizes(cfg: ExperimentConfig, train: Dataset) -> tuple[int, ...]:
    return (train.n_features * cfg.parallel_encoding_factor, *cfg.hidden, n_outputs(cfg, train))


def run_experiment(cfg: ExperimentConfig, train: Dataset, test: Dataset) -> RunRecord:
    opt = cfg.optimizer
    meta = {"experiment": cfg.to_dict()}
    if cfg.model in ("sqp", "sqfnn", "smp"):
        tc = TrainConfig(soft_layer_sizes(cfg, train), cfg.parallel_encoding_factor, opt.epochs, opt.lr,
                         opt.beta1, opt.beta2, opt.epsilon, cfg.seed, cfg.init_low, cfg.init_high,
                         cfg.train_noise.model_dump())
        return train_network(tc, train, test, noise_policy(cfg.eval_noise), meta)
    if cfg.model == "pqc":
        n_qubits = train.n_features * cfg.parallel_encoding_factor
        if n_qubits != cfg.pqc.n_qubits:
            raise ValueError(f"{train.n_features} features x{cfg.parallel_encoding_factor} need "
                             f"{n_qubits} qubits, config says {cfg.pqc.n_qubits}")
        rec = pqc_train(n_qubits, cfg.pqc.depth, train, test, opt.epochs, opt.lr, cfg.seed,
                        cfg.pqc.r, cfg.parallel_encoding_factor)
    else:
        sizes = (train.n_features, *cfg.hidden, n_outputs(cfg, train))
        rec = mlp_train(sizes, train, test, opt.epochs, opt.lr, cfg.seed)
    rec.config = {**meta, **rec.config}
    return rec


def predict_probs(record: RunRecord, X, engine: str = "meanfield", noise: NoisePolicy | None = None,
                  shots: int = 10000, seed: int = 0) -> np.ndarray:
    """Output probabilities of a trained model, shape (B, n_outputs)."""
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}; choose from {', '.join(ENGINES)}")
    if record.model == "pqc":
        return pqc_forward(PqcCircuit.from_dict(record.final), X)[:, None]
    if record.model == "mlp":
        m = record.final
        return MlpModel(tuple(m["sizes"]), np.array(m["params"])).forward(X)
    net = NetworkTopology.from_dict(record.final)
    if engine == "meanfield":
        return mean_field_probs(net, X, noise)
    if engine == "trajectory":
        return trajectory_probs(net, X, noise, shots=shots, seed=seed)
    return np.array([enumeration_oracle(net, x, noise).output_probs for x in np.atleast_2d(X)])


def evaluate(record: RunRecord, data: Dataset, **kw) -> float:
    return float(np.mean(decide_batch(predict_probs(record, data.features, **kw)) == data.labels))
