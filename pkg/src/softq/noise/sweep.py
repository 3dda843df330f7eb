"""Accuracy of a trained network as the flip probability grows."""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from softq.network.decision import decide_batch
from softq.network.meanfield import mean_field_probs
from softq.network.topology import NetworkTopology
from softq.network.trajectory import trajectory_probs
from softq.noise.channels import Channel, Injection, NoisePolicy

SWEEP_COLUMNS = ("channel", "p", "mean_accuracy", "std_accuracy", "repetitions")


@dataclass(frozen=True)
class SweepRow:
    channel: str
    p: float
    mean_accuracy: float
    std_accuracy: float
    repetitions: int


def _accuracy(net, dataset, policy, rep_seed, shots):
    if policy.stochastic_realization and policy.active:
        probs = trajectory_probs(net, dataset.features, policy, shots=shots, seed=rep_seed)
    else:
        probs = mean_field_probs(net, dataset.features, policy)
    return float(np.mean(decide_batch(probs) == dataset.labels))


def noise_sweep(net: NetworkTopology, dataset, kind, probs: Sequence[float], repetitions: int = 100,
                seed: int = 0, injection: Injection | str = Injection.PRE_MEASUREMENT,
                stochastic: bool = False, shots: int = 1000, threads: int = 1) -> list[SweepRow]:
    """Test accuracy per flip probability, averaged over ``repetitions`` predictions.

    Mixed-channel (deterministic) evaluation gives the same accuracy on every
    repetition, so it is computed once and reported with zero spread.
    """
    kind = Channel.parse(kind)
    if not len(probs):
        raise ValueError("empty probability list")
    if repetitions < 1:
        raise ValueError("repetitions must be positive")

    def point(k_p):
        k, p = k_p
        policy = NoisePolicy(kind, float(p), injection, stochastic)
        if not (stochastic and policy.active):
            acc = _accuracy(net, dataset, policy, 0, shots)
            return SweepRow(kind.value, float(p), acc, 0.0, repetitions)
        accs = [
            _accuracy(net, dataset, policy, int(np.random.SeedSequence([seed, k, r]).generate_state(1)[0]), shots)
            for r in range(repetitions)
        ]
        return SweepRow(kind.value, float(p), float(np.mean(accs)), float(np.std(accs)), repetitions)

    items = list(enumerate(probs))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(point, items))
    else:
        rows = [point(it) for it in items]
    return sorted(rows, key=lambda r: r.p)


def write_sweep_csv(rows: Sequence[SweepRow], path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as f:
        w = csv.writer(f)
        w.writerow(SWEEP_COLUMNS)
        for r in rows:
            w.writerow([r.channel, repr(r.p), repr(r.mean_accuracy), repr(r.std_accuracy), r.repetitions])
    return path


LABELS = {"bit_flip": "Bit flip", "phase_flip": "Phase flip", "bit_phase_flip": "Bit-phase flip"}


def format_table(rows: Sequence[SweepRow]) -> str:
    """Percent accuracies with one row per channel and one column per flip probability."""
    probs = sorted({r.p for r in rows})
    channels = list(dict.fromkeys(r.channel for r in rows))
    cell = {(r.channel, r.p): r.mean_accuracy for r in rows}
    head = f"{'Noise channel':<16}" + "".join(f"{p:>8.2f}" for p in probs)
    lines = [head, "-" * len(head)]
    for ch in channels:
        vals = "".join(f"{100 * cell[(ch, p)]:>7.0f}%" if (ch, p) in cell else f"{'':>8}" for p in probs)
        lines.append(f"{LABELS.get(ch, ch):<16}" + vals)
    return "\n".join(lines)
