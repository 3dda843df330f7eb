"""Turning output firing probabilities into class labels."""

from __future__ import annotations

import numpy as np


def decide(output_probs, task: str = "binary") -> int:
    """Binary: 1 iff ``p(1) > 0.5`` (ties go to 0). Multiclass: argmax, lowest index on ties."""
    p = np.asarray(output_probs, dtype=float).ravel()
    if p.size == 0:
        raise ValueError("decide() needs at least one probability")
    if task == "binary":
        return int(p[0] > 0.5)
    if task == "multiclass":
        return int(np.argmax(p))
    raise ValueError(f"unknown task kind {task!r}")


def decide_batch(probs) -> np.ndarray:
    """Row-wise labels; one output column means a binary task."""
    probs = np.atleast_2d(np.asarray(probs, dtype=float))
    if probs.shape[1] == 1:
        return (probs[:, 0] > 0.5).astype(int)
    return np.argmax(probs, axis=1)
