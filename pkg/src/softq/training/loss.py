from __future__ import annotations

import numpy as np


def mse_loss(preds, labels) -> float:
    """Mean over samples of the squared Euclidean distance between prediction and target."""
    preds = np.atleast_2d(np.asarray(preds, dtype=float))
    labels = np.asarray(labels, dtype=float)
    if labels.ndim == 1:
        labels = labels[:, None] if preds.shape[1] == 1 else labels[None, :]
    if preds.shape[0] == 0:
        raise ValueError("mse_loss of an empty batch")
    if preds.shape != labels.shape:
        raise ValueError(f"prediction shape {preds.shape} != label shape {labels.shape}")
    return float(np.mean(np.sum((labels - preds) ** 2, axis=1)))
