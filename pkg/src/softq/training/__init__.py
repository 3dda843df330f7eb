"""Exact-gradient Adam training of soft quantum networks."""

from softq.training.adam import AdamState, adam_step
from softq.training.gradient import analytic_gradient, finite_difference_gradient, loss_and_gradient
from softq.training.loss import mse_loss
from softq.training.record import EpochMetrics, RunRecord, TrainingDiverged
from softq.training.trainer import TrainConfig, accuracy, optimize, train_network

__all__ = [
    "AdamState",
    "EpochMetrics",
    "RunRecord",
    "TrainConfig",
    "TrainingDiverged",
    "accuracy",
    "adam_step",
    "analytic_gradient",
    "finite_difference_gradient",
    "loss_and_gradient",
    "mse_loss",
    "optimize",
    "train_network",
]
