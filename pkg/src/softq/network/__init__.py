"""Soft quantum neural networks and the engines that run them forward."""

from softq.network.decision import decide, decide_batch
from softq.network.encoding import NeuronState, encode_feature
from softq.network.meanfield import ForwardResult, mean_field_forward, mean_field_probs, run_mean_field
from softq.network.oracle import OracleResult, enumeration_oracle
from softq.network.topology import NetworkTopology, parameter_count
from softq.network.trajectory import trajectory_forward, trajectory_probs

__all__ = [
    "ForwardResult",
    "NetworkTopology",
    "NeuronState",
    "OracleResult",
    "decide",
    "decide_batch",
    "encode_feature",
    "enumeration_oracle",
    "mean_field_forward",
    "mean_field_probs",
    "parameter_count",
    "run_mean_field",
    "trajectory_forward",
    "trajectory_probs",
]
