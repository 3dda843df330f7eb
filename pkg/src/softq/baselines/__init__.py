from softq.baselines.mlp import MlpModel, mlp_parameter_count, mlp_train
from softq.baselines.pqc import PqcCircuit, encode_qubit, pqc_forward, pqc_train, statevector

__all__ = ["MlpModel", "mlp_parameter_count", "mlp_train", "PqcCircuit", "encode_qubit",
           "pqc_forward", "pqc_train", "statevector"]
