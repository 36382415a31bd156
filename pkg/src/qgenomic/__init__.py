"""Quantum kernel and variational classifiers for genomic sequences, simulated exactly."""
from ._backend import BACKEND
from .feature_maps import FeatureMapConfig, build_feature_map, encode, encode_batch
from .kernel import cross_gram, gram_matrix, kernel_entry
from .metrics import ConfusionCounts, MetricsReport, auroc, confusion, metrics
from .pegasos import PegasosModel, pegasos_decision, pegasos_objective, pegasos_predict, train_pegasos, \
    verify_pegasos_bound
from .qsvc import QsvcModel, kkt_residual, qsvc_decision, qsvc_predict, train_qsvc
from .statevector import Circuit, Gate, Statevector, apply_gate, expectation_parity_z, inner_product, \
    run_circuit
from .variational import AnsatzConfig, VariationalModel, build_ansatz, gradient_variance_probe, \
    model_expectation, parameter_shift_gradient, squared_loss, train_variational, variational_predict

__version__ = "0.1.0"
