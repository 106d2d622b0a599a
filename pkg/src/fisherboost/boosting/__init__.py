from fisherboost.boosting.adaboost import DiscreteBooster, train_adaboost, train_asymboost
from fisherboost.boosting.classifier import StrongClassifier, response_matrix
from fisherboost.boosting.column_generation import DualCertificate, TotallyCorrectiveBooster, TraceRow, assemble_qp, dual_objective, primal_objective, recover_dual, train_totally_corrective, write_trace
from fisherboost.boosting.methods import METHODS, MethodTrainer, check_method
from fisherboost.boosting.postprocess import ClassStats, estimate_stats, lac_weights, lda_weights, postprocess
from fisherboost.boosting.qmatrix import QMatrix, build_q
from fisherboost.boosting.stumps import Stump, best_stump, sample_features
