from fisherboost.boosting import METHODS, StrongClassifier, train_adaboost, train_asymboost, train_totally_corrective
from fisherboost.cascade import MultiExitCascade, evaluate_cascade, train_cascade, train_strong
from fisherboost.data import Dataset, load_dataset, save_dataset
from fisherboost.model_file import load_model, save_model
from fisherboost.solvers import eg_solve, reference_solve

__version__ = "0.1.0"
