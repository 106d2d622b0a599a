import numpy as np

from dataclasses import dataclass, field
from collections.abc import Mapping

from fisherboost.boosting.stumps import Stump

def response_matrix(
    stumps: list[Stump],
    X: np.ndarray,
    columns: Mapping[int, int] | None = None
) -> np.ndarray:
  """
  H = [h_j(x_i)] for the given stumps.

  :param stumps: Weak classifiers
  :param X: Feature matrix
  :param columns: Maps a stump's feature index to a column of `X` when `X` holds only
    the features the stumps reference (Haar windows); identity if None
  """
  X = np.asarray(X)
  H = np.empty((X.shape[0], len(stumps)), dtype=np.float64, order='F')
  for j, stump in enumerate(stumps):
    col = stump.feature_index if columns is None else columns[stump.feature_index]
    H[:, j] = stump.predict_column(X[:, col])
  return H

@dataclass
class StrongClassifier:
  """
  F(x) = sum_j w_j h_j(x) - b; predict = sign(F(x)) with sign(0) = +1.

  Boosted weights lie on the simplex; LAC/LDA post-processing replaces them by an
  unnormalized direction and records itself in `provenance['postprocess']`.
  """
  stumps: list[Stump]
  weights: np.ndarray
  offset: float = 0.0
  method: str = "fisherboost"
  provenance: dict = field(default_factory=dict)

  def __post_init__(self):
    self.weights = np.asarray(self.weights, dtype=np.float64)
    if self.weights.shape != (len(self.stumps),):
      raise ValueError(
        f"{len(self.stumps)} stumps but {self.weights.shape[0]} weights"
      )
    if self.provenance.get('postprocess') is None and len(self.stumps):
      if np.any(self.weights < 0) or abs(self.weights.sum() - 1.0) > 1e-10:
        raise ValueError("boosted weights must lie on the unit simplex")

  @property
  def n(self) -> int:
    return len(self.stumps)

  def scores(
      self,
      X: np.ndarray,
      columns: Mapping[int, int] | None = None
  ) -> np.ndarray:
    """sum_j w_j h_j(x), without the offset."""
    return response_matrix(self.stumps, X, columns) @ self.weights

  def decision_function(
      self,
      X: np.ndarray,
      columns: Mapping[int, int] | None = None
  ) -> np.ndarray:
    return self.scores(X, columns) - self.offset

  def predict(
      self,
      X: np.ndarray,
      columns: Mapping[int, int] | None = None
  ) -> np.ndarray:
    return np.where(self.decision_function(X, columns) >= 0, 1, -1)
