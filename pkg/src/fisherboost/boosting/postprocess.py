import logging

import numpy as np
from scipy import linalg

from dataclasses import dataclass, replace
from typing import Literal

from fisherboost.boosting.classifier import StrongClassifier
from fisherboost.utils.errors import PostprocessError

logger = logging.getLogger('fisherboost.boosting.postprocess')

@dataclass(frozen=True)
class ClassStats:
  """
  Per-class moments of the weak-classifier responses.

  :param mu1: Mean response vector of the positives
  :param mu2: Mean response vector of the negatives
  :param sigma1: Shrunk covariance of the positives
  :param sigma2: Shrunk covariance of the negatives
  :param shrinkage: Shrinkage intensity used for both covariances
  """
  mu1: np.ndarray
  mu2: np.ndarray
  sigma1: np.ndarray
  sigma2: np.ndarray
  shrinkage: float
  m1: int
  m2: int

def shrink(cov: np.ndarray, shrinkage: float) -> np.ndarray:
  """(1 - s) cov + s trace(cov)/n I."""
  n = cov.shape[0]
  shrunk = (1.0 - shrinkage) * cov
  shrunk.flat[::n + 1] += shrinkage * np.trace(cov) / n
  return shrunk

def estimate_stats(
    h_matrix: np.ndarray,
    labels: np.ndarray,
    shrinkage: float = 1e-3
) -> ClassStats:
  """
  Sample means and unbiased, shrunk sample covariances per class.

  :param h_matrix: m x n weak-classifier outputs
  :param labels: +1/-1 labels
  :param shrinkage: Shrinkage intensity in [0, 1]
  :raises ValueError: If a class has fewer than 2 members
  """
  H = np.asarray(h_matrix, dtype=np.float64)
  labels = np.asarray(labels)
  if not 0 <= shrinkage <= 1:
    raise ValueError("shrinkage must lie in [0, 1]")
  pos, neg = H[labels == 1], H[labels == -1]
  if len(pos) < 2 or len(neg) < 2:
    raise ValueError(
      f"class statistics need at least 2 examples per class (m1={len(pos)}, m2={len(neg)})"
    )

  def moments(block: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mu = block.mean(axis=0)
    centered = block - mu
    cov = centered.T @ centered / (len(block) - 1)
    return mu, shrink(cov, shrinkage)

  mu1, sigma1 = moments(pos)
  mu2, sigma2 = moments(neg)
  return ClassStats(mu1, mu2, sigma1, sigma2, shrinkage, len(pos), len(neg))

def _cholesky_solve(matrix: np.ndarray, rhs: np.ndarray, what: str) -> np.ndarray:
  try:
    factor = linalg.cho_factor(matrix, lower=True)
  except linalg.LinAlgError as e:
    raise PostprocessError(
      f"{what} is not positive definite after shrinkage ({e}); increase the shrinkage"
    ) from None
  return linalg.cho_solve(factor, rhs)

def _check_direction(w: np.ndarray, what: str) -> None:
  if not np.any(w):
    logger.warning(f"{what}: mu1 == mu2, the direction is zero and the classifier is degenerate")

def lac_weights(stats: ClassStats) -> tuple[np.ndarray, float]:
  """
  Linear asymmetric classifier: w = Sigma1^{-1}(mu1 - mu2), b = w'mu2.

  :raises PostprocessError: If Sigma1 is singular after shrinkage
  """
  w = _cholesky_solve(stats.sigma1, stats.mu1 - stats.mu2, "positive-class covariance")
  _check_direction(w, "LAC")
  return w, float(w @ stats.mu2)

def lda_weights(
    stats: ClassStats,
    m1: int | None = None,
    m2: int | None = None
) -> tuple[np.ndarray, float]:
  """
  Fisher LDA: C_w w = mu1 - mu2 with C_w = (m1/m) Sigma1 + (m2/m) Sigma2; b = w'mu2 by default.

  :raises PostprocessError: If C_w is singular after shrinkage
  """
  m1 = stats.m1 if m1 is None else m1
  m2 = stats.m2 if m2 is None else m2
  m = m1 + m2
  within = (m1 / m) * stats.sigma1 + (m2 / m) * stats.sigma2
  w = _cholesky_solve(within, stats.mu1 - stats.mu2, "within-class covariance")
  _check_direction(w, "LDA")
  return w, float(w @ stats.mu2)

def fisher_ratio(w: np.ndarray, stats: ClassStats) -> float:
  """w'(mu1 - mu2) / sqrt(w' Sigma1 w), the quantity LAC maximizes."""
  return float(w @ (stats.mu1 - stats.mu2) / np.sqrt(w @ stats.sigma1 @ w))

def postprocess(
    classifier: StrongClassifier,
    h_matrix: np.ndarray,
    labels: np.ndarray,
    kind: Literal["lac", "lda"],
    shrinkage: float = 1e-3
) -> StrongClassifier:
  """
  Replace a classifier's weights by the LAC or LDA direction estimated on `h_matrix`.

  :param h_matrix: Responses of the classifier's stumps on the calibration data
  :param kind: 'lac' or 'lda'
  :return: New classifier with provenance['postprocess'] = kind and offset b = w'mu2
  """
  stats = estimate_stats(h_matrix, labels, shrinkage)
  if kind == "lac":
    w, b = lac_weights(stats)
  elif kind == "lda":
    w, b = lda_weights(stats)
  else:
    raise ValueError(f"unknown post-processing {kind!r}")
  provenance = dict(classifier.provenance, postprocess=kind)
  return replace(classifier, weights=w, offset=b, provenance=provenance)
