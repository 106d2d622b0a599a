import logging
import math

import numpy as np

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from collections.abc import Sequence

from fisherboost.utils.random import substream

logger = logging.getLogger('fisherboost.boosting.stumps')

# relative tolerance under which two edges count as tied
TIE_TOLERANCE = 1e-12

@dataclass(frozen=True)
class Stump:
  """
  Decision stump h(x) = polarity * sign(x[feature_index] - threshold), with sign(0) = +1.
  """
  feature_index: int
  threshold: float
  polarity: int

  def __post_init__(self):
    if self.polarity not in (1, -1):
      raise ValueError(f"polarity must be +1 or -1, got {self.polarity}")

  def predict_column(self, values: np.ndarray) -> np.ndarray:
    """Outputs on a vector of this stump's feature values."""
    values = np.asarray(values, dtype=np.float64)
    return np.where(values >= self.threshold, self.polarity, -self.polarity).astype(np.float64)

  def predict(self, X: np.ndarray) -> np.ndarray:
    """Outputs on an m x d feature matrix."""
    return self.predict_column(np.asarray(X)[:, self.feature_index])

  def to_dict(self) -> dict:
    return {
      'feature_index': int(self.feature_index),
      'threshold': f"{self.threshold:.17g}",
      'polarity': int(self.polarity)
    }

  @classmethod
  def from_dict(cls, record: dict) -> 'Stump':
    return cls(
      feature_index=int(record['feature_index']),
      threshold=float(record['threshold']),
      polarity=int(record['polarity'])
    )

  def remap(self, feature_index: int) -> 'Stump':
    return Stump(feature_index, self.threshold, self.polarity)

def _scan_chunk(
    X: np.ndarray,
    a: np.ndarray,
    total: float,
    tol: float,
    features: np.ndarray
) -> list[tuple[float, int, float, int]]:
  """
  Best stump of each feature in `features` by one sort and a cumulative sweep.

  Candidate thresholds, in increasing order: one below the minimum, the midpoints between
  consecutive distinct sorted values, one above the maximum. With L = sum of a_i over
  examples below the threshold, the edge is T - 2L for polarity +1 and 2L - T for -1.

  :return: (edge, feature, threshold, polarity) per feature
  """
  cols = X[:, features]
  m = cols.shape[0]
  order = np.argsort(cols, axis=0, kind='stable')
  xs = np.take_along_axis(cols, order, axis=0)
  cs = np.cumsum(a[order], axis=0)

  below = np.empty((m + 1, len(features)))
  below[0] = 0.0
  below[1:m] = cs[:-1]
  below[m] = total
  valid = np.ones_like(below, dtype=bool)
  valid[1:m] = xs[1:] != xs[:-1]

  edge_pos = np.where(valid, total - 2.0 * below, -np.inf)
  edge_neg = np.where(valid, 2.0 * below - total, -np.inf)
  best = np.maximum(edge_pos, edge_neg)
  best_edge = best.max(axis=0)

  results = []
  for k, feature in enumerate(features):
    row = int(np.argmax(best[:, k] >= best_edge[k] - tol))
    polarity = 1 if edge_pos[row, k] >= best_edge[k] - tol else -1
    if row == 0:
      threshold = xs[0, k] - 1.0
    elif row == m:
      threshold = xs[m - 1, k] + 1.0
    else:
      threshold = 0.5 * (xs[row - 1, k] + xs[row, k])
    results.append((float(best_edge[k]), int(feature), float(threshold), polarity))
  return results

def best_stump(
    X: np.ndarray,
    y: np.ndarray,
    u: np.ndarray,
    feature_subset: Sequence[int] | None = None,
    threads: int = 1,
    chunk_size: int = 256
) -> tuple[Stump, float]:
  """
  Find the stump maximizing the edge sum_i u_i y_i h(x_i).

  Ties (edges within a relative 1e-12) go to the lowest feature index, then the smallest
  threshold, then polarity +1. The reduction is independent of `threads`.

  :param X: m x d feature matrix
  :param y: +1/-1 labels
  :param u: Example weights (the column-generation duals; any finite reals)
  :param feature_subset: Features to search; all features if None
  :param threads: Worker threads scanning disjoint feature chunks
  :return: (best stump, its edge)
  """
  X = np.asarray(X, dtype=np.float64)
  y = np.asarray(y, dtype=np.float64)
  u = np.asarray(u, dtype=np.float64)
  if X.ndim != 2 or X.shape[0] != y.shape[0] or u.shape != y.shape:
    raise ValueError(f"inconsistent shapes: X {X.shape}, y {y.shape}, u {u.shape}")
  if not np.all(np.isfinite(u)):
    raise ValueError("example weights must be finite")

  features = np.arange(X.shape[1]) if feature_subset is None else np.unique(np.asarray(feature_subset, dtype=np.int64))
  if features.size == 0:
    raise ValueError("feature subset must not be empty")
  if features[0] < 0 or features[-1] >= X.shape[1]:
    raise ValueError("feature index out of range")

  a = u * y
  total = float(a.sum())
  tol = TIE_TOLERANCE * max(float(np.abs(u).sum()), np.finfo(float).tiny)
  chunks = [features[i:i + chunk_size] for i in range(0, features.size, chunk_size)]

  if threads > 1 and len(chunks) > 1:
    with ThreadPoolExecutor(max_workers=threads) as executor:
      scanned = list(executor.map(lambda chunk: _scan_chunk(X, a, total, tol, chunk), chunks))
  else:
    scanned = [_scan_chunk(X, a, total, tol, chunk) for chunk in chunks]

  # chunks are in feature order, so the first near-best entry wins ties
  candidates = [c for chunk in scanned for c in chunk]
  top = max(c[0] for c in candidates)
  edge, feature, threshold, polarity = next(c for c in candidates if c[0] >= top - tol)
  return Stump(feature, threshold, polarity), edge

def sample_features(total: int, fraction: float, seed: int = 0) -> list[int]:
  """
  Draw ceil(fraction * total) distinct feature indices uniformly without replacement.

  :param total: Number of available features
  :param fraction: Fraction in (0, 1]
  :param seed: Seed of the 'features' sub-stream
  :return: Sorted list of indices
  """
  if not 0 < fraction <= 1:
    raise ValueError(f"fraction must lie in (0, 1], got {fraction}")
  if total < 1:
    raise ValueError("total must be >= 1")
  count = min(total, math.ceil(round(fraction * total, 9)))
  if count == total:
    return list(range(total))
  rng = substream(seed, 'features')
  return sorted(int(i) for i in rng.choice(total, size=count, replace=False))
