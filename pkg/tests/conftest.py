import numpy as np
import pytest

from fisherboost.data import gen_toy_2d, order_by_label

@pytest.fixture
def rng() -> np.random.Generator:
  return np.random.default_rng(20240917)

@pytest.fixture
def toy():
  """Small label-ordered 2-D problem: 40 positives, 120 negatives."""
  return order_by_label(gen_toy_2d(40, 120, seed=3))

def brute_force_edge(X: np.ndarray, y: np.ndarray, u: np.ndarray, feature: int, threshold: float, polarity: int) -> float:
  h = np.where(X[:, feature] >= threshold, polarity, -polarity)
  return float(np.sum(u * y * h))
