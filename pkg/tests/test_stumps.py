import numpy as np
import pytest

from fisherboost.boosting import Stump, best_stump, sample_features

def exhaustive_best(X: np.ndarray, y: np.ndarray, u: np.ndarray) -> tuple[Stump, float]:
  """Scan every feature, threshold and polarity in tie-break order."""
  tol = 1e-12 * np.abs(u).sum()
  candidates = []
  for j in range(X.shape[1]):
    values = np.unique(X[:, j])
    thresholds = np.concatenate([[values[0] - 1.0], 0.5 * (values[1:] + values[:-1]), [values[-1] + 1.0]])
    for threshold in thresholds:
      for polarity in (1, -1):
        stump = Stump(j, float(threshold), polarity)
        candidates.append((float(np.sum(u * y * stump.predict(X))), stump))
  top = max(edge for edge, _ in candidates)
  edge, stump = next((e, s) for e, s in candidates if e >= top - tol)
  return stump, edge

class TestStump:

  def test_sign_of_zero_is_positive(self):
    stump = Stump(0, 1.0, 1)
    np.testing.assert_array_equal(stump.predict(np.array([[0.5], [1.0], [2.0]])), [-1, 1, 1])
    np.testing.assert_array_equal(Stump(0, 1.0, -1).predict(np.array([[1.0]])), [-1])

  def test_rejects_bad_polarity(self):
    with pytest.raises(ValueError, match="polarity"):
      Stump(0, 0.0, 0)

  def test_dict_round_trip_is_exact(self):
    stump = Stump(3, 0.1 + 0.2, -1)
    assert Stump.from_dict(stump.to_dict()) == stump

class TestBestStump:

  def test_matches_exhaustive_search(self, rng):
    for _ in range(200):
      m = int(rng.integers(5, 40))
      X = rng.integers(0, 6, size=(m, 4)).astype(float)
      y = rng.choice([-1, 1], size=m)
      u = rng.random(m)
      stump, edge = best_stump(X, y, u)
      expected, expected_edge = exhaustive_best(X, y, u)
      assert edge == pytest.approx(expected_edge, abs=1e-9)
      assert stump == expected

  def test_signed_weights(self, rng):
    X = rng.normal(size=(60, 3))
    y = rng.choice([-1, 1], size=60)
    u = rng.normal(size=60)
    stump, edge = best_stump(X, y, u)
    expected, expected_edge = exhaustive_best(X, y, u)
    assert stump == expected
    assert edge == pytest.approx(expected_edge, abs=1e-9)

  def test_separable_feature(self):
    X = np.array([[0.0, 5.0], [1.0, 4.0], [2.0, 3.0], [3.0, 2.0]])
    y = np.array([-1, -1, 1, 1])
    stump, edge = best_stump(X, y, np.full(4, 0.25))
    assert edge == pytest.approx(1.0)
    assert stump == Stump(0, 1.5, 1)

  def test_ties_prefer_lowest_feature(self):
    X = np.array([[0.0, 0.0], [1.0, 1.0]])
    stump, _ = best_stump(X, np.array([-1, 1]), np.array([0.5, 0.5]))
    assert stump.feature_index == 0

  def test_all_zero_weights_give_first_candidate(self):
    X = np.array([[2.0], [3.0]])
    stump, edge = best_stump(X, np.array([1, -1]), np.zeros(2))
    assert edge == 0.0
    assert stump == Stump(0, 1.0, 1)

  def test_thread_count_does_not_change_result(self, rng):
    X = rng.normal(size=(80, 30))
    y = rng.choice([-1, 1], size=80)
    u = rng.random(80)
    single = best_stump(X, y, u, chunk_size=4)
    threaded = best_stump(X, y, u, threads=4, chunk_size=4)
    assert single == threaded

  def test_feature_subset(self, rng):
    X = rng.normal(size=(50, 6))
    y = np.where(X[:, 0] > 0, 1, -1)
    stump, _ = best_stump(X, y, np.full(50, 0.02), feature_subset=[2, 4])
    assert stump.feature_index in (2, 4)

  def test_rejects_non_finite_weights(self):
    with pytest.raises(ValueError, match="finite"):
      best_stump(np.zeros((2, 1)), np.array([1, -1]), np.array([np.nan, 1.0]))

  def test_rejects_out_of_range_subset(self):
    with pytest.raises(ValueError, match="out of range"):
      best_stump(np.zeros((2, 2)), np.array([1, -1]), np.ones(2), feature_subset=[5])

class TestSampleFeatures:

  def test_full_fraction(self):
    assert sample_features(7, 1.0) == list(range(7))

  def test_count_and_determinism(self):
    subset = sample_features(1000, 0.05, seed=9)
    assert len(subset) == 50
    assert subset == sorted(set(subset))
    assert subset == sample_features(1000, 0.05, seed=9)
    assert subset != sample_features(1000, 0.05, seed=10)

  def test_rounds_up(self):
    assert len(sample_features(10, 0.01)) == 1

  def test_rejects_bad_fraction(self):
    with pytest.raises(ValueError, match="fraction"):
      sample_features(10, 0.0)
