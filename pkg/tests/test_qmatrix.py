import numpy as np
import pytest

from fisherboost.boosting import build_q

def pairwise_variance(values: np.ndarray) -> float:
  """Unbiased variance from squared pairwise differences."""
  n = len(values)
  diffs = values[:, None] - values[None, :]
  return float(np.sum(np.triu(diffs ** 2, k=1)) / (n * (n - 1)))

class TestDense:

  @pytest.mark.parametrize("mode", ["fisher", "lac"])
  @pytest.mark.parametrize("exact", [True, False])
  def test_symmetric_and_psd(self, mode, exact):
    Q = build_q(mode, 4, 6, exact).dense()
    np.testing.assert_allclose(Q, Q.T)
    assert np.linalg.eigvalsh(Q).min() >= -1e-12

  def test_exact_block_entries(self):
    Q = build_q("fisher", 3, 2, exact=True).dense()
    assert Q[0, 0] == pytest.approx(1 / 5)
    assert Q[0, 1] == pytest.approx(-1 / (5 * 2))
    assert Q[3, 4] == pytest.approx(-1 / 5)
    assert Q[0, 3] == 0.0

  def test_lac_zeroes_negative_block(self):
    Q = build_q("lac", 3, 4, exact=True).dense()
    np.testing.assert_array_equal(Q[3:, 3:], 0.0)
    assert Q[0, 0] > 0

  def test_approximate_is_scaled_identity(self):
    np.testing.assert_allclose(build_q("fisher", 2, 3).dense(), np.eye(5) / 5)

class TestQuadraticForm:

  def test_exact_form_is_weighted_class_variance(self, rng):
    m1, m2 = 7, 13
    rho = rng.normal(size=m1 + m2)
    q = build_q("fisher", m1, m2, exact=True)
    m = m1 + m2
    expected = (m1 / m) * pairwise_variance(rho[:m1]) + (m2 / m) * pairwise_variance(rho[m1:])
    assert q.quad(rho) == pytest.approx(expected, rel=1e-12)

  def test_lac_form_keeps_positive_variance_only(self, rng):
    m1, m2 = 9, 4
    rho = rng.normal(size=m1 + m2)
    q = build_q("lac", m1, m2, exact=True)
    expected = (m1 / (m1 + m2)) * pairwise_variance(rho[:m1])
    assert q.quad(rho) == pytest.approx(expected, rel=1e-12)

class TestSolveRegularized:

  @pytest.mark.parametrize("mode", ["fisher", "lac"])
  @pytest.mark.parametrize("exact", [True, False])
  def test_matches_dense_solve(self, rng, mode, exact):
    q = build_q(mode, 5, 8, exact, delta=1e-3)
    x = rng.normal(size=13)
    expected = np.linalg.solve(q.dense() + 1e-3 * np.eye(13), x)
    np.testing.assert_allclose(q.solve_regularized(x), expected, rtol=1e-9, atol=1e-9)

  def test_singular_without_delta(self):
    q = build_q("lac", 3, 3, delta=0.0)
    with pytest.raises(ValueError, match="delta"):
      q.solve_regularized(np.ones(6))

class TestBuildQ:

  def test_exact_needs_two_positives(self):
    with pytest.raises(ValueError, match="m1 >= 2"):
      build_q("fisher", 1, 5, exact=True)

  def test_unknown_mode(self):
    with pytest.raises(ValueError, match="mode"):
      build_q("other", 2, 2)

  def test_missing_class(self):
    with pytest.raises(ValueError, match="both classes"):
      build_q("fisher", 0, 2)
