import numpy as np
import pytest

from fisherboost.boosting import DiscreteBooster
from fisherboost.cascade import normality_diagnostic, write_normality
from fisherboost.data import gen_asymmetric
from fisherboost.utils.config import BoostConfig

class TestNormalityDiagnostic:

  def test_gaussian_sample(self, rng):
    result = normality_diagnostic(rng.normal(size=1000))
    assert result.r_normal >= 0.995
    assert result.flag is None

  def test_two_point_mass_scores_lower(self, rng):
    gaussian = normality_diagnostic(rng.normal(size=1000)).r_normal
    lumpy = normality_diagnostic(rng.choice([-1.0, 1.0], size=1000)).r_normal
    assert lumpy < gaussian

  def test_affine_invariance(self, rng):
    x = rng.exponential(size=200)
    assert normality_diagnostic(3.0 * x + 2.0).r_normal == pytest.approx(normality_diagnostic(x).r_normal, abs=1e-12)

  def test_pairs_are_sorted(self, rng):
    result = normality_diagnostic(rng.normal(size=20))
    margins = [m for m, _ in result.pairs]
    quantiles = [q for _, q in result.pairs]
    assert margins == sorted(margins)
    assert quantiles == sorted(quantiles)
    assert quantiles[0] == pytest.approx(-quantiles[-1])

  def test_too_few_margins(self):
    with pytest.raises(ValueError, match="at least 8"):
      normality_diagnostic(np.arange(7.0))

  def test_constant_margins(self):
    result = normality_diagnostic(np.full(10, 0.3))
    assert result.r_normal is None
    assert result.flag == 'constant-margins'

  def test_csv(self, rng, tmp_path):
    path = tmp_path / "normality.csv"
    rows = write_normality([(0, normality_diagnostic(rng.normal(size=10)), 10), (1, None, 3)], str(path))
    assert rows == 11
    lines = path.read_text().splitlines()
    assert lines[0] == "exit_index,rank,margin,normal_quantile,r_normal,flag"
    assert lines[-1] == "1,,,,,too-few-positives(3)"

@pytest.mark.slow
def test_longer_classifiers_have_more_gaussian_margins():
  wins = 0
  for seed in range(10):
    data = gen_asymmetric(300, 300, dim=10, seed=seed)
    booster = DiscreteBooster(BoostConfig(seed=seed))
    r = {}
    for rounds in (7, 50):
      classifier, _ = booster.fit(data.examples, data.labels, n_rounds=rounds)
      r[rounds] = normality_diagnostic(classifier.scores(data.positives)).r_normal
    wins += r[50] > r[7]
  assert wins >= 6
