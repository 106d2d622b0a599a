import math

import numpy as np
import pytest

from fisherboost.boosting import DiscreteBooster, train_adaboost, train_asymboost
from fisherboost.boosting.adaboost import ALPHA_CAP
from fisherboost.data import Dataset
from fisherboost.utils.config import BoostConfig

class TestDiscreteBooster:

  def test_weights_on_simplex(self, toy):
    classifier = train_adaboost(toy, BoostConfig(n_max=12))
    assert classifier.method == "adaboost"
    assert classifier.n <= 12
    assert np.all(classifier.weights >= 0)
    assert classifier.weights.sum() == pytest.approx(1.0)

  def test_zero_error_stops_with_capped_alpha(self):
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    y = np.array([1, 1, -1, -1])
    classifier, alphas = DiscreteBooster(BoostConfig(n_max=10)).fit(X, y)
    assert classifier.n == 1
    assert alphas == [ALPHA_CAP]
    np.testing.assert_array_equal(classifier.predict(X), y)

  def test_alpha_formula(self, toy):
    classifier, alphas = DiscreteBooster().fit(toy.examples, toy.labels, n_rounds=1)
    h = classifier.stumps[0].predict(toy.examples)
    err = np.mean(h != toy.labels)
    assert alphas[0] == pytest.approx(0.5 * math.log((1 - err) / err))

  def test_replay_reproduces_rounds(self, toy):
    booster = DiscreteBooster()
    full, alphas = booster.fit(toy.examples, toy.labels, n_rounds=6)
    resumed, _ = booster.fit(
      toy.examples, toy.labels, n_rounds=6,
      initial_stumps=full.stumps[:3], initial_alphas=alphas[:3]
    )
    assert resumed.stumps == full.stumps

  def test_initial_alphas_required(self, toy):
    stump = DiscreteBooster().fit(toy.examples, toy.labels, n_rounds=1)[0].stumps[0]
    with pytest.raises(ValueError, match="alpha"):
      DiscreteBooster().fit(toy.examples, toy.labels, initial_stumps=[stump])

  def test_asymmetric_reweighting_favours_positives(self):
    y = np.array([1, 1, -1, -1])
    D = np.full(4, 0.25)
    booster = DiscreteBooster(k_asym=4.0)
    reweighted = booster._reweight(D, y.astype(float), np.ones(4), alpha=0.0, rounds=2)
    assert reweighted.sum() == pytest.approx(1.0)
    assert reweighted[0] / reweighted[2] == pytest.approx(4.0 ** (1 / 2))

  def test_rejects_bad_asymmetry(self):
    with pytest.raises(ValueError, match="k_asym"):
      DiscreteBooster(k_asym=0.0)

  def test_unit_asymmetry_is_adaboost(self, toy):
    config = BoostConfig(n_max=8)
    ada = train_adaboost(toy, config)
    asym = train_asymboost(toy, config, k_asym=1.0)
    assert ada.stumps == asym.stumps
    np.testing.assert_allclose(ada.weights, asym.weights)

  def test_asymboost_method_name(self, toy):
    assert train_asymboost(toy, BoostConfig(n_max=3)).method == "asymboost"

  def test_needs_both_classes(self):
    with pytest.raises(ValueError, match="per class"):
      train_adaboost(Dataset(np.zeros((3, 2)), np.array([1, 1, 1])))
