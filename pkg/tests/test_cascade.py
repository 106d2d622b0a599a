import numpy as np
import pytest

from fisherboost.boosting import StrongClassifier, Stump
from fisherboost.cascade import (
  Exit, MultiExitCascade, evaluate_cascade, train_cascade, train_strong, write_cascade_trace
)
from fisherboost.data import Dataset, gen_asymmetric, gen_toy_2d
from fisherboost.utils.config import BoostConfig, CascadeConfig

def small_config(**updates) -> CascadeConfig:
  values = dict(exit_schedule=[2, 4, 6], d_target=0.95, f_target=0.5, neg_quota=100)
  values.update(updates)
  return CascadeConfig(**values)

class TestMultiExitCascade:

  def test_prefixes_must_increase(self):
    stumps = [Stump(0, 0.0, 1), Stump(0, 1.0, 1)]
    exits = [Exit(2, np.full(2, 0.5), 0.0), Exit(2, np.full(2, 0.5), 0.0)]
    with pytest.raises(ValueError, match="strictly increasing"):
      MultiExitCascade(stumps, exits)

  def test_final_prefix_covers_stumps(self):
    stumps = [Stump(0, 0.0, 1), Stump(0, 1.0, 1)]
    with pytest.raises(ValueError, match="holds 2"):
      MultiExitCascade(stumps, [Exit(1, np.ones(1), 0.0)])

  def test_exit_weight_count(self):
    with pytest.raises(ValueError, match="weights"):
      Exit(3, np.ones(2), 0.0)

  def test_rejected_examples_stay_rejected(self, rng):
    stumps = [Stump(0, 0.0, 1), Stump(1, 0.0, 1), Stump(0, 1.0, 1)]
    exits = [
      Exit(1, np.ones(1), 0.0),
      Exit(2, np.full(2, 0.5), 0.5),
      Exit(3, np.full(3, 1 / 3), 0.0)
    ]
    cascade = MultiExitCascade(stumps, exits)
    X = rng.normal(size=(200, 2))
    scores = cascade.walk(X)
    reached = ~np.isnan(scores)
    assert reached[:, 0].all()
    for t in range(1, 3):
      rejected_before = reached[:, t - 1] & (scores[:, t - 1] - cascade.offsets[t - 1] < 0)
      assert not reached[rejected_before, t].any()
      assert not (reached[:, t] & ~reached[:, t - 1]).any()

  def test_walk_is_independent_of_threads(self, rng):
    stumps = [Stump(0, 0.0, 1), Stump(1, 0.0, -1)]
    cascade = MultiExitCascade(stumps, [Exit(1, np.ones(1), 0.0), Exit(2, np.full(2, 0.5), 0.0)])
    X = rng.normal(size=(101, 2))
    np.testing.assert_allclose(cascade.walk(X), cascade.walk(X, threads=4), rtol=0, atol=1e-12)

  def test_single_exit_matches_strong_classifier(self, rng):
    classifier = StrongClassifier([Stump(0, 0.0, 1), Stump(1, 0.5, 1)], np.array([0.3, 0.7]), offset=0.2)
    cascade = MultiExitCascade.from_strong(classifier)
    X = rng.normal(size=(50, 2))
    np.testing.assert_array_equal(cascade.predict(X), classifier.predict(X))
    assert cascade.exit_classifier(0).offset == 0.2

class TestTrainCascade:

  def test_structure(self):
    data = gen_toy_2d(60, 400, seed=2)
    cascade = train_cascade(data, data, config=small_config())
    prefixes = [e.prefix_length for e in cascade.exits]
    assert prefixes == [2, 4, 6]
    assert len(cascade.stumps) == 6
    assert cascade.method == "fisherboost"
    for exit in cascade.exits:
      assert exit.weights.shape == (exit.prefix_length,)
      assert exit.weights.sum() == pytest.approx(1.0, abs=1e-10)
    assert len(cascade.report.rows) == 3
    assert all(row.d_t >= 0.95 for row in cascade.report.rows)
    assert cascade.provenance['exit_schedule'] == [2, 4, 6]
    assert len(cascade.traces) == 3

  def test_first_exit_does_not_depend_on_later_ones(self):
    data = gen_toy_2d(60, 400, seed=5)
    full = train_cascade(data, data, config=small_config())
    short = train_cascade(data, data, exit_schedule=[2], config=small_config())
    assert full.stumps[:2] == short.stumps
    assert full.offsets[0] == short.offsets[0]

  def test_training_rates_survive_evaluation(self):
    data = gen_toy_2d(60, 400, seed=1)
    cascade = train_cascade(data, data, config=small_config(neg_quota=400))
    positives = data.subset(np.nonzero(data.labels == 1)[0])
    report, _ = evaluate_cascade(cascade, positives.examples, positives.labels)
    assert report.rows[0].d_t == pytest.approx(cascade.report.rows[0].d_t)

  def test_deterministic(self):
    data = gen_toy_2d(40, 300, seed=8)
    config = small_config(boost=BoostConfig(seed=3, feature_fraction=0.5))
    a = train_cascade(data, data, config=config)
    b = train_cascade(data, data, config=config)
    assert a.stumps == b.stumps
    np.testing.assert_array_equal(a.offsets, b.offsets)

  def test_small_pool_is_flagged(self):
    data = gen_toy_2d(40, 30, seed=0)
    cascade = train_cascade(data, data, config=small_config(neg_quota=1000))
    assert 'negative-pool-exhausted' in cascade.provenance['flags']
    assert 'negative-pool-exhausted' in cascade.report.flags

  def test_schedule_validation(self):
    data = gen_toy_2d(10, 20, seed=0)
    with pytest.raises(ValueError, match="strictly increasing"):
      train_cascade(data, data, exit_schedule=[4, 2], config=small_config())

  def test_unknown_method(self):
    data = gen_toy_2d(10, 20, seed=0)
    with pytest.raises(ValueError, match="valid methods"):
      train_cascade(data, data, method="logitboost", config=small_config())

  def test_needs_negatives(self):
    data = gen_toy_2d(10, 20, seed=0)
    only_positives = Dataset(data.positives, np.ones(10, dtype=int))
    with pytest.raises(ValueError, match="negative pool"):
      train_cascade(data, only_positives, config=small_config())

  def test_postprocessed_exits(self):
    data = gen_toy_2d(60, 400, seed=3)
    config = small_config(exit_schedule=[2, 5], boost=BoostConfig(min_weak_for_lac=4))
    cascade = train_cascade(data, data, method="ada+lda", config=config)
    assert cascade.exits[0].postprocess is None
    assert cascade.exits[-1].postprocess in ("lda", None)
    assert cascade.method == "ada+lda"

  def test_trace_csv(self, tmp_path):
    data = gen_toy_2d(30, 200, seed=4)
    cascade = train_cascade(data, data, config=small_config())
    path = tmp_path / "trace.csv"
    rows = write_cascade_trace(cascade.traces, str(path))
    assert rows == sum(len(t) for t in cascade.traces)
    assert path.read_text().startswith("exit_index,iteration,")

  @pytest.mark.slow
  def test_node_goals_met_on_separable_data(self):
    data = gen_asymmetric(500, 5000, dim=10, separation=6.0, seed=0)
    config = CascadeConfig(exit_schedule=[5, 10, 20, 40, 80], d_target=0.99, f_target=0.5, neg_quota=1000)
    cascade = train_cascade(data, data, config=config)
    for row in cascade.report.rows:
      assert row.d_t >= 0.99
      assert row.f_t <= 0.5
    assert cascade.report.f_dr == pytest.approx(np.prod([r.d_t for r in cascade.report.rows]))

class TestTrainStrong:

  def test_vector_data(self):
    data = gen_toy_2d(30, 90, seed=6)
    classifier, trace = train_strong(data, "fisherboost", small_config(boost=BoostConfig(n_max=8)))
    assert classifier.n == len(trace) <= 8
    assert classifier.provenance['method'] == "fisherboost"

  def test_shuffled_input_is_ordered(self):
    data = gen_toy_2d(30, 90, seed=6)
    shuffled = data.subset(np.random.default_rng(0).permutation(data.m))
    classifier, _ = train_strong(shuffled, "lacboost", small_config(boost=BoostConfig(n_max=5)))
    assert classifier.method == "lacboost"
