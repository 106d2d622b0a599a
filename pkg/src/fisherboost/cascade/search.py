import logging

import numpy as np

from concurrent.futures import ThreadPoolExecutor
from dataclasses import astuple, dataclass, fields
from collections.abc import Sequence

from fisherboost.boosting.classifier import StrongClassifier
from fisherboost.boosting.methods import MethodTrainer, check_method
from fisherboost.cascade.metrics import offset_for_fp_rate
from fisherboost.cascade.multi_exit import MultiExitCascade, train_cascade
from fisherboost.data.dataset import Dataset
from fisherboost.data.synthetic import gen_asymmetric
from fisherboost.haar.space import FeatureSpace
from fisherboost.utils.config import DEFAULT_THETA_GRID, CascadeConfig
from fisherboost.utils.file import write_csv

logger = logging.getLogger('fisherboost.cascade.search')

def cascade_accuracy(
    cascade: MultiExitCascade,
    dataset: Dataset,
    threads: int = 1
) -> float:
  """Share of examples whose cascade decision (accepted = +1) matches the label."""
  space = FeatureSpace.for_dataset(dataset)
  X, columns = space.design(dataset, [s.feature_index for s in cascade.stumps], threads)
  return float(np.mean(cascade.predict(X, columns, threads) == dataset.labels))

def theta_grid_search(
    dataset: Dataset,
    grid: Sequence[float] = DEFAULT_THETA_GRID,
    short_schedule: Sequence[int] | None = None,
    method: str = "fisherboost",
    config: CascadeConfig = CascadeConfig()
) -> float:
  """
  Pick theta by training a short cascade per candidate and comparing training accuracy.

  Candidates train concurrently on up to `config.boost.threads` workers. Ties go to the
  larger theta.

  :param dataset: Training data; its negatives form the bootstrap pool
  :param grid: Candidate thetas
  :param short_schedule: Exit schedule of the trial cascades; the first ten exits of
    config.exit_schedule if None
  :param method: 'fisherboost' or 'lacboost'
  """
  if not grid:
    raise ValueError("theta grid must not be empty")
  check_method(method)
  if len(grid) == 1:
    return float(grid[0])
  schedule = list(short_schedule) if short_schedule is not None else config.exit_schedule[:10]
  workers = config.boost.threads

  def trial(theta: float) -> float:
    boost = config.boost.model_copy(update={'theta': theta, 'threads': 1})
    trial_config = config.model_copy(update={'boost': boost, 'exit_schedule': schedule})
    cascade = train_cascade(dataset, dataset, schedule, method=method, config=trial_config)
    accuracy = cascade_accuracy(cascade, dataset)
    logger.info(f"theta={theta:.6g}: training accuracy {accuracy:.6f}")
    return accuracy

  with ThreadPoolExecutor(max_workers=workers) as executor:
    accuracies = list(executor.map(trial, grid))
  best_accuracy, best_theta = max(zip(accuracies, grid))
  logger.info(f"Selected theta={best_theta:.6g} (training accuracy {best_accuracy:.6f})")
  return float(best_theta)

@dataclass(frozen=True)
class NodeRateRow:
  method: str
  seed: int
  n_weak: int
  offset: float
  false_negative_rate: float
  false_positive_rate: float

NODE_RATE_HEADER = [f.name for f in fields(NodeRateRow)]

def compare_node_rates(
    methods: Sequence[str],
    m1: int,
    m2: int,
    n_stumps: int,
    seeds: Sequence[int],
    f_target: float = 0.5,
    config: CascadeConfig = CascadeConfig(),
    dim: int = 10,
    separation: float = 1.0
) -> list[NodeRateRow]:
  """
  Node comparison on synthetic asymmetric data.

  For every seed, draws twice the requested sizes, trains each method on one half with a
  fixed budget of `n_stumps`, fixes the false-positive rate on the other half at `f_target`
  with the offset search and reports the false-negative rate there.
  """
  for method in methods:
    check_method(method)
  rows = []
  for seed in seeds:
    data = gen_asymmetric(2 * m1, 2 * m2, dim, separation, seed)
    pos, neg = data.positives, data.negatives
    train = Dataset.concat(pos[:m1], neg[:m2])
    held_out = Dataset.concat(pos[m1:], neg[m2:])
    boost = config.boost.model_copy(update={'seed': seed})
    for method in methods:
      trainer = MethodTrainer(method, boost, config.shrinkage, logger)
      classifier = trainer.fit(train.examples, train.labels, n_columns=n_stumps)
      scores = classifier.scores(held_out.examples)
      found = offset_for_fp_rate(scores, held_out.labels, f_target)
      rows.append(NodeRateRow(
        method, int(seed), classifier.n, found.offset,
        1.0 - found.detection_rate, found.fp_rate
      ))
      logger.debug(f"seed={seed} {method}: fnr={1.0 - found.detection_rate:.4f}")
  return rows

def mean_false_negative_rates(rows: Sequence[NodeRateRow]) -> dict[str, float]:
  by_method: dict[str, list[float]] = {}
  for row in rows:
    by_method.setdefault(row.method, []).append(row.false_negative_rate)
  return {method: float(np.mean(rates)) for method, rates in by_method.items()}

def write_node_rates(rows: Sequence[NodeRateRow], path: str) -> int:
  return write_csv(path, NODE_RATE_HEADER, (astuple(r) for r in rows))

@dataclass(frozen=True)
class GridPoint:
  x1: float
  x2: float
  score: float
  label: int

GRID_HEADER = [f.name for f in fields(GridPoint)]

def decision_grid(
    classifier: StrongClassifier,
    x_range: tuple[float, float],
    y_range: tuple[float, float],
    size: int = 100
) -> list[GridPoint]:
  """
  Evaluate a classifier of 2-D data on a size x size lattice, for plotting its boundary.
  """
  if size < 2:
    raise ValueError("grid size must be >= 2")
  xs = np.linspace(x_range[0], x_range[1], size)
  ys = np.linspace(y_range[0], y_range[1], size)
  x1, x2 = np.meshgrid(xs, ys)
  points = np.column_stack([x1.ravel(), x2.ravel()])
  scores = classifier.decision_function(points)
  labels = np.where(scores >= 0, 1, -1)
  return [
    GridPoint(float(a), float(b), float(s), int(l))
    for a, b, s, l in zip(points[:, 0], points[:, 1], scores, labels)
  ]

def write_grid(points: Sequence[GridPoint], path: str) -> int:
  return write_csv(path, GRID_HEADER, (astuple(p) for p in points))
