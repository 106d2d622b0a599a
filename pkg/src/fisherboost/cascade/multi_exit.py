import logging
import math

import numpy as np

from concurrent.futures import ThreadPoolExecutor
from dataclasses import astuple, dataclass, field
from collections.abc import Mapping, Sequence

from fisherboost.boosting.classifier import StrongClassifier, response_matrix
from fisherboost.boosting.column_generation import TRACE_HEADER, TraceRow
from fisherboost.boosting.methods import Method, MethodTrainer, check_method
from fisherboost.boosting.stumps import Stump
from fisherboost.cascade.metrics import NodeReport, offset_line_search
from fisherboost.data.dataset import Dataset, order_by_label
from fisherboost.haar.space import sampled_design
from fisherboost.utils.config import CascadeConfig
from fisherboost.utils.file import write_csv
from fisherboost.utils.random import substream

default_logger = logging.getLogger('fisherboost.cascade.multi_exit')

SURVIVAL_NOTE = "node rates are conditioned on survival to each exit"

@dataclass(frozen=True)
class Exit:
  """
  One exit of a multi-exit cascade: the first `prefix_length` shared stumps,
  their weights and the offset b_t. `postprocess` names the LAC/LDA recalibration, if any.
  """
  prefix_length: int
  weights: np.ndarray
  offset: float
  postprocess: str | None = None

  def __post_init__(self):
    object.__setattr__(self, 'weights', np.asarray(self.weights, dtype=np.float64))
    if self.weights.shape != (self.prefix_length,):
      raise ValueError(
        f"exit with prefix {self.prefix_length} has {self.weights.shape[0]} weights"
      )

@dataclass
class MultiExitCascade:
  """
  Shared stump list with one strong classifier per exit.

  Exit t scores an example with the first `prefix_length` stumps and rejects it when the
  score falls below the exit's offset; rejected examples are never seen by later exits.
  """
  stumps: list[Stump]
  exits: list[Exit]
  node_goals: tuple[float, float] = (0.997, 0.5)
  method: str = "fisherboost"
  provenance: dict = field(default_factory=dict)
  report: NodeReport | None = field(default=None, repr=False, compare=False)
  traces: list[list[TraceRow]] = field(default_factory=list, repr=False, compare=False)

  def __post_init__(self):
    if not self.exits:
      raise ValueError("a cascade needs at least one exit")
    prefixes = [e.prefix_length for e in self.exits]
    if prefixes[0] < 1 or any(b <= a for a, b in zip(prefixes, prefixes[1:])):
      raise ValueError(f"exit prefix lengths must be strictly increasing, got {prefixes}")
    if prefixes[-1] != len(self.stumps):
      raise ValueError(
        f"final exit uses {prefixes[-1]} stumps but the cascade holds {len(self.stumps)}"
      )

  @classmethod
  def from_strong(
      cls,
      classifier: StrongClassifier,
      node_goals: tuple[float, float] = (0.997, 0.5)
  ) -> 'MultiExitCascade':
    """Single-exit cascade equivalent to a strong classifier."""
    exit = Exit(
      classifier.n, classifier.weights, classifier.offset,
      classifier.provenance.get('postprocess')
    )
    return cls(
      list(classifier.stumps), [exit], node_goals, classifier.method, dict(classifier.provenance)
    )

  @property
  def n_exits(self) -> int:
    return len(self.exits)

  @property
  def offsets(self) -> np.ndarray:
    return np.array([e.offset for e in self.exits])

  def exit_classifier(self, t: int) -> StrongClassifier:
    exit = self.exits[t]
    return StrongClassifier(
      stumps=self.stumps[:exit.prefix_length],
      weights=exit.weights,
      offset=exit.offset,
      method=self.method,
      provenance=dict(self.provenance, postprocess=exit.postprocess)
    )

  def _walk_chunk(
      self,
      X: np.ndarray,
      columns: Mapping[int, int] | None
  ) -> np.ndarray:
    scores = np.full((X.shape[0], self.n_exits), np.nan)
    alive = np.arange(X.shape[0])
    H = np.empty((X.shape[0], 0))
    done = 0
    for t, exit in enumerate(self.exits):
      if alive.size == 0:
        break
      fresh = response_matrix(self.stumps[done:exit.prefix_length], X[alive], columns)
      H = np.hstack([H, fresh])
      done = exit.prefix_length
      s = H @ exit.weights
      scores[alive, t] = s
      keep = s - exit.offset >= 0
      alive = alive[keep]
      H = H[keep]
    return scores

  def walk(
      self,
      X: np.ndarray,
      columns: Mapping[int, int] | None = None,
      threads: int = 1
  ) -> np.ndarray:
    """
    Per-exit scores (without offsets) of every example, NaN past the exit that rejected it.

    :param X: Feature matrix
    :param columns: Global feature index -> column of `X` (Haar designs)
    :param threads: Examples are split into this many chunks scored concurrently
    :return: m x n_exits matrix
    """
    X = np.asarray(X, dtype=np.float64)
    if threads <= 1 or X.shape[0] < 2 * threads:
      return self._walk_chunk(X, columns)
    size = math.ceil(X.shape[0] / threads)
    chunks = [X[i:i + size] for i in range(0, X.shape[0], size)]
    with ThreadPoolExecutor(max_workers=threads) as executor:
      parts = list(executor.map(lambda chunk: self._walk_chunk(chunk, columns), chunks))
    return np.vstack(parts)

  def depth(self, scores: np.ndarray) -> np.ndarray:
    """Number of exits each example passed, from `walk` output; n_exits means accepted."""
    with np.errstate(invalid='ignore'):
      passed = np.where(np.isnan(scores), False, scores - self.offsets >= 0)
    return passed.sum(axis=1)

  def accepts(
      self,
      X: np.ndarray,
      columns: Mapping[int, int] | None = None,
      threads: int = 1
  ) -> np.ndarray:
    return self.depth(self.walk(X, columns, threads)) == self.n_exits

  def predict(
      self,
      X: np.ndarray,
      columns: Mapping[int, int] | None = None,
      threads: int = 1
  ) -> np.ndarray:
    return np.where(self.accepts(X, columns, threads), 1, -1)

def write_cascade_trace(traces: Sequence[Sequence[TraceRow]], path: str) -> int:
  """Column-generation traces of all exits, one block per exit."""
  rows = ((t, *astuple(row)) for t, trace in enumerate(traces) for row in trace)
  return write_csv(path, ['exit_index', *TRACE_HEADER], rows)

class _NegativeBootstrap:
  """
  Hands out pool negatives in a seeded order, skipping those the current cascade rejects.
  """
  def __init__(
      self,
      pool: np.ndarray,
      seed: int,
      threads: int,
      logger: logging.Logger
  ) -> None:
    self._pool = pool
    self._order = substream(seed, 'bootstrap').permutation(pool.shape[0])
    self._cursor = 0
    self._threads = threads
    self._logger = logger
    self.exhausted = False

  def draw(self, need: int, cascade: MultiExitCascade | None) -> np.ndarray:
    taken: list[np.ndarray] = []
    while need > 0 and self._cursor < len(self._order):
      start = self._cursor
      batch = self._order[start:start + max(need, 1024)]
      if cascade is None:
        passing = np.arange(len(batch))
      else:
        passing = np.nonzero(cascade.accepts(self._pool[batch], threads=self._threads))[0]
      if len(passing) > need:
        passing = passing[:need]
        self._cursor = start + int(passing[-1]) + 1
      else:
        self._cursor = start + len(batch)
      taken.append(batch[passing])
      need -= len(passing)
    if need > 0 and not self.exhausted:
      self.exhausted = True
      self._logger.warning(f"Negative pool exhausted; {need} negatives short of the quota")
    return np.concatenate(taken) if taken else np.empty(0, dtype=np.int64)

def train_cascade(
    pos_data: Dataset,
    neg_pool: Dataset,
    exit_schedule: Sequence[int] | None = None,
    node_goals: tuple[float, float] | None = None,
    method: Method = "fisherboost",
    config: CascadeConfig = CascadeConfig(),
    logger: logging.Logger = default_logger
) -> MultiExitCascade:
  """
  Train a multi-exit cascade exit by exit on a fixed positive set and bootstrapped negatives.

  Exit t re-trains the chosen method on all positives plus the current negatives, starting
  from the stumps of exit t - 1 and growing them to the exit's prefix length. Its offset is
  the largest b meeting the detection target on that data. Negatives rejected by the new
  exit are discarded and the set is refilled to `neg_quota` with pool negatives the cascade
  still accepts.

  :param pos_data: Positive examples (negatives in it are ignored)
  :param neg_pool: Negative examples to bootstrap from (positives in it are ignored)
  :param exit_schedule: Stump counts of the exits; config.exit_schedule if None
  :param node_goals: (d_target, f_target); the config's goals if None
  :param method: One of the eight training methods
  :return: Cascade carrying the training NodeReport and per-exit traces
  """
  check_method(method)
  schedule = list(exit_schedule if exit_schedule is not None else config.exit_schedule)
  config = CascadeConfig.model_validate(dict(config.model_dump(), exit_schedule=schedule))
  d_target, f_target = node_goals if node_goals is not None else (config.d_target, config.f_target)
  boost = config.boost

  positives = pos_data.positives
  pool = neg_pool.negatives
  if len(positives) < 1 or len(pool) < 1:
    raise ValueError(
      f"cascade training needs positives and a negative pool (got {len(positives)} and {len(pool)})"
    )
  design = sampled_design(
    [Dataset.concat(positives, pool[:0]), Dataset.concat(pos_data.examples[:0], pool)],
    boost.feature_fraction, boost.seed, boost.threads
  )
  X_pos, X_pool = design.matrices
  m1 = X_pos.shape[0]

  trainer = MethodTrainer(method, boost, config.shrinkage, logger)
  bootstrap = _NegativeBootstrap(X_pool, boost.seed, boost.threads, logger)
  current = bootstrap.draw(config.neg_quota, None)

  stumps: list[Stump] = []
  exits: list[Exit] = []
  traces: list[list[TraceRow]] = []
  d_rates, f_rates, neg_counts, row_flags = [], [], [], []
  flags: list[str] = []
  provenance: dict = {}
  for t, prefix in enumerate(schedule):
    if t > 0:
      partial = MultiExitCascade(stumps, exits)
      current = np.concatenate([current, bootstrap.draw(config.neg_quota - len(current), partial)])
    if len(current) == 0:
      logger.warning(f"No negatives left before exit {t}; stopping with {len(exits)} exits")
      flags.append('no-negatives-left')
      break

    X = np.vstack([X_pos, X_pool[current]])
    y = np.concatenate([np.ones(m1, dtype=np.int8), -np.ones(len(current), dtype=np.int8)])
    classifier = trainer.fit(
      X, y, n_columns=prefix, initial_stumps=stumps, feature_subset=design.feature_subset
    )
    if classifier.n != prefix:
      logger.info(f"Exit {t}: boosting stopped at {classifier.n} of {prefix} weak classifiers")
    scores = classifier.scores(X)
    found = offset_line_search(scores, y, d_target)

    row_flag = [f for f in [found.flag, *trainer.flags] if f]
    if found.fp_rate > f_target:
      logger.warning(
        f"Exit {t}: false-positive rate {found.fp_rate:.4g} misses the node goal {f_target}"
      )
      row_flag.append('missed-f-target')
    if bootstrap.exhausted and 'negative-pool-exhausted' not in flags:
      flags.append('negative-pool-exhausted')
      row_flag.append('negative-pool-exhausted')

    stumps = list(classifier.stumps)
    exits.append(Exit(
      classifier.n, classifier.weights, found.offset, classifier.provenance.get('postprocess')
    ))
    traces.append(trainer.trace)
    d_rates.append(found.detection_rate)
    f_rates.append(found.fp_rate)
    neg_counts.append(len(current))
    row_flags.append(';'.join(row_flag) or None)
    provenance = dict(classifier.provenance)
    logger.info(
      f"Exit {t}: {classifier.n} weak classifiers, {len(current)} negatives, "
      f"d={found.detection_rate:.4f} f={found.fp_rate:.4f} b={found.offset:.6g}"
    )
    current = current[scores[m1:] - found.offset >= 0]

  if not exits:
    raise ValueError("no cascade exit could be trained")
  report = NodeReport.from_rates(
    [e.prefix_length for e in exits], d_rates, f_rates,
    positives_in=[m1] * len(exits), negatives_in=neg_counts, row_flags=row_flags
  )
  report.flags.extend(flags)
  provenance.pop('postprocess', None)
  provenance.update(
    exit_schedule=schedule[:len(exits)],
    flags=flags,
    note=SURVIVAL_NOTE
  )
  return MultiExitCascade(
    stumps=design.globalize(stumps),
    exits=exits,
    node_goals=(d_target, f_target),
    method=method,
    provenance=provenance,
    report=report,
    traces=traces
  )

def train_strong(
    dataset: Dataset,
    method: Method = "fisherboost",
    config: CascadeConfig = CascadeConfig(),
    n_columns: int | None = None,
    logger: logging.Logger = default_logger
) -> tuple[StrongClassifier, list[TraceRow]]:
  """
  Train a single strong classifier with any of the eight methods.

  Image datasets are trained on a sampled Haar design; the returned stumps always
  reference global feature indices.

  :param n_columns: Fixed stump budget; config.boost.n_max with epsilon termination if None
  """
  check_method(method)
  dataset.require_both_classes()
  boost = config.boost
  ordered = order_by_label(dataset)
  design = sampled_design([ordered], boost.feature_fraction, boost.seed, boost.threads)
  trainer = MethodTrainer(method, boost, config.shrinkage, logger)
  classifier = trainer.fit(
    design.matrices[0], ordered.labels, n_columns=n_columns, feature_subset=design.feature_subset
  )
  stumps = design.globalize(classifier.stumps)
  return StrongClassifier(
    stumps, classifier.weights, classifier.offset, classifier.method, classifier.provenance
  ), trainer.trace
