import logging
import math

import numpy as np

from collections.abc import Sequence

from fisherboost.boosting.classifier import StrongClassifier
from fisherboost.boosting.stumps import Stump, best_stump, sample_features
from fisherboost.data.dataset import Dataset
from fisherboost.utils.config import BoostConfig

default_logger = logging.getLogger('fisherboost.boosting.adaboost')

ERROR_FLOOR = 1e-10
ALPHA_CAP = 0.5 * math.log((1.0 - ERROR_FLOOR) / ERROR_FLOOR)

class DiscreteBooster:
  """
  Stagewise discrete AdaBoost with decision stumps.

  With `k_asym != 1` every round additionally multiplies the example weights by
  exp(y_i log(sqrt(k_asym)) / N) before renormalizing, N being the number of rounds
  (AsymBoost); positives gain weight when k_asym > 1.

  :param config: Boosting settings (n_max rounds, feature sampling, threads)
  :param k_asym: Asymmetry factor; 1 gives plain AdaBoost
  """
  def __init__(
      self,
      config: BoostConfig = BoostConfig(),
      k_asym: float = 1.0,
      logger: logging.Logger = default_logger
  ) -> None:
    if k_asym <= 0:
      raise ValueError(f"k_asym must be positive, got {k_asym}")
    self._config = config
    self._k_asym = k_asym
    self._logger = logger
    return

  @property
  def logger(self) -> logging.Logger:
    return self._logger

  def _reweight(
      self,
      D: np.ndarray,
      y: np.ndarray,
      h: np.ndarray,
      alpha: float,
      rounds: int
  ) -> np.ndarray:
    D = D * np.exp(-alpha * y * h)
    if self._k_asym != 1.0:
      D = D * np.exp(y * math.log(math.sqrt(self._k_asym)) / rounds)
    return D / D.sum()

  def fit(
      self,
      X: np.ndarray,
      y: np.ndarray,
      n_rounds: int | None = None,
      initial_stumps: Sequence[Stump] = (),
      initial_alphas: Sequence[float] = (),
      feature_subset: Sequence[int] | None = None
  ) -> tuple[StrongClassifier, list[float]]:
    """
    :param X: m x d feature matrix
    :param y: +1/-1 labels
    :param n_rounds: Total number of stumps (including initial ones); n_max if None
    :param initial_stumps: Stumps replayed with their `initial_alphas` before new rounds
    :return: (classifier with simplex weights alpha / sum(alpha), raw alphas)
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    rounds = n_rounds if n_rounds is not None else self._config.n_max
    if len(initial_stumps) != len(initial_alphas):
      raise ValueError("every initial stump needs an alpha")

    D = np.full(len(y), 1.0 / len(y))
    stumps = list(initial_stumps)
    alphas = [float(a) for a in initial_alphas]
    for stump, alpha in zip(stumps, alphas):
      D = self._reweight(D, y, stump.predict(X), alpha, rounds)

    while len(stumps) < rounds:
      stump, _ = best_stump(X, y, D, feature_subset, threads=self._config.threads)
      h = stump.predict(X)
      err = float(D[h != y].sum())
      if err <= 0.0:
        stumps.append(stump)
        alphas.append(ALPHA_CAP)
        self.logger.info(f"Round {len(stumps)}: zero weighted error, stopping")
        break
      if err >= 0.5:
        stumps.append(stump)
        alphas.append(0.0)
        self.logger.info(f"Round {len(stumps)}: weighted error {err:.6g} >= 0.5, stopping")
        break
      alpha = 0.5 * math.log((1.0 - err) / err)
      stumps.append(stump)
      alphas.append(alpha)
      D = self._reweight(D, y, h, alpha, rounds)
      self.logger.debug(f"Round {len(stumps)}: error={err:.6g} alpha={alpha:.6g}")

    raw = np.asarray(alphas)
    total = raw.sum()
    weights = raw / total if total > 0 else np.full(len(raw), 1.0 / len(raw))
    classifier = StrongClassifier(
      stumps=stumps,
      weights=weights,
      offset=0.0,
      method="asymboost" if self._k_asym != 1.0 else "adaboost",
      provenance={'k_asym': self._k_asym}
    )
    return classifier, alphas

def _fit_dataset(
    dataset: Dataset,
    config: BoostConfig,
    k_asym: float,
    logger: logging.Logger
) -> StrongClassifier:
  if dataset.is_image:
    raise ValueError("image datasets must be converted to Haar feature vectors first")
  dataset.require_both_classes()
  subset = sample_features(dataset.dim, config.feature_fraction, config.seed)
  classifier, _ = DiscreteBooster(config, k_asym, logger).fit(
    dataset.examples, dataset.labels, feature_subset=subset
  )
  return classifier

def train_adaboost(
    dataset: Dataset,
    config: BoostConfig = BoostConfig(),
    logger: logging.Logger = default_logger
) -> StrongClassifier:
  """
  Discrete AdaBoost with stumps for `config.n_max` rounds.
  """
  return _fit_dataset(dataset, config, 1.0, logger)

def train_asymboost(
    dataset: Dataset,
    config: BoostConfig = BoostConfig(),
    k_asym: float | None = None,
    logger: logging.Logger = default_logger
) -> StrongClassifier:
  """
  AsymBoost: AdaBoost with the per-round asymmetric multiplier folded in.

  :param k_asym: Asymmetry factor (> 0); `config.k_asym` if None
  """
  return _fit_dataset(dataset, config, config.k_asym if k_asym is None else k_asym, logger)
