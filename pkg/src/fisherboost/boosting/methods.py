import logging

import numpy as np

from dataclasses import replace
from typing import Literal
from collections.abc import Sequence

from fisherboost.boosting.adaboost import DiscreteBooster
from fisherboost.boosting.classifier import StrongClassifier, response_matrix
from fisherboost.boosting.column_generation import TotallyCorrectiveBooster, TraceRow
from fisherboost.boosting.postprocess import postprocess
from fisherboost.boosting.stumps import Stump
from fisherboost.utils.config import BoostConfig
from fisherboost.utils.errors import PostprocessError

default_logger = logging.getLogger('fisherboost.boosting.methods')

Method = Literal[
  "fisherboost", "lacboost",
  "adaboost", "asymboost",
  "ada+lac", "ada+lda",
  "asym+lac", "asym+lda"
]

METHODS: tuple[str, ...] = (
  "fisherboost", "lacboost",
  "adaboost", "asymboost",
  "ada+lac", "ada+lda",
  "asym+lac", "asym+lda"
)

_FAMILIES = {
  "fisherboost": ("tc", None),
  "lacboost": ("tc", None),
  "adaboost": ("ada", None),
  "asymboost": ("asym", None),
  "ada+lac": ("ada", "lac"),
  "ada+lda": ("ada", "lda"),
  "asym+lac": ("asym", "lac"),
  "asym+lda": ("asym", "lda"),
}

def check_method(method: str) -> str:
  if method not in _FAMILIES:
    raise ValueError(f"unknown method {method!r}; valid methods: {', '.join(METHODS)}")
  return method

class MethodTrainer:
  """
  Train one of the eight boosting methods, optionally continuing from earlier stumps.

  The trainer remembers the AdaBoost coefficients of the stumps it selected so a later
  call with those stumps as `initial_stumps` replays them on new data. LAC/LDA
  recalibration (and LACBoost's LAC-mode QP) is only used once a classifier holds at
  least `config.min_weak_for_lac` stumps; below that the boosted weights are kept and
  LACBoost solves the Fisher-mode QP.

  :param method: One of METHODS
  :param config: Boosting settings
  :param shrinkage: Covariance shrinkage of the LAC/LDA post-processing
  """
  def __init__(
      self,
      method: Method,
      config: BoostConfig = BoostConfig(),
      shrinkage: float = 1e-3,
      logger: logging.Logger = default_logger
  ) -> None:
    self._method = check_method(method)
    self._family, self._post = _FAMILIES[method]
    self._config = config
    self._shrinkage = shrinkage
    self._logger = logger
    self._alphas: list[float] = []
    self.trace: list[TraceRow] = []
    self.flags: list[str] = []
    return

  @property
  def method(self) -> str:
    return self._method

  @property
  def logger(self) -> logging.Logger:
    return self._logger

  def fit(
      self,
      X: np.ndarray,
      y: np.ndarray,
      n_columns: int | None = None,
      initial_stumps: Sequence[Stump] = (),
      feature_subset: Sequence[int] | None = None
  ) -> StrongClassifier:
    """
    :param X: m x d feature matrix, positives first
    :param y: +1/-1 labels, positives first
    :param n_columns: Total stump count (fixed budget); config.n_max applies if None
    :param initial_stumps: Stumps every result starts with
    :param feature_subset: Features searched for new stumps
    """
    cfg = self._config
    self.trace = []
    self.flags = []
    if self._family == "tc":
      classifier = self._fit_totally_corrective(X, y, n_columns, initial_stumps, feature_subset)
    else:
      k_asym = 1.0 if self._family == "ada" else cfg.k_asym
      if len(initial_stumps) > len(self._alphas):
        raise ValueError("initial stumps were not selected by this trainer")
      classifier, self._alphas = DiscreteBooster(cfg, k_asym, self.logger).fit(
        X, y,
        n_rounds=n_columns,
        initial_stumps=initial_stumps,
        initial_alphas=self._alphas[:len(initial_stumps)],
        feature_subset=feature_subset
      )
      if self._post is not None:
        classifier = self._recalibrate(classifier, X, y)

    provenance = dict(classifier.provenance, method=self.method)
    return replace(classifier, method=self.method, provenance=provenance)

  def _fit_totally_corrective(
      self,
      X: np.ndarray,
      y: np.ndarray,
      n_columns: int | None,
      initial_stumps: Sequence[Stump],
      feature_subset: Sequence[int] | None
  ) -> StrongClassifier:
    cfg = self._config
    mode = "lac" if self.method == "lacboost" else "fisher"
    budget = n_columns if n_columns is not None else cfg.n_max
    if mode == "lac" and budget < cfg.min_weak_for_lac:
      self.logger.info(
        f"LACBoost with {budget} weak classifiers (< {cfg.min_weak_for_lac}): "
        "solving the Fisher-mode QP"
      )
      mode = "fisher"
      self.flags.append('lac-below-min-weak')
    booster = TotallyCorrectiveBooster(cfg, mode, self.logger)
    classifier, self.trace = booster.fit(
      X, y, n_columns=n_columns, initial_stumps=initial_stumps, feature_subset=feature_subset
    )
    return replace(classifier, provenance=dict(classifier.provenance, qp_mode=mode))

  def _recalibrate(
      self,
      classifier: StrongClassifier,
      X: np.ndarray,
      y: np.ndarray
  ) -> StrongClassifier:
    if classifier.n < self._config.min_weak_for_lac:
      self.flags.append('postprocess-skipped')
      return classifier
    try:
      return postprocess(
        classifier, response_matrix(classifier.stumps, X), y, self._post, self._shrinkage
      )
    except (PostprocessError, ValueError) as e:
      self.logger.warning(f"{self._post.upper()} post-processing failed ({e}); keeping boosted weights")
      self.flags.append('postprocess-failed')
      return classifier
