import logging

import numpy as np

from dataclasses import dataclass, astuple, fields
from collections.abc import Sequence

from fisherboost.boosting.classifier import StrongClassifier
from fisherboost.boosting.qmatrix import Mode, QMatrix, build_q
from fisherboost.boosting.stumps import Stump, best_stump, sample_features
from fisherboost.data.dataset import ClassVector, Dataset, ResponseMatrix, margins, order_by_label
from fisherboost.solvers import EGSolver, ReferenceSolver, SimplexQP, SimplexSolver, warm_start
from fisherboost.utils.config import BoostConfig
from fisherboost.utils.file import write_csv

default_logger = logging.getLogger('fisherboost.boosting.column_generation')

@dataclass(frozen=True)
class DualCertificate:
  """
  Dual variables (u, r): u = -Q rho + theta e, r = the largest edge sum_i u_i A_ij over
  the selected columns.
  """
  u: np.ndarray
  r: float

  def violation(self, a_matrix: np.ndarray) -> float:
    """max_j (u'A)_j - r over the given columns; <= 0 when feasible."""
    return float((self.u @ a_matrix).max() - self.r)

@dataclass(frozen=True)
class TraceRow:
  iteration: int
  primal_obj: float
  dual_obj: float
  edge: float
  r: float
  mu_gap: float
  n_weak: int
  eg_iterations: int
  solve_seconds: float
  train_accuracy: float

TRACE_HEADER = [f.name for f in fields(TraceRow)]

def write_trace(trace: Sequence[TraceRow], path: str) -> int:
  return write_csv(path, TRACE_HEADER, (astuple(row) for row in trace))

def assemble_qp(
    a_matrix: np.ndarray,
    q: QMatrix,
    e: ClassVector | np.ndarray,
    theta: float
) -> SimplexQP:
  """
  The simplex QP min 1/2 w'(A'QA)w - theta (e'A) w.

  :param a_matrix: m x n label-weighted responses
  :param q: Q matrix
  :param e: Class vector (or the vector e itself)
  :param theta: Weight of the margin-gap term
  """
  a_matrix = np.asarray(a_matrix, dtype=np.float64)
  e = e.e if isinstance(e, ClassVector) else np.asarray(e, dtype=np.float64)
  if a_matrix.ndim != 2 or a_matrix.shape[0] != q.m or e.shape != (q.m,):
    raise ValueError(f"dimension mismatch: A {a_matrix.shape}, Q {q.m}x{q.m}, e {e.shape}")
  P = a_matrix.T @ q.matvec(a_matrix)
  P = 0.5 * (P + P.T)
  c = theta * (e @ a_matrix)
  return SimplexQP(P, c)

def primal_objective(
    rho: np.ndarray,
    q: QMatrix,
    e: ClassVector | np.ndarray,
    theta: float
) -> float:
  """1/2 rho'Q rho - theta e'rho."""
  e = e.e if isinstance(e, ClassVector) else e
  return 0.5 * q.quad(rho) - theta * float(e @ rho)

def recover_dual(
    rho: np.ndarray,
    q: QMatrix,
    e: ClassVector | np.ndarray,
    theta: float,
    a_matrix: np.ndarray
) -> DualCertificate:
  """
  Dual variables from the primal margins via the KKT conditions.

  :param rho: Margins A w at the current primal solution
  :param a_matrix: Columns selected so far
  """
  e = e.e if isinstance(e, ClassVector) else np.asarray(e, dtype=np.float64)
  u = -q.matvec(rho) + theta * e
  r = float((u @ np.asarray(a_matrix)).max())
  return DualCertificate(u, r)

def dual_objective(
    certificate: DualCertificate,
    q: QMatrix,
    e: ClassVector | np.ndarray,
    theta: float
) -> float:
  """-r - 1/2 (u - theta e)'(Q + delta I)^{-1}(u - theta e)."""
  e = e.e if isinstance(e, ClassVector) else e
  d = certificate.u - theta * e
  return -certificate.r - 0.5 * float(d @ q.solve_regularized(d))

def _check_ordered(y: np.ndarray) -> None:
  if np.any(np.diff(y.astype(np.int64)) > 0):
    raise ValueError("labels must be ordered positives first (see order_by_label)")

class TotallyCorrectiveBooster:
  """
  Column generation for the FisherBoost/LACBoost QP.

  Each iteration adds the stump with the largest edge under the current duals u,
  re-solves the simplex QP over all selected stumps (warm-started EG by default) and
  recovers (u, r) from the KKT conditions. Stops when the best edge is below r + epsilon
  or after n_max stumps.

  :param config: Boosting settings
  :param mode: 'fisher' or 'lac'
  :param logger: Logger for progress and assumption warnings
  """
  def __init__(
      self,
      config: BoostConfig = BoostConfig(),
      mode: Mode = "fisher",
      logger: logging.Logger = default_logger
  ) -> None:
    if mode not in ("fisher", "lac"):
      raise ValueError(f"mode must be 'fisher' or 'lac', got {mode!r}")
    self._config = config
    self._mode = mode
    self._logger = logger
    self._solver: SimplexSolver = (
      EGSolver(config.eg) if config.solver == "eg" else ReferenceSolver(config.reference)
    )
    return

  @property
  def config(self) -> BoostConfig:
    return self._config

  @property
  def mode(self) -> Mode:
    return self._mode

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
  ) -> tuple[StrongClassifier, list[TraceRow]]:
    """
    Run column generation on label-ordered data.

    :param X: m x d feature matrix, positives first
    :param y: +1/-1 labels, positives first
    :param n_columns: Fixed stump budget; the epsilon test is then logged but does not stop
    :param initial_stumps: Stumps selected earlier (e.g. by previous cascade exits)
    :param feature_subset: Features searched for new stumps
    :return: Classifier with offset 0, and the per-iteration trace
    """
    cfg = self.config
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    _check_ordered(y)
    m1 = int(np.count_nonzero(y == 1))
    m2 = int(np.count_nonzero(y == -1))
    q = build_q(self.mode, m1, m2, cfg.q_exact, cfg.delta)
    cv = ClassVector.from_labels(y)
    e = cv.e
    budget = n_columns if n_columns is not None else cfg.n_max
    if self.mode == "lac" and budget < cfg.min_weak_for_lac:
      self.logger.warning(
        f"LACBoost with {budget} weak classifiers (< {cfg.min_weak_for_lac}); "
        "margins may be far from Gaussian"
      )

    if budget < 1:
      raise ValueError("the stump budget must be >= 1")
    capacity = max(budget, len(initial_stumps), 1)
    response = ResponseMatrix(y, capacity=capacity)
    qa = np.empty((len(y), capacity), order='F')
    P = np.zeros((0, 0))
    c = np.zeros(0)
    stumps: list[Stump] = []

    def add_column(stump: Stump) -> None:
      nonlocal P, c, qa
      a_new = response.append(stump.predict(X))
      n = response.n
      if n > qa.shape[1]:
        grown = np.empty((qa.shape[0], 2 * qa.shape[1]), order='F')
        grown[:, :n - 1] = qa[:, :n - 1]
        qa = grown
      qa[:, n - 1] = q.matvec(a_new)
      col = response.a_matrix.T @ qa[:, n - 1]
      P_next = np.empty((n, n))
      P_next[:n - 1, :n - 1] = P
      P_next[:n - 1, n - 1] = col[:n - 1]
      P_next[n - 1, :n - 1] = col[:n - 1]
      P_next[n - 1, n - 1] = col[n - 1]
      P = P_next
      c = np.append(c, cfg.theta * float(e @ a_new))
      stumps.append(stump)

    w: np.ndarray | None = None
    f_prev = np.inf
    u = np.full(len(y), 1.0 / len(y))
    r: float | None = None
    trace: list[TraceRow] = []

    def resolve(edge: float) -> None:
      nonlocal w, f_prev, u, r
      qp = SimplexQP(P, c)
      init = warm_start(w, cfg.warm_start_mass) if w is not None and len(w) == qp.n - 1 else None
      result = self._solver.solve(qp, init)
      w_new, f_new = result.w, result.f
      if w is not None and len(w) == qp.n - 1 and f_new > f_prev:
        # the previous optimum padded with a zero weight is feasible
        w_new = np.append(w, 0.0)
        f_new = qp.objective(w_new)
        self.logger.debug("solver returned f above the previous optimum; keeping padded solution")
      w, f_prev = w_new, f_new

      rho = margins(response.a_matrix, w)
      cert = recover_dual(rho, q, e, cfg.theta, response.a_matrix)
      u, r = cert.u, cert.r
      mu_gap = float(e @ rho)
      if mu_gap < 0:
        self.logger.warning(
          f"mu1 - mu2 = {mu_gap:.6g} < 0 at {qp.n} weak classifiers; continuing"
        )
      scores = y * rho
      accuracy = float(np.mean(np.where(scores >= 0, 1, -1) == y))
      row = TraceRow(
        iteration=len(trace) + 1,
        primal_obj=f_new,
        dual_obj=dual_objective(cert, q, e, cfg.theta),
        edge=edge,
        r=r,
        mu_gap=mu_gap,
        n_weak=qp.n,
        eg_iterations=result.iterations,
        solve_seconds=result.seconds,
        train_accuracy=accuracy
      )
      trace.append(row)
      self.logger.debug(
        f"[{row.iteration}] n={row.n_weak} primal={row.primal_obj:.10g} dual={row.dual_obj:.10g} "
        f"edge={edge:.6g} r={r:.6g} mu_gap={mu_gap:.6g}"
      )

    for stump in initial_stumps:
      add_column(stump)
    if stumps:
      resolve(edge=float('nan'))

    while len(stumps) < budget:
      stump, edge = best_stump(X, y, u, feature_subset, threads=cfg.threads)
      if r is not None and edge < r + cfg.epsilon:
        if n_columns is None:
          self.logger.info(
            f"Column generation converged with {len(stumps)} weak classifiers "
            f"(edge {edge:.6g} < r + epsilon = {r + cfg.epsilon:.6g})"
          )
          break
        self.logger.debug(f"edge {edge:.6g} < r + epsilon; adding a column to meet the budget")
      add_column(stump)
      resolve(edge)

    classifier = StrongClassifier(
      stumps=list(stumps),
      weights=w,
      offset=0.0,
      method="lacboost" if self.mode == "lac" else "fisherboost",
      provenance={'theta': cfg.theta, 'q_exact': cfg.q_exact, 'solver': cfg.solver}
    )
    return classifier, trace

def train_totally_corrective(
    dataset: Dataset,
    config: BoostConfig = BoostConfig(),
    mode: Mode = "fisher",
    n_columns: int | None = None,
    logger: logging.Logger = default_logger
) -> tuple[StrongClassifier, list[TraceRow]]:
  """
  Train a FisherBoost ('fisher') or LACBoost ('lac') strong classifier.

  :param dataset: Vector-mode dataset with both classes present
  :param config: Boosting settings
  :param mode: QP mode
  :param n_columns: Optional fixed stump budget
  :return: (classifier with offset b = 0, per-iteration trace)
  """
  if dataset.is_image:
    raise ValueError("image datasets must be converted to Haar feature vectors first")
  dataset.require_both_classes()
  ordered = order_by_label(dataset)
  subset = sample_features(ordered.dim, config.feature_fraction, config.seed)
  booster = TotallyCorrectiveBooster(config, mode, logger)
  return booster.fit(ordered.examples, ordered.labels, n_columns=n_columns, feature_subset=subset)
