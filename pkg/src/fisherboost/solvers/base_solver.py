import logging
import time

import numpy as np

from dataclasses import dataclass, field

from fisherboost.solvers.simplex_qp import SimplexQP

@dataclass(frozen=True)
class SolverResult:
  w: np.ndarray
  f: float
  iterations: int
  converged: bool
  seconds: float = 0.0
  history: list[float] = field(default_factory=list)

class SimplexSolver:
  """
  A base class for solvers of simplex-constrained QPs.

  :param name: Short solver name used in logs and reports
  :param logger: Logger receiving progress messages
  """
  def __init__(
      self,
      name: str,
      logger: logging.Logger | None = None
  ) -> None:
    self._name = name
    self._logger = logger or logging.getLogger(f'fisherboost.solvers.{name}')
    return

  @property
  def name(self) -> str:
    return self._name

  @property
  def logger(self) -> logging.Logger:
    return self._logger

  def solve(
      self,
      qp: SimplexQP,
      init: np.ndarray | None = None
  ) -> SolverResult:
    """
    Solve `qp`, timing the run.

    :param qp: Problem instance
    :param init: Optional starting point on the simplex
    :return: Solver result with wall time filled in
    """
    if qp.n == 0:
      raise ValueError("cannot solve a QP with n = 0")
    start = time.perf_counter()
    if qp.n == 1:
      w = np.ones(1)
      result = SolverResult(w, qp.objective(w), 0, True, history=[qp.objective(w)])
    else:
      result = self._solve(qp, init)
    seconds = time.perf_counter() - start
    self.logger.debug(
      f"{self.name}: n={qp.n} f={result.f:.10g} iterations={result.iterations} "
      f"converged={result.converged} in {seconds:.4f}s"
    )
    return SolverResult(
      result.w, result.f, result.iterations, result.converged, seconds, result.history
    )

  def _solve(
      self,
      qp: SimplexQP,
      init: np.ndarray | None
  ) -> SolverResult:
    raise NotImplementedError
