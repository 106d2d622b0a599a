import logging

import numpy as np
from scipy import linalg

from fisherboost.solvers.base_solver import SimplexSolver, SolverResult
from fisherboost.solvers.simplex_qp import SimplexQP, project_to_simplex
from fisherboost.utils.config import ReferenceConfig
from fisherboost.utils.errors import SolverError

class ReferenceSolver(SimplexSolver):
  """
  Dense accelerated projected-gradient solver used as ground truth for EG.

  Step 1/lambda_max(P), Nesterov momentum with function-value restart, exact Euclidean
  projection onto the simplex. Converged when the gradient mapping
  lambda_max * |w - proj(w - g/lambda_max)|_inf falls below the tolerance.

  :param config: Tolerance and iteration budget
  """
  MAX_N = 2000

  def __init__(
      self,
      config: ReferenceConfig = ReferenceConfig(),
      logger: logging.Logger | None = None
  ) -> None:
    super().__init__('reference', logger)
    self._config = config
    return

  @property
  def config(self) -> ReferenceConfig:
    return self._config

  def _solve(
      self,
      qp: SimplexQP,
      init: np.ndarray | None
  ) -> SolverResult:
    n = qp.n
    if n > self.MAX_N:
      raise ValueError(f"reference solver is dense and limited to n <= {self.MAX_N}, got {n}")

    lam = float(linalg.eigvalsh(qp.P, subset_by_index=[n - 1, n - 1])[0])
    if lam <= 1e-14 * max(1.0, float(np.abs(qp.P).max())):
      # (numerically) linear objective: the best vertex is optimal
      w = np.zeros(n)
      w[int(np.argmin(qp.gradient(np.full(n, 1.0 / n))))] = 1.0
      f = qp.objective(w)
      return SolverResult(w, f, 0, True, history=[f])

    step = 1.0 / lam
    w = project_to_simplex(init) if init is not None else np.full(n, 1.0 / n)
    y = w.copy()
    t = 1.0
    f = qp.objective(w)
    history = [f]

    for k in range(1, self.config.max_iters + 1):
      w_next = project_to_simplex(y - step * qp.gradient(y))
      f_next = qp.objective(w_next)
      if f_next > f:
        # restart momentum
        t = 1.0
        y = w
        continue

      t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
      y = w_next + ((t - 1.0) / t_next) * (w_next - w)
      w, f, t = w_next, f_next, t_next
      history.append(f)

      mapping = lam * np.abs(w - project_to_simplex(w - step * qp.gradient(w))).max()
      if mapping <= self.config.tolerance:
        w = w / w.sum()
        return SolverResult(w, qp.objective(w), k, True, history=history)

    raise SolverError(
      f"reference solver did not reach stationarity {self.config.tolerance:g} "
      f"within {self.config.max_iters} iterations (n={n})"
    )

def reference_solve(
    qp: SimplexQP,
    config: ReferenceConfig = ReferenceConfig()
) -> tuple[np.ndarray, float]:
  """
  Solve a simplex QP with the dense reference method.

  :param qp: Problem instance with n <= 2000
  :return: (minimizer, minimum)
  :raises SolverError: If the iteration budget runs out
  """
  result = ReferenceSolver(config).solve(qp)
  return result.w, result.f
