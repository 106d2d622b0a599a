import logging
import math

import numpy as np

from fisherboost.solvers.base_solver import SimplexSolver, SolverResult
from fisherboost.solvers.simplex_qp import SimplexQP, SolverState, lipschitz_estimate
from fisherboost.utils.config import EGConfig
from fisherboost.utils.errors import SolverError

class EGSolver(SimplexSolver):
  """
  Entropic (exponentiated) gradient descent over the unit simplex.

  w^k_j ∝ w^{k-1}_j exp(-tau_k f'_j(w^{k-1})), tau_k = step_scale * sqrt(2 log n) / L_f / sqrt(k).
  Returns the best iterate. Stops when the Frank-Wolfe gap w'g - min_j g_j (an upper bound
  on the suboptimality) drops below the tolerance, when the best objective improved by less
  than the tolerance over the last `window` iterations, or after `max_iters` iterations.

  :param config: EG settings
  """
  def __init__(
      self,
      config: EGConfig = EGConfig(),
      logger: logging.Logger | None = None
  ) -> None:
    super().__init__('eg', logger)
    self._config = config
    return

  @property
  def config(self) -> EGConfig:
    return self._config

  def _solve(
      self,
      qp: SimplexQP,
      init: np.ndarray | None
  ) -> SolverResult:
    n = qp.n
    if init is None:
      w = np.full(n, 1.0 / n)
    else:
      w = np.asarray(init, dtype=np.float64)
      if w.shape != (n,):
        raise ValueError(f"initial point must have length {n}")
      if np.any(w <= 0):
        raise ValueError("initial point must be strictly inside the simplex")
      w = w / w.sum()

    cfg = self.config
    state = SolverState(
      w=w,
      lipschitz=lipschitz_estimate(qp),
      tolerance=cfg.tolerance,
      max_iters=cfg.max_iters
    )
    if state.lipschitz == 0.0:
      # constant objective
      f = qp.objective(w)
      state.record(w, f)
      return SolverResult(w, f, 0, True, history=state.history)

    scale = cfg.step_scale * math.sqrt(2.0 * math.log(n)) / state.lipschitz
    converged = False
    while state.k < state.max_iters:
      pw = qp.P @ state.w
      g = pw - qp.c
      if not np.all(np.isfinite(g)):
        raise SolverError(
          f"non-finite gradient at EG iteration {state.k} (L_f={state.lipschitz:.6g})"
        )
      f = float(0.5 * state.w @ pw - qp.c @ state.w)
      state.record(state.w, f)

      if state.w @ g - g.min() <= state.tolerance:
        converged = True
        break
      k = len(state.history)
      if k > cfg.window and state.history[k - 1 - cfg.window] - state.best_f < state.tolerance:
        converged = True
        break

      state.k += 1
      z = -scale / math.sqrt(state.k) * g
      z -= z.max()
      w = state.w * np.exp(z)
      state.w = w / w.sum()

    if not converged:
      f = qp.objective(state.w)
      state.record(state.w, f)
      self.logger.debug(f"EG stopped at max_iters={state.max_iters} with f={state.best_f:.10g}")
    return SolverResult(state.best_w, state.best_f, state.k, converged, history=state.history)

def eg_solve(
    qp: SimplexQP,
    init: np.ndarray | None = None,
    config: EGConfig = EGConfig()
) -> tuple[np.ndarray, float, int]:
  """
  Minimize a simplex QP by entropic gradient descent.

  :param qp: Problem instance (n >= 1)
  :param init: Optional strictly interior starting point; uniform 1/n otherwise
  :param config: EG settings
  :return: (best iterate, its objective, iterations)
  :raises SolverError: On a non-finite gradient
  """
  result = EGSolver(config).solve(qp, init)
  return result.w, result.f, result.iterations
