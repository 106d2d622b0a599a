import numpy as np

from dataclasses import dataclass, field

@dataclass(frozen=True)
class SimplexQP:
  """
  min f(w) = 1/2 w'Pw - c'w  subject to  w >= 0, 1'w = 1.

  :param P: Symmetric n x n matrix
  :param c: Length-n linear term
  """
  P: np.ndarray
  c: np.ndarray

  def __post_init__(self):
    P = np.atleast_2d(np.asarray(self.P, dtype=np.float64))
    c = np.atleast_1d(np.asarray(self.c, dtype=np.float64))
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
      raise ValueError(f"P must be square, got shape {P.shape}")
    if c.shape != (P.shape[0],):
      raise ValueError(f"c must have length {P.shape[0]}, got shape {c.shape}")
    scale = max(1.0, float(np.abs(P).max(initial=0.0)))
    if not np.allclose(P, P.T, rtol=0.0, atol=1e-10 * scale):
      raise ValueError("P must be symmetric")
    object.__setattr__(self, 'P', P)
    object.__setattr__(self, 'c', c)

  @property
  def n(self) -> int:
    return int(self.c.shape[0])

  def objective(self, w: np.ndarray) -> float:
    return float(0.5 * w @ (self.P @ w) - self.c @ w)

  def gradient(self, w: np.ndarray) -> np.ndarray:
    return self.P @ w - self.c

  def shifted(self, gamma: float) -> 'SimplexQP':
    """The same problem with c + gamma*1; on the simplex its objective is lower by exactly gamma."""
    return SimplexQP(self.P, self.c + gamma)

@dataclass
class SolverState:
  """
  Book-keeping of one iterative solve.

  :param w: Current simplex iterate
  :param k: Iteration counter
  :param best_w: Best iterate seen so far
  :param best_f: Objective at `best_w`
  :param lipschitz: Gradient bound L_f used by the step schedule
  """
  w: np.ndarray
  k: int = 0
  best_w: np.ndarray = None
  best_f: float = np.inf
  lipschitz: float = 0.0
  tolerance: float = 1e-7
  max_iters: int = 10_000
  history: list[float] = field(default_factory=list)

  def record(self, w: np.ndarray, f: float) -> bool:
    """Track the best iterate; returns True if `w` improved on it."""
    improved = f < self.best_f
    if improved:
      self.best_f = f
      self.best_w = w.copy()
    self.history.append(self.best_f)
    return improved

def is_on_simplex(w: np.ndarray, tol: float = 1e-12) -> bool:
  w = np.asarray(w)
  return bool(w.ndim == 1 and w.size > 0 and np.all(w >= 0) and abs(w.sum() - 1.0) <= tol)

def lipschitz_estimate(qp: SimplexQP) -> float:
  """
  Upper bound on max over the simplex of |f'(w)|_inf: max_ij |P_ij| + max_j |c_j|.
  """
  return float(np.abs(qp.P).max(initial=0.0) + np.abs(qp.c).max(initial=0.0))

def warm_start(previous_w: np.ndarray, mass: float = 1e-2) -> np.ndarray:
  """
  Extend a simplex point by one coordinate holding mass `mass`, then rescale.

  Coordinates that underflowed to zero are lifted to a small floor so the
  result is strictly interior.

  :param previous_w: Point on the (n-1)-simplex
  :param mass: Mass given to the new coordinate before rescaling
  :return: Strictly positive point on the n-simplex
  """
  if not 0 < mass < 1:
    raise ValueError("warm start mass must lie in (0, 1)")
  w = np.append(np.asarray(previous_w, dtype=np.float64), mass)
  w = np.maximum(w, mass * 1e-3)
  return w / w.sum()

def project_to_simplex(v: np.ndarray) -> np.ndarray:
  """
  Euclidean projection onto the unit simplex (sort-and-threshold).
  """
  v = np.asarray(v, dtype=np.float64)
  n = v.shape[0]
  u = np.sort(v)[::-1]
  css = np.cumsum(u) - 1.0
  index = np.arange(1, n + 1)
  rho = np.nonzero(u - css / index > 0)[0][-1]
  tau = css[rho] / (rho + 1)
  return np.maximum(v - tau, 0.0)
