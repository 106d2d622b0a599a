import numpy as np

from dataclasses import dataclass
from typing import Literal

Mode = Literal["fisher", "lac"]

@dataclass(frozen=True)
class QMatrix:
  """
  The m x m matrix Q of the boosting QP, kept in structured form.

  Rows are ordered positives first. The exact positive block is
  Q1 = (1/m) [ m1/(m1-1) I - 1/(m1-1) 11' ] (diagonal 1/m, off-diagonal -1/(m(m1-1))),
  the negative block Q2 likewise with m2; LAC zeroes Q2. The approximate form
  replaces every non-zero block by (1/m) I.

  :param mode: 'fisher' or 'lac'
  :param m1: Number of positives
  :param m2: Number of negatives
  :param exact: Exact blocks instead of the (1/m) I approximation
  :param delta: Regularization used by `solve_regularized` (Q + delta I)
  """
  mode: Mode
  m1: int
  m2: int
  exact: bool = False
  delta: float = 1e-6

  @property
  def m(self) -> int:
    return self.m1 + self.m2

  def _blocks(self) -> list[tuple[slice, int, bool]]:
    """(row slice, block size, is zero block) for the positive and negative blocks."""
    return [
      (slice(0, self.m1), self.m1, False),
      (slice(self.m1, self.m), self.m2, self.mode == "lac")
    ]

  def matvec(self, x: np.ndarray) -> np.ndarray:
    """Q x for a length-m vector or an m x k matrix."""
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    for rows, size, zero in self._blocks():
      if zero or size == 0:
        continue
      xb = x[rows]
      if self.exact:
        out[rows] = (size * xb - xb.sum(axis=0, keepdims=True)) / (self.m * (size - 1))
      else:
        out[rows] = xb / self.m
    return out

  def quad(self, x: np.ndarray) -> float:
    """x' Q x."""
    x = np.asarray(x, dtype=np.float64)
    return float(x @ self.matvec(x))

  def solve_regularized(self, x: np.ndarray) -> np.ndarray:
    """
    (Q + delta I)^{-1} x, in closed form per block.

    An exact block has eigenvalue 0 along the all-ones direction and m_b/(m(m_b-1)) on its
    orthogonal complement.
    """
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    for rows, size, zero in self._blocks():
      if size == 0:
        continue
      xb = x[rows]
      if zero:
        if self.delta <= 0:
          raise ValueError("Q has a zero block; a positive delta is required to invert it")
        out[rows] = xb / self.delta
      elif self.exact:
        lam = size / (self.m * (size - 1))
        mean = xb.mean(axis=0, keepdims=True)
        if self.delta <= 0:
          raise ValueError("exact Q is singular; a positive delta is required to invert it")
        out[rows] = mean / self.delta + (xb - mean) / (lam + self.delta)
      else:
        out[rows] = xb / (1.0 / self.m + self.delta)
    return out

  def dense(self) -> np.ndarray:
    """Explicit m x m matrix (tests and small problems only)."""
    return self.matvec(np.eye(self.m))

def build_q(
    mode: Mode,
    m1: int,
    m2: int,
    exact: bool = False,
    delta: float = 1e-6
) -> QMatrix:
  """
  Build Q for FisherBoost ('fisher') or LACBoost ('lac').

  :raises ValueError: If an exact block would have fewer than 2 members
  """
  if mode not in ("fisher", "lac"):
    raise ValueError(f"mode must be 'fisher' or 'lac', got {mode!r}")
  if m1 < 1 or m2 < 1:
    raise ValueError(f"both classes must be present (m1={m1}, m2={m2})")
  if exact and m1 < 2:
    raise ValueError(f"exact Q needs m1 >= 2, got m1={m1}")
  if exact and mode == "fisher" and m2 < 2:
    raise ValueError(f"exact Fisher Q needs m2 >= 2, got m2={m2}")
  if delta < 0:
    raise ValueError("delta must be non-negative")
  return QMatrix(mode, m1, m2, exact, delta)
