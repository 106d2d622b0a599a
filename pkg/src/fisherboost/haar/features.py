import logging

import numpy as np
from scipy import sparse

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from collections.abc import Sequence

from fisherboost.haar.integral import integral, rect_sum

logger = logging.getLogger('fisherboost.haar.features')

class HaarType(str, Enum):
  TWO_HORIZONTAL = "two-rect-horizontal"
  TWO_VERTICAL = "two-rect-vertical"
  THREE_HORIZONTAL = "three-rect-horizontal"
  THREE_VERTICAL = "three-rect-vertical"
  FOUR_DIAGONAL = "four-rect-diagonal"

# (columns, rows) of the unit cell grid and the weight of each cell, row-major
_LAYOUT: dict[HaarType, tuple[int, int, tuple[int, ...]]] = {
  HaarType.TWO_HORIZONTAL: (2, 1, (1, -1)),
  HaarType.TWO_VERTICAL: (1, 2, (1, -1)),
  HaarType.THREE_HORIZONTAL: (3, 1, (1, -2, 1)),
  HaarType.THREE_VERTICAL: (1, 3, (1, -2, 1)),
  HaarType.FOUR_DIAGONAL: (2, 2, (1, -1, -1, 1)),
}

@dataclass(frozen=True)
class HaarFeature:
  """
  A Haar-like feature: a grid of equal cells at (x, y) spanning w x h pixels.

  Two-rect features weigh their cells +1, -1 (left/right or top/bottom); three-rect features
  weigh the flanks +1 and the middle -2; the four-rect feature weighs the diagonal pairs
  +1 (top-left, bottom-right) and -1.
  """
  type: HaarType
  x: int
  y: int
  w: int
  h: int

  def rectangles(self) -> list[tuple[int, int, int, int, int]]:
    """(r1, c1, r2, c2, weight) per cell, half-open."""
    cols, rows, weights = _LAYOUT[self.type]
    cw, ch = self.w // cols, self.h // rows
    cells = []
    for k, weight in enumerate(weights):
      i, j = divmod(k, cols)
      r1 = self.y + i * ch
      c1 = self.x + j * cw
      cells.append((r1, c1, r1 + ch, c1 + cw, weight))
    return cells

  def fits(self, window_w: int, window_h: int) -> bool:
    cols, rows, _ = _LAYOUT[self.type]
    return (
      self.x >= 0 and self.y >= 0 and self.w > 0 and self.h > 0
      and self.w % cols == 0 and self.h % rows == 0
      and self.x + self.w <= window_w and self.y + self.h <= window_h
    )

  def to_list(self) -> list:
    return [self.type.value, self.x, self.y, self.w, self.h]

  @classmethod
  def from_list(cls, record: Sequence) -> 'HaarFeature':
    kind, x, y, w, h = record
    return cls(HaarType(kind), int(x), int(y), int(w), int(h))

def enumerate_features(window_w: int, window_h: int) -> list[HaarFeature]:
  """
  Every placement and scale of the five basic feature types fitting the window.

  Order: type (declaration order), then y, x, h, w. The list index is the stable feature
  index stored in model files.
  """
  if window_w < 2 or window_h < 2:
    raise ValueError(f"window must be at least 2x2, got {window_w}x{window_h}")
  features = []
  for kind, (cols, rows, _) in _LAYOUT.items():
    for y in range(window_h):
      for x in range(window_w):
        for h in range(rows, window_h - y + 1, rows):
          for w in range(cols, window_w - x + 1, cols):
            features.append(HaarFeature(kind, x, y, w, h))
  return features

def feature_value(feature: HaarFeature, table: np.ndarray) -> float:
  """
  Signed combination of cell sums, computed exactly in integers.

  :param table: Integral image of the window
  :raises ValueError: If the feature does not fit the window
  """
  window_h, window_w = table.shape[0] - 1, table.shape[1] - 1
  if not feature.fits(window_w, window_h):
    raise ValueError(f"feature {feature} does not fit a {window_w}x{window_h} window")
  return float(sum(weight * rect_sum(table, r1, c1, r2, c2) for r1, c1, r2, c2, weight in feature.rectangles()))

def corner_matrix(
    features: Sequence[HaarFeature],
    window_w: int,
    window_h: int
) -> sparse.csr_matrix:
  """
  Sparse k x (h+1)(w+1) matrix mapping flattened integral images to feature values.
  """
  stride = window_w + 1
  rows, cols, vals = [], [], []
  for k, feature in enumerate(features):
    if not feature.fits(window_w, window_h):
      raise ValueError(f"feature {feature} does not fit a {window_w}x{window_h} window")
    for r1, c1, r2, c2, weight in feature.rectangles():
      for r, c, sign in ((r2, c2, 1), (r1, c2, -1), (r2, c1, -1), (r1, c1, 1)):
        rows.append(k)
        cols.append(r * stride + c)
        vals.append(sign * weight)
  shape = (len(features), (window_h + 1) * stride)
  # duplicate (row, col) pairs are summed on conversion
  return sparse.coo_matrix((vals, (rows, cols)), shape=shape, dtype=np.int64).tocsr()

def feature_matrix(
    images: np.ndarray,
    features: Sequence[HaarFeature],
    threads: int = 1,
    batch_size: int = 512
) -> np.ndarray:
  """
  m x k matrix of feature values for a stack of equally sized windows.

  :param images: m x h x w array
  :param features: Features to evaluate
  :param threads: Worker threads over image batches
  """
  images = np.asarray(images)
  if images.ndim != 3:
    raise ValueError("expected a stack of 2-D images")
  m, window_h, window_w = images.shape
  corners = corner_matrix(features, window_w, window_h)

  def evaluate(start: int) -> np.ndarray:
    tables = integral(images[start:start + batch_size]).reshape(-1, (window_h + 1) * (window_w + 1))
    return np.asarray(corners @ tables.T, dtype=np.float64).T

  starts = range(0, m, batch_size)
  if threads > 1 and m > batch_size:
    with ThreadPoolExecutor(max_workers=threads) as executor:
      blocks = list(executor.map(evaluate, starts))
  else:
    blocks = [evaluate(start) for start in starts]
  if not blocks:
    return np.empty((0, len(features)))
  return np.vstack(blocks)
