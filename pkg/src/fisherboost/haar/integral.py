import numpy as np

def integral(image: np.ndarray) -> np.ndarray:
  """
  (h+1) x (w+1) cumulative-sum table; entry (r, c) is the sum of pixels above and left of (r, c).

  :param image: Non-empty 2-D image (or a stack of images, last two axes being rows and columns)
  :return: int64 table with a zero first row and column
  """
  image = np.asarray(image)
  if image.ndim < 2 or image.shape[-1] == 0 or image.shape[-2] == 0:
    raise ValueError("integral image needs a non-empty 2-D image")
  table = image.astype(np.int64).cumsum(axis=-2).cumsum(axis=-1)
  pad = [(0, 0)] * (image.ndim - 2) + [(1, 0), (1, 0)]
  return np.pad(table, pad)

def rect_sum(table: np.ndarray, r1: int, c1: int, r2: int, c2: int) -> int:
  """
  Sum of pixels in rows [r1, r2) and columns [c1, c2), from four table lookups.
  """
  return int(table[r2, c2] - table[r1, c2] - table[r2, c1] + table[r1, c1])
