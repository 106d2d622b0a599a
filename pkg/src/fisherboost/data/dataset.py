import numpy as np

from dataclasses import dataclass, field
from numpy.typing import NDArray

MarginVector = NDArray[np.float64]

@dataclass(frozen=True)
class Dataset:
  """
  Labeled examples: either feature vectors (m x d) or grayscale windows (m x h x w).

  :param examples: Array whose first axis indexes examples
  :param labels: Array of +1/-1 labels
  :param order: Original caller index of every example; identity unless reordered
  """
  examples: np.ndarray
  labels: np.ndarray
  order: np.ndarray = field(default=None)

  def __post_init__(self):
    examples = np.asarray(self.examples)
    labels = np.asarray(self.labels)
    if labels.ndim != 1:
      raise ValueError("labels must be one-dimensional")
    if examples.ndim not in (2, 3):
      raise ValueError(
        f"examples must be feature vectors (2-D) or images (3-D), got {examples.ndim}-D"
      )
    if examples.shape[0] != labels.shape[0]:
      raise ValueError(
        f"{examples.shape[0]} examples but {labels.shape[0]} labels"
      )
    if not np.all(np.isin(labels, (-1, 1))):
      raise ValueError("labels must be +1 or -1")

    order = np.arange(labels.shape[0]) if self.order is None else np.asarray(self.order)
    if order.shape != labels.shape:
      raise ValueError("order must have one entry per example")

    if examples.ndim == 2:
      examples = examples.astype(np.float64, copy=False)
    object.__setattr__(self, 'examples', examples)
    object.__setattr__(self, 'labels', labels.astype(np.int8))
    object.__setattr__(self, 'order', order.astype(np.int64))

  @property
  def m(self) -> int:
    return int(self.labels.shape[0])

  @property
  def m1(self) -> int:
    return int(np.count_nonzero(self.labels == 1))

  @property
  def m2(self) -> int:
    return int(np.count_nonzero(self.labels == -1))

  @property
  def is_image(self) -> bool:
    return self.examples.ndim == 3

  @property
  def dim(self) -> int:
    """Feature dimensionality (vector mode) or pixel count (image mode)."""
    return int(np.prod(self.examples.shape[1:]))

  @property
  def positives(self) -> np.ndarray:
    return self.examples[self.labels == 1]

  @property
  def negatives(self) -> np.ndarray:
    return self.examples[self.labels == -1]

  def require_both_classes(self) -> None:
    if self.m1 < 1 or self.m2 < 1:
      raise ValueError(
        f"training needs at least one example per class (m1={self.m1}, m2={self.m2})"
      )

  def subset(self, index: np.ndarray) -> 'Dataset':
    return Dataset(self.examples[index], self.labels[index], self.order[index])

  @classmethod
  def concat(cls, positives: np.ndarray, negatives: np.ndarray) -> 'Dataset':
    """Build a dataset from separate positive and negative example arrays."""
    examples = np.concatenate([positives, negatives], axis=0)
    labels = np.concatenate([
      np.ones(len(positives), dtype=np.int8),
      -np.ones(len(negatives), dtype=np.int8)
    ])
    return cls(examples, labels)

def order_by_label(dataset: Dataset) -> Dataset:
  """
  Put all positives first, then all negatives, keeping the relative order within each class.

  The returned dataset's `order` maps every row back to the caller's original index.
  """
  perm = np.argsort(-dataset.labels.astype(np.int64), kind='stable')
  return dataset.subset(perm)

class ResponseMatrix:
  """
  Weak-classifier outputs H (m x n) and their label-weighted form A = diag(y) H.

  Columns are stored contiguously (column-major) and only ever appended.

  :param labels: The +1/-1 labels of the m training examples
  :param capacity: Initial column capacity
  """
  def __init__(
      self,
      labels: np.ndarray,
      capacity: int = 16
  ) -> None:
    self._labels = np.asarray(labels, dtype=np.float64)
    self._h = np.empty((self._labels.shape[0], max(capacity, 1)), dtype=np.float64, order='F')
    self._a = np.empty_like(self._h, order='F')
    self._n = 0
    return

  @property
  def m(self) -> int:
    return int(self._labels.shape[0])

  @property
  def n(self) -> int:
    return self._n

  @property
  def labels(self) -> np.ndarray:
    return self._labels

  @property
  def h_matrix(self) -> np.ndarray:
    return self._h[:, :self._n]

  @property
  def a_matrix(self) -> np.ndarray:
    return self._a[:, :self._n]

  def append(self, h_column: np.ndarray) -> np.ndarray:
    """
    Append one weak classifier's outputs.

    :param h_column: Length-m vector of +1/-1 outputs
    :return: The appended column of A
    """
    h_column = np.asarray(h_column, dtype=np.float64)
    if h_column.shape != (self.m,):
      raise ValueError(f"column must have length {self.m}, got shape {h_column.shape}")
    if not np.all(np.abs(h_column) == 1):
      raise ValueError("weak classifier outputs must be +1 or -1")

    if self._n == self._h.shape[1]:
      grow = self._h.shape[1] * 2
      h = np.empty((self.m, grow), dtype=np.float64, order='F')
      a = np.empty_like(h, order='F')
      h[:, :self._n] = self._h[:, :self._n]
      a[:, :self._n] = self._a[:, :self._n]
      self._h, self._a = h, a

    self._h[:, self._n] = h_column
    self._a[:, self._n] = self._labels * h_column
    self._n += 1
    return self._a[:, self._n - 1]

  @classmethod
  def from_columns(cls, labels: np.ndarray, h_matrix: np.ndarray) -> 'ResponseMatrix':
    h_matrix = np.asarray(h_matrix, dtype=np.float64)
    response = cls(labels, capacity=max(h_matrix.shape[1], 1))
    for j in range(h_matrix.shape[1]):
      response.append(h_matrix[:, j])
    return response

@dataclass(frozen=True)
class ClassVector:
  """
  Class indicator vectors: e1 = 1/m1 on positives, e2 = 1/m2 on negatives, e = e1 + e2.
  """
  e1: np.ndarray
  e2: np.ndarray

  @property
  def e(self) -> np.ndarray:
    return self.e1 + self.e2

  @classmethod
  def from_labels(cls, labels: np.ndarray) -> 'ClassVector':
    labels = np.asarray(labels)
    pos = labels == 1
    neg = labels == -1
    m1, m2 = int(pos.sum()), int(neg.sum())
    if m1 < 1 or m2 < 1:
      raise ValueError(f"both classes must be present (m1={m1}, m2={m2})")
    e1 = np.where(pos, 1.0 / m1, 0.0)
    e2 = np.where(neg, 1.0 / m2, 0.0)
    return cls(e1, e2)

def margins(a_matrix: np.ndarray | ResponseMatrix, w: np.ndarray) -> MarginVector:
  """
  rho = A w, the label-signed weighted vote on every example.

  :param a_matrix: m x n matrix A (or a ResponseMatrix)
  :param w: Length-n weight vector
  :return: Length-m margin vector
  """
  if isinstance(a_matrix, ResponseMatrix):
    a_matrix = a_matrix.a_matrix
  a_matrix = np.asarray(a_matrix, dtype=np.float64)
  w = np.asarray(w, dtype=np.float64)
  if a_matrix.ndim != 2 or w.ndim != 1 or a_matrix.shape[1] != w.shape[0]:
    raise ValueError(
      f"dimension mismatch: A is {a_matrix.shape}, w is {w.shape}"
    )
  return a_matrix @ w
