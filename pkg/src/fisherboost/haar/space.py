import functools

import numpy as np

from dataclasses import dataclass
from typing import Literal
from collections.abc import Sequence

from fisherboost.boosting.stumps import Stump, sample_features
from fisherboost.data.dataset import Dataset
from fisherboost.haar.features import HaarFeature, enumerate_features, feature_matrix

@functools.lru_cache(maxsize=4)
def _features_for(window_w: int, window_h: int) -> tuple[HaarFeature, ...]:
  return tuple(enumerate_features(window_w, window_h))

@dataclass(frozen=True)
class FeatureSpace:
  """
  Where stump feature indices point: columns of a feature vector, or Haar features of a window.

  :param kind: 'vector' or 'haar'
  :param dim: Number of addressable features
  :param window: (width, height) of Haar windows
  """
  kind: Literal["vector", "haar"]
  dim: int
  window: tuple[int, int] | None = None

  @classmethod
  def for_dataset(cls, dataset: Dataset) -> 'FeatureSpace':
    if dataset.is_image:
      h, w = dataset.examples.shape[1:]
      return cls("haar", len(_features_for(w, h)), (w, h))
    return cls("vector", dataset.examples.shape[1])

  def feature(self, index: int) -> HaarFeature:
    if self.kind != "haar":
      raise ValueError("vector feature spaces have no Haar features")
    return _features_for(*self.window)[index]

  def design(
      self,
      dataset: Dataset,
      indices: Sequence[int] | None = None,
      threads: int = 1
  ) -> tuple[np.ndarray, dict[int, int] | None]:
    """
    Feature matrix for `dataset` restricted to the given global indices.

    :return: (matrix, global index -> column map); the map is None when the matrix
      columns are the global indices themselves
    """
    if self.kind == "vector":
      if dataset.is_image:
        raise ValueError("image dataset given to a vector feature space")
      return dataset.examples, None
    if not dataset.is_image:
      raise ValueError("vector dataset given to a Haar feature space")
    if tuple(reversed(dataset.examples.shape[1:])) != self.window:
      raise ValueError(
        f"images are {dataset.examples.shape[2]}x{dataset.examples.shape[1]}, "
        f"model window is {self.window[0]}x{self.window[1]}"
      )
    chosen = sorted(set(range(self.dim) if indices is None else indices))
    features = [self.feature(i) for i in chosen]
    X = feature_matrix(dataset.examples, features, threads=threads)
    return X, {g: k for k, g in enumerate(chosen)}

  def describe(self, indices: Sequence[int]) -> dict:
    """Model-file description, including index -> (type, x, y, w, h) for Haar spaces."""
    record = {'kind': self.kind, 'dim': self.dim}
    if self.kind == "haar":
      record['window'] = list(self.window)
      record['features'] = {str(i): self.feature(i).to_list() for i in sorted(set(indices))}
    return record

def globalize(stumps: Sequence[Stump], indices: Sequence[int]) -> list[Stump]:
  """Map stumps trained on columns of a restricted matrix back to global feature indices."""
  ordered = sorted(set(indices))
  return [s.remap(ordered[s.feature_index]) for s in stumps]

@dataclass(frozen=True)
class SampledDesign:
  """
  Feature matrices for training, built over a sampled feature subset.

  :param space: Feature space of the datasets
  :param matrices: One feature matrix per dataset
  :param feature_subset: Matrix columns searched for stumps (None: all of them)
  :param indices: Global feature index of every matrix column, or None when the
    matrix columns are already global indices
  """
  space: FeatureSpace
  matrices: list[np.ndarray]
  feature_subset: list[int] | None
  indices: list[int] | None

  def globalize(self, stumps: Sequence[Stump]) -> list[Stump]:
    if self.indices is None:
      return list(stumps)
    return globalize(stumps, self.indices)

def sampled_design(
    datasets: Sequence[Dataset],
    fraction: float = 1.0,
    seed: int = 0,
    threads: int = 1
) -> SampledDesign:
  """
  Sample `fraction` of the feature space once and build every dataset's training matrix.

  Vector datasets keep their full matrix and restrict the stump search instead; Haar
  datasets only get the sampled feature columns computed.
  """
  space = FeatureSpace.for_dataset(datasets[0])
  for dataset in datasets[1:]:
    if FeatureSpace.for_dataset(dataset) != space:
      raise ValueError("datasets do not share one feature space")
  subset = sample_features(space.dim, fraction, seed)
  if space.kind == "vector":
    return SampledDesign(space, [d.examples for d in datasets], subset, None)
  matrices = [space.design(d, subset, threads)[0] for d in datasets]
  return SampledDesign(space, matrices, None, subset)
