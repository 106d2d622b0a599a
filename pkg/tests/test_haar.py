import numpy as np
import pytest

from fisherboost.data import Dataset
from fisherboost.haar import (
  FeatureSpace, HaarFeature, HaarType, enumerate_features, feature_matrix, feature_value,
  integral, rect_sum, sampled_design
)
from fisherboost.boosting import Stump

def brute_force_count(window_w: int, window_h: int) -> int:
  """Placements per type: width a multiple of the cell columns, height of the cell rows."""
  grids = [(2, 1), (1, 2), (3, 1), (1, 3), (2, 2)]
  count = 0
  for cols, rows in grids:
    for x in range(window_w):
      for y in range(window_h):
        for w in range(1, window_w + 1):
          for h in range(1, window_h + 1):
            if w % cols == 0 and h % rows == 0 and x + w <= window_w and y + h <= window_h:
              count += 1
  return count

def naive_value(feature: HaarFeature, image: np.ndarray) -> float:
  """Signed pixel sum from a per-pixel weight mask."""
  x, y, w, h = feature.x, feature.y, feature.w, feature.h
  mask = np.zeros(image.shape)
  if feature.type == HaarType.TWO_HORIZONTAL:
    mask[y:y + h, x:x + w // 2] = 1
    mask[y:y + h, x + w // 2:x + w] = -1
  elif feature.type == HaarType.TWO_VERTICAL:
    mask[y:y + h // 2, x:x + w] = 1
    mask[y + h // 2:y + h, x:x + w] = -1
  elif feature.type == HaarType.THREE_HORIZONTAL:
    third = w // 3
    mask[y:y + h, x:x + w] = 1
    mask[y:y + h, x + third:x + 2 * third] = -2
  elif feature.type == HaarType.THREE_VERTICAL:
    third = h // 3
    mask[y:y + h, x:x + w] = 1
    mask[y + third:y + 2 * third, x:x + w] = -2
  else:
    hw, hh = w // 2, h // 2
    mask[y:y + hh, x:x + hw] = 1
    mask[y:y + hh, x + hw:x + w] = -1
    mask[y + hh:y + h, x:x + hw] = -1
    mask[y + hh:y + h, x + hw:x + w] = 1
  return float(np.sum(mask * image.astype(np.int64)))

class TestIntegral:

  def test_single_pixel(self):
    table = integral(np.array([[5]], dtype=np.uint8))
    assert rect_sum(table, 0, 0, 1, 1) == 5

  def test_zero_image(self):
    table = integral(np.zeros((4, 6), dtype=np.uint8))
    assert table.shape == (5, 7)
    assert not table.any()

  def test_rectangles_match_direct_sums(self, rng):
    image = rng.integers(0, 256, size=(24, 24), dtype=np.uint8)
    table = integral(image)
    for _ in range(500):
      r1, r2 = sorted(rng.integers(0, 25, size=2))
      c1, c2 = sorted(rng.integers(0, 25, size=2))
      assert rect_sum(table, r1, c1, r2, c2) == int(image[r1:r2, c1:c2].astype(np.int64).sum())

  def test_no_overflow(self):
    table = integral(np.full((64, 64), 255, dtype=np.uint8))
    assert rect_sum(table, 0, 0, 64, 64) == 255 * 64 * 64

  def test_empty_image(self):
    with pytest.raises(ValueError, match="non-empty"):
      integral(np.zeros((0, 3)))

class TestEnumeration:

  def test_standard_window_count(self):
    assert len(enumerate_features(24, 24)) == 162_336

  @pytest.mark.parametrize("size", [(2, 2), (3, 5), (6, 4), (8, 8)])
  def test_small_windows(self, size):
    assert len(enumerate_features(*size)) == brute_force_count(*size)

  def test_two_by_two(self):
    assert len(enumerate_features(2, 2)) == 7

  def test_stable_order(self):
    assert enumerate_features(5, 4) == enumerate_features(5, 4)

  def test_every_feature_fits(self):
    assert all(f.fits(6, 5) for f in enumerate_features(6, 5))

  def test_window_too_small(self):
    with pytest.raises(ValueError, match="at least 2x2"):
      enumerate_features(1, 5)

class TestFeatureValues:

  def test_match_naive_sums_on_small_windows(self, rng):
    images = rng.integers(0, 256, size=(20, 8, 8), dtype=np.uint8)
    features = enumerate_features(8, 8)
    values = feature_matrix(images, features)
    for i in range(20):
      expected = [naive_value(f, images[i]) for f in features]
      np.testing.assert_array_equal(values[i], expected)

  def test_match_naive_sums_on_standard_window(self, rng):
    images = rng.integers(0, 256, size=(20, 24, 24), dtype=np.uint8)
    all_features = enumerate_features(24, 24)
    features = [all_features[i] for i in rng.choice(len(all_features), size=300, replace=False)]
    values = feature_matrix(images, features, threads=2, batch_size=7)
    table = integral(images[3])
    for k, feature in enumerate(features):
      assert values[3, k] == naive_value(feature, images[3])
      assert feature_value(feature, table) == values[3, k]

  def test_constant_image_gives_zero(self):
    image = np.full((12, 12), 77, dtype=np.uint8)
    table = integral(image)
    assert all(feature_value(f, table) == 0.0 for f in enumerate_features(12, 12))

  def test_out_of_bounds(self):
    table = integral(np.zeros((4, 4), dtype=np.uint8))
    with pytest.raises(ValueError, match="does not fit"):
      feature_value(HaarFeature(HaarType.TWO_HORIZONTAL, 3, 0, 2, 1), table)

  def test_list_round_trip(self):
    feature = HaarFeature(HaarType.FOUR_DIAGONAL, 1, 2, 4, 6)
    assert HaarFeature.from_list(feature.to_list()) == feature

class TestFeatureSpace:

  def test_vector_space(self, rng):
    data = Dataset(rng.normal(size=(5, 3)), np.array([1, -1, 1, -1, 1]))
    space = FeatureSpace.for_dataset(data)
    assert (space.kind, space.dim) == ("vector", 3)
    X, columns = space.design(data)
    assert columns is None
    np.testing.assert_array_equal(X, data.examples)

  def test_haar_space_describes_used_features(self, rng):
    images = rng.integers(0, 256, size=(4, 6, 5), dtype=np.uint8)
    space = FeatureSpace.for_dataset(Dataset(images, np.array([1, -1, 1, -1])))
    assert space.kind == "haar"
    assert space.window == (5, 6)
    assert space.dim == len(enumerate_features(5, 6))
    record = space.describe([7, 3, 7])
    assert set(record['features']) == {"3", "7"}
    assert record['features']["7"] == space.feature(7).to_list()

  def test_window_mismatch(self, rng):
    space = FeatureSpace("haar", 7, (2, 2))
    data = Dataset(np.zeros((2, 3, 3), dtype=np.uint8), np.array([1, -1]))
    with pytest.raises(ValueError, match="window"):
      space.design(data)

  def test_sampled_haar_design_globalizes(self, rng):
    images = rng.integers(0, 256, size=(10, 6, 6), dtype=np.uint8)
    data = Dataset(images, np.array([1] * 5 + [-1] * 5))
    design = sampled_design([data], fraction=0.1, seed=2)
    assert design.feature_subset is None
    X = design.matrices[0]
    assert X.shape == (10, len(design.indices))
    stump = Stump(1, 0.0, 1)
    global_stump = design.globalize([stump])[0]
    assert global_stump.feature_index == design.indices[1]
    full, columns = design.space.design(data, [global_stump.feature_index])
    np.testing.assert_array_equal(full[:, columns[global_stump.feature_index]], X[:, 1])

  def test_sampled_vector_design_restricts_search(self, rng):
    data = Dataset(rng.normal(size=(6, 40)), np.array([1, 1, 1, -1, -1, -1]))
    design = sampled_design([data], fraction=0.25, seed=0)
    assert design.indices is None
    assert len(design.feature_subset) == 10
    np.testing.assert_array_equal(design.matrices[0], data.examples)
