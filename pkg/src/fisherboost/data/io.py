import csv
import logging
import os

import numpy as np
from PIL import Image

from typing import Literal

from fisherboost.data.dataset import Dataset
from fisherboost.utils.errors import DatasetFormatError
from fisherboost.utils.file import format_value

logger = logging.getLogger('fisherboost.data.io')

MANIFEST = 'manifest.csv'

_LABEL_TOKENS = {'+1': 1, '1': 1, '-1': -1, '−1': -1}

def parse_label(token: str, path: str, line: int) -> int:
  label = _LABEL_TOKENS.get(token.strip())
  if label is None:
    raise DatasetFormatError(f"invalid label token {token!r} (expected +1 or -1)", path, line)
  return label

def load_features_csv(path: str) -> Dataset:
  """
  Read a feature CSV: label in the first column, real features after it, no header.

  :param path: CSV file
  :return: Vector-mode dataset
  :raises DatasetFormatError: On bad labels, non-numeric cells or ragged rows
  """
  labels: list[int] = []
  rows: list[list[float]] = []
  width = None

  with open(path, encoding='utf8', newline='') as f:
    for line, record in enumerate(csv.reader(f), start=1):
      if not record or all(not cell.strip() for cell in record):
        continue
      if len(record) < 2:
        raise DatasetFormatError("row needs a label and at least one feature", path, line)
      if width is None:
        width = len(record)
      elif len(record) != width:
        raise DatasetFormatError(
          f"row has {len(record) - 1} features, expected {width - 1}", path, line
        )
      labels.append(parse_label(record[0], path, line))
      try:
        rows.append([float(cell) for cell in record[1:]])
      except ValueError as e:
        raise DatasetFormatError(f"non-numeric feature value ({e})", path, line) from None

  if not labels:
    raise DatasetFormatError("no examples found", path)
  return Dataset(np.array(rows, dtype=np.float64), np.array(labels))

def save_features_csv(dataset: Dataset, path: str) -> None:
  if dataset.is_image:
    raise ValueError("image datasets are saved as a PGM directory")
  csv_rows = (
    ["+1" if y == 1 else "-1"] + [format_value(float(v)) for v in x]
    for x, y in zip(dataset.examples, dataset.labels)
  )
  directory = os.path.dirname(path)
  if directory:
    os.makedirs(directory, exist_ok=True)
  with open(path, 'w', encoding='utf8', newline='\n') as f:
    for row in csv_rows:
      f.write(','.join(row) + '\n')

def read_pgm(path: str) -> np.ndarray:
  """
  Read a binary PGM (P5) image with maxval 255.

  :param path: Image file
  :return: uint8 array of shape (height, width)
  """
  with open(path, 'rb') as f:
    magic = f.read(2)
  if magic != b'P5':
    raise DatasetFormatError(f"not a binary PGM (magic {magic!r}, expected b'P5')", path)
  try:
    with Image.open(path, formats=["PPM"]) as image:
      if image.mode != "L":
        raise DatasetFormatError(
          f"PGM image has mode {image.mode} (maxval above 255); only 8-bit images are supported",
          path
        )
      image.load()
      return np.array(image, dtype=np.uint8)
  except DatasetFormatError:
    raise
  except (OSError, SyntaxError, ValueError) as e:
    raise DatasetFormatError(f"unreadable PGM raster or header ({e})", path) from None

def write_pgm(path: str, image: np.ndarray) -> None:
  image = np.asarray(image)
  if image.ndim != 2:
    raise ValueError("PGM images must be 2-D")
  if image.min(initial=0) < 0 or image.max(initial=0) > 255:
    raise ValueError("PGM pixel values must lie in [0, 255]")
  Image.fromarray(image.astype(np.uint8)).save(path, format="PPM")

def load_images(directory: str) -> Dataset:
  """
  Read an image dataset: a directory of PGM windows plus `manifest.csv` rows of (filename, label).
  """
  manifest = os.path.join(directory, MANIFEST)
  images: list[np.ndarray] = []
  labels: list[int] = []
  shape = None

  with open(manifest, encoding='utf8', newline='') as f:
    for line, record in enumerate(csv.reader(f), start=1):
      if not record or all(not cell.strip() for cell in record):
        continue
      if len(record) != 2:
        raise DatasetFormatError("manifest rows must be (filename, label)", manifest, line)
      filename, token = record
      label = parse_label(token, manifest, line)
      image = read_pgm(os.path.join(directory, filename.strip()))
      if shape is None:
        shape = image.shape
      elif image.shape != shape:
        raise DatasetFormatError(
          f"image {filename!r} is {image.shape[1]}x{image.shape[0]}, "
          f"expected {shape[1]}x{shape[0]}",
          manifest, line
        )
      images.append(image)
      labels.append(label)

  if not images:
    raise DatasetFormatError("manifest lists no images", manifest)
  return Dataset(np.stack(images), np.array(labels))

def save_images(dataset: Dataset, directory: str) -> None:
  if not dataset.is_image:
    raise ValueError("vector datasets are saved as CSV")
  os.makedirs(directory, exist_ok=True)
  rows = []
  for i, (image, label) in enumerate(zip(dataset.examples, dataset.labels)):
    filename = f"{i:06d}.pgm"
    write_pgm(os.path.join(directory, filename), image)
    rows.append((filename, "+1" if label == 1 else "-1"))
  with open(os.path.join(directory, MANIFEST), 'w', encoding='utf8', newline='\n') as f:
    for filename, token in rows:
      f.write(f"{filename},{token}\n")

def load_dataset(
    path: str,
    mode: Literal["features", "images"] = "features"
) -> Dataset:
  """
  Load a dataset in either file format.

  :param path: CSV file (features) or directory with a manifest (images)
  :param mode: 'features' or 'images'
  :return: Dataset in file order
  """
  if mode == "features":
    dataset = load_features_csv(path)
  elif mode == "images":
    dataset = load_images(path)
  else:
    raise ValueError(f"unknown dataset mode {mode!r}")
  logger.debug(f"Loaded {dataset.m} examples ({dataset.m1} positive) from {path}")
  return dataset

def save_dataset(dataset: Dataset, path: str) -> None:
  """
  Save a dataset as CSV (vector mode) or as a PGM directory with manifest (image mode).
  """
  if dataset.is_image:
    save_images(dataset, path)
  else:
    save_features_csv(dataset, path)

