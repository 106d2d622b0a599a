import logging
import math

import numpy as np

from dataclasses import astuple, dataclass, fields
from collections.abc import Sequence

from fisherboost.data.dataset import Dataset
from fisherboost.utils.file import write_csv
from fisherboost.utils.random import substream

logger = logging.getLogger('fisherboost.data.synthetic')

def gen_toy_2d(m1: int, m2: int, seed: int = 0) -> Dataset:
  """
  Two overlapping Gaussian blobs in the plane, typically with many more negatives than positives.

  Positives ~ N((1, 1), 0.8^2 I); negatives ~ N((-0.5, -0.5), 1.0^2 I).

  :param m1: Number of positives (>= 1)
  :param m2: Number of negatives (>= 1)
  :param seed: Seed of the 'toy2d' sub-stream
  """
  if m1 < 1 or m2 < 1:
    raise ValueError(f"m1 and m2 must be >= 1 (got m1={m1}, m2={m2})")
  rng = substream(seed, 'toy2d')
  pos = rng.normal(loc=1.0, scale=0.8, size=(m1, 2))
  neg = rng.normal(loc=-0.5, scale=1.0, size=(m2, 2))
  return Dataset.concat(pos, neg)

def gen_asymmetric(
    m1: int,
    m2: int,
    dim: int = 10,
    separation: float = 1.0,
    seed: int = 0
) -> Dataset:
  """
  Asymmetric Gaussian data in `dim` dimensions: compact positives, broad negatives.

  Positives ~ N(separation/sqrt(dim) * 1, 0.7^2 I); negatives ~ N(0, 1.3^2 I) with
  correlated coordinates, so no single feature separates the classes.

  :param m1: Number of positives
  :param m2: Number of negatives
  :param dim: Feature dimensionality
  :param separation: Euclidean distance between the class means
  :param seed: Seed of the 'asymmetric' sub-stream
  """
  if m1 < 1 or m2 < 1 or dim < 1:
    raise ValueError("m1, m2 and dim must be >= 1")
  rng = substream(seed, 'asymmetric')
  mean = np.full(dim, separation / math.sqrt(dim))
  pos = mean + 0.7 * rng.standard_normal((m1, dim))
  mixing = np.eye(dim) + 0.3 * rng.standard_normal((dim, dim)) / math.sqrt(dim)
  neg = 1.3 * rng.standard_normal((m2, dim)) @ mixing.T
  return Dataset.concat(pos, neg)

@dataclass(frozen=True)
class NodeStreamRow:
  node: int
  d: float
  f: float
  positives_alive: int
  negatives_alive: int
  empirical_f_dr: float
  empirical_f_fp: float
  expected_f_dr: float
  expected_f_fp: float

def gen_node_stream(
    d_probs: Sequence[float],
    f_probs: Sequence[float],
    n_samples: int,
    seed: int = 0,
    n_negatives: int | None = None
) -> list[NodeStreamRow]:
  """
  Simulate independent per-node accept/reject decisions through a cascade.

  Each node accepts a surviving positive with probability d_t and a surviving negative with
  probability f_t, so the number of survivors after node t is binomial in the survivors of
  node t-1. The rows compare the empirical pass rates with the product formulas.

  :param d_probs: Per-node detection probabilities
  :param f_probs: Per-node false-positive probabilities
  :param n_samples: Number of positives streamed (and negatives, unless `n_negatives` is given)
  :param seed: Seed of the 'node-stream' sub-stream
  :param n_negatives: Number of negatives streamed
  """
  if len(d_probs) != len(f_probs):
    raise ValueError("d_probs and f_probs must have equal length")
  if any(not 0 <= p <= 1 for p in list(d_probs) + list(f_probs)):
    raise ValueError("probabilities must lie in [0, 1]")
  if n_samples < 1:
    raise ValueError("n_samples must be >= 1")

  n_neg = n_samples if n_negatives is None else n_negatives
  rng = substream(seed, 'node-stream')
  pos_alive, neg_alive = n_samples, n_neg
  expected_dr = expected_fp = 1.0
  rows = []
  for t, (d, f) in enumerate(zip(d_probs, f_probs), start=1):
    pos_alive = int(rng.binomial(pos_alive, d))
    neg_alive = int(rng.binomial(neg_alive, f))
    expected_dr *= d
    expected_fp *= f
    rows.append(NodeStreamRow(
      node=t,
      d=float(d),
      f=float(f),
      positives_alive=pos_alive,
      negatives_alive=neg_alive,
      empirical_f_dr=pos_alive / n_samples,
      empirical_f_fp=neg_alive / n_neg if n_neg else 0.0,
      expected_f_dr=expected_dr,
      expected_f_fp=expected_fp
    ))
  logger.debug(f"Streamed {n_samples} positives and {n_neg} negatives through {len(rows)} nodes")
  return rows

NODE_STREAM_HEADER = [f.name for f in fields(NodeStreamRow)]

def write_node_stream(rows: Sequence[NodeStreamRow], path: str) -> int:
  return write_csv(path, NODE_STREAM_HEADER, (astuple(r) for r in rows))
