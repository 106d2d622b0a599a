import logging
import math

import numpy as np

from dataclasses import astuple, dataclass, field, fields
from collections.abc import Mapping, Sequence
from typing import TYPE_CHECKING

from fisherboost.utils.file import write_csv

if TYPE_CHECKING:
  from fisherboost.cascade.multi_exit import MultiExitCascade

logger = logging.getLogger('fisherboost.cascade.metrics')

@dataclass(frozen=True)
class OffsetResult:
  offset: float
  detection_rate: float
  fp_rate: float
  flag: str | None = None

def _candidates(scores: np.ndarray) -> np.ndarray:
  """Midpoints of sorted distinct scores plus one sentinel below and one above."""
  s = np.unique(scores)
  return np.concatenate([[s[0] - 1.0], 0.5 * (s[1:] + s[:-1]), [s[-1] + 1.0]])

def _pass_counts(sorted_scores: np.ndarray, thresholds: np.ndarray) -> np.ndarray:
  """Number of scores >= each threshold."""
  return len(sorted_scores) - np.searchsorted(sorted_scores, thresholds, side='left')

def offset_line_search(
    scores: np.ndarray,
    labels: np.ndarray,
    d_target: float
) -> OffsetResult:
  """
  Largest offset b whose detection rate (share of positives with score >= b) is >= d_target.

  Detection and false-positive rates both fall as b grows, so the largest feasible b has
  the lowest false-positive rate. Flags: 'accepts-nothing' when only the sentinel above
  every score qualifies, 'unreachable' when not even accepting everything meets d_target.

  :param scores: Classifier scores without offset
  :param labels: +1/-1 labels
  :param d_target: Required detection rate
  """
  scores = np.asarray(scores, dtype=np.float64)
  labels = np.asarray(labels)
  pos = np.sort(scores[labels == 1])
  neg = np.sort(scores[labels == -1])
  if pos.size == 0:
    raise ValueError("offset line search needs at least one positive")

  candidates = _candidates(scores)
  passing = _pass_counts(pos, candidates)
  ok = passing >= d_target * pos.size - 1e-9
  flag = None
  if not ok.any():
    index = 0
    flag = 'unreachable'
    logger.warning(f"detection target {d_target} is unreachable; accepting everything")
  else:
    index = int(np.nonzero(ok)[0][-1])
    if index == len(candidates) - 1:
      flag = 'accepts-nothing'
  b = float(candidates[index])
  fp = float(_pass_counts(neg, np.array([b]))[0] / neg.size) if neg.size else 0.0
  return OffsetResult(b, float(passing[index] / pos.size), fp, flag)

def offset_for_fp_rate(
    scores: np.ndarray,
    labels: np.ndarray,
    f_target: float
) -> OffsetResult:
  """
  Smallest offset b whose false-positive rate is <= f_target (highest detection at that rate).
  """
  scores = np.asarray(scores, dtype=np.float64)
  labels = np.asarray(labels)
  pos = np.sort(scores[labels == 1])
  neg = np.sort(scores[labels == -1])
  if neg.size == 0:
    raise ValueError("false-positive offset search needs at least one negative")

  candidates = _candidates(scores)
  fp = _pass_counts(neg, candidates) / neg.size
  index = int(np.nonzero(fp <= f_target + 1e-12)[0][0])
  b = float(candidates[index])
  detection = float(_pass_counts(pos, np.array([b]))[0] / pos.size) if pos.size else 0.0
  return OffsetResult(b, detection, float(fp[index]))

def cascade_products(
    d_rates: Sequence[float],
    f_rates: Sequence[float]
) -> tuple[float, float]:
  """Overall detection and false-positive rates F_dr = prod d_t, F_fp = prod f_t."""
  return math.prod(d_rates), math.prod(f_rates)

@dataclass(frozen=True)
class NodeRow:
  exit_index: int
  prefix_length: int
  d_t: float
  f_t: float
  cumulative_F_dr: float
  cumulative_F_fp: float
  positives_in: int = 0
  negatives_in: int = 0
  flag: str | None = None

NODE_HEADER = [f.name for f in fields(NodeRow)]

@dataclass
class NodeReport:
  """
  Per-exit rates, conditioned on the examples that survived to each exit.
  """
  rows: list[NodeRow] = field(default_factory=list)
  flags: list[str] = field(default_factory=list)

  @property
  def f_dr(self) -> float:
    return cascade_products([r.d_t for r in self.rows], [r.f_t for r in self.rows])[0]

  @property
  def f_fp(self) -> float:
    return cascade_products([r.d_t for r in self.rows], [r.f_t for r in self.rows])[1]

  @classmethod
  def from_rates(
      cls,
      prefix_lengths: Sequence[int],
      d_rates: Sequence[float],
      f_rates: Sequence[float],
      positives_in: Sequence[int] | None = None,
      negatives_in: Sequence[int] | None = None,
      row_flags: Sequence[str | None] | None = None
  ) -> 'NodeReport':
    rows = []
    f_dr = f_fp = 1.0
    for t, (n, d, f) in enumerate(zip(prefix_lengths, d_rates, f_rates)):
      f_dr *= d
      f_fp *= f
      rows.append(NodeRow(
        exit_index=t,
        prefix_length=int(n),
        d_t=float(d),
        f_t=float(f),
        cumulative_F_dr=f_dr,
        cumulative_F_fp=f_fp,
        positives_in=int(positives_in[t]) if positives_in is not None else 0,
        negatives_in=int(negatives_in[t]) if negatives_in is not None else 0,
        flag=row_flags[t] if row_flags is not None else None
      ))
    return cls(rows)

def write_node_report(report: NodeReport, path: str) -> int:
  return write_csv(path, NODE_HEADER, (astuple(row) for row in report.rows))

@dataclass(frozen=True)
class RocRow:
  threshold: float
  false_positives: int
  detection_rate: float

ROC_HEADER = [f.name for f in fields(RocRow)]

def write_roc(rows: Sequence[RocRow], path: str) -> int:
  return write_csv(path, ROC_HEADER, (astuple(row) for row in rows))

def _rate(hits: int, total: int) -> float:
  return hits / total if total else 0.0

def evaluate_cascade(
    cascade: 'MultiExitCascade',
    X: np.ndarray,
    labels: np.ndarray,
    columns: Mapping[int, int] | None = None,
    threads: int = 1
) -> tuple[NodeReport, list[RocRow]]:
  """
  Node rates and ROC table of a cascade on labeled data.

  d_t and f_t are measured on the examples that reach exit t. The ROC table sweeps the
  final exit's offset over the midpoints of the final scores, keeping earlier exits fixed;
  its detection rate is relative to all positives.

  :param cascade: Cascade to evaluate
  :param X: Feature matrix
  :param labels: +1/-1 labels
  :param columns: Global feature index -> column of `X` (Haar designs)
  :return: (NodeReport, ROC rows in increasing threshold order)
  """
  labels = np.asarray(labels)
  scores = cascade.walk(X, columns, threads)
  reached = ~np.isnan(scores)
  with np.errstate(invalid='ignore'):
    passed = reached & (np.nan_to_num(scores, nan=-np.inf) - cascade.offsets >= 0)
  pos = labels == 1
  neg = labels == -1

  d_rates, f_rates, pos_in, neg_in, row_flags = [], [], [], [], []
  for t in range(cascade.n_exits):
    p_in = int(np.count_nonzero(reached[:, t] & pos))
    n_in = int(np.count_nonzero(reached[:, t] & neg))
    d_rates.append(_rate(int(np.count_nonzero(passed[:, t] & pos)), p_in))
    f_rates.append(_rate(int(np.count_nonzero(passed[:, t] & neg)), n_in))
    pos_in.append(p_in)
    neg_in.append(n_in)
    flag = [name for name, count in (('no-positives-reached', p_in), ('no-negatives-reached', n_in)) if count == 0]
    row_flags.append(';'.join(flag) or None)

  report = NodeReport.from_rates(
    [e.prefix_length for e in cascade.exits], d_rates, f_rates, pos_in, neg_in, row_flags
  )
  report.flags.append("node rates are conditioned on survival to each exit")

  final = scores[:, -1]
  at_final = reached[:, -1]
  if not at_final.any():
    return report, [RocRow(float(cascade.offsets[-1]), 0, 0.0)]
  thresholds = _candidates(final[at_final])
  pos_final = np.sort(final[at_final & pos])
  neg_final = np.sort(final[at_final & neg])
  total_pos = int(np.count_nonzero(pos))
  detections = _pass_counts(pos_final, thresholds)
  false_positives = _pass_counts(neg_final, thresholds)
  roc = [
    RocRow(float(b), int(fp), _rate(int(dt), total_pos))
    for b, fp, dt in zip(thresholds, false_positives, detections)
  ]
  return report, roc
