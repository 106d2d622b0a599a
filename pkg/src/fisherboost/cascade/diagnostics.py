import logging

import numpy as np

from dataclasses import dataclass
from scipy.stats import norm

from fisherboost.utils.file import write_csv

logger = logging.getLogger('fisherboost.cascade.diagnostics')

MIN_MARGINS = 8

@dataclass(frozen=True)
class NormalityResult:
  """
  Normal probability plot of a margin sample.

  :param margins: Sorted margins
  :param quantiles: Standard normal quantiles at plotting positions (i - 0.5) / n
  :param r_normal: Pearson correlation of the pairs; None when undefined
  """
  margins: np.ndarray
  quantiles: np.ndarray
  r_normal: float | None
  flag: str | None = None

  @property
  def pairs(self) -> list[tuple[float, float]]:
    return list(zip(self.margins.tolist(), self.quantiles.tolist()))

def normality_diagnostic(margins: np.ndarray) -> NormalityResult:
  """
  Compare positive-class margins against a Gaussian; r_normal close to 1 means close to normal.

  :param margins: Margins of the positive examples (at least 8)
  :raises ValueError: With fewer than 8 margins
  """
  values = np.sort(np.asarray(margins, dtype=np.float64).ravel())
  n = values.size
  if n < MIN_MARGINS:
    raise ValueError(f"normality diagnostic needs at least {MIN_MARGINS} margins, got {n}")
  quantiles = norm.ppf((np.arange(1, n + 1) - 0.5) / n)
  if np.ptp(values) == 0:
    logger.warning("Constant margins; normality correlation is undefined")
    return NormalityResult(values, quantiles, None, 'constant-margins')
  r = float(np.corrcoef(values, quantiles)[0, 1])
  return NormalityResult(values, quantiles, r)

NORMALITY_HEADER = ['exit_index', 'rank', 'margin', 'normal_quantile', 'r_normal', 'flag']

def write_normality(
    results: list[tuple[int, NormalityResult | None, int]],
    path: str
) -> int:
  """
  One block per exit. An exit with too few surviving positives gets a single flagged row.

  :param results: (exit index, diagnostic or None, surviving positives) per exit
  """
  def rows():
    for t, result, count in results:
      if result is None:
        yield (t, None, None, None, None, f'too-few-positives({count})')
        continue
      for i, (margin, quantile) in enumerate(result.pairs):
        yield (t, i + 1, margin, quantile, result.r_normal, result.flag)
  return write_csv(path, NORMALITY_HEADER, rows())
