import logging

import numpy as np

from dataclasses import astuple, dataclass, fields

from fisherboost.solvers.eg_solver import EGSolver
from fisherboost.solvers.reference_solver import ReferenceSolver
from fisherboost.solvers.simplex_qp import SimplexQP
from fisherboost.utils.config import EGConfig, ReferenceConfig
from fisherboost.utils.file import write_csv
from fisherboost.utils.random import substream

logger = logging.getLogger('fisherboost.solvers.benchmark')

@dataclass(frozen=True)
class BenchRow:
  n: int
  tolerance: float
  eg_seconds: float
  reference_seconds: float
  eg_objective: float
  reference_objective: float
  objective_gap: float
  speed_ratio: float
  eg_iterations: int
  reference_iterations: int

BENCH_HEADER = [f.name for f in fields(BenchRow)]

def random_qp(n: int, seed: int = 0, concentration: float = 100.0) -> SimplexQP:
  """
  A boosting-shaped simplex QP with a planted minimizer.

  P = A'A / m + 1e-3 I for a random +-1 matrix A with m = 2n rows. The minimizer w* is a
  Dirichlet(concentration) draw, so it is interior and close to uniform, and
  c = P w* makes the gradient at w* constant across coordinates.
  """
  if n < 1:
    raise ValueError("n must be >= 1")
  rng = substream(seed, 'bench')
  m = 2 * n
  A = rng.choice(np.array([-1.0, 1.0]), size=(m, n), p=[0.4, 0.6])
  P = A.T @ A / m + 1e-3 * np.eye(n)
  w_star = rng.dirichlet(np.full(n, concentration))
  return SimplexQP(P, P @ w_star)

def bench_solvers(
    n: int = 1000,
    seed: int = 0,
    tolerance: float = 1e-7,
    eg_config: EGConfig = EGConfig(),
    reference_config: ReferenceConfig = ReferenceConfig()
) -> BenchRow:
  """
  Time EG against the reference solver on the same random QP at a matched tolerance.
  """
  qp = random_qp(n, seed)
  eg = EGSolver(eg_config.model_copy(update={'tolerance': tolerance})).solve(qp)
  ref = ReferenceSolver(reference_config.model_copy(update={'tolerance': tolerance})).solve(qp)
  ratio = ref.seconds / eg.seconds if eg.seconds > 0 else float('inf')
  row = BenchRow(
    n=n,
    tolerance=tolerance,
    eg_seconds=eg.seconds,
    reference_seconds=ref.seconds,
    eg_objective=eg.f,
    reference_objective=ref.f,
    objective_gap=abs(eg.f - ref.f),
    speed_ratio=ratio,
    eg_iterations=eg.iterations,
    reference_iterations=ref.iterations
  )
  logger.info(
    f"n={n}: EG {eg.seconds:.4g}s, reference {ref.seconds:.4g}s "
    f"(ratio {ratio:.3g}), objective gap {row.objective_gap:.3g}"
  )
  return row

def write_bench(rows: list[BenchRow], path: str) -> int:
  return write_csv(path, BENCH_HEADER, (astuple(r) for r in rows))
