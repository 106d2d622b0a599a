import time

import numpy as np
import pytest

from fisherboost.solvers import (
  EGSolver, ReferenceSolver, SimplexQP, bench_solvers, eg_solve, is_on_simplex,
  lipschitz_estimate, project_to_simplex, random_qp, reference_solve, warm_start, write_bench
)
from fisherboost.utils.config import EGConfig
from fisherboost.utils.errors import SolverError

def planted_qp(rng: np.random.Generator, n: int) -> tuple[SimplexQP, np.ndarray]:
  """Strongly convex QP whose minimizer is a known interior point of the simplex."""
  B = rng.normal(size=(n, n))
  P = B.T @ B / n + np.eye(n)
  w_star = rng.dirichlet(np.full(n, 5.0))
  c = P @ w_star - rng.normal()
  return SimplexQP(P, c), w_star

class TestSimplexQP:

  def test_objective(self):
    qp = SimplexQP(np.array([[2.0, 0.0], [0.0, 4.0]]), np.array([1.0, 0.0]))
    assert qp.objective(np.array([0.5, 0.5])) == pytest.approx(0.5 * (0.5 + 1.0) - 0.5)

  def test_rejects_asymmetric(self):
    with pytest.raises(ValueError, match="symmetric"):
      SimplexQP(np.array([[1.0, 2.0], [0.0, 1.0]]), np.zeros(2))

  def test_rejects_length_mismatch(self):
    with pytest.raises(ValueError, match="length 2"):
      SimplexQP(np.eye(2), np.zeros(3))

  def test_shift_lowers_objective_by_gamma(self, rng):
    qp, _ = planted_qp(rng, 6)
    w = rng.dirichlet(np.ones(6))
    assert qp.shifted(0.25).objective(w) == pytest.approx(qp.objective(w) - 0.25)

  def test_lipschitz_bounds_gradient(self, rng):
    qp, _ = planted_qp(rng, 8)
    bound = lipschitz_estimate(qp)
    for _ in range(20):
      w = rng.dirichlet(np.ones(8))
      assert np.abs(qp.gradient(w)).max() <= bound + 1e-12

class TestSimplexHelpers:

  def test_projection_lands_on_simplex(self, rng):
    for _ in range(50):
      w = project_to_simplex(rng.normal(scale=3.0, size=12))
      assert is_on_simplex(w, tol=1e-12)

  def test_projection_fixes_simplex_points(self, rng):
    w = rng.dirichlet(np.ones(5))
    np.testing.assert_allclose(project_to_simplex(w), w, atol=1e-15)

  def test_warm_start_is_interior(self):
    w = warm_start(np.array([0.7, 0.3, 0.0]), mass=0.01)
    assert w.shape == (4,)
    assert np.all(w > 0)
    assert w.sum() == pytest.approx(1.0)
    assert w[0] > w[1] > w[3] > w[2]

  def test_warm_start_rejects_bad_mass(self):
    with pytest.raises(ValueError):
      warm_start(np.array([1.0]), mass=1.0)

class TestSolvers:

  @pytest.mark.parametrize("solver", [EGSolver(), ReferenceSolver()])
  def test_single_coordinate(self, solver):
    result = solver.solve(SimplexQP(np.array([[3.0]]), np.array([1.0])))
    np.testing.assert_array_equal(result.w, [1.0])
    assert result.f == pytest.approx(0.5)
    assert result.converged

  @pytest.mark.parametrize("solver", [EGSolver(), ReferenceSolver()])
  def test_empty_problem(self, solver):
    with pytest.raises(ValueError, match="n = 0"):
      solver.solve(SimplexQP(np.zeros((0, 0)), np.zeros(0)))

  def test_linear_objective_picks_vertex(self):
    w, f = reference_solve(SimplexQP(np.zeros((3, 3)), np.array([0.1, 0.5, 0.2])))
    np.testing.assert_array_equal(w, [0.0, 1.0, 0.0])
    assert f == pytest.approx(-0.5)

  def test_constant_objective(self):
    w, f, iterations = eg_solve(SimplexQP(np.zeros((4, 4)), np.zeros(4)))
    assert iterations == 0
    np.testing.assert_allclose(w, 0.25)

  def test_eg_rejects_boundary_start(self):
    qp = SimplexQP(np.eye(3), np.zeros(3))
    with pytest.raises(ValueError, match="strictly inside"):
      EGSolver().solve(qp, np.array([1.0, 0.0, 0.0]))

  def test_eg_non_finite_gradient(self):
    qp = SimplexQP(np.array([[np.inf, 0.0], [0.0, 1.0]]), np.zeros(2))
    with pytest.raises(SolverError, match="non-finite"):
      EGSolver().solve(qp)

  def test_reference_iteration_budget(self, rng):
    from fisherboost.utils.config import ReferenceConfig
    qp, _ = planted_qp(rng, 10)
    with pytest.raises(SolverError, match="stationarity"):
      ReferenceSolver(ReferenceConfig(tolerance=1e-14, max_iters=2)).solve(qp)

  def test_reference_finds_planted_minimizer(self, rng):
    for n in (2, 5, 20):
      qp, w_star = planted_qp(rng, n)
      w, f = reference_solve(qp)
      np.testing.assert_allclose(w, w_star, atol=1e-6)
      assert f == pytest.approx(qp.objective(w_star), abs=1e-10)

  def test_eg_matches_reference_on_random_problems(self, rng):
    eg = EGSolver(EGConfig(step_scale=5.0, tolerance=1e-8, max_iters=20_000))
    ref = ReferenceSolver()
    for _ in range(100):
      qp, _ = planted_qp(rng, int(rng.integers(2, 51)))
      result = eg.solve(qp)
      f_eg = result.f
      f_ref = ref.solve(qp).f
      assert is_on_simplex(result.w, tol=1e-9)
      assert abs(f_eg - f_ref) <= 1e-5 * (1 + abs(f_ref))
      assert f_eg >= f_ref - 1e-9

  @pytest.mark.slow
  def test_eg_solves_100_problems_in_30_seconds(self, rng):
    eg = EGSolver(EGConfig(step_scale=5.0, tolerance=1e-8, max_iters=20_000))
    problems = [planted_qp(rng, int(rng.integers(2, 51)))[0] for _ in range(100)]
    start = time.perf_counter()
    for qp in problems:
      eg.solve(qp)
    assert time.perf_counter() - start < 30

  def test_eg_best_iterate_never_worse_than_start(self, rng):
    qp, _ = planted_qp(rng, 30)
    result = EGSolver(EGConfig(max_iters=50)).solve(qp)
    uniform = np.full(30, 1.0 / 30)
    assert result.f <= qp.objective(uniform)
    assert all(b <= a for a, b in zip(result.history, result.history[1:]))

  def test_warm_start_is_used(self, rng):
    qp, w_star = planted_qp(rng, 8)
    near = 0.999 * w_star + 0.001 / 8
    result = EGSolver(EGConfig(max_iters=1)).solve(qp, near)
    assert result.f <= qp.objective(near) + 1e-12

class TestBenchmark:

  def test_random_qp_is_boosting_shaped(self):
    qp = random_qp(20, seed=3)
    assert qp.n == 20
    assert np.all(np.linalg.eigvalsh(qp.P) > 0)
    np.testing.assert_array_equal(qp.P, random_qp(20, seed=3).P)

  def test_bench_row(self, tmp_path):
    row = bench_solvers(n=30, seed=0)
    assert row.n == 30
    assert row.eg_seconds > 0 and row.reference_seconds > 0
    assert row.objective_gap == pytest.approx(abs(row.eg_objective - row.reference_objective))
    path = tmp_path / "bench.csv"
    assert write_bench([row], str(path)) == 1
    assert path.read_text().splitlines()[0].startswith("n,tolerance,")

  @pytest.mark.slow
  def test_thousand_coordinates(self):
    row = bench_solvers(n=1000, seed=0, eg_config=EGConfig(step_scale=5.0))
    assert abs(row.objective_gap) <= 1e-5
