from fisherboost.solvers.base_solver import SimplexSolver, SolverResult
from fisherboost.solvers.benchmark import BenchRow, bench_solvers, random_qp, write_bench
from fisherboost.solvers.eg_solver import EGSolver, eg_solve
from fisherboost.solvers.reference_solver import ReferenceSolver, reference_solve
from fisherboost.solvers.simplex_qp import SimplexQP, SolverState, is_on_simplex, lipschitz_estimate, project_to_simplex, warm_start
