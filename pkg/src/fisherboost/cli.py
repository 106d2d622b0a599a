import argparse
import logging
import os

import numpy as np

from pydantic import ValidationError
from collections.abc import Sequence

from fisherboost.boosting.column_generation import write_trace
from fisherboost.boosting.methods import METHODS
from fisherboost.cascade.diagnostics import MIN_MARGINS, normality_diagnostic, write_normality
from fisherboost.cascade.metrics import evaluate_cascade, write_node_report, write_roc
from fisherboost.cascade.multi_exit import MultiExitCascade, train_cascade, train_strong, write_cascade_trace
from fisherboost.cascade.search import compare_node_rates, decision_grid, mean_false_negative_rates, theta_grid_search, write_grid, write_node_rates
from fisherboost.data.dataset import Dataset
from fisherboost.data.io import load_dataset, save_dataset
from fisherboost.data.synthetic import gen_asymmetric, gen_node_stream, gen_toy_2d, write_node_stream
from fisherboost.haar.space import FeatureSpace
from fisherboost.model_file import load_model, save_model
from fisherboost.solvers.benchmark import bench_solvers, write_bench
from fisherboost.utils.config import DEFAULT_THETA_GRID, CascadeConfig, load_config_file, merge_config
from fisherboost.utils.errors import FisherBoostError
from fisherboost.utils.file import write_sidecar

logger = logging.getLogger('fisherboost.cli')

LOG_FORMAT = "[%(asctime)s - %(name)s - %(levelname)s] %(message)s"

def _floats(text: str) -> list[float]:
  return [float(v) for v in text.split(',') if v.strip()]

def _ints(text: str) -> list[int]:
  return [int(v) for v in text.split(',') if v.strip()]

def _range(text: str) -> tuple[float, float]:
  values = _floats(text)
  if len(values) != 2 or values[0] >= values[1]:
    raise argparse.ArgumentTypeError(f"expected 'low,high' with low < high, got {text!r}")
  return values[0], values[1]

def cascade_schedule(text: str, default: Sequence[int]) -> list[int]:
  """
  `exits=N` takes the first N exits of the default schedule, doubling the last count
  when N is longer; otherwise the value is an explicit comma-separated schedule.
  """
  if text.startswith('exits='):
    count = int(text.split('=', 1)[1])
    if count < 1:
      raise ValueError("a cascade needs at least one exit")
    schedule = list(default[:count])
    while len(schedule) < count:
      schedule.append(2 * schedule[-1])
    return schedule
  return _ints(text)

def _dataset_mode(path: str, mode: str | None) -> str:
  if mode:
    return mode
  return "images" if os.path.isdir(path) else "features"

def _load(path: str, mode: str | None) -> Dataset:
  return load_dataset(path, _dataset_mode(path, mode))

def _stem(path: str) -> str:
  return os.path.splitext(path)[0]

def effective_config(args: argparse.Namespace) -> CascadeConfig:
  """Defaults, overridden by the --config file, overridden by explicit flags."""
  flags = {
    'exit_schedule': getattr(args, 'schedule', None),
    'd_target': getattr(args, 'd_target', None),
    'f_target': getattr(args, 'f_target', None),
    'neg_quota': getattr(args, 'neg_quota', None),
    'shrinkage': getattr(args, 'shrinkage', None),
    'boost': {
      'seed': args.seed,
      'threads': args.threads,
      'theta': getattr(args, 'theta', None),
      'epsilon': getattr(args, 'epsilon', None),
      'n_max': getattr(args, 'n_max', None),
      'delta': getattr(args, 'delta', None),
      'q_exact': True if getattr(args, 'q_exact', False) else None,
      'solver': getattr(args, 'solver', None),
      'feature_fraction': getattr(args, 'feature_fraction', None),
      'k_asym': getattr(args, 'k_asym', None),
      'min_weak_for_lac': getattr(args, 'min_weak_for_lac', None),
    }
  }
  merged = merge_config(CascadeConfig().model_dump(), load_config_file(args.config), flags)
  return CascadeConfig.model_validate(merged)

def _design_for(model_space: FeatureSpace, dataset: Dataset, stumps, threads: int):
  if FeatureSpace.for_dataset(dataset).kind != model_space.kind:
    raise ValueError(f"model expects {model_space.kind} data")
  if model_space.kind == "vector" and dataset.dim != model_space.dim:
    raise ValueError(f"model expects {model_space.dim} features, data has {dataset.dim}")
  return model_space.design(dataset, [s.feature_index for s in stumps], threads)

def cmd_train(args: argparse.Namespace) -> int:
  if args.cascade is not None:
    args.schedule = cascade_schedule(args.cascade, CascadeConfig().exit_schedule)
  config = effective_config(args)
  dataset = _load(args.data, args.mode)

  if args.theta_grid:
    if args.method not in ("fisherboost", "lacboost"):
      raise ValueError("--theta-grid applies to fisherboost and lacboost only")
    theta = theta_grid_search(dataset, DEFAULT_THETA_GRID, method=args.method, config=config)
    config = config.model_copy(update={'boost': config.boost.model_copy(update={'theta': theta})})

  space = FeatureSpace.for_dataset(dataset)
  trace_path = args.trace or f"{_stem(args.out)}.trace.csv"
  report_path = args.report or f"{_stem(args.out)}.nodes.csv"
  echo = config.model_dump()
  if args.cascade is not None:
    pool = _load(args.neg_pool, args.mode) if args.neg_pool else dataset
    model = train_cascade(dataset, pool, method=args.method, config=config)
    write_cascade_trace(model.traces, trace_path)
    report = model.report
  else:
    model, trace = train_strong(dataset, args.method, config)
    write_trace(trace, trace_path)
    # single-row report of the strong classifier on its training data
    cascade = MultiExitCascade.from_strong(model, (config.d_target, config.f_target))
    X, columns = space.design(dataset, [s.feature_index for s in model.stumps], config.boost.threads)
    report, _ = evaluate_cascade(cascade, X, dataset.labels, columns, config.boost.threads)
  write_node_report(report, report_path)
  logger.info(f"Node report written to {report_path}")
  save_model(model, args.out, space, echo)
  write_sidecar(args.out, {'command': 'train', 'method': args.method, 'data': args.data, 'config': echo})
  return 0

def cmd_eval(args: argparse.Namespace) -> int:
  threads = effective_config(args).boost.threads
  loaded = load_model(args.model)
  dataset = _load(args.data, args.mode)
  cascade = loaded.cascade
  X, columns = _design_for(loaded.space, dataset, cascade.stumps, threads)
  report, roc = evaluate_cascade(cascade, X, dataset.labels, columns, threads)
  accuracy = float(np.mean(cascade.predict(X, columns, threads) == dataset.labels))
  logger.info(
    f"Accuracy {accuracy:.6f}; F_dr={report.f_dr:.6g}, F_fp={report.f_fp:.6g} "
    f"over {cascade.n_exits} exit(s)"
  )
  report_path = args.report or f"{_stem(args.model)}.eval.nodes.csv"
  roc_path = args.roc or f"{_stem(args.model)}.eval.roc.csv"
  write_node_report(report, report_path)
  write_roc(roc, roc_path)
  write_sidecar(report_path, {
    'command': 'eval', 'model': args.model, 'data': args.data,
    'accuracy': accuracy, 'flags': report.flags, 'config': loaded.config
  })
  return 0

def cmd_bench_solver(args: argparse.Namespace) -> int:
  config = effective_config(args)
  rows = [
    bench_solvers(n, config.boost.seed, args.tolerance, config.boost.eg, config.boost.reference)
    for n in args.n
  ]
  if args.out:
    write_bench(rows, args.out)
    write_sidecar(args.out, {'command': 'bench-solver', 'seed': config.boost.seed, 'sizes': args.n})
  return 0

def cmd_diagnose(args: argparse.Namespace) -> int:
  threads = effective_config(args).boost.threads
  loaded = load_model(args.model)
  dataset = _load(args.data, args.mode)
  positives = dataset.subset(np.nonzero(dataset.labels == 1)[0])
  if positives.m == 0:
    raise ValueError(f"{args.data} holds no positive examples")
  cascade = loaded.cascade
  X, columns = _design_for(loaded.space, positives, cascade.stumps, threads)
  scores = cascade.walk(X, columns, threads)
  results = []
  for t in range(cascade.n_exits):
    margins = scores[~np.isnan(scores[:, t]), t]
    if margins.size < MIN_MARGINS:
      logger.warning(f"Exit {t}: only {margins.size} surviving positives; row flagged")
      results.append((t, None, int(margins.size)))
      continue
    result = normality_diagnostic(margins)
    results.append((t, result, int(margins.size)))
    logger.info(f"Exit {t}: r_normal={result.r_normal}")
  write_normality(results, args.out)
  return 0

def cmd_gen_data(args: argparse.Namespace) -> int:
  seed = effective_config(args).boost.seed
  params = {'kind': args.kind, 'seed': seed}
  if args.kind == "node-stream":
    d_probs, f_probs = _floats(args.d), _floats(args.f)
    if len(d_probs) == 1:
      d_probs = d_probs * args.nodes
    if len(f_probs) == 1:
      f_probs = f_probs * args.nodes
    rows = gen_node_stream(d_probs, f_probs, args.n_samples, seed, args.n_negatives)
    write_node_stream(rows, args.out)
    params.update(d=d_probs, f=f_probs, n_samples=args.n_samples, n_negatives=args.n_negatives)
  else:
    if args.kind == "toy2d":
      dataset = gen_toy_2d(args.m1, args.m2, seed)
    else:
      dataset = gen_asymmetric(args.m1, args.m2, args.dim, args.separation, seed)
      params.update(dim=args.dim, separation=args.separation)
    save_dataset(dataset, args.out)
    params.update(m1=args.m1, m2=args.m2)
  write_sidecar(args.out, params)
  return 0

def cmd_compare(args: argparse.Namespace) -> int:
  config = effective_config(args)
  methods = args.methods.split(',') if args.methods else list(METHODS)
  seeds = [config.boost.seed + i for i in range(args.seeds)]
  rows = compare_node_rates(methods, args.m1, args.m2, args.n_stumps, seeds, args.f_target, config, args.dim)
  write_node_rates(rows, args.out)
  for method, rate in mean_false_negative_rates(rows).items():
    logger.info(f"{method}: mean false-negative rate {rate:.4f}")
  write_sidecar(args.out, {'command': 'compare', 'seeds': seeds, 'config': config.model_dump()})
  return 0

def cmd_boundary(args: argparse.Namespace) -> int:
  loaded = load_model(args.model)
  if isinstance(loaded.model, MultiExitCascade) or loaded.space.kind != "vector" or loaded.space.dim != 2:
    raise ValueError("boundary needs a strong classifier over 2-D feature vectors")
  points = decision_grid(loaded.model, args.x_range, args.y_range, args.size)
  write_grid(points, args.out)
  return 0

def build_parser() -> argparse.ArgumentParser:
  common = argparse.ArgumentParser(add_help=False)
  common.add_argument("--seed", type=int, default=None, help="Seed of all random sub-streams (default 0)")
  common.add_argument("--threads", type=int, default=None, help="Worker threads")
  common.add_argument("--config", default=None, help="JSON config file (flags override it)")
  verbosity = common.add_mutually_exclusive_group()
  verbosity.add_argument("--verbose", action="store_true")
  verbosity.add_argument("--quiet", action="store_true")

  data = argparse.ArgumentParser(add_help=False)
  data.add_argument("--mode", choices=["features", "images"], default=None,
                    help="Dataset format; directories default to images")

  ap = argparse.ArgumentParser(prog="fisherboost", description="FisherBoost/LACBoost training and cascade tools")
  sub = ap.add_subparsers(dest="command", required=True)

  train = sub.add_parser("train", parents=[common, data], help="Train a strong classifier or cascade")
  train.add_argument("--method", required=True, choices=METHODS)
  train.add_argument("--data", required=True)
  train.add_argument("--out", required=True, help="Model file")
  train.add_argument("--trace", default=None, help="Trace CSV (default: <out>.trace.csv)")
  train.add_argument("--report", default=None, help="Node report CSV (default: <out>.nodes.csv)")
  train.add_argument("--cascade", default=None, metavar="exits=N|n1,n2,...",
                     help="Train a multi-exit cascade with this exit schedule")
  train.add_argument("--neg-pool", default=None, help="Negative pool (default: negatives of --data)")
  train.add_argument("--theta", type=float, default=None)
  train.add_argument("--theta-grid", action="store_true", help="Choose theta from the default grid")
  train.add_argument("--epsilon", type=float, default=None)
  train.add_argument("--n-max", type=int, default=None)
  train.add_argument("--delta", type=float, default=None)
  train.add_argument("--q-exact", action="store_true")
  train.add_argument("--solver", choices=["eg", "reference"], default=None)
  train.add_argument("--feature-fraction", type=float, default=None)
  train.add_argument("--k-asym", type=float, default=None)
  train.add_argument("--min-weak-for-lac", type=int, default=None)
  train.add_argument("--d-target", type=float, default=None)
  train.add_argument("--f-target", type=float, default=None)
  train.add_argument("--neg-quota", type=int, default=None)
  train.add_argument("--shrinkage", type=float, default=None)
  train.set_defaults(handler=cmd_train)

  ev = sub.add_parser("eval", parents=[common, data], help="Node report and ROC of a model")
  ev.add_argument("--model", required=True)
  ev.add_argument("--data", required=True)
  ev.add_argument("--report", default=None)
  ev.add_argument("--roc", default=None)
  ev.set_defaults(handler=cmd_eval)

  bench = sub.add_parser("bench-solver", parents=[common], help="Time EG against the reference solver")
  bench.add_argument("--n", type=_ints, default=[1000], help="Comma-separated QP sizes")
  bench.add_argument("--tolerance", type=float, default=1e-7)
  bench.add_argument("--out", default=None)
  bench.set_defaults(handler=cmd_bench_solver)

  diag = sub.add_parser("diagnose", parents=[common, data], help="Margin normality per exit")
  diag.add_argument("--model", required=True)
  diag.add_argument("--data", required=True)
  diag.add_argument("--out", required=True)
  diag.set_defaults(handler=cmd_diagnose)

  gen = sub.add_parser("gen-data", parents=[common], help="Generate synthetic data")
  gen.add_argument("--kind", choices=["toy2d", "asymmetric", "node-stream"], default="toy2d")
  gen.add_argument("--m1", type=int, default=100)
  gen.add_argument("--m2", type=int, default=1000)
  gen.add_argument("--dim", type=int, default=10)
  gen.add_argument("--separation", type=float, default=1.0)
  gen.add_argument("--nodes", type=int, default=20, help="Node count when --d/--f hold one value")
  gen.add_argument("--d", default="0.997", help="Per-node detection probabilities")
  gen.add_argument("--f", default="0.5", help="Per-node false-positive probabilities")
  gen.add_argument("--n-samples", type=int, default=1_000_000)
  gen.add_argument("--n-negatives", type=int, default=None)
  gen.add_argument("--out", required=True)
  gen.set_defaults(handler=cmd_gen_data)

  compare = sub.add_parser("compare", parents=[common], help="Node false-negative rates per method")
  compare.add_argument("--methods", default=None, help="Comma-separated methods (default: all)")
  compare.add_argument("--m1", type=int, default=200)
  compare.add_argument("--m2", type=int, default=2000)
  compare.add_argument("--dim", type=int, default=10)
  compare.add_argument("--n-stumps", type=int, default=30)
  compare.add_argument("--seeds", type=int, default=20, help="Number of seeds, starting at --seed")
  compare.add_argument("--f-target", type=float, default=0.5)
  compare.add_argument("--theta", type=float, default=None)
  compare.add_argument("--out", required=True)
  compare.set_defaults(handler=cmd_compare)

  boundary = sub.add_parser("boundary", parents=[common], help="Decision function of a 2-D model on a grid")
  boundary.add_argument("--model", required=True)
  boundary.add_argument("--x-range", type=_range, default=(-4.0, 4.0))
  boundary.add_argument("--y-range", type=_range, default=(-4.0, 4.0))
  boundary.add_argument("--size", type=int, default=100)
  boundary.add_argument("--out", required=True)
  boundary.set_defaults(handler=cmd_boundary)
  return ap

def main(argv: Sequence[str] | None = None) -> int:
  args = build_parser().parse_args(argv)
  level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
  logging.basicConfig(level=level, format=LOG_FORMAT)
  try:
    return args.handler(args)
  except (FisherBoostError, ValueError, OSError, ValidationError) as e:
    logger.error(f"{args.command} failed: {e}")
    return 1
