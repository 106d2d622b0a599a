from fisherboost.cascade.diagnostics import NormalityResult, normality_diagnostic, write_normality
from fisherboost.cascade.metrics import NodeReport, NodeRow, OffsetResult, RocRow, cascade_products, evaluate_cascade, offset_for_fp_rate, offset_line_search, write_node_report, write_roc
from fisherboost.cascade.multi_exit import Exit, MultiExitCascade, train_cascade, train_strong, write_cascade_trace
from fisherboost.cascade.search import GridPoint, NodeRateRow, compare_node_rates, decision_grid, mean_false_negative_rates, theta_grid_search, write_grid, write_node_rates
