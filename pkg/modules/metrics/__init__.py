from modules.metrics.report import (
    ClassMetrics, MetricsReport, REPORT_COLUMNS, summarize, normalize_delays, mean_report,
)
from modules.metrics.axes import AxisOption, axis_options, get_axis, axis_values
from modules.metrics.experiment import (
    ExperimentSpec, ExperimentResult, FeeParams, RunRow,
    build_topology, build_payments, run_once, run_experiment, sweep, write_results, write_csv, derive_seed,
)
from modules.metrics.oracle import Mismatch, SUITES, run_oracles, check_maxflow, check_lp, check_yen
