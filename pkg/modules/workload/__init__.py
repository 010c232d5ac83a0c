from modules.workload.trace import (
    TraceRecord, TraceParseError, EmptyInput,
    load_trace, save_trace, synthetic_trace, pareto_shape,
)
from modules.workload.sampler import (
    Payment, SizeClass, UnreachablePairError, PAIRINGS, PAIRING_MAPPED, PAIRING_RANDOM,
    percentile_threshold, classify, sample_payments,
)
from modules.workload.stats import WindowStats, TraceSummary, size_cdf, recurrence_stats, trace_summary
