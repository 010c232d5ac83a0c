# the trace measurements: size distribution and pair recurrence per day

import math
import logging
from collections import Counter, defaultdict
from typing import List, NamedTuple, Sequence, Tuple

import numpy as np

from modules.workload.trace import TraceRecord, EmptyInput, DAY
from modules.workload.sampler import percentile_threshold

logger = logging.getLogger(__name__)


class WindowStats(NamedTuple):
    start: int                  # window start, seconds since epoch
    n_txns: int
    recurring_fraction: float
    top5_share: float           # nan when nothing recurred in the window


class TraceSummary(NamedTuple):
    n_records: int
    n_windows: int
    median_volume: float
    p90_volume: int
    top_decile_share: float
    median_recurring: float
    mean_top5_share: float


def size_cdf(records: Sequence[TraceRecord]) -> List[Tuple[int, float, float]]:
    if not records:
        raise EmptyInput('size_cdf of an empty trace')
    volumes = sorted(r.volume for r in records)
    n, total = len(volumes), sum(volumes)
    cdf, acc = [], 0
    for i, v in enumerate(volumes, start=1):
        acc += v
        cdf.append((v, i / n, acc / total))
    return cdf


def recurrence_stats(records: Sequence[TraceRecord], window: int = DAY, ordered: bool = True) -> List[WindowStats]:
    '''
    Per calendar window: the fraction of transactions whose pair was already seen earlier
    in the same window, and how concentrated each sender's recurring transactions are
    on its 5 most frequent receivers (averaged over senders).
    '''
    buckets = defaultdict(list)
    for r in sorted(records, key=lambda r: r.timestamp):
        buckets[r.timestamp // window].append(r)

    stats = []
    for b in sorted(buckets):
        txns = buckets[b]
        seen = set()
        recurring = defaultdict(Counter)
        n_rec = 0
        for r in txns:
            key = (r.sender, r.receiver) if ordered else frozenset((r.sender, r.receiver))
            if key in seen:
                n_rec += 1
                recurring[r.sender][r.receiver] += 1
            seen.add(key)

        shares = [sum(c for _, c in cnt.most_common(5)) / sum(cnt.values()) for cnt in recurring.values()]
        top5 = float(np.mean(shares)) if shares else math.nan
        stats.append(WindowStats(b * window, len(txns), n_rec / len(txns), top5))
    return stats


def trace_summary(records: Sequence[TraceRecord], q: float = 0.9) -> TraceSummary:
    if not records:
        raise EmptyInput('trace_summary of an empty trace')
    volumes = sorted((r.volume for r in records), reverse=True)
    top = volumes[:math.ceil(len(volumes) / 10)]
    windows = recurrence_stats(records)
    top5 = [w.top5_share for w in windows if not math.isnan(w.top5_share)]
    return TraceSummary(
        n_records=len(records),
        n_windows=len(windows),
        median_volume=float(np.median(volumes)),
        p90_volume=percentile_threshold(volumes, q),
        top_decile_share=sum(top) / sum(volumes),
        median_recurring=float(np.median([w.recurring_fraction for w in windows])),
        mean_top5_share=float(np.mean(top5)) if top5 else math.nan,
    )
