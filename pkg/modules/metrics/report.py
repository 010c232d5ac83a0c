'''
Aggregates RoutingOutcome sequences into the figures the experiments compare:
success ratio and volume, probing and total message counts, fees and settlement ticks,
overall and split by size class.
'''

from dataclasses import dataclass, field, fields
from fractions import Fraction
from statistics import mean
from typing import Dict, List, Optional, Sequence

from modules.router.outcome import RoutingOutcome
from modules.workload.sampler import SizeClass


@dataclass
class ClassMetrics:
    attempts: int = 0
    successes: int = 0
    success_volume: int = 0
    total_volume: int = 0
    probe_messages: int = 0
    total_messages: int = 0

    @property
    def success_ratio(self) -> float:
        return self.successes / self.attempts if self.attempts else 0.0

    @property
    def volume_ratio(self) -> float:
        return self.success_volume / self.total_volume if self.total_volume else 0.0

    def add(self, o: RoutingOutcome):
        self.attempts += 1
        self.total_volume += o.demand
        self.probe_messages += o.probe_messages
        self.total_messages += o.messages
        if o.success:
            self.successes += 1
            self.success_volume += o.delivered


@dataclass
class MetricsReport:
    router: str
    overall: ClassMetrics = field(default_factory=ClassMetrics)
    by_class: Dict[SizeClass, ClassMetrics] = field(default_factory=lambda: {c: ClassMetrics() for c in SizeClass})
    fees_paid: int = 0
    mean_fee_fraction: float = 0.0      # fee per delivered unit, averaged over successes
    mean_ticks: float = 0.0
    mean_mice_ticks: float = 0.0
    normalized_delay: Optional[float] = None    # mean_ticks over sp's in the same run

    def as_row(self) -> Dict[str, object]:
        ''' flat, ordered columns for CSV output '''
        row = {'router': self.router}
        parts = [('', self.overall)] + [(f'{c.value}_', self.by_class[c]) for c in SizeClass]
        for prefix, m in parts:
            for f in fields(ClassMetrics):
                row[prefix + f.name] = getattr(m, f.name)
            row[prefix + 'success_ratio'] = m.success_ratio
        row['fees_paid'] = self.fees_paid
        row['mean_fee_fraction'] = self.mean_fee_fraction
        row['mean_ticks'] = self.mean_ticks
        row['mean_mice_ticks'] = self.mean_mice_ticks
        row['normalized_delay'] = '' if self.normalized_delay is None else self.normalized_delay
        return row


REPORT_COLUMNS = list(MetricsReport('').as_row().keys())


def summarize(router: str, outcomes: Sequence[RoutingOutcome]) -> MetricsReport:
    report = MetricsReport(router)
    fee_fractions: List[Fraction] = []
    ticks, mice_ticks = [], []
    for o in outcomes:
        report.overall.add(o)
        report.by_class[o.size_class].add(o)
        ticks.append(o.ticks)
        if o.size_class is SizeClass.MICE:
            mice_ticks.append(o.ticks)
        if o.success:
            report.fees_paid += o.fee_paid
            fee_fractions.append(Fraction(o.fee_paid, o.delivered))
    report.mean_fee_fraction = float(mean(fee_fractions)) if fee_fractions else 0.0
    report.mean_ticks = mean(ticks) if ticks else 0.0
    report.mean_mice_ticks = mean(mice_ticks) if mice_ticks else 0.0
    return report


def normalize_delays(reports: Sequence[MetricsReport], baseline: str = 'sp'):
    ''' fill normalized_delay of every report of one run from the baseline router's mean ticks '''
    base = next((r for r in reports if r.router == baseline), None)
    if base is None or base.mean_ticks == 0: return
    for r in reports:
        r.normalized_delay = r.mean_ticks / base.mean_ticks


def _mean_metrics(ms: Sequence[ClassMetrics]) -> ClassMetrics:
    return ClassMetrics(**{f.name: mean(getattr(m, f.name) for m in ms) for f in fields(ClassMetrics)})


def mean_report(reports: Sequence[MetricsReport]) -> MetricsReport:
    ''' field-wise mean over repetitions of one router '''
    if not reports:
        raise ValueError('no reports to average')
    if len(reports) == 1: return reports[0]

    delays = [r.normalized_delay for r in reports if r.normalized_delay is not None]
    return MetricsReport(
        router=reports[0].router,
        overall=_mean_metrics([r.overall for r in reports]),
        by_class={c: _mean_metrics([r.by_class[c] for r in reports]) for c in SizeClass},
        fees_paid=mean(r.fees_paid for r in reports),
        mean_fee_fraction=mean(r.mean_fee_fraction for r in reports),
        mean_ticks=mean(r.mean_ticks for r in reports),
        mean_mice_ticks=mean(r.mean_mice_ticks for r in reports),
        normalized_delay=mean(delays) if len(delays) == len(reports) else None,
    )
