# experiment cells: build topology and workload per repetition, run every router, write CSVs

import os
import csv
import shutil
import logging
import tempfile
from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from omegaconf import OmegaConf
from tqdm import tqdm

from modules.network import (
    Topology, InvalidParameter, watts_strogatz, fund_uniform, scale_capacities, assign_fees, load_topology,
)
from modules.workload import load_trace, synthetic_trace, sample_payments, PAIRING_MAPPED, PAIRINGS
from modules.router.outcome import ROUTERS, RouterConfig
from modules.simnet.harness import Simulation
from modules.simnet.session import TIMEOUT_SLACK
from modules.metrics.report import MetricsReport, REPORT_COLUMNS, summarize, normalize_delays, mean_report
from modules.metrics.axes import get_axis, axis_values
from modules.options import ConfigError, Options
from modules.spec_parser import TopologySource, parse_topology
from modules.runtime import state

logger = logging.getLogger(__name__)

# independent random streams derived from one repetition seed
STREAMS = {'topology': 0, 'fund': 1, 'fees': 2, 'trace': 3, 'payments': 4, 'router': 5}

RUN_HEADER = ['axis', 'value', 'workload', 'rep', 'seed'] + REPORT_COLUMNS
SUMMARY_HEADER = ['axis', 'value', 'workload', 'router', 'metric', 'min', 'mean', 'max']


def derive_seed(seed: int, stream: str) -> int:
    return int(np.random.SeedSequence([seed, STREAMS[stream]]).generate_state(1)[0])


@dataclass(frozen=True)
class FeeParams:
    enabled: bool = True
    low_share: float = 0.9
    low: Tuple[float, float] = (0.001, 0.01)
    high: Tuple[float, float] = (0.01, 0.10)
    base: int = 0


@dataclass(frozen=True)
class ExperimentSpec:
    topology: TopologySource
    fund: Tuple[int, int] = (100000, 150000)
    capacity_scale: float = 1.0
    txns: int = 10000
    routers: Tuple[str, ...] = tuple(ROUTERS)
    router_config: RouterConfig = field(default_factory=RouterConfig)
    fees: FeeParams = FeeParams()
    reps: int = 5
    seed: int = 0
    trace: str = ''
    pairing: str = PAIRING_MAPPED
    iterative_prune: bool = False
    synthetic_users: int = 200
    synthetic_days: int = 30
    synthetic_median: float = 4.8
    overlap: bool = False
    slack: int = TIMEOUT_SLACK
    check: bool = True

    def __post_init__(self):
        if self.reps < 1:
            raise ConfigError(f'reps must be >= 1, got {self.reps}')
        if self.txns < 0:
            raise ConfigError(f'txns must be >= 0, got {self.txns}')
        if not self.routers or not set(self.routers) <= set(ROUTERS):
            raise ConfigError(f'routers must be a non-empty subset of {ROUTERS}, got {list(self.routers)}')
        if self.pairing not in PAIRINGS:
            raise ConfigError(f'pairing must be one of {PAIRINGS}, got {self.pairing!r}')
        if self.capacity_scale <= 0:
            raise ConfigError(f'capacity scale must be positive, got {self.capacity_scale}')

    @classmethod
    def from_options(cls, opts: Options) -> 'ExperimentSpec':
        try:
            config = RouterConfig(k=opts.k, m=opts.m, mice_q=opts.mice_q, table_timeout=opts.table_timeout,
                                  spider_paths=opts.spider_paths, fee_optimize=opts.fee_optimize)
        except InvalidParameter as e:
            raise ConfigError(str(e)) from e
        return cls(
            topology=parse_topology(opts.topology),
            fund=tuple(opts.fund),
            capacity_scale=opts.capacity_scale,
            txns=opts.txns,
            routers=tuple(opts.routers),
            router_config=config,
            fees=FeeParams(opts.assign_fees, opts.fee_low_share, tuple(opts.fee_low), tuple(opts.fee_high), opts.fee_base),
            reps=opts.reps,
            seed=opts.seed,
            trace=opts.trace,
            pairing=opts.pairing,
            iterative_prune=opts.iterative_prune,
            synthetic_users=opts.synthetic_users,
            synthetic_days=opts.synthetic_days,
            synthetic_median=opts.synthetic_median,
            overlap=opts.overlap,
            slack=opts.timeout_slack,
            check=opts.check_conservation,
        )


class RunRow(NamedTuple):
    axis: str
    value: object
    workload: str           # 'synthetic' or 'trace'
    rep: int
    seed: int
    report: MetricsReport

    def as_row(self) -> dict:
        return {'axis': self.axis, 'value': self.value, 'workload': self.workload, 'rep': self.rep, 'seed': self.seed,
                **self.report.as_row()}


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    runs: List[RunRow]
    reports: Dict[str, MetricsReport]       # router -> mean over repetitions


def workload_tag(spec: ExperimentSpec) -> str:
    return 'trace' if spec.trace else 'synthetic'


@lru_cache(maxsize=4)
def _load_trace_cached(fp: str):
    return load_trace(fp)


def build_topology(spec: ExperimentSpec, seed: int) -> Topology:
    src = spec.topology
    if src.kind == 'ws':
        topology = watts_strogatz(src.n, src.ring_degree, src.beta, derive_seed(seed, 'topology'))
        topology = fund_uniform(topology, spec.fund[0], spec.fund[1], derive_seed(seed, 'fund'))
    else:
        if not os.path.exists(src.path):
            raise ConfigError(f'topology file not found: {src.path}')
        topology = load_topology(src.path, iterative_prune=spec.iterative_prune)
    if spec.capacity_scale != 1:
        topology = scale_capacities(topology, spec.capacity_scale)
    if spec.fees.enabled:
        f = spec.fees
        topology = assign_fees(topology, derive_seed(seed, 'fees'), f.low_share, f.low, f.high, f.base)
    return topology


def build_payments(spec: ExperimentSpec, topology: Topology, seed: int):
    if spec.trace:
        if not os.path.exists(spec.trace):
            raise ConfigError(f'trace file not found: {spec.trace}')
        records = _load_trace_cached(spec.trace)
    else:
        records = synthetic_trace(max(spec.txns, 1), derive_seed(seed, 'trace'), users=spec.synthetic_users,
                                  days=spec.synthetic_days, median=spec.synthetic_median)
    return sample_payments(records, spec.txns, topology, spec.pairing, derive_seed(seed, 'payments'))


def run_once(spec: ExperimentSpec, rep: int, progress: bool = False) -> List[MetricsReport]:
    ''' one repetition: every router sees a fresh copy of the same funded topology and payments '''
    seed = spec.seed + rep
    base = build_topology(spec, seed)
    payments = build_payments(spec, base, seed)
    config = replace(spec.router_config, seed=derive_seed(seed, 'router'))

    reports = []
    for router in spec.routers:
        sim = Simulation(base.copy(), router, config, spec.overlap, spec.slack, spec.check)
        outcomes = sim.run(payments, progress=progress)
        reports.append(summarize(router, outcomes))
        logger.info(f'[run_once] rep={rep} seed={seed} {router}: '
                    f'{reports[-1].overall.successes}/{reports[-1].overall.attempts} succeeded, '
                    f'volume {reports[-1].overall.success_volume}/{reports[-1].overall.total_volume}')
    normalize_delays(reports)
    return reports


def run_experiment(spec: ExperimentSpec, out: Optional[str] = None, axis: str = '', value='',
                   progress: bool = False) -> ExperimentResult:
    runs = []
    for rep in range(spec.reps):
        if state.interrupted: break
        for report in run_once(spec, rep, progress):
            runs.append(RunRow(axis, value, workload_tag(spec), rep, spec.seed + rep, report))
        state.nextjob()

    reports = {r: mean_report([row.report for row in runs if row.report.router == r]) for r in spec.routers if runs}
    result = ExperimentResult(spec, runs, reports)
    if out is not None:
        write_results(out, runs, spec)
    return result


def sweep(spec: ExperimentSpec, axis: str, values: Sequence, out: Optional[str] = None,
          progress: bool = False) -> List[ExperimentResult]:
    opt = get_axis(axis)
    values = axis_values(opt, values)
    state.begin(f'sweep {axis}', len(values) * spec.reps)

    results = []
    for x in tqdm(values, desc=f'[sweep {axis}]', disable=not progress):
        if state.interrupted: break
        try:
            cell = opt.apply(spec, x)
        except InvalidParameter as e:
            raise ConfigError(f'axis {axis}={x}: {e}') from e
        logger.info(f'[sweep] {opt.format_value(opt, x)}')
        results.append(run_experiment(cell, None, axis, opt.format_value(opt, x), progress=False))

    if out is not None:
        write_results(out, [row for r in results for row in r.runs], spec)
    return results


def summary_rows(runs: Sequence[RunRow]) -> List[dict]:
    ''' min/mean/max of every numeric column per (axis value, router) cell '''
    cells: Dict[tuple, List[dict]] = {}
    for row in runs:
        cells.setdefault((row.axis, row.value, row.workload, row.report.router), []).append(row.report.as_row())

    out = []
    for (axis, value, workload, router), rows in cells.items():
        for metric in REPORT_COLUMNS:
            xs = [r[metric] for r in rows if isinstance(r[metric], (int, float)) and not isinstance(r[metric], bool)]
            if not xs: continue
            out.append({'axis': axis, 'value': value, 'workload': workload, 'router': router, 'metric': metric,
                        'min': min(xs), 'mean': sum(xs) / len(xs), 'max': max(xs)})
    return out


def write_csv(path: str, header: List[str], rows: Sequence[dict]):
    # Write to temporary file first, so we don't nuke the file if something goes wrong
    fd, temp_path = tempfile.mkstemp(".csv", dir=os.path.dirname(path) or None)
    with os.fdopen(fd, "w", encoding="utf8", newline='') as file:
        writer = csv.DictWriter(file, fieldnames=header, lineterminator='\n')
        writer.writeheader()
        writer.writerows(rows)

    # Always keep a backup file around
    if os.path.exists(path):
        shutil.move(path, path + ".bak")
    shutil.move(temp_path, path)


def _spec_config(spec: ExperimentSpec) -> dict:
    conf = asdict(spec)
    conf['topology'] = spec.topology._asdict()
    conf['workload'] = workload_tag(spec)
    return conf


def write_results(out: str, runs: Sequence[RunRow], spec: ExperimentSpec):

    os.makedirs(out, exist_ok=True)
    # rows ordered by (axis value, router, rep) regardless of execution order
    order = {r: i for i, r in enumerate(ROUTERS)}
    values = list(dict.fromkeys(row.value for row in runs))
    runs = sorted(runs, key=lambda row: (values.index(row.value), order[row.report.router], row.rep))
    write_csv(os.path.join(out, 'runs.csv'), RUN_HEADER, [row.as_row() for row in runs])
    write_csv(os.path.join(out, 'summary.csv'), SUMMARY_HEADER, summary_rows(runs))
    OmegaConf.save(OmegaConf.create(_spec_config(spec)), os.path.join(out, 'config.yaml'))
    logger.info(f'[write_results] {len(runs)} runs written to {out}')
