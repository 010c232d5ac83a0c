import csv
import os
from dataclasses import replace

import pytest
from omegaconf import OmegaConf

from modules import paths
from modules.options import ConfigError, Options, options_templates
from modules.spec_parser import TopologySource, parse_topology
from modules.workload import SizeClass
from modules.router import RoutingOutcome, Status, FailureReason, RouterConfig, ROUTERS
from modules.metrics import (
    ExperimentSpec, REPORT_COLUMNS, summarize, normalize_delays, mean_report, get_axis, axis_values, axis_options,
    build_topology, build_payments, run_once, run_experiment, sweep, derive_seed,
    SUITES, run_oracles, check_maxflow, check_lp, check_yen,
)


def outcome(pid, size_class, demand, ok, fee=0, ticks=4, probes=0, messages=6, router='flash'):
    return RoutingOutcome(pid, router, size_class, demand, Status.SUCCESS if ok else Status.FAILURE,
                          None if ok else FailureReason.NO_PATH, delivered=demand if ok else 0,
                          probe_messages=probes, messages=messages, fee_paid=fee, ticks=ticks)


@pytest.fixture
def tiny():
    return ExperimentSpec(topology=parse_topology('ws:12,4,0.3'), fund=(2000, 3000), txns=30, reps=2,
                          synthetic_users=20, synthetic_days=2, router_config=RouterConfig(k=6, m=2))


def read_csv(fp):
    with open(fp, encoding='utf8', newline='') as fh:
        return list(csv.DictReader(fh))


class TestReport:

    def test_summarize(self):
        outcomes = [
            outcome(1, SizeClass.ELEPHANT, 100, True, fee=2, probes=8, messages=20, ticks=10),
            outcome(2, SizeClass.MICE, 10, False),
            outcome(3, SizeClass.MICE, 5, True),
        ]
        r = summarize('flash', outcomes)
        assert (r.overall.attempts, r.overall.successes) == (3, 2)
        assert (r.overall.success_volume, r.overall.total_volume) == (105, 115)
        assert r.overall.probe_messages == 8 and r.overall.total_messages == 32
        mice = r.by_class[SizeClass.MICE]
        assert (mice.attempts, mice.successes, mice.success_volume) == (2, 1, 5)
        assert r.by_class[SizeClass.ELEPHANT].success_ratio == 1.0
        assert r.fees_paid == 2
        assert r.mean_fee_fraction == pytest.approx(0.01)
        assert r.mean_ticks == 6 and r.mean_mice_ticks == 4

    def test_class_sums(self):
        outcomes = [outcome(i, c, 10 + i, i % 3 != 0) for i, c in enumerate([SizeClass.MICE, SizeClass.ELEPHANT] * 5)]
        r = summarize('sp', outcomes)
        for f in ('attempts', 'successes', 'success_volume', 'total_volume'):
            assert getattr(r.overall, f) == sum(getattr(m, f) for m in r.by_class.values())

    def test_empty(self):
        r = summarize('sp', [])
        assert r.overall.success_ratio == 0.0 and r.mean_ticks == 0.0

    def test_row_columns(self):
        row = summarize('flash', [outcome(1, SizeClass.MICE, 3, True)]).as_row()
        assert list(row) == REPORT_COLUMNS
        assert row['mice_success_ratio'] == 1.0 and row['normalized_delay'] == ''

    def test_normalized_delay(self):
        flash = summarize('flash', [outcome(1, SizeClass.MICE, 3, True, ticks=6)])
        sp = summarize('sp', [outcome(1, SizeClass.MICE, 3, True, ticks=4)])
        normalize_delays([flash, sp])
        assert flash.normalized_delay == 1.5 and sp.normalized_delay == 1.0

    def test_mean_report(self):
        a = summarize('flash', [outcome(1, SizeClass.MICE, 10, True)])
        b = summarize('flash', [outcome(1, SizeClass.MICE, 20, False)])
        m = mean_report([a, b])
        assert m.overall.success_volume == 5 and m.overall.total_volume == 15
        assert m.overall.success_ratio == pytest.approx(0.5)
        assert mean_report([a]) is a
        with pytest.raises(ValueError):
            mean_report([])


class TestAxes:

    def test_known_axes(self):
        assert set(axis_options) >= {'capacity_scale', 'txn_count', 'threshold_q', 'm', 'k'}

    def test_unknown(self):
        with pytest.raises(ConfigError):
            get_axis('colour')

    def test_values(self):
        assert axis_values(get_axis('m'), [0, 2.0, 4]) == [0, 2, 4]
        assert axis_values(get_axis('capacity_scale'), [1, 10]) == [1.0, 10.0]
        with pytest.raises(ConfigError):
            axis_values(get_axis('m'), [0.5])
        with pytest.raises(ConfigError):
            axis_values(get_axis('k'), [])

    def test_format_value(self):
        q = get_axis('threshold_q')
        assert q.format_value(q, 0.1 + 0.2) == 0.3
        assert get_axis('m').format_value(get_axis('m'), 4) == 4

    def test_apply(self, tiny):
        cell = get_axis('m').apply(tiny, 4)
        assert cell.router_config.m == 4 and cell.router_config.replace_budget == 4
        assert tiny.router_config.m == 2
        assert get_axis('threshold_q').apply(tiny, 0.5).router_config.mice_q == 0.5
        assert get_axis('txn_count').apply(tiny, 7).txns == 7
        assert get_axis('fund').apply(replace(tiny, fund=(100000, 150000)), 50000).fund == (50000, 75000)


class TestExperiment:

    def test_derived_seeds(self):
        assert derive_seed(3, 'fund') == derive_seed(3, 'fund')
        assert len({derive_seed(3, s) for s in ('topology', 'fund', 'fees', 'trace', 'payments', 'router')}) == 6

    def test_spec_validation(self, tiny):
        with pytest.raises(ConfigError):
            replace(tiny, reps=0)
        with pytest.raises(ConfigError):
            replace(tiny, routers=('teleport',))
        with pytest.raises(ConfigError):
            replace(tiny, capacity_scale=0)

    def test_from_options(self):
        spec = ExperimentSpec.from_options(Options(options_templates))
        assert spec.topology == TopologySource('ws', 50, 4, 0.3)
        assert spec.router_config.k == 20 and spec.router_config.m == 4
        assert spec.routers == tuple(ROUTERS)
        opts = Options(options_templates)
        opts.m, opts.k = 5, 3
        with pytest.raises(ConfigError):
            ExperimentSpec.from_options(opts)

    def test_build_topology_file(self, tiny):
        spec = replace(tiny, topology=TopologySource('file', path=paths.SAMPLE_TOPOLOGY), capacity_scale=2)
        top = build_topology(spec, 0)
        assert top.n_channels == 11
        assert all(s.fee.rate > 0 for s in top.channels.values())
        with pytest.raises(ConfigError):
            build_topology(replace(spec, topology=TopologySource('file', path='/nonexistent/topo.txt')), 0)

    def test_build_payments(self, tiny):
        top = build_topology(tiny, 1)
        assert build_payments(tiny, top, 1) == build_payments(tiny, top, 1)
        traced = replace(tiny, trace=paths.SAMPLE_TRACE, txns=15)
        assert len(build_payments(traced, top, 1)) == 15

    def test_single_rep(self, tiny):
        spec = replace(tiny, reps=1)
        result = run_experiment(spec)
        single = run_once(spec, 0)
        assert [result.reports[r.router] for r in single] == single
        assert len(result.runs) == len(ROUTERS)

    def test_capacity_rich(self, tiny):
        spec = replace(tiny, fund=(10 ** 9, 10 ** 9 + 1), reps=1)
        result = run_experiment(spec)
        assert all(r.overall.success_ratio == 1.0 for r in result.reports.values())

    def test_outputs(self, tiny, tmp_path):
        a, b = tmp_path / 'a', tmp_path / 'b'
        run_experiment(tiny, str(a))
        run_experiment(tiny, str(b))
        for name in ('runs.csv', 'summary.csv'):
            assert (a / name).read_bytes() == (b / name).read_bytes()
        runs = read_csv(a / 'runs.csv')
        assert len(runs) == tiny.reps * len(ROUTERS)
        assert [r['router'] for r in runs] == [r for r in ROUTERS for _ in range(tiny.reps)]
        conf = OmegaConf.load(a / 'config.yaml')
        assert conf.workload == 'synthetic' and conf.reps == 2
        assert {r['workload'] for r in runs} == {r['workload'] for r in read_csv(a / 'summary.csv')} == {'synthetic'}

    def test_trace_rows_tagged(self, tiny, tmp_path):
        spec = replace(tiny, trace=paths.SAMPLE_TRACE, txns=10, reps=1, routers=('sp',))
        run_experiment(spec, str(tmp_path))
        assert [r['workload'] for r in read_csv(tmp_path / 'runs.csv')] == ['trace']
        assert OmegaConf.load(tmp_path / 'config.yaml').workload == 'trace'

    def test_rewrite_keeps_backup(self, tiny, tmp_path):
        spec = replace(tiny, reps=1, txns=5)
        run_experiment(spec, str(tmp_path))
        run_experiment(spec, str(tmp_path))
        assert os.path.exists(tmp_path / 'runs.csv.bak')

    def test_sweep(self, tiny, tmp_path):
        spec = replace(tiny, reps=1, routers=('flash',))
        results = sweep(spec, 'm', [0, 2], str(tmp_path))
        assert [r.spec.router_config.m for r in results] == [0, 2]
        runs = read_csv(tmp_path / 'runs.csv')
        assert [(r['axis'], r['value']) for r in runs] == [('m', '0'), ('m', '2')]
        summary = read_csv(tmp_path / 'summary.csv')
        assert {r['metric'] for r in summary} >= {'success_volume', 'probe_messages'}

    def test_sweep_bad_value(self, tiny):
        with pytest.raises(ConfigError):
            sweep(replace(tiny, reps=1), 'm', [30])


class TestOracles:

    def test_maxflow(self):
        assert check_maxflow(40) == []

    def test_lp(self):
        assert check_lp(30) == []

    def test_yen(self):
        assert check_yen(40) == []

    def test_unknown_suite(self):
        with pytest.raises(ConfigError):
            run_oracles('simplex')

    @pytest.mark.slow
    def test_full_suites(self):
        assert all(not mm for mm in run_oracles('all').values())
        assert set(SUITES) == {'maxflow', 'lp', 'yen'}
