import os
import sys
import logging
from traceback import print_exc

from modules import paths
from modules import runtime
from modules.runtime import state
from modules.cmd_opts import parse
from modules.options import ConfigError
from modules.network import InvalidParameter
from modules.workload import TraceParseError, EmptyInput, UnreachablePairError

logger = logging.getLogger('flashsim')


def do_run(cmd_opts, opts):
    from modules.metrics import ExperimentSpec, run_experiment

    spec = ExperimentSpec.from_options(opts)
    state.begin('run', spec.reps)
    result = run_experiment(spec, opts.out, progress=not cmd_opts.quiet)
    for router, report in result.reports.items():
        o = report.overall
        delay = '' if report.normalized_delay is None else f', delay x{report.normalized_delay:.2f}'
        print(f'{router:>7}: success ratio {o.success_ratio:.4f}, success volume {o.success_volume:.0f}, '
              f'probe messages {o.probe_messages:.0f}, fee/unit {report.mean_fee_fraction:.5f}{delay}')
    print(f'results written to {opts.out}')
    return 0


def do_sweep(cmd_opts, opts):
    from modules.metrics import ExperimentSpec, sweep

    if not opts.axis:
        raise ConfigError('sweep needs --axis')
    spec = ExperimentSpec.from_options(opts)
    results = sweep(spec, opts.axis, opts.values, opts.out, progress=not cmd_opts.quiet)
    for value, result in zip(opts.values, results):
        cells = ', '.join(f'{r}={rep.overall.success_volume:.0f}' for r, rep in result.reports.items())
        print(f'{opts.axis}={value}: success volume {cells}')
    print(f'results written to {opts.out}')
    return 0


def do_stats(cmd_opts, opts):
    from modules.workload import load_trace, synthetic_trace, trace_summary, recurrence_stats

    if cmd_opts.trace:
        if not os.path.exists(cmd_opts.trace):
            raise ConfigError(f'trace file not found: {cmd_opts.trace}')
        records = load_trace(cmd_opts.trace)
        source = cmd_opts.trace
    elif cmd_opts.synthetic:
        records = synthetic_trace(cmd_opts.synthetic, cmd_opts.seed, users=opts.synthetic_users,
                                  days=opts.synthetic_days, median=opts.synthetic_median)
        source = f'synthetic ({cmd_opts.synthetic} records, seed {cmd_opts.seed})'
    else:
        raise ConfigError('stats needs --trace PATH or --synthetic N')

    s = trace_summary(records)
    windows = recurrence_stats(records, ordered=not cmd_opts.unordered)
    print(f'trace:                  {source}')
    print(f'records:                {s.n_records}')
    print(f'days:                   {len(windows)}')
    print(f'median volume:          {s.median_volume}')
    print(f'90th percentile volume: {s.p90_volume}')
    print(f'top 10% volume share:   {s.top_decile_share:.4f}')
    print(f'median recurring share: {s.median_recurring:.4f}')
    print(f'mean top-5 share:       {s.mean_top5_share:.4f}')
    return 0


def do_oracle(cmd_opts, opts):
    from modules.metrics import run_oracles

    results = run_oracles(cmd_opts.check, cmd_opts.seeds, progress=not cmd_opts.quiet)
    failed = 0
    for name, mismatches in results.items():
        print(f'{name:>7}: {"ok" if not mismatches else f"{len(mismatches)} mismatches"}')
        for mm in mismatches[:5]:
            print(f'         seed {mm.seed}: {mm.detail}')
        failed += len(mismatches)
    return 1 if failed else 0


COMMANDS = {
    'run':    do_run,
    'sweep':  do_sweep,
    'stats':  do_stats,
    'oracle': do_oracle,
}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    raw_cmd_args = ' '.join(argv)
    print(f'Launching flashsim with cmd_args: {raw_cmd_args}')

    try:
        cmd_opts, opts = parse(argv)
        runtime.setup_logging(cmd_opts.log_level)
        return COMMANDS[cmd_opts.command](cmd_opts, opts)
    except (ConfigError, InvalidParameter, TraceParseError, EmptyInput, UnreachablePairError) as e:
        print(f'config error: {e}', file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        state.interrupt()
        print('Exit by Ctrl+C')
        return 130
    except Exception:
        print_exc()
        return 1


if __name__ == '__main__':
    sys.exit(main())
