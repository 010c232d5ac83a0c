# command line opts to start 'flashsim.py'

from argparse import ArgumentParser, Namespace
from typing import Tuple

from modules.options import Options, load_options
from modules.spec_parser import parse_values


parser = ArgumentParser(prog='flashsim', description='offchain routing simulator: flash against shortest-path and spider')
parser.add_argument("--config", type=str, help="YAML file merged over configs/default.yaml")
parser.add_argument("--set", action='append', default=[], metavar='KEY=VALUE', help="dotted override of a single option, repeatable")
parser.add_argument("--log-level", type=str, default='INFO', help="logging level, e.g. DEBUG, INFO, WARNING")
parser.add_argument("--quiet", action='store_true', help="disable progress bars")
subparsers = parser.add_subparsers(dest='command', required=True)


def _add_run_args(p: ArgumentParser):
    # defaults are None so that only given flags override the config
    p.add_argument("--topology", type=str, help="ws:n,ring_degree[,beta] or file:PATH")
    p.add_argument("--fund", type=str, help="per-channel funding interval LOW,HIGH in atomic units")
    p.add_argument("--scale", type=float, dest='capacity_scale', help="capacity scale factor")
    p.add_argument("--txns", type=int, help="payments per run")
    p.add_argument("--trace", type=str, help="transaction trace CSV, synthetic trace when omitted")
    p.add_argument("--router", type=str, dest='routers', help="router or comma list of routers among flash,sp,spider")
    p.add_argument("--k", type=int, help="elephant path budget")
    p.add_argument("--m", type=int, help="mice paths per receiver")
    p.add_argument("--mice-q", type=float, dest='mice_q', help="mice percentile threshold in [0, 1]")
    p.add_argument("--reps", type=int, help="repetitions per cell")
    p.add_argument("--seed", type=int, help="seed base")
    p.add_argument("--out", type=str, help="output directory")
    p.add_argument("--no-fee-opt", action='store_const', const=False, dest='fee_optimize', help="fill paths sequentially instead of solving the fee LP")
    p.add_argument("--no-fees", action='store_const', const=False, dest='assign_fees', help="keep every channel fee at zero")
    p.add_argument("--overlap", action='store_const', const=True, help="overlap confirmations with the next payment")


p_run = subparsers.add_parser('run', help="run one experiment cell")
_add_run_args(p_run)

p_sweep = subparsers.add_parser('sweep', help="run one cell per axis value")
_add_run_args(p_sweep)
p_sweep.add_argument("--axis", type=str, required=True, help="capacity_scale, txn_count, threshold_q, m, k, fund or seed")
p_sweep.add_argument("--values", type=str, required=True, help="comma separated axis values")

p_stats = subparsers.add_parser('stats', help="print size and recurrence statistics of a trace")
p_stats.add_argument("--trace", type=str, help="transaction trace CSV")
p_stats.add_argument("--synthetic", type=int, help="generate a synthetic trace of this many records instead")
p_stats.add_argument("--seed", type=int, default=0)
p_stats.add_argument("--unordered", action='store_true', help="count recurring pairs regardless of direction")

p_oracle = subparsers.add_parser('oracle', help="check the solvers against brute-force oracles")
p_oracle.add_argument("--check", type=str, default='all', choices=['maxflow', 'lp', 'yen', 'all'])
p_oracle.add_argument("--seeds", type=int, default=None, help="random instances per suite")


RUN_KEYS = ['topology', 'capacity_scale', 'txns', 'trace', 'k', 'm', 'mice_q', 'reps', 'seed', 'out',
            'fee_optimize', 'assign_fees', 'overlap']


def parse(argv=None) -> Tuple[Namespace, Options]:
    ''' parse `argv`, then layer defaults, config files, --set and command flags into one Options '''
    cmd_opts = parser.parse_args(argv)
    opts = load_options(cmd_opts.config, cmd_opts.set)
    if cmd_opts.command in ('run', 'sweep'):
        given = {k: getattr(cmd_opts, k) for k in RUN_KEYS if getattr(cmd_opts, k, None) is not None}
        if cmd_opts.fund is not None:
            given['fund'] = parse_values(cmd_opts.fund)
        if cmd_opts.routers is not None:
            given['routers'] = parse_values(cmd_opts.routers)
        if cmd_opts.command == 'sweep':
            given['axis'] = cmd_opts.axis
            given['values'] = parse_values(cmd_opts.values)
        opts.update(given, 'command line')
        opts.validate()
    return cmd_opts, opts
