# line-oriented topology files, one channel per line:
#   u v balance_uv balance_vu rate_uv rate_vu base_uv base_vu
# rates are decimal fractions ("0.005") or ratios ("1/200"), '#' starts a comment
# probes report rates in whole ppm, so a rate like 1/3 is seen by routers as 333333 ppm

import os
import logging
import shutil
import tempfile
from decimal import Decimal
from fractions import Fraction

from modules.network.topology import Topology, FeeSchedule, InvalidParameter

logger = logging.getLogger(__name__)

N_FIELDS = 8


def _parse_line(line: str, lineno: int):
    fields = line.split()
    if len(fields) != N_FIELDS:
        raise InvalidParameter(f'line {lineno}: expected {N_FIELDS} fields, got {len(fields)}')
    try:
        u, v, bal_uv, bal_vu = (int(x) for x in fields[:4])
        rate_uv, rate_vu = (Fraction(x) for x in fields[4:6])
        base_uv, base_vu = (int(x) for x in fields[6:])
        return u, v, bal_uv, bal_vu, FeeSchedule(base_uv, rate_uv), FeeSchedule(base_vu, rate_vu)
    except (ValueError, ZeroDivisionError) as e:
        raise InvalidParameter(f'line {lineno}: {e}') from e


def prune(topology: Topology, iterative: bool = False) -> Topology:
    ''' drop zero-fund channels, then nodes with at most one neighbor '''
    while True:
        dead = [e for e in topology.undirected_channels() if topology.channel_total(*e) == 0]
        for u, v in dead:
            topology.remove_channel(u, v)
        leaves = [u for u in sorted(topology.nodes) if topology.degree(u) <= 1]
        for u in leaves:
            topology.remove_node(u)
        logger.debug(f'[prune] removed {len(dead)} channels, {len(leaves)} nodes')
        if not iterative or not (dead or leaves): break
    return topology


def load_topology(fp: str, iterative_prune: bool = False, do_prune: bool = True) -> Topology:
    topology = Topology()
    with open(fp, encoding='utf-8') as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split('#', 1)[0].strip()
            if not line: continue
            u, v, bal_uv, bal_vu, fee_uv, fee_vu = _parse_line(line, lineno)
            try:
                topology.add_channel(u, v, bal_uv, bal_vu, fee_uv, fee_vu)
            except InvalidParameter as e:
                raise InvalidParameter(f'line {lineno}: {e}') from e

    n_nodes, n_channels = len(topology.nodes), topology.n_channels
    if do_prune: prune(topology, iterative_prune)
    logger.info(f'[load_topology] {fp}: {n_nodes} nodes / {n_channels} channels, '
                f'{len(topology.nodes)} / {topology.n_channels} after pruning')
    return topology


def _fmt_rate(rate: Fraction) -> str:
    # exact decimal when the denominator only holds 2s and 5s
    d = rate.denominator
    while d % 2 == 0: d //= 2
    while d % 5 == 0: d //= 5
    if d != 1: return f'{rate.numerator}/{rate.denominator}'
    return str(Decimal(rate.numerator) / Decimal(rate.denominator))


def save_topology(topology: Topology, fp: str):
    fd, tmp_fp = tempfile.mkstemp('.txt')
    with os.fdopen(fd, 'w', encoding='utf-8') as fh:
        fh.write('# u v balance_uv balance_vu rate_uv rate_vu base_uv base_vu\n')
        for u, v in topology.undirected_channels():
            f_uv, f_vu = topology.fee(u, v), topology.fee(v, u)
            fh.write(f'{u} {v} {topology.balance(u, v)} {topology.balance(v, u)} '
                     f'{_fmt_rate(f_uv.rate)} {_fmt_rate(f_vu.rate)} {f_uv.base} {f_vu.base}\n')
    shutil.move(tmp_fp, fp)
