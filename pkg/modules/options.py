# experiment defaults, loaded from and saved to YAML

import os
import sys
from typing import Dict, Tuple

from omegaconf import OmegaConf, DictConfig

from modules.paths import DEFAULT_CONFIG_FILE, OUTPUT_PATH


class ConfigError(ValueError):
    pass


class OptionInfo:

    def __init__(self, default=None, label="", check=None):
        self.section = None
        self.default = default
        self.label = label
        self.check = check          # predicate on the value, False raises ConfigError


def make_section(name: Tuple[str, str], options: Dict[str, OptionInfo]):
    for v in options.values():
        v.section = name            # ['inner name', 'display name']
    return options


def _positive(x): return x > 0
def _non_negative(x): return x >= 0
def _unit(x): return 0 <= x <= 1
def _interval(x): return len(x) == 2 and 0 <= x[0] <= x[1]


options_templates = { }

options_templates.update(make_section(('network', "Topology"), {
    "topology": OptionInfo('ws:50,4,0.3', "Topology source, ws:n,ring_degree[,beta] or file:PATH"),
    "fund": OptionInfo([100000, 150000], "Per-channel funding interval [low, high) in atomic units", lambda x: len(x) == 2 and 0 <= x[0] < x[1]),
    "capacity_scale": OptionInfo(1.0, "Multiply every channel balance by this factor", _positive),
    "iterative_prune": OptionInfo(False, "Prune file topologies until no single-neighbor node is left"),
}))

options_templates.update(make_section(('workload', "Workload"), {
    "txns": OptionInfo(10000, "Number of payments per run", _non_negative),
    "trace": OptionInfo('', "Transaction trace CSV, empty for a synthetic heavy-tailed trace"),
    "pairing": OptionInfo('trace-pairs-mapped', "How trace identities become topology nodes", lambda x: x in ('trace-pairs-mapped', 'random-pairs')),
    "synthetic_users": OptionInfo(200, "Distinct identities in the synthetic trace", _positive),
    "synthetic_days": OptionInfo(30, "Calendar days covered by the synthetic trace", _positive),
    "synthetic_median": OptionInfo(4.8, "Median payment of the synthetic trace in dollars", _positive),
}))

options_templates.update(make_section(('router', "Routing"), {
    "routers": OptionInfo(['flash', 'sp', 'spider'], "Routers compared in every run", lambda x: len(x) > 0 and set(x) <= {'flash', 'sp', 'spider'}),
    "k": OptionInfo(20, "Elephant path budget of the modified Edmonds-Karp search", _positive),
    "m": OptionInfo(4, "Routing-table paths per mice receiver, 0 routes every payment as an elephant", _non_negative),
    "mice_q": OptionInfo(0.9, "Size percentile splitting mice from elephants", _unit),
    "spider_paths": OptionInfo(4, "Edge-disjoint paths of the spider baseline", _positive),
    "table_timeout": OptionInfo(2000, "Arrivals before routing tables are refreshed and idle entries dropped", _positive),
    "fee_optimize": OptionInfo(True, "Split elephants with the fee LP instead of sequential path filling"),
}))

options_templates.update(make_section(('fees', "Fees"), {
    "assign_fees": OptionInfo(True, "Draw random proportional fees for every channel direction"),
    "fee_low_share": OptionInfo(0.9, "Share of channel directions drawing a rate from the low interval", _unit),
    "fee_low": OptionInfo([0.001, 0.01], "Low rate interval", _interval),
    "fee_high": OptionInfo([0.01, 0.10], "High rate interval", _interval),
    "fee_base": OptionInfo(0, "Flat base fee per hop in atomic units", _non_negative),
}))

options_templates.update(make_section(('simulation', "Simulation"), {
    "overlap": OptionInfo(False, "Send confirmations without waiting, overlapping consecutive payments"),
    "timeout_slack": OptionInfo(4, "Ticks a sender waits beyond the round trip before giving up", _non_negative),
    "check_conservation": OptionInfo(True, "Verify balance conservation at every payment boundary"),
}))

options_templates.update(make_section(('experiment', "Experiment"), {
    "reps": OptionInfo(5, "Repetitions per cell, seeded seed+i", _positive),
    "seed": OptionInfo(0, "Seed base", _non_negative),
    "out": OptionInfo(OUTPUT_PATH, "Directory receiving runs.csv, summary.csv and config.yaml"),
    "axis": OptionInfo('', "Sweep axis"),
    "values": OptionInfo([], "Sweep axis values"),
}))


def is_same_type(x, y):
    if None in [x, y]: return True

    # numerical type are the same
    typemap = { int: float }
    type_x = typemap.get(type(x), type(x))
    type_y = typemap.get(type(y), type(y))

    return type_x == type_y


class Options:

    def __init__(self, options):
        self.options = options
        self.data = {k: v.default for k, v in self.options.items()}

    def __setattr__(self, key, value):
        if key not in ('options', 'data') and key in self.data:
            self.data[key] = value
            return
        return super(Options, self).__setattr__(key, value)

    def __getattr__(self, item):
        if item in ('options', 'data'):
            raise AttributeError(item)

        if item in self.data:
            return self.data[item]

        if item in self.options:
            return self.options[item].default

        return super(Options, self).__getattribute__(item)

    def update(self, values: dict, source: str = '<overrides>') -> int:
        ''' merge `values` over the current data, returns the number of suspicious settings '''
        bad_settings = 0
        for k, v in values.items():
            info = self.options.get(k)
            if info is None:
                print(f"Warning: unknown setting: {k} (from {source})", file=sys.stderr)
                bad_settings += 1
                continue
            if not is_same_type(info.default, v):
                print(f"Warning: bad setting value: {k}: {v} typed ({type(v).__name__}; expected {type(info.default).__name__})", file=sys.stderr)
                bad_settings += 1
            self.data[k] = v
        return bad_settings

    def load(self, fn):
        if not os.path.exists(fn):
            raise ConfigError(f'config file not found: {fn}')
        conf = OmegaConf.load(fn)
        if not isinstance(conf, DictConfig):
            raise ConfigError(f'config file {fn} must hold a mapping')

        # sections are for readability only, keys are flat
        flat = {}
        for k, v in OmegaConf.to_container(conf, resolve=True).items():
            if isinstance(v, dict) and k not in self.options:
                flat.update(v)
            else:
                flat[k] = v

        bad_settings = self.update(flat, fn)
        if bad_settings > 0:
            print(f'The program is likely to not work with bad settings.\n' +
                  f'Settings file: {fn}\n' +
                  f'Either fix the file, or delete it and restart.', file=sys.stderr)

    def load_dotlist(self, dotlist):
        try:
            conf = OmegaConf.from_dotlist(list(dotlist))
        except Exception as e:
            raise ConfigError(f'bad --set override: {e}') from e
        self.update(OmegaConf.to_container(conf, resolve=True), '--set')

    def validate(self):
        for k, info in self.options.items():
            v = self.data.get(k, info.default)
            if info.check is None: continue
            try:
                ok = info.check(v)
            except TypeError:
                ok = False
            if not ok:
                raise ConfigError(f'bad value for {k}: {v!r} ({info.label})')
        if self.data['m'] > self.data['k']:
            raise ConfigError(f'm={self.data["m"]} must not exceed k={self.data["k"]}')

    def sections(self) -> Dict[str, dict]:
        out = {}
        for k, info in self.options.items():
            out.setdefault(info.section[0], {})[k] = self.data.get(k, info.default)
        return out

    def to_omegaconf(self) -> DictConfig:
        return OmegaConf.create(self.sections())

    def save(self, fn):
        OmegaConf.save(self.to_omegaconf(), fn)


def load_options(config_fp: str = None, dotlist=()) -> Options:
    ''' defaults, then configs/default.yaml, then the user file, then dotted overrides '''
    opts = Options(options_templates)
    if os.path.exists(DEFAULT_CONFIG_FILE):
        opts.load(DEFAULT_CONFIG_FILE)
    if config_fp:
        opts.load(config_fp)
    if dotlist:
        opts.load_dotlist(dotlist)
    return opts
