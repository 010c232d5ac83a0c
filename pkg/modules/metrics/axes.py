from collections import namedtuple
from dataclasses import replace

from modules.options import ConfigError


def apply_field(field):
    def fun(spec, x):
        return replace(spec, **{field: x})

    return fun


def apply_router_field(field):
    def fun(spec, x):
        # replacement budget follows m unless given explicitly
        return replace(spec, router_config=replace(spec.router_config, **{field: x, 'replace_budget': None}))

    return fun


def apply_fund(spec, x):
    low, high = spec.fund
    return replace(spec, fund=(x, max(x + 1, x * high // low) if low else high))


def format_value(opt, x):
    if type(x) == float:
        x = round(x, 8)
    return x


AxisOption = namedtuple("AxisOption", ["label", "type", "apply", "format_value"])


axis_options = {
    'capacity_scale': AxisOption("Capacity scale", float, apply_field('capacity_scale'), format_value),
    'txn_count':      AxisOption("Transactions", int, apply_field('txns'), format_value),
    'threshold_q':    AxisOption("Mice percentile", float, apply_router_field('mice_q'), format_value),
    'm':              AxisOption("Mice paths", int, apply_router_field('m'), format_value),
    'k':              AxisOption("Elephant paths", int, apply_router_field('k'), format_value),
    'fund':           AxisOption("Funding low", int, apply_fund, format_value),
    'seed':           AxisOption("Seed base", int, apply_field('seed'), format_value),
}


def get_axis(name: str) -> AxisOption:
    if name not in axis_options:
        raise ConfigError(f'unknown sweep axis {name!r}, expected one of {list(axis_options)}')
    return axis_options[name]


def axis_values(opt: AxisOption, values):
    if not values:
        raise ConfigError(f'no values given for axis {opt.label!r}')
    if opt.type is int and any(isinstance(v, float) and not v.is_integer() for v in values):
        raise ConfigError(f'axis {opt.label!r} takes integers, got {values}')
    try:
        return [opt.type(v) for v in values]
    except (TypeError, ValueError) as e:
        raise ConfigError(f'bad value for axis {opt.label!r}: {e}') from e
