from modules.network.topology import (
    NodeId, Edge, PPM,
    InvalidParameter, InsufficientBalance,
    FeeSchedule, ChannelDirState, Topology, LocalView,
    apply_payment_delta, channel_totals,
)
from modules.network.generators import watts_strogatz, fund_uniform, scale_capacities, assign_fees
from modules.network.loader import load_topology, save_topology, prune
