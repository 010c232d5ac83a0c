from modules.router.outcome import (
    ROUTERS, Status, FailureReason, RouterConfig, RoutingOutcome, gossip_fee, fees_of,
)
from modules.router.table import RoutingTable, TableEntry, refresh_table
from modules.router.flash import route_flash, route_elephant, route_mice
from modules.router.baselines import route_sp, route_spider, waterfill
