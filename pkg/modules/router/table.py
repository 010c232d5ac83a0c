# per-sender routing table of the mice pipeline

import logging
from dataclasses import dataclass, field
from itertools import islice
from typing import Dict, List, Optional

from modules.network.topology import NodeId
from modules.pathfinder.capacity import Path, path_edges
from modules.pathfinder.yen import iter_shortest_paths, yen_k_shortest

logger = logging.getLogger(__name__)


@dataclass
class TableEntry:
    paths: List[Path]
    next_yen_index: int             # rank of the next Yen path not handed out yet
    last_access: int


@dataclass
class RoutingTable:
    owner: NodeId
    m: int
    timeout: int
    entries: Dict[NodeId, TableEntry] = field(default_factory=dict)
    hits: int = 0
    misses: int = 0

    def lookup(self, view, receiver: NodeId, now: int) -> TableEntry:
        ''' the entry for `receiver`, computing its m shortest paths on a miss '''
        entry = self.entries.get(receiver)
        if entry is not None and now - entry.last_access > self.timeout:
            del self.entries[receiver]
            entry = None
        if entry is None:
            self.misses += 1
            paths = yen_k_shortest(view, self.owner, receiver, self.m)
            entry = self.entries[receiver] = TableEntry(paths, len(paths), now)
        else:
            self.hits += 1
        entry.last_access = now
        return entry

    def replace(self, view, receiver: NodeId, dead: Path) -> Optional[Path]:
        ''' swap a dead path for the next shortest path, None when Yen has no more '''
        entry = self.entries[receiver]
        nxt = next(islice(iter_shortest_paths(view, self.owner, receiver), entry.next_yen_index, None), None)
        if nxt is None: return None
        entry.next_yen_index += 1
        if dead in entry.paths:
            entry.paths[entry.paths.index(dead)] = nxt
        else:
            entry.paths.append(nxt)
        logger.debug(f'[table {self.owner}] {dead} -> {nxt} for receiver {receiver}')
        return nxt


def _alive(view, path: Path) -> bool:
    return all(view.has_channel(u, v) for u, v in path_edges(path))


def refresh_table(table: RoutingTable, view, now: int) -> RoutingTable:
    ''' recompute every entry on the current view, evicting receivers idle past the timeout '''
    for receiver in list(table.entries):
        entry = table.entries[receiver]
        if now - entry.last_access > table.timeout:
            del table.entries[receiver]
            continue
        paths = yen_k_shortest(view, table.owner, receiver, table.m)
        entry.paths = [p for p in paths if _alive(view, p)]
        entry.next_yen_index = len(paths)
    return table
