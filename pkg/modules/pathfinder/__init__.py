from modules.pathfinder.capacity import Path, HopProbe, Prober, TopologyProber, CapacityMatrix, path_edges
from modules.pathfinder.bfs import bfs_feasible_shortest, edge_disjoint_shortest
from modules.pathfinder.edmonds_karp import (
    FlowSearch, InsufficientFlow, find_paths, modified_edmonds_karp, crosses_itself, decompose_flow,
)
from modules.pathfinder.yen import iter_shortest_paths, yen_k_shortest
