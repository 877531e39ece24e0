"""
Structural queries on the reaction graph (complexes as vertices, reactions as edges).
"""

from collections import deque
from typing import Callable, Dict, Iterable, List, Optional, Set

import networkx as nx
from pydantic import BaseModel, ConfigDict

from .network import Complex, Reaction, ReactionNetwork


def reaction_graph(network: ReactionNetwork) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(network.complexes)
    for reaction in network.reactions:
        graph.add_edge(reaction.source, reaction.product, rate=reaction.rate_constant)
    return graph


def _canonical(groups: Iterable[Set[Complex]]) -> List[List[Complex]]:
    sorted_groups = [sorted(group, key=Complex.sort_key) for group in groups]
    return sorted(sorted_groups, key=lambda g: g[0].sort_key())


def linkage_classes(network: ReactionNetwork) -> List[List[Complex]]:
    """Weakly connected components, each sorted, ordered by smallest member complex."""
    graph = reaction_graph(network)
    return _canonical(nx.weakly_connected_components(graph))


def is_weakly_reversible(network: ReactionNetwork) -> bool:
    """Every linkage class is strongly connected."""
    graph = reaction_graph(network)
    return nx.number_strongly_connected_components(graph) == nx.number_weakly_connected_components(graph)


def double_complexes(network: ReactionNetwork) -> Dict[int, Complex]:
    present = set(network.complexes)
    doubles = {}
    for i in range(network.dimension):
        y = Complex.unit(network.dimension, i, 2)
        if y in present:
            doubles[i] = y
    return doubles


def is_double_full(network: ReactionNetwork) -> bool:
    """2S_i is a complex for every species."""
    return len(double_complexes(network)) == network.dimension


def _successors(network: ReactionNetwork) -> Dict[Complex, List[Complex]]:
    adjacency: Dict[Complex, List[Complex]] = {y: [] for y in network.complexes}
    for reaction in network.reactions:
        adjacency[reaction.source].append(reaction.product)
    for targets in adjacency.values():
        targets.sort(key=Complex.sort_key)
    return adjacency


def shortest_path(
    network: ReactionNetwork,
    start: Complex,
    is_target: Callable[[Complex], bool],
    allow: Callable[[Complex], bool] = lambda y: True,
) -> Optional[List[Complex]]:
    """
    Breadth-first search from start to the nearest complex satisfying is_target.

    Neighbours are expanded in coefficient order, so among the shortest paths
    the one returned has the lexicographically smallest complex sequence.
    Only complexes accepted by allow are entered.
    """
    if is_target(start):
        return [start]
    adjacency = _successors(network)
    if start not in adjacency:
        return None
    parent: Dict[Complex, Optional[Complex]] = {start: None}
    queue = deque([start])
    while queue:
        current = queue.popleft()
        if is_target(current):
            path = [current]
            while parent[path[-1]] is not None:
                path.append(parent[path[-1]])
            return path[::-1]
        for nxt in adjacency[current]:
            if nxt not in parent and allow(nxt):
                parent[nxt] = current
                queue.append(nxt)
    return None


def path_to_low_order(network: ReactionNetwork, y: Complex) -> Optional[List[Complex]]:
    """Shortest directed path from y to a complex of order at most one."""
    return shortest_path(network, y, lambda c: c.order <= 1)


def unary_chain(network: ReactionNetwork, i: int, j: int) -> Optional[List[Complex]]:
    """Path S_i -> ... -> S_j through unary complexes only."""
    return unary_chain_to_set(network, i, {j})


def unary_chain_to_set(network: ReactionNetwork, i: int, targets: Set[int]) -> Optional[List[Complex]]:
    start = Complex.unit(network.dimension, i)
    if i in targets:
        return [start]
    return shortest_path(
        network,
        start,
        lambda c: c.is_unary and c.species_index() in targets,
        allow=lambda c: c.is_unary,
    )


class FlowDecomposition(BaseModel):
    """Split of R into in-flows, out-flows and the core network."""

    model_config = ConfigDict(frozen=True)

    inflows: List[Reaction]
    outflows: List[Reaction]
    core: ReactionNetwork

    @property
    def outflow_species(self) -> List[int]:
        return sorted(r.source.species_index() for r in self.outflows)

    @property
    def inflow_species(self) -> List[int]:
        return sorted(r.product.species_index() for r in self.inflows)

    def has_complete_outflows(self) -> bool:
        return len(self.outflows) == self.core.dimension


def flow_decomposition(network: ReactionNetwork) -> FlowDecomposition:
    inflows = [r for r in network.reactions if r.is_inflow]
    outflows = [r for r in network.reactions if r.is_outflow]
    core = network.with_reactions(r for r in network.reactions if not (r.is_inflow or r.is_outflow))
    return FlowDecomposition(inflows=inflows, outflows=outflows, core=core)


def add_complete_outflows(network: ReactionNetwork, rate: float = 1.0) -> ReactionNetwork:
    """Append S_i -> 0 for every species that lacks one."""
    existing = {r.edge for r in network.reactions}
    zero = Complex.zero(network.dimension)
    extra = []
    for i in range(network.dimension):
        unit = Complex.unit(network.dimension, i)
        if (unit, zero) not in existing:
            extra.append(Reaction(source=unit, product=zero, rate_constant=rate))
    return network.with_reactions(list(network.reactions) + extra)
