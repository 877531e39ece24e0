"""
Tests for reaction-graph queries
"""

import pytest
from hypothesis import given, settings

from crnmix.graph import (
    add_complete_outflows,
    double_complexes,
    flow_decomposition,
    is_double_full,
    is_weakly_reversible,
    linkage_classes,
    path_to_low_order,
    reaction_graph,
    unary_chain,
    unary_chain_to_set,
)
from crnmix.library import load_builtin
from crnmix.network import parse_network

from .brute_force import connected_groups, edges_of, small_networks, weakly_reversible


def _names(network, complexes):
    return [network.complex_name(y) for y in complexes]


def test_reaction_graph_vertices_and_edges(open_binary):
    graph = reaction_graph(open_binary)
    assert graph.number_of_nodes() == len(open_binary.complexes) == 5
    assert graph.number_of_edges() == len(open_binary.reactions) == 9


def test_three_linkage_classes():
    network = load_builtin("three_linkage")
    classes = [_names(network, group) for group in linkage_classes(network)]
    assert classes == [["0", "B"], ["2C", "D", "B+C"], ["2B", "A", "A+D"]]
    assert not is_weakly_reversible(network)


@pytest.mark.parametrize("name", ["open_binary", "double_full", "birth_death"])
def test_weakly_reversible(name):
    assert is_weakly_reversible(load_builtin(name))


def test_single_reaction_is_not_weakly_reversible():
    assert not is_weakly_reversible(parse_network("A -> B"))


def test_double_full(double_full, open_binary):
    assert is_double_full(double_full)
    assert sorted(double_complexes(double_full)) == [0, 1, 2]
    assert not is_double_full(open_binary)
    assert list(double_complexes(open_binary)) == [2]


def test_paths_to_low_order(double_full):
    found = {
        double_full.complex_name(y): _names(double_full, path_to_low_order(double_full, y))
        for y in double_complexes(double_full).values()
    }
    assert found == {"2A": ["2A", "A+B", "B"], "2B": ["2B", "0"], "2C": ["2C", "A"]}


def test_path_from_low_order_complex_is_trivial(open_binary):
    y = open_binary.complex_of("A")
    assert path_to_low_order(open_binary, y) == [y]


def test_no_path_to_low_order():
    network = parse_network("2A -> A + B\nA + B -> 2A\n")
    assert path_to_low_order(network, network.complex_of("2A")) is None


def test_unary_chains(enzyme_outflows):
    s, p = enzyme_outflows.species_index("S"), enzyme_outflows.species_index("P")
    assert _names(enzyme_outflows, unary_chain(enzyme_outflows, s, p)) == ["S", "P"]
    exits = {enzyme_outflows.species_index(n) for n in ("E", "SE", "P")}
    assert _names(enzyme_outflows, unary_chain_to_set(enzyme_outflows, s, exits)) == ["S", "P"]


def test_unary_chain_skips_binary_complexes():
    network = parse_network("A -> 2B\n2B -> C\n")
    assert unary_chain(network, 0, 2) is None


def test_flow_decomposition(open_binary):
    flows = flow_decomposition(open_binary)
    assert len(flows.inflows) == len(flows.outflows) == 3
    assert [open_binary.reaction_label(r) for r in flows.core.reactions] == ["A->B", "B->2C", "2C->A"]
    assert flows.has_complete_outflows()
    assert flows.inflow_species == flows.outflow_species == [0, 1, 2]


def test_partial_outflows():
    network = load_builtin("partial_outflow")
    flows = flow_decomposition(network)
    assert flows.outflow_species == [0, 1]
    assert not flows.has_complete_outflows()

    completed = add_complete_outflows(network, rate=0.5)
    assert flow_decomposition(completed).has_complete_outflows()
    assert completed.reactions[-1].rate_constant == 0.5
    assert len(completed.reactions) == len(network.reactions) + 1


@settings(max_examples=100, deadline=None)
@given(network=small_networks(max_complexes=4))
def test_linkage_and_reversibility_match_exhaustive_reachability(network):
    edges = edges_of(network)
    nodes = {y for edge in edges for y in edge}
    groups = {frozenset(y.coefficients for y in group) for group in linkage_classes(network)}
    assert groups == connected_groups(nodes, edges)
    assert is_weakly_reversible(network) == weakly_reversible(nodes, edges)
