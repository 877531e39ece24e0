"""
Tests for the certification engine and its rules
"""

import json

import pytest
from hypothesis import given, settings

from crnmix.certification import NOT_CERTIFIED, certify
from crnmix.graph import flow_decomposition, is_double_full, path_to_low_order
from crnmix.library import load_builtin
from crnmix.network import Complex, Reaction, parse_network
from crnmix.rules import RuleContext, RuleLoader, get_rules
from crnmix.rules.base_rule import POINT_MASS_CAVEAT, REDUCIBLE_CAVEAT
from crnmix.rules.rule_loader import RuleLoadError

from .brute_force import matching_classes, small_networks


class TestGoldenCertificates:
    def test_open_binary_is_conservative(self, open_binary):
        certificate = certify(open_binary)
        assert certificate.class_label == "Thm3.1-conservative"
        assert certificate.bound_form == "C(|x|+1)"
        assert certificate.mixing_order == "O(log|x|)"
        assert certificate.witnesses.conservation_vector == [2, 2, 1]
        assert not certificate.uniform
        assert certificate.caveats == []
        assert certificate.all_matching_classes[0] == "Thm3.1-conservative"
        assert "Cor6.1-conservative" in certificate.all_matching_classes

    def test_open_binary_linkage_witness(self, open_binary):
        certificate = certify(open_binary)
        assert certificate.witnesses.linkage_classes == [["2C", "B", "A"]]

    def test_double_full_is_uniform(self, double_full):
        certificate = certify(double_full)
        assert certificate.class_label == "Thm3.2"
        assert certificate.bound_form == "C"
        assert certificate.mixing_order == "O(1)"
        assert certificate.uniform
        assert certificate.witnesses.paths == {
            "2A": ["2A", "A+B", "B"],
            "2B": ["2B", "0"],
            "2C": ["2C", "A"],
        }

    def test_point_mass_network(self, point_mass):
        certificate = certify(point_mass)
        assert certificate.class_label == "Thm3.2"
        assert "Cor6.2" in certificate.all_matching_classes
        assert POINT_MASS_CAVEAT in certificate.caveats
        assert REDUCIBLE_CAVEAT in certificate.caveats

    def test_enzyme_with_outflows(self, enzyme_outflows):
        certificate = certify(enzyme_outflows)
        assert certificate.class_label == "Cor6.4-conservative"
        assert certificate.base_label == "Cor6.4"
        assert certificate.conservative
        assert certificate.witnesses.species_partition == {"s_p": ["S"], "s_e": ["E", "SE", "P"]}
        assert certificate.witnesses.unary_chains == {"S": ["S", "P"]}
        assert certificate.witnesses.conservation_vector == [1, 1, 2, 1]
        assert POINT_MASS_CAVEAT in certificate.caveats

    def test_enzyme_without_outflows_is_not_certified(self):
        certificate = certify(load_builtin("enzyme"))
        assert certificate.class_label == NOT_CERTIFIED

    def test_partial_outflow_is_not_certified(self):
        certificate = certify(load_builtin("partial_outflow"))
        assert not certificate.certified
        assert certificate.bound_form is None
        assert certificate.mixing_order == "unknown"
        assert certificate.failed_hypotheses["Cor6.1"] == "missing outflow C->0"
        assert certificate.failed_hypotheses["Cor6.4"] == (
            "no unary path from C to an outflow species"
        )
        assert "sufficient, not necessary" in certificate.note

    def test_not_binary(self):
        certificate = certify(parse_network("3A -> B"))
        assert certificate.class_label == NOT_CERTIFIED
        assert set(certificate.failed_hypotheses.values()) == {
            "network is not binary: complex 3A has order 3"
        }
        assert "not binary" in certificate.summary()

    def test_binary_paths_network(self):
        certificate = certify(load_builtin("binary_paths"))
        assert certificate.class_label == "Cor6.2"
        assert certificate.witnesses.paths == {
            "2C": ["2C", "A"],
            "A+B": ["A+B", "C"],
            "2B": ["2B", "A+B", "C"],
        }

    def test_single_outflow_chain(self):
        network = parse_network("A -> B\nB -> C\nC -> 0\n0 -> A\nA + C -> 2B\n2B -> B\n")
        certificate = certify(network)
        assert certificate.class_label == "Cor6.3"
        assert certificate.witnesses.unary_chains == {"A": ["A", "B", "C"], "B": ["B", "C"], "C": ["C"]}


class TestCertificateProperties:
    def test_flow_witness(self, open_binary):
        flows = certify(open_binary).witnesses.flow_decomposition
        assert flows.core_reactions == ["A->B", "B->2C", "2C->A"]
        assert flows.inflow_species == flows.outflow_species == ["A", "B", "C"]

    def test_serialization_is_deterministic(self):
        first = certify(load_builtin("double_full")).to_json()
        second = certify(load_builtin("double_full")).to_json()
        assert first == second
        payload = json.loads(first)
        expected = {"class_label", "bound_form", "mixing_order", "witnesses", "caveats"}
        expected.add("all_matching_classes")
        assert expected <= set(payload)

    def test_double_full_verdict_matches_witnesses(self, double_full):
        certificate = certify(double_full)
        assert is_double_full(double_full)
        for name in certificate.witnesses.paths:
            assert path_to_low_order(double_full, double_full.complex_of(name)) is not None

    @pytest.mark.parametrize(
        "name, species", [("binary_paths", "C"), ("enzyme_outflows", "S"), ("point_mass", "S1")]
    )
    def test_adding_inflows_keeps_verdict(self, name, species):
        network = load_builtin(name)
        inflow = Reaction(
            source=Complex.zero(network.dimension),
            product=Complex.unit(network.dimension, network.species_index(species)),
        )
        extended = network.with_reactions(list(network.reactions) + [inflow])
        assert certify(extended).class_label == certify(network).class_label


class TestRuleLoader:
    def test_precedence_order(self):
        labels = [rule.label for rule in get_rules()]
        assert labels == [
            "Thm3.2",
            "Thm3.1",
            "Cor6.1",
            "Cor6.2",
            "Cor6.3",
            "Cor6.4",
        ]

    def test_rule_info(self):
        info = get_rules()[0].get_info()
        assert info["label"] == "Thm3.2"
        assert info["name"] == "double-full"
        assert info["precedence"] == "10"

    def test_discovery_in_custom_directory(self, tmp_path):
        (tmp_path / "empty_rule.py").write_text("X = 1\n", encoding="utf-8")
        loader = RuleLoader(rules_directory=tmp_path)
        assert loader.discover_rules() == ["empty_rule"]

    def test_module_without_rule_class(self, tmp_path, monkeypatch):
        package = tmp_path / "extra_rules"
        package.mkdir()
        (package / "__init__.py").write_text("", encoding="utf-8")
        (package / "nothing_rule.py").write_text("VALUE = 1\n", encoding="utf-8")
        monkeypatch.syspath_prepend(str(tmp_path))
        loader = RuleLoader(rules_directory=package, package="extra_rules")
        with pytest.raises(RuleLoadError, match="exactly one rule class"):
            loader.load_all_rules()

    def test_custom_rule_set(self, open_binary):
        rules = [rule for rule in get_rules() if rule.label == "Cor6.2"]
        certificate = certify(open_binary, rules=rules)
        assert certificate.class_label == "Cor6.2-conservative"
        assert certificate.class_name == "outflow-path-conservative"
        assert list(certificate.failed_hypotheses) == []

    def test_context_caches(self, open_binary):
        context = RuleContext(open_binary)
        assert context.core_conservation is context.core_conservation
        assert context.missing_inflows == [] and context.missing_outflows == []


class TestFlowEdgeCases:
    def test_cycle_through_zero_is_not_a_reversible_core(self):
        # 0 -> A -> B -> 0 is reversible only through flows, so the core A -> B is not
        network = parse_network("0 -> A\nA -> B\nB -> 0\nA -> 0\n0 -> B\n")
        certificate = certify(network)
        assert certificate.failed_hypotheses["Thm3.1"] == "core network is not weakly reversible"
        assert certificate.failed_hypotheses["Cor6.1"] == "core network is not weakly reversible"
        assert certificate.class_label == "Cor6.2-conservative"
        assert certificate.all_matching_classes == ["Cor6.2-conservative", "Cor6.4-conservative"]
        assert certificate.witnesses.conservation_vector == [1, 1]
        assert certificate.witnesses.flow_decomposition.core_reactions == ["A->B"]

    def test_unary_complex_only_in_flows_does_not_count(self):
        certificate = certify(parse_network("0 -> A\nA -> 0\n2A -> 0\n"))
        assert certificate.class_label == "Thm3.2"
        reason = certificate.failed_hypotheses["Cor6.3"]
        assert reason == "species A is not a unary complex of the core network"

    def test_not_certified_names(self):
        certificate = certify(parse_network("3A -> B"))
        assert certificate.class_label == "NotCertified"
        assert certificate.class_name == "not-certified"
        assert certificate.summary().startswith("NotCertified (Thm3.2: ")


PRECEDENCE = ["Thm3.2", "Thm3.1", "Cor6.1", "Cor6.2", "Cor6.3", "Cor6.4"]


@settings(max_examples=80, deadline=None)
@given(network=small_networks())
def test_certify_agrees_with_exhaustive_check(network):
    certificate = certify(network)
    expected = matching_classes(network)
    emitted = [label.removesuffix("-conservative") for label in certificate.all_matching_classes]
    assert set(emitted) == expected
    assert emitted == [label for label in PRECEDENCE if label in expected]
    if expected:
        assert certificate.base_label == emitted[0]
    else:
        assert certificate.class_label == NOT_CERTIFIED
        assert set(certificate.failed_hypotheses) == set(PRECEDENCE)


@settings(max_examples=60, deadline=None)
@given(network=small_networks())
def test_emitted_witnesses_hold(network):
    certificate = certify(network)
    if certificate.conservative:
        w = certificate.witnesses.conservation_vector
        assert all(c > 0 for c in w)
        core = flow_decomposition(network).core
        for reaction in core.reactions:
            assert sum(wi * ci for wi, ci in zip(w, reaction.net_change)) == 0
    for name, path in certificate.witnesses.paths.items():
        complexes = [network.complex_of(y) for y in path]
        assert path[0] == name and complexes[-1].order <= 1
        edges = {r.edge for r in network.reactions}
        assert all((a, b) in edges for a, b in zip(complexes, complexes[1:]))
