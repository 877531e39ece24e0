"""
Tests for growth profiles and tier partitions
"""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crnmix.exceptions import NetworkError
from crnmix.library import load_builtin
from crnmix.network import Complex, parse_network
from crnmix.tiers import (
    EQUIVALENT,
    PRECEDES,
    SUCCEEDS,
    GrowthProfile,
    SpeciesGrowth,
    complex_ratio,
    dominance,
    intensity_ratio_limit,
    maximal_species,
    parse_profile,
    tier_partition,
    top_tier_witness,
)


class TestProfileParsing:
    def test_linear_and_bounded(self, tier_example):
        profile = parse_profile("A:n, B:0", tier_example)
        assert profile.entries[0] == SpeciesGrowth.unbounded(1, 1)
        assert profile.entries[1] == SpeciesGrowth.bounded(0)
        assert profile.describe(tier_example.species_names) == "A:n, B:0"

    @pytest.mark.parametrize(
        "expression, alpha, scale",
        [
            ("3*n^2", Fraction(2), Fraction(3)),
            ("n^(1/2)", Fraction(1, 2), Fraction(1)),
            ("2n + 5", Fraction(1), Fraction(2)),
            ("n + 1", Fraction(1), Fraction(1)),
        ],
    )
    def test_monomials(self, tier_example, expression, alpha, scale):
        growth = parse_profile(f"A:{expression}, B:0", tier_example).entries[0]
        assert (growth.alpha, growth.scale) == (alpha, scale)

    def test_constant_sum_is_a_limit(self, tier_example):
        assert parse_profile("A:n, B:2+1", tier_example).entries[1] == SpeciesGrowth.bounded(3)

    @pytest.mark.parametrize(
        "text, message",
        [
            ("A:n", "missing species B"),
            ("A:n, B:0, C:n", "unknown species"),
            ("A:n, A:n, B:0", "given twice"),
            ("A:0, B:1", "grow without bound"),
            ("A:-n, B:0", "invalid growth expression"),
            ("A:n-2n, B:0", "leading coefficient"),
            ("A:x, B:0", "cannot read growth term"),
            ("A:n, B:1/2", "non-negative integers"),
            ("A n, B:0", "NAME:EXPR"),
        ],
    )
    def test_errors(self, tier_example, text, message):
        with pytest.raises(NetworkError, match=message):
            parse_profile(text, tier_example)

    def test_growth_validation(self):
        with pytest.raises(ValueError):
            SpeciesGrowth(kind="unbounded", alpha=Fraction(0), scale=Fraction(1))
        with pytest.raises(ValueError):
            SpeciesGrowth(kind="bounded")


class TestTierPartition:
    def test_one_species_bounded(self, tier_example):
        profile = parse_profile("A:n, B:0", tier_example)
        partition = tier_partition(tier_example, profile)
        assert partition.named(tier_example) == [["2A"], ["A+B", "A"], ["B", "0"]]
        assert partition.exponents == (Fraction(2), Fraction(1), Fraction(0))

    def test_both_linear(self, tier_example):
        profile = parse_profile("A:n, B:n+1", tier_example)
        partition = tier_partition(tier_example, profile)
        assert partition.named(tier_example) == [["2A", "A+B"], ["A", "B"], ["0"]]

    def test_every_complex_is_placed_once(self, double_full):
        profile = parse_profile("A:n^2, B:n, C:3", double_full)
        partition = tier_partition(double_full, profile)
        placed = [y for tier in partition.tiers for y in tier]
        assert sorted(placed, key=lambda y: y.coefficients) == sorted(
            double_full.complexes, key=lambda y: y.coefficients
        )
        assert list(partition.exponents) == sorted(partition.exponents, reverse=True)

    def test_dominance(self, tier_example):
        partition = tier_partition(tier_example, parse_profile("A:n, B:0", tier_example))
        y = tier_example.complex_of
        assert dominance(partition, y("2A"), y("B")) == SUCCEEDS
        assert dominance(partition, y("B"), y("2A")) == PRECEDES
        assert dominance(partition, y("A + B"), y("A")) == EQUIVALENT

    def test_dimension_mismatch(self, tier_example):
        profile = GrowthProfile(entries=(SpeciesGrowth.unbounded(),))
        with pytest.raises(NetworkError):
            tier_partition(tier_example, profile)

    def test_unknown_complex(self, tier_example, open_binary):
        partition = tier_partition(tier_example, parse_profile("A:n, B:0", tier_example))
        with pytest.raises(NetworkError):
            partition.index(open_binary.complex_of("2C"))


class TestRatios:
    def test_bounded_factor_at_zero(self):
        network = parse_network("A + B -> 0")
        profile = parse_profile("A:n, B:0", network)
        assert intensity_ratio_limit(network, network.reactions[0], profile) == 0.0

    def test_unbounded_source_keeps_rate(self):
        network = parse_network("S1 -> 0 @ 3")
        profile = parse_profile("S1:n", network)
        assert intensity_ratio_limit(network, network.reactions[0], profile) == 3.0

    def test_bounded_double_complex(self):
        network = parse_network("2B -> A")
        profile = parse_profile("B:2, A:n", network)
        assert intensity_ratio_limit(network, network.reactions[0], profile) == 0.5

    def test_complex_ratio_grows_with_tier_gap(self, tier_example):
        profile = parse_profile("A:n, B:0", tier_example)
        y = tier_example.complex_of
        assert complex_ratio(profile, y("2A"), y("A"), 100.0) == pytest.approx(100.0)
        ratios = [complex_ratio(profile, y("2A"), y("B"), n) for n in (10.0, 100.0, 1000.0)]
        assert ratios == sorted(ratios)

    def test_top_tier_witness(self, tier_example):
        witness = top_tier_witness(tier_example, parse_profile("A:n, B:0", tier_example))
        assert tier_example.reaction_label(witness) == "2A->B"

    def test_no_witness_when_top_tier_is_inert(self):
        network = parse_network("0 -> A\nA -> 2A")
        assert top_tier_witness(network, parse_profile("A:n", network)) is None

    def test_maximal_species(self):
        network = parse_network("A + B -> C")
        assert maximal_species(parse_profile("A:n^2, B:n, C:0", network)) == [0]
        assert maximal_species(parse_profile("A:n, B:2n, C:0", network)) == [0, 1]


DOUBLE_FULL = load_builtin("double_full")
_exponents = st.fractions(min_value=Fraction(1, 4), max_value=Fraction(3), max_denominator=4)


@settings(max_examples=60, deadline=None)
@given(
    alphas=st.tuples(_exponents, _exponents, _exponents),
    bounded=st.sets(st.integers(0, 2), max_size=2),
)
def test_partition_orders_every_pair(alphas, bounded):
    entries = tuple(
        SpeciesGrowth.bounded(1) if i in bounded else SpeciesGrowth.unbounded(alpha)
        for i, alpha in enumerate(alphas)
    )
    profile = GrowthProfile(entries=entries)
    partition = tier_partition(DOUBLE_FULL, profile)
    placed = [y for tier in partition.tiers for y in tier]
    assert len(placed) == len(set(placed)) == len(DOUBLE_FULL.complexes)
    for i, upper in enumerate(partition.tiers):
        for lower in partition.tiers[i + 1 :]:
            for y in upper:
                for y_prime in lower:
                    assert profile.exponent(y) > profile.exponent(y_prime)
                    assert dominance(partition, y, y_prime) == SUCCEEDS


@settings(max_examples=50, deadline=None)
@given(
    alphas=st.tuples(_exponents, _exponents, _exponents),
    bounded=st.sets(st.integers(0, 2), max_size=2),
)
def test_double_full_top_tier_has_doubles_and_a_witness(alphas, bounded):
    entries = tuple(
        SpeciesGrowth.bounded(2) if i in bounded else SpeciesGrowth.unbounded(alpha)
        for i, alpha in enumerate(alphas)
    )
    profile = GrowthProfile(entries=entries)
    partition = tier_partition(DOUBLE_FULL, profile)
    for i in maximal_species(profile):
        assert partition.index(Complex.unit(3, i, 2)) == 1
    witness = top_tier_witness(DOUBLE_FULL, profile)
    assert witness is not None
    assert partition.index(witness.source) == 1
    assert dominance(partition, witness.source, witness.product) == SUCCEEDS


class TestOpenBinaryWitness:
    def test_linear_profile(self, open_binary):
        profile = parse_profile("A:n, B:n, C:n", open_binary)
        partition = tier_partition(open_binary, profile)
        assert [set(tier) for tier in partition.named(open_binary)] == [{"2C"}, {"A", "B", "C"}, {"0"}]
        assert open_binary.reaction_label(top_tier_witness(open_binary, profile)) == "2C->A"

    def test_one_growing_species(self, open_binary):
        profile = parse_profile("A:n, B:0, C:0", open_binary)
        witness = top_tier_witness(open_binary, profile)
        assert open_binary.reaction_label(witness) == "A->B"
        assert intensity_ratio_limit(open_binary, witness, profile) == 1.0
