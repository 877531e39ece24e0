"""
Tests for the exact simulator and empirical transient laws
"""

import json
import math

import numpy as np
import pandas as pd
import pytest

from crnmix.conservation import find_conservation_vector
from crnmix.exceptions import ExplosionGuardError, ResourceGuardError, UsageError
from crnmix.kinetics import apply_generator
from crnmix.library import load_builtin
from crnmix.network import parse_network
from crnmix.settings import CRNSettings
from crnmix.simulation import (
    SimulationConfig,
    TransientDistribution,
    irreducibility_probe,
    replicate_rng,
    simulate_until,
    transient_distribution,
    transient_distributions,
)


class TestRandomStreams:
    def test_streams_are_reproducible(self):
        first = replicate_rng(7, 3).random(5)
        second = replicate_rng(7, 3).random(5)
        assert first.tolist() == second.tolist()

    def test_streams_differ_by_replicate(self):
        assert replicate_rng(7, 3).random() != replicate_rng(7, 4).random()

    def test_streams_differ_by_seed(self):
        assert replicate_rng(7, 3).random() != replicate_rng(8, 3).random()


class TestSimulateUntil:
    def test_time_zero_returns_start(self, open_binary):
        assert simulate_until(open_binary, (2, 0, 5), 0.0, replicate_rng(1, 0)) == (2, 0, 5)

    def test_negative_time(self, open_binary):
        with pytest.raises(UsageError):
            simulate_until(open_binary, (1, 1, 1), -1.0, replicate_rng(1, 0))

    def test_absorbing_state(self):
        network = parse_network("A -> 0")
        assert simulate_until(network, (5,), 1000.0, replicate_rng(1, 0)) == (0,)

    def test_counts_stay_non_negative(self, double_full):
        for replicate in range(20):
            state = simulate_until(double_full, (3, 3, 3), 2.0, replicate_rng(11, replicate))
            assert min(state) >= 0

    def test_event_cap(self):
        with pytest.raises(ExplosionGuardError) as exc_info:
            simulate_until(parse_network("A -> 2A"), (1,), 100.0, replicate_rng(1, 0), max_events=50)
        assert exc_info.value.events == 50
        assert exc_info.value.exit_code == 3


class TestGeneratorConsistency:
    """Short-time increments of exact samples against the generator applied to coordinates."""

    H = 1e-3

    @staticmethod
    def _assert_matches_generator(network, x, replicates, seed, h):
        samples = np.array(
            [simulate_until(network, x, h, replicate_rng(seed, r)) for r in range(replicates)], dtype=float
        )
        increments = (samples - np.asarray(x, dtype=float)) / h
        for i in range(network.dimension):
            expected = apply_generator(network, lambda z, i=i: z[i], x)
            standard_error = increments[:, i].std(ddof=1) / math.sqrt(replicates)
            assert abs(increments[:, i].mean() - expected) <= 4 * standard_error

    def test_birth_death(self, birth_death):
        self._assert_matches_generator(birth_death, (3,), 20_000, 101, self.H)

    @pytest.mark.slow
    @pytest.mark.parametrize(
        "name, x", [("open_binary", (3, 2, 4)), ("double_full", (2, 3, 1)), ("enzyme_outflows", (3, 2, 1, 2))]
    )
    def test_full_replicate_count(self, name, x):
        self._assert_matches_generator(load_builtin(name), x, 100_000, 202, self.H)


class TestTransientDistribution:
    def test_time_zero_is_point_mass(self, open_binary, small_config):
        sample = transient_distribution(open_binary, (2, 1, 0), 0.0, small_config)
        assert sample.table == {(2, 1, 0): 1.0}
        assert sample.mean == [2.0, 1.0, 0.0]
        assert sample.variance == [0.0, 0.0, 0.0]
        assert sample.out_of_box_mass == 0.0

    def test_birth_death_mean(self, birth_death, small_config):
        sample = transient_distribution(birth_death, (0,), 5.0, small_config)
        assert sample.replicates == small_config.replicates
        assert sample.mean[0] == pytest.approx(1.0, abs=0.1)
        assert sum(sample.table.values()) == pytest.approx(1.0)

    def test_out_of_box_mass(self, birth_death, small_config):
        sample = transient_distribution(birth_death, (0,), 5.0, small_config, box_radius=0)
        assert 0.0 < sample.out_of_box_mass < 1.0
        assert sample.probability((0,)) + sample.out_of_box_mass == pytest.approx(1.0)

    def test_grid_shares_trajectories(self, birth_death, small_config):
        early, late = transient_distributions(birth_death, (4,), [0.0, 3.0], small_config)
        assert early.table == {(4,): 1.0}
        assert late.time == 3.0
        assert late.replicates == early.replicates

    def test_worker_count_does_not_change_result(self, open_binary):
        single = transient_distribution(open_binary, (3, 3, 3), 1.0, SimulationConfig(seed=5, replicates=300))
        pooled = transient_distribution(
            open_binary, (3, 3, 3), 1.0, SimulationConfig(seed=5, replicates=300, threads=2)
        )
        assert single.table == pooled.table
        assert single.summary() == pooled.summary()

    def test_seed_changes_result(self, open_binary):
        first = transient_distribution(open_binary, (3, 3, 3), 1.0, SimulationConfig(seed=5, replicates=300))
        second = transient_distribution(open_binary, (3, 3, 3), 1.0, SimulationConfig(seed=6, replicates=300))
        assert first.table != second.table

    def test_explosion_guard(self):
        config = SimulationConfig(replicates=20, max_events=50)
        with pytest.raises(ExplosionGuardError):
            transient_distribution(parse_network("A -> 2A"), (1,), 100.0, config)

    @pytest.mark.parametrize(
        "times, box_radius",
        [([-1.0], 10), ([2.0, 1.0], 10), ([1.0], -1)],
    )
    def test_invalid_arguments(self, birth_death, small_config, times, box_radius):
        with pytest.raises(UsageError):
            transient_distributions(birth_death, (0,), times, small_config, box_radius)

    def test_negative_time_rejected_by_model(self):
        with pytest.raises(ValueError):
            TransientDistribution(
                species=["S"],
                origin=(0,),
                time=-1.0,
                box_radius=1,
                replicates=1,
                out_of_box_mass=0.0,
                mean=[0.0],
                variance=[0.0],
            )

    def test_dumps(self, birth_death, small_config, tmp_path):
        sample = transient_distribution(birth_death, (0,), 2.0, small_config, box_radius=20)
        path = sample.to_csv(tmp_path / "out" / "distribution.csv")
        frame = pd.read_csv(path)
        assert list(frame.columns) == ["S", "frequency"]
        assert frame["frequency"].sum() == pytest.approx(1.0)
        assert frame["S"].is_monotonic_increasing

        summary = json.loads(sample.summary_json())
        assert "table" not in summary
        assert summary["origin"] == [0]
        assert summary["replicates"] == small_config.replicates


class TestConservedQuantities:
    CLOSED = "S + E <-> SE\nSE -> E + P\nP -> S\n"

    def test_weighted_total_is_constant_along_trajectories(self, small_config):
        network = parse_network(self.CLOSED)
        weights = list(find_conservation_vector(network.reactions, network.dimension).weights)
        assert weights == [1, 1, 2, 1]
        x0 = (5, 3, 0, 0)
        total = sum(w * x for w, x in zip(weights, x0))
        samples = transient_distributions(network, x0, [0.5, 2.0, 10.0], small_config, box_radius=10)
        for sample in samples:
            assert sample.out_of_box_mass == 0.0
            assert all(sum(w * z for w, z in zip(weights, state)) == total for state in sample.table)

    def test_single_trajectory(self):
        network = parse_network(self.CLOSED)
        for replicate in range(50):
            state = simulate_until(network, (4, 2, 1, 3), 3.0, replicate_rng(5, replicate))
            assert state[0] + state[1] + 2 * state[2] + state[3] == 12


class TestIrreducibilityProbe:
    def test_open_network(self, open_binary):
        assert irreducibility_probe(open_binary, (1, 1, 1), 5)

    def test_origin_is_trivially_connected(self, point_mass):
        assert irreducibility_probe(point_mass, (0,), 5)

    def test_absorbing_origin(self, point_mass):
        assert not irreducibility_probe(point_mass, (1,), 5)

    def test_start_outside_box(self, open_binary):
        with pytest.raises(UsageError):
            irreducibility_probe(open_binary, (9, 0, 0), 5)

    def test_guard(self, open_binary):
        with pytest.raises(ResourceGuardError):
            irreducibility_probe(open_binary, (1, 1, 1), 50, max_states=1000)


class TestSimulationConfig:
    def test_from_settings_with_overrides(self):
        settings = CRNSettings(seed=3, replicates=10, threads=2)
        config = SimulationConfig.from_settings(settings, replicates=50, threads=None)
        assert (config.seed, config.replicates, config.threads) == (3, 50, 2)

    def test_rejects_zero_replicates(self):
        with pytest.raises(ValueError):
            SimulationConfig(replicates=0)
