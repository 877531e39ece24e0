"""
Tests for the bundled network library
"""

import pytest

from crnmix.exceptions import NetworkError
from crnmix.library import builtin_text, list_networks, resolve_network


def test_bundled_networks():
    names = list_networks()
    assert names == sorted(names)
    assert {"open_binary", "double_full", "enzyme_outflows", "tier_example"} <= set(names)


def test_builtin_text_has_comment_header():
    assert builtin_text("birth_death").startswith("#")


def test_unknown_builtin():
    with pytest.raises(NetworkError, match="unknown builtin network") as exc_info:
        builtin_text("nope")
    assert "open_binary" in exc_info.value.details["available"]


def test_resolve_builtin_prefix():
    network = resolve_network("builtin:birth_death")
    assert network.species_names == ["S"]


def test_resolve_file(tmp_path):
    path = tmp_path / "net.crn"
    path.write_text("X + Y -> 2X @ 0.5\n", encoding="utf-8")
    network = resolve_network(str(path))
    assert network.species_names == ["X", "Y"]
    assert network.reactions[0].rate_constant == 0.5


def test_missing_file(tmp_path):
    with pytest.raises(NetworkError, match="not found") as exc_info:
        resolve_network(str(tmp_path / "missing.crn"))
    assert exc_info.value.exit_code == 2
