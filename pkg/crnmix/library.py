"""
Bundled example networks, addressable as builtin:<name>.
"""

from importlib import resources
from pathlib import Path
from typing import List

from .exceptions import NetworkError
from .network import ReactionNetwork, parse_network, parse_network_file

BUILTIN_PREFIX = "builtin:"


def list_networks() -> List[str]:
    folder = resources.files("crnmix") / "networks"
    return sorted(entry.name[: -len(".crn")] for entry in folder.iterdir() if entry.name.endswith(".crn"))


def builtin_text(name: str) -> str:
    entry = resources.files("crnmix") / "networks" / f"{name}.crn"
    if not entry.is_file():
        raise NetworkError(f"unknown builtin network {name!r}", {"available": list_networks()})
    return entry.read_text(encoding="utf-8")


def load_builtin(name: str) -> ReactionNetwork:
    return parse_network(builtin_text(name))


def resolve_network(spec: str) -> ReactionNetwork:
    """Load builtin:<name> or a DSL file path."""
    if spec.startswith(BUILTIN_PREFIX):
        return load_builtin(spec[len(BUILTIN_PREFIX):])
    path = Path(spec)
    if not path.is_file():
        raise NetworkError(f"network file not found: {spec}")
    return parse_network_file(path)
