"""
Golden structural checks run by `crnmix selftest`.

Each check loads a bundled network and compares a deterministic result
(certificate class, witness, tier table, equilibrium, closed-form drift)
against its known value. No check uses random numbers.
"""

from typing import Callable, List, Tuple

import numpy as np
import structlog
from pydantic import BaseModel

from .certification import certify
from .equilibrium import find_equilibrium, is_complex_balanced, mass_action_field
from .exceptions import CRNError
from .kinetics import LINEAR_W, drift_scan, linear_drift_constants
from .library import load_builtin
from .network import parse_network
from .tiers import parse_profile, tier_partition

logger = structlog.get_logger("crnmix.selftest")


class CheckResult(BaseModel):
    name: str
    passed: bool
    detail: str


def _expect(actual, expected) -> Tuple[bool, str]:
    return actual == expected, f"got {actual!r}, expected {expected!r}"


def check_open_binary() -> Tuple[bool, str]:
    certificate = certify(load_builtin("open_binary"))
    return _expect(
        (certificate.class_label, certificate.witnesses.conservation_vector),
        ("Thm3.1-conservative", [2, 2, 1]),
    )


def check_double_full() -> Tuple[bool, str]:
    certificate = certify(load_builtin("double_full"))
    expected_paths = {"2A": ["2A", "A+B", "B"], "2B": ["2B", "0"], "2C": ["2C", "A"]}
    return _expect((certificate.class_label, certificate.witnesses.paths), ("Thm3.2", expected_paths))


def check_point_mass() -> Tuple[bool, str]:
    certificate = certify(load_builtin("point_mass"))
    has_caveat = any("point mass" in c for c in certificate.caveats)
    return _expect(
        (certificate.class_label, "Cor6.2" in certificate.all_matching_classes, has_caveat),
        ("Thm3.2", True, True),
    )


def check_enzyme() -> Tuple[bool, str]:
    certificate = certify(load_builtin("enzyme_outflows"))
    partition = certificate.witnesses.species_partition or {}
    return _expect(
        (certificate.class_label, partition.get("s_p"), certificate.witnesses.conservation_vector),
        ("Cor6.4-conservative", ["S"], [1, 1, 2, 1]),
    )


def check_not_binary() -> Tuple[bool, str]:
    certificate = certify(parse_network("3A -> B"))
    reasons = set(certificate.failed_hypotheses.values())
    return _expect(
        (certificate.class_label, "network is not binary: complex 3A has order 3" in reasons),
        ("NotCertified", True),
    )


def check_tiers() -> Tuple[bool, str]:
    network = load_builtin("tier_example")
    tables = [
        tier_partition(network, parse_profile(profile, network)).named(network)
        for profile in ("A:n, B:0", "A:n, B:n+1")
    ]
    expected = [
        [["2A"], ["A+B", "A"], ["B", "0"]],
        [["2A", "A+B"], ["A", "B"], ["0"]],
    ]
    return _expect(tables, expected)


def check_equilibria() -> Tuple[bool, str]:
    details = []
    passed = True
    for name in ("open_binary", "double_full"):
        network = load_builtin(name)
        c = find_equilibrium(network, [1.0] * network.dimension)
        residual = float(np.abs(mass_action_field(network, c)).max())
        balanced = is_complex_balanced(network, c)
        ok = bool(np.allclose(c, 1.0, atol=1e-9)) and residual <= 1e-12 and balanced
        passed = passed and ok
        details.append(f"{name}: c={np.round(c, 9).tolist()} residual={residual:.1e} balanced={balanced}")
    return passed, "; ".join(details)


def check_linear_drift() -> Tuple[bool, str]:
    network = load_builtin("open_binary")
    weights = [2.0, 2.0, 1.0]
    a, b = linear_drift_constants(network, weights)
    report = drift_scan(network, lyapunov_kind=LINEAR_W, a=a, box_radius=8, weights=weights)
    ok = abs(report.b - b) <= 1e-10 * abs(b) and report.argmax_state == [0, 0, 0]
    return ok, f"closed form b={b}, scanned b={report.b}, argmax={report.argmax_state}"


CHECKS: List[Tuple[str, Callable[[], Tuple[bool, str]]]] = [
    ("open binary network is certified conservative", check_open_binary),
    ("double-full network carries its three witness paths", check_double_full),
    ("2S1 -> S1 -> 0 carries the point-mass caveat", check_point_mass),
    ("enzyme network with outflows partitions S_p = [S]", check_enzyme),
    ("3A -> B is not certified", check_not_binary),
    ("tier table for two growth profiles", check_tiers),
    ("unit-rate equilibria are complex balanced at (1,1,1)", check_equilibria),
    ("scanned linear drift matches the closed form", check_linear_drift),
]


def run_selftest() -> List[CheckResult]:
    results = []
    for name, check in CHECKS:
        try:
            passed, detail = check()
        except CRNError as exc:
            passed, detail = False, f"{type(exc).__name__}: {exc.message}"
        results.append(CheckResult(name=name, passed=passed, detail=detail))
        logger.debug("selftest_check", name=name, passed=passed)
    logger.info("selftest_completed", passed=sum(r.passed for r in results), total=len(results))
    return results
