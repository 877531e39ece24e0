#!/usr/bin/env python3
"""
Rule Loader for crnmix
Discovers certification rules in the rules package and orders them by precedence
"""

import importlib
from pathlib import Path
from typing import Dict, List, Optional, Type

import structlog

from ..exceptions import CRNError
from .base_rule import BaseRule

logger = structlog.get_logger("crnmix.rules.loader")


class RuleLoadError(CRNError):
    """Exception raised when a rule module cannot be loaded"""


class RuleLoader:
    """
    Auto-discovery of *_rule.py modules next to this file.

    Each module must define exactly one BaseRule subclass; rules are returned
    sorted by their precedence attribute.
    """

    def __init__(self, rules_directory: Optional[Path] = None, package: str = __package__):
        self.rules_directory = rules_directory or Path(__file__).parent
        self.package = package
        self.loaded_rules: Dict[str, BaseRule] = {}

    def discover_rules(self) -> List[str]:
        names = sorted(
            path.stem
            for path in self.rules_directory.glob("*_rule.py")
            if path.name != "base_rule.py"
        )
        logger.debug("rules_discovered", count=len(names), rules=names)
        return names

    def load_rule(self, module_stem: str) -> BaseRule:
        module = importlib.import_module(f"{self.package}.{module_stem}")
        rule_classes: List[Type[BaseRule]] = [
            attr
            for attr in vars(module).values()
            if isinstance(attr, type) and issubclass(attr, BaseRule) and attr is not BaseRule
        ]
        if len(rule_classes) != 1:
            raise RuleLoadError(
                f"{module_stem} must define exactly one rule class, found {len(rule_classes)}",
                {"module": module_stem},
            )
        rule = rule_classes[0]()
        if not rule.label:
            raise RuleLoadError(f"{module_stem} defines a rule without a label", {"module": module_stem})
        self.loaded_rules[module_stem] = rule
        return rule

    def load_all_rules(self) -> List[BaseRule]:
        rules = [self.load_rule(stem) for stem in self.discover_rules()]
        labels = [r.label for r in rules]
        if len(set(labels)) != len(labels):
            raise RuleLoadError("duplicate rule labels", {"labels": labels})
        rules.sort(key=lambda r: (r.precedence, r.label))
        logger.debug("rules_loaded", order=[r.label for r in rules])
        return rules


_default_rules: Optional[List[BaseRule]] = None


def get_rules() -> List[BaseRule]:
    """The built-in rules in precedence order (loaded once per process)."""
    global _default_rules
    if _default_rules is None:
        _default_rules = RuleLoader().load_all_rules()
    return list(_default_rules)
