"""
Certification rules, one ergodicity class per *_rule.py module
"""

from .base_rule import BaseRule, RuleContext, RuleOutcome, RuleWitnesses
from .rule_loader import RuleLoader, get_rules

__all__ = ["BaseRule", "RuleContext", "RuleOutcome", "RuleWitnesses", "RuleLoader", "get_rules"]
