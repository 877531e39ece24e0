"""
Weakly reversible single-linkage binary core with every in-flow and out-flow added.
"""

from .base_rule import BaseRule, RuleContext, RuleOutcome, RuleWitnesses


class OpenBinaryRule(BaseRule):
    label = "Thm3.1"
    name = "open-binary"
    precedence = 20
    description = "all in-flows and out-flows; core binary, weakly reversible, one linkage class"

    def evaluate(self, context: RuleContext) -> RuleOutcome:
        reason = context.not_binary_reason()
        if reason:
            return self.reject(reason)
        if context.missing_inflows:
            return self.reject(f"missing inflow 0->{context.missing_inflows[0]}")
        if context.missing_outflows:
            return self.reject(f"missing outflow {context.missing_outflows[0]}->0")
        reason = context.single_linkage_reason()
        if reason:
            return self.reject(reason)

        classes = [context.names(group) for group in context.core_linkage_classes]
        return self.accept(context, RuleWitnesses(linkage_classes=classes))
