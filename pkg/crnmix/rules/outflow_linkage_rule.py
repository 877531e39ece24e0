"""
As the open-binary class, but only the out-flows need to be complete.
"""

from .base_rule import BaseRule, RuleContext, RuleOutcome, RuleWitnesses


class OutflowLinkageRule(BaseRule):
    label = "Cor6.1"
    name = "outflow-binary"
    precedence = 30
    description = "all out-flows, any in-flows; core binary, weakly reversible, one linkage class"

    def evaluate(self, context: RuleContext) -> RuleOutcome:
        reason = context.not_binary_reason()
        if reason:
            return self.reject(reason)
        if context.missing_outflows:
            return self.reject(f"missing outflow {context.missing_outflows[0]}->0")
        reason = context.single_linkage_reason()
        if reason:
            return self.reject(reason)

        classes = [context.names(group) for group in context.core_linkage_classes]
        return self.accept(context, RuleWitnesses(linkage_classes=classes))
