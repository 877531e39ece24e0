"""
All out-flows plus a path from every binary complex down to order <= 1.
"""

from .base_rule import BaseRule, RuleContext, RuleOutcome, RuleWitnesses


class OutflowPathRule(BaseRule):
    label = "Cor6.2"
    name = "outflow-path"
    precedence = 40
    description = "all out-flows, any in-flows; every binary complex reaches order <= 1"

    def evaluate(self, context: RuleContext) -> RuleOutcome:
        reason = context.not_binary_reason()
        if reason:
            return self.reject(reason)
        if context.missing_outflows:
            return self.reject(f"missing outflow {context.missing_outflows[0]}->0")
        paths, stuck = context.binary_complex_paths
        if stuck:
            return self.reject(f"no directed path from {stuck} to a complex of order <= 1")

        return self.accept(context, RuleWitnesses(paths=paths), context.point_mass_caveats())
