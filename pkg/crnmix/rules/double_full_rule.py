"""
Double-full binary networks: uniform convergence over the initial state.
"""

from ..graph import double_complexes, path_to_low_order
from .base_rule import BaseRule, RuleContext, RuleOutcome, RuleWitnesses


class DoubleFullRule(BaseRule):
    label = "Thm3.2"
    name = "double-full"
    precedence = 10
    uniform = True
    description = "binary, 2S_i present for every species, each 2S_i reaches a complex of order <= 1"

    def evaluate(self, context: RuleContext) -> RuleOutcome:
        reason = context.not_binary_reason()
        if reason:
            return self.reject(reason)

        network = context.network
        doubles = double_complexes(network)
        for i in range(network.dimension):
            if i not in doubles:
                return self.reject(f"complex 2{context.species_name(i)} is missing")

        paths = {}
        for i, y in sorted(doubles.items()):
            path = path_to_low_order(network, y)
            if path is None:
                return self.reject(f"no directed path from {context.name(y)} to a complex of order <= 1")
            paths[context.name(y)] = context.names(path)

        return self.accept(context, RuleWitnesses(paths=paths))
