#!/usr/bin/env python3
"""
Ergodicity certification engine.

Walks the certification rules in precedence order, records every class whose
hypotheses hold, and upgrades non-uniform classes to the linear bound when the
core reactions admit a positive conservation vector.
"""

from typing import Dict, List, Optional, Sequence

import structlog
from pydantic import BaseModel, Field

from .network import ReactionNetwork
from .rules import BaseRule, RuleContext, RuleOutcome, get_rules
from .rules.base_rule import (
    LINEAR_BOUND,
    LOG_BOUND,
    LOG_MIXING,
    UNIFORM_BOUND,
    UNIFORM_MIXING,
    UNKNOWN_MIXING,
)

logger = structlog.get_logger("crnmix.certification")

NOT_CERTIFIED = "NotCertified"
NOT_CERTIFIED_NAME = "not-certified"
CONSERVATIVE_SUFFIX = "-conservative"
NOT_CERTIFIED_NOTE = (
    "NotCertified is not a claim of non-ergodicity: the structural conditions checked "
    "here are sufficient, not necessary"
)


class FlowWitness(BaseModel):
    core_reactions: List[str]
    inflow_species: List[str]
    outflow_species: List[str]


class CertificateWitnesses(BaseModel):
    conservation_vector: Optional[List[int]] = None
    paths: Dict[str, List[str]] = Field(default_factory=dict)
    unary_chains: Dict[str, List[str]] = Field(default_factory=dict)
    linkage_classes: Optional[List[List[str]]] = None
    species_partition: Optional[Dict[str, List[str]]] = None
    flow_decomposition: FlowWitness


class ErgodicityCertificate(BaseModel):
    """Verdict of certify(); bound_form and mixing_order follow from class_label."""

    class_label: str
    class_name: str
    bound_form: Optional[str]
    mixing_order: str
    uniform: bool
    species: List[str]
    witnesses: CertificateWitnesses
    caveats: List[str] = Field(default_factory=list)
    all_matching_classes: List[str] = Field(default_factory=list)
    failed_hypotheses: Dict[str, str] = Field(default_factory=dict)
    note: Optional[str] = None

    @property
    def certified(self) -> bool:
        return self.class_label != NOT_CERTIFIED

    @property
    def base_label(self) -> str:
        return self.class_label.removesuffix(CONSERVATIVE_SUFFIX)

    @property
    def conservative(self) -> bool:
        return self.class_label.endswith(CONSERVATIVE_SUFFIX)

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)

    def summary(self) -> str:
        if not self.certified:
            first = next(iter(self.failed_hypotheses.items()), None)
            detail = f" ({first[0]}: {first[1]})" if first else ""
            return f"{NOT_CERTIFIED}{detail}"
        return f"{self.class_label} bound={self.bound_form} mixing={self.mixing_order}"


def _bound_for(outcome: RuleOutcome, conservative: bool) -> tuple:
    if outcome.uniform:
        return UNIFORM_BOUND, UNIFORM_MIXING
    if conservative:
        return LINEAR_BOUND, LOG_MIXING
    return LOG_BOUND, LOG_MIXING


def _emitted_label(outcome: RuleOutcome, conservative: bool) -> str:
    if conservative and not outcome.uniform:
        return outcome.label + CONSERVATIVE_SUFFIX
    return outcome.label


def _emitted_name(outcome: RuleOutcome, conservative: bool) -> str:
    if conservative and not outcome.uniform:
        return outcome.name + CONSERVATIVE_SUFFIX
    return outcome.name


def certify(network: ReactionNetwork, rules: Optional[Sequence[BaseRule]] = None) -> ErgodicityCertificate:
    """Classify a network into the strongest matching ergodicity class."""
    context = RuleContext(network)
    rules = list(rules) if rules is not None else get_rules()

    matched: List[RuleOutcome] = []
    failed: Dict[str, str] = {}
    for rule in rules:
        outcome = rule.evaluate(context)
        if outcome.matched:
            matched.append(outcome)
        else:
            failed[rule.label] = outcome.failed_hypothesis or "hypothesis not satisfied"

    conservation = context.core_conservation if any(not m.uniform for m in matched) else None
    conservative = conservation is not None

    flows = context.flows
    flow_witness = FlowWitness(
        core_reactions=[network.reaction_label(r) for r in flows.core.reactions],
        inflow_species=[context.species_name(i) for i in flows.inflow_species],
        outflow_species=[context.species_name(i) for i in flows.outflow_species],
    )

    caveats: List[str] = []
    for outcome in matched:
        for caveat in outcome.caveats:
            if caveat not in caveats:
                caveats.append(caveat)

    if not matched:
        certificate = ErgodicityCertificate(
            class_label=NOT_CERTIFIED,
            class_name=NOT_CERTIFIED_NAME,
            bound_form=None,
            mixing_order=UNKNOWN_MIXING,
            uniform=False,
            species=network.species_names,
            witnesses=CertificateWitnesses(flow_decomposition=flow_witness),
            failed_hypotheses=failed,
            note=NOT_CERTIFIED_NOTE,
        )
        logger.info("certificate_issued", class_label=NOT_CERTIFIED, failed=len(failed))
        return certificate

    primary = matched[0]
    bound, mixing = _bound_for(primary, conservative)
    rule_witnesses = primary.witnesses
    witnesses = CertificateWitnesses(
        conservation_vector=list(conservation.weights) if conservative else None,
        paths=rule_witnesses.paths,
        unary_chains=rule_witnesses.unary_chains,
        linkage_classes=rule_witnesses.linkage_classes,
        species_partition=rule_witnesses.species_partition,
        flow_decomposition=flow_witness,
    )
    certificate = ErgodicityCertificate(
        class_label=_emitted_label(primary, conservative),
        class_name=_emitted_name(primary, conservative),
        bound_form=bound,
        mixing_order=mixing,
        uniform=primary.uniform,
        species=network.species_names,
        witnesses=witnesses,
        caveats=caveats,
        all_matching_classes=[_emitted_label(m, conservative) for m in matched],
        failed_hypotheses=failed,
    )
    logger.info(
        "certificate_issued",
        class_label=certificate.class_label,
        matching=certificate.all_matching_classes,
    )
    return certificate
