#!/usr/bin/env python3
"""
Reaction network data model and the line-oriented text DSL.

A network file holds one reaction per line:

    # comment
    A + B -> 2C @ 1.5
    0 <-> A @ 1.0, 2.0      (second rate is the reverse reaction)
    2C -> A                 (rate defaults to 1.0)

Species are indexed in order of first textual appearance, so the vectors
derived from a file are reproducible.
"""

import math
import re
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import structlog
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .exceptions import NetworkError, NetworkParseError

logger = structlog.get_logger("crnmix.network")

DEFAULT_RATE = 1.0
IDENTIFIER = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


class Species(BaseModel):
    """A chemical species S_i with its 0-based position in the enumeration."""

    model_config = ConfigDict(frozen=True)

    name: str
    index: int = Field(..., ge=0)

    @field_validator("name")
    @classmethod
    def _identifier(cls, value: str) -> str:
        if not IDENTIFIER.match(value):
            raise ValueError(f"invalid species identifier: {value!r}")
        return value


class Complex(BaseModel):
    """Stoichiometric vector y; the zero vector is the empty complex."""

    model_config = ConfigDict(frozen=True)

    coefficients: Tuple[int, ...]

    @field_validator("coefficients")
    @classmethod
    def _non_negative(cls, value: Tuple[int, ...]) -> Tuple[int, ...]:
        if any(c < 0 for c in value):
            raise ValueError("complex coefficients must be non-negative")
        return value

    @classmethod
    def zero(cls, dimension: int) -> "Complex":
        return cls(coefficients=(0,) * dimension)

    @classmethod
    def unit(cls, dimension: int, index: int, multiplicity: int = 1) -> "Complex":
        coefficients = [0] * dimension
        coefficients[index] = multiplicity
        return cls(coefficients=tuple(coefficients))

    @property
    def dimension(self) -> int:
        return len(self.coefficients)

    @property
    def order(self) -> int:
        """The l1 norm of y."""
        return sum(self.coefficients)

    @property
    def is_zero(self) -> bool:
        return self.order == 0

    @property
    def is_unary(self) -> bool:
        return self.order == 1

    @property
    def is_binary(self) -> bool:
        return self.order == 2

    @property
    def is_double(self) -> bool:
        return self.order == 2 and max(self.coefficients) == 2

    def species_index(self) -> int:
        """Index i of a unary (S_i) or double (2S_i) complex."""
        support = [i for i, c in enumerate(self.coefficients) if c]
        if len(support) != 1:
            raise NetworkError(f"complex {self.coefficients} is not a multiple of one species")
        return support[0]

    def sort_key(self) -> Tuple[int, ...]:
        return self.coefficients


class Reaction(BaseModel):
    """A reaction y -> y' with mass-action rate constant kappa."""

    model_config = ConfigDict(frozen=True)

    source: Complex
    product: Complex
    rate_constant: float = Field(default=DEFAULT_RATE)

    @model_validator(mode="after")
    def _well_formed(self) -> "Reaction":
        if self.source == self.product:
            raise ValueError("source and product of a reaction must differ")
        if self.source.dimension != self.product.dimension:
            raise ValueError("source and product have different dimensions")
        if not self.rate_constant > 0:
            raise ValueError(f"rate constant must be positive, got {self.rate_constant}")
        if not math.isfinite(self.rate_constant):
            raise ValueError(f"rate constant must be finite, got {self.rate_constant}")
        return self

    @property
    def net_change(self) -> Tuple[int, ...]:
        return tuple(b - a for a, b in zip(self.source.coefficients, self.product.coefficients))

    @property
    def edge(self) -> Tuple[Complex, Complex]:
        return (self.source, self.product)

    @property
    def is_inflow(self) -> bool:
        return self.source.is_zero and self.product.is_unary

    @property
    def is_outflow(self) -> bool:
        return self.source.is_unary and self.product.is_zero


class ReactionNetwork(BaseModel):
    """The triple (S, C, R); C is derived from R and never stored separately."""

    model_config = ConfigDict(frozen=True)

    species: Tuple[Species, ...]
    reactions: Tuple[Reaction, ...]

    @model_validator(mode="after")
    def _consistent(self) -> "ReactionNetwork":
        names = [s.name for s in self.species]
        if len(set(names)) != len(names):
            raise ValueError("species names must be unique")
        if [s.index for s in self.species] != list(range(len(self.species))):
            raise ValueError("species indices must enumerate 0..d-1 in order")
        d = len(self.species)
        seen = set()
        for reaction in self.reactions:
            if reaction.source.dimension != d:
                raise ValueError("reaction dimension does not match the species list")
            if reaction.edge in seen:
                raise ValueError("duplicate reaction")
            seen.add(reaction.edge)
        return self

    @classmethod
    def build(
        cls,
        species: Sequence[str],
        reactions: Iterable[Tuple[Dict[str, int], Dict[str, int], float]],
    ) -> "ReactionNetwork":
        """Construct from species names and (source, product, rate) dicts."""
        index = {name: i for i, name in enumerate(species)}
        d = len(species)

        def to_complex(terms: Dict[str, int]) -> Complex:
            coefficients = [0] * d
            for name, count in terms.items():
                if name not in index:
                    raise NetworkError(f"unknown species: {name}")
                coefficients[index[name]] += count
            return Complex(coefficients=tuple(coefficients))

        return cls(
            species=tuple(Species(name=n, index=i) for i, n in enumerate(species)),
            reactions=tuple(
                Reaction(source=to_complex(src), product=to_complex(prod), rate_constant=rate)
                for src, prod, rate in reactions
            ),
        )

    @property
    def dimension(self) -> int:
        return len(self.species)

    @property
    def species_names(self) -> List[str]:
        return [s.name for s in self.species]

    @property
    def complexes(self) -> List[Complex]:
        """Deduplicated sources and products in first-appearance order."""
        ordered: Dict[Complex, None] = {}
        for reaction in self.reactions:
            ordered.setdefault(reaction.source, None)
            ordered.setdefault(reaction.product, None)
        return list(ordered)

    def species_index(self, name: str) -> int:
        for s in self.species:
            if s.name == name:
                return s.index
        raise NetworkError(f"unknown species: {name}", {"species": self.species_names})

    def complex_of(self, text: str) -> Complex:
        """Parse a single complex written in DSL notation against this network's species."""
        tokens = _tokenize(text, 1)
        parser = _LineParser(tokens, 1, text, _SpeciesRegistry(self.species_names, frozen=True))
        terms = parser.complex()
        parser.expect_end()
        return _assemble(terms, self.dimension)

    def complex_name(self, complex_: Complex, compact: bool = True) -> str:
        if complex_.is_zero:
            return "0"
        terms = []
        for name, count in zip(self.species_names, complex_.coefficients):
            if count == 1:
                terms.append(name)
            elif count > 1:
                terms.append(f"{count}{name}")
        return ("+" if compact else " + ").join(terms)

    def reaction_label(self, reaction: Reaction) -> str:
        return f"{self.complex_name(reaction.source)}->{self.complex_name(reaction.product)}"

    def with_reactions(self, reactions: Iterable[Reaction]) -> "ReactionNetwork":
        """Same species list, different reaction set."""
        return ReactionNetwork(species=self.species, reactions=tuple(reactions))


def is_binary(network: ReactionNetwork) -> bool:
    """True iff every complex has order at most 2."""
    return all(y.order <= 2 for y in network.complexes)


# ---------------------------------------------------------------------------
# DSL tokenizer / parser
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>\#.*)
  | (?P<biarrow><->)
  | (?P<arrow>->)
  | (?P<at>@)
  | (?P<comma>,)
  | (?P<plus>\+)
  | (?P<minus>-)
  | (?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)

Token = Tuple[str, str, int]


def _tokenize(line: str, lineno: int) -> List[Token]:
    tokens: List[Token] = []
    pos = 0
    while pos < len(line):
        match = _TOKEN.match(line, pos)
        if not match:
            raise NetworkParseError(f"unexpected character {line[pos]!r}", lineno, pos + 1, line)
        kind = match.lastgroup
        if kind not in ("ws", "comment"):
            tokens.append((kind, match.group(), pos + 1))
        pos = match.end()
    return tokens


class _SpeciesRegistry:
    """Assigns indices in first-appearance order."""

    def __init__(self, names: Sequence[str] = (), frozen: bool = False):
        self.names: List[str] = list(names)
        self.frozen = frozen

    def index(self, name: str, lineno: int, column: int, text: str) -> int:
        if name not in self.names:
            if self.frozen:
                raise NetworkParseError(f"unknown species {name!r}", lineno, column, text)
            self.names.append(name)
        return self.names.index(name)


class _LineParser:
    def __init__(self, tokens: List[Token], lineno: int, text: str, registry: _SpeciesRegistry):
        self.tokens = tokens
        self.pos = 0
        self.lineno = lineno
        self.text = text
        self.registry = registry

    def _peek(self, offset: int = 0) -> Optional[Token]:
        i = self.pos + offset
        return self.tokens[i] if i < len(self.tokens) else None

    def _column(self) -> int:
        token = self._peek()
        return token[2] if token else len(self.text) + 1

    def _error(self, message: str, column: Optional[int] = None) -> NetworkParseError:
        return NetworkParseError(message, self.lineno, column or self._column(), self.text)

    def _take(self, kind: str) -> Token:
        token = self._peek()
        if token is None or token[0] != kind:
            found = "end of line" if token is None else repr(token[1])
            raise self._error(f"expected {kind}, found {found}")
        self.pos += 1
        return token

    def expect_end(self) -> None:
        token = self._peek()
        if token is not None:
            raise self._error(f"unexpected {token[1]!r}")

    def complex(self) -> Dict[int, int]:
        token = self._peek()
        nxt = self._peek(1)
        if (
            token is not None
            and token[0] == "number"
            and token[1] == "0"
            and (nxt is None or nxt[0] != "ident")
        ):
            self.pos += 1
            return {}
        terms: Dict[int, int] = {}
        self._term(terms)
        while self._peek() is not None and self._peek()[0] == "plus":
            self.pos += 1
            self._term(terms)
        return terms

    def _term(self, terms: Dict[int, int]) -> None:
        token = self._peek()
        coefficient = 1
        if token is not None and token[0] == "minus":
            raise self._error("coefficient must be a non-negative integer")
        if token is not None and token[0] == "number":
            if not token[1].isdigit():
                raise self._error("coefficient must be a non-negative integer")
            coefficient = int(token[1])
            self.pos += 1
        name_token = self._take("ident")
        if coefficient == 0:
            return
        index = self.registry.index(name_token[1], self.lineno, name_token[2], self.text)
        terms[index] = terms.get(index, 0) + coefficient

    def rate(self) -> Tuple[float, int]:
        column = self._column()
        sign = 1.0
        token = self._peek()
        if token is not None and token[0] in ("minus", "plus"):
            sign = -1.0 if token[0] == "minus" else 1.0
            self.pos += 1
        token_text = self._take("number")[1]
        value = sign * float(token_text)
        if not value > 0:
            raise self._error(f"rate constant must be positive, got {value}", column)
        if not math.isfinite(value):
            raise self._error(f"rate constant must be finite, got {token_text}", column)
        return value, column

    def reaction(self) -> Tuple[Dict[int, int], Dict[int, int], bool, List[float]]:
        source = self.complex()
        token = self._peek()
        if token is None or token[0] not in ("arrow", "biarrow"):
            found = "end of line" if token is None else repr(token[1])
            raise self._error(f"expected '->' or '<->', found {found}")
        self.pos += 1
        reversible = token[0] == "biarrow"
        product = self.complex()
        rates: List[float] = []
        if self._peek() is not None and self._peek()[0] == "at":
            self.pos += 1
            rates.append(self.rate()[0])
            if self._peek() is not None and self._peek()[0] == "comma":
                comma_column = self._column()
                self.pos += 1
                rates.append(self.rate()[0])
                if not reversible:
                    raise self._error("a one-way reaction takes a single rate", comma_column)
        self.expect_end()
        if reversible and len(rates) == 1:
            raise self._error("'<->' requires zero or two rates", token[2])
        return source, product, reversible, rates


def _assemble(terms: Dict[int, int], dimension: int) -> Complex:
    coefficients = [0] * dimension
    for index, count in terms.items():
        coefficients[index] = count
    return Complex(coefficients=tuple(coefficients))


def parse_network(text: str) -> ReactionNetwork:
    """Parse DSL text into a ReactionNetwork."""
    registry = _SpeciesRegistry()
    raw: List[Tuple[Dict[int, int], Dict[int, int], float, int, int]] = []

    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens = _tokenize(line, lineno)
        if not tokens:
            continue
        parser = _LineParser(tokens, lineno, line, registry)
        source, product, reversible, rates = parser.reaction()
        forward = rates[0] if rates else DEFAULT_RATE
        raw.append((source, product, forward, lineno, tokens[0][2]))
        if reversible:
            reverse = rates[1] if len(rates) == 2 else DEFAULT_RATE
            raw.append((product, source, reverse, lineno, tokens[0][2]))

    d = len(registry.names)
    reactions: List[Reaction] = []
    seen: Dict[Tuple[Complex, Complex], int] = {}
    for source_terms, product_terms, rate, lineno, column in raw:
        source = _assemble(source_terms, d)
        product = _assemble(product_terms, d)
        if source == product:
            raise NetworkParseError("source and product are identical", lineno, column)
        if (source, product) in seen:
            raise NetworkParseError(
                f"duplicate reaction (first defined on line {seen[(source, product)]})",
                lineno,
                column,
            )
        seen[(source, product)] = lineno
        reactions.append(Reaction(source=source, product=product, rate_constant=rate))

    network = ReactionNetwork(
        species=tuple(Species(name=n, index=i) for i, n in enumerate(registry.names)),
        reactions=tuple(reactions),
    )
    logger.debug(
        "network_parsed",
        species=network.dimension,
        reactions=len(network.reactions),
        complexes=len(network.complexes),
    )
    return network


def parse_network_file(path: Path) -> ReactionNetwork:
    return parse_network(Path(path).read_text(encoding="utf-8"))


def render_network(network: ReactionNetwork) -> str:
    """Render back to DSL; parse_network(render_network(n)) == n."""
    lines = []
    for reaction in network.reactions:
        lines.append(
            f"{network.complex_name(reaction.source, compact=False)} -> "
            f"{network.complex_name(reaction.product, compact=False)} "
            f"@ {reaction.rate_constant!r}"
        )
    return "\n".join(lines) + ("\n" if lines else "")
