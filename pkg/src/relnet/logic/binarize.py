"""
Conversion of unary and ternary relations into binary ones.

Walks chain binary predicates only, so every other arity is rewritten
before the FactStore is built:

    Q(a)        ->  Q(a, true)                       (true: BoolVal)
    R(a, b, c)  ->  R_12(a, b), R_13(a, c), R_23(b, c)
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from relnet.errors import SchemaError, TypeMismatchError
from relnet.logic.atoms import Atom, Constant, Predicate, TypeName
from relnet.logic.fact_store import FactStore

logger = logging.getLogger(__name__)

BOOL_TYPE: TypeName = "BoolVal"
TRUE_CONSTANT = Constant("true", BOOL_TYPE)

_PROJECTIONS = ((0, 1), (0, 2), (1, 2))


@dataclass(frozen=True)
class RawDeclaration:
    """A relation signature of arity 1 to 3 as read from a types file."""

    name: str
    arg_types: Tuple[TypeName, ...]

    @property
    def arity(self) -> int:
        return len(self.arg_types)


@dataclass(frozen=True)
class RawAtom:
    """An untyped fact of any arity as read from a facts file."""

    name: str
    args: Tuple[str, ...]
    line: int = 0


@dataclass
class RawDatabase:
    """Declarations plus facts before binarization."""

    declarations: Dict[str, RawDeclaration] = field(default_factory=dict)
    atoms: List[RawAtom] = field(default_factory=list)

    def declare(self, declaration: RawDeclaration) -> None:
        existing = self.declarations.get(declaration.name)
        if existing is not None and existing != declaration:
            raise SchemaError(f"Predicate {declaration.name} declared twice with different signatures")
        self.declarations[declaration.name] = declaration


def projection_name(name: str, i: int, j: int) -> str:
    return f"{name}_{i + 1}{j + 1}"


def binarize_declaration(declaration: RawDeclaration) -> List[Predicate]:
    """
    Binary predicates that replace one raw declaration.

    Args:
        declaration: Raw signature of arity 1, 2 or 3

    Returns:
        List[Predicate]: One predicate for arity 1 or 2, three for arity 3
    """
    types = declaration.arg_types
    if declaration.arity == 1:
        return [Predicate(declaration.name, types[0], BOOL_TYPE)]
    if declaration.arity == 2:
        return [Predicate(declaration.name, types[0], types[1])]
    if declaration.arity == 3:
        return [Predicate(projection_name(declaration.name, i, j), types[i], types[j]) for i, j in _PROJECTIONS]
    raise SchemaError(f"Predicate {declaration.name} has arity {declaration.arity}; only arities 1-3 are supported")


def binarize_atom(raw: RawAtom, declaration: RawDeclaration) -> List[Atom]:
    """Binary atoms that replace one raw fact."""
    if len(raw.args) != declaration.arity:
        raise TypeMismatchError(
            f"line {raw.line}: {raw.name} takes {declaration.arity} arguments, got {len(raw.args)}"
        )
    constants = [Constant(symbol, type_name) for symbol, type_name in zip(raw.args, declaration.arg_types)]
    predicates = binarize_declaration(declaration)

    if declaration.arity == 1:
        return [Atom(predicates[0], constants[0], TRUE_CONSTANT)]
    if declaration.arity == 2:
        return [Atom(predicates[0], constants[0], constants[1])]
    return [Atom(predicate, constants[i], constants[j]) for predicate, (i, j) in zip(predicates, _PROJECTIONS)]


def binarize(raw_db: RawDatabase) -> FactStore:
    """
    Build a FactStore holding only binary predicates.

    Args:
        raw_db: Declarations and facts of arity 1, 2 or 3

    Returns:
        FactStore: Unfrozen store; callers add example constants then freeze it
    """
    store = FactStore()
    for name in sorted(raw_db.declarations):
        for predicate in binarize_declaration(raw_db.declarations[name]):
            store.declare(predicate)

    converted = 0
    for raw in raw_db.atoms:
        declaration = raw_db.declarations.get(raw.name)
        if declaration is None:
            raise SchemaError(f"line {raw.line}: undeclared predicate {raw.name}")
        for atom in binarize_atom(raw, declaration):
            store.add_fact(atom)
        if declaration.arity != 2:
            converted += 1

    if converted:
        logger.info(f"Binarized {converted} unary/ternary facts")
    logger.info(f"Evidence holds {len(store)} binary facts over {len(store.declarations)} predicates")
    return store
