"""
Typed relational vocabulary: entity types, predicates, constants and atoms.

Only binary predicates exist after ingestion. A predicate and its inverse
are distinct objects with swapped argument types.
"""

from dataclasses import dataclass, field
from typing import Tuple

from relnet.errors import TypeMismatchError

TypeName = str

INVERSE_SUFFIX = "^-1"


@dataclass(frozen=True, order=True)
class Predicate:
    """
    A binary relation between two entity types.

    Args:
        name: Relation name as it appears in the data files
        arg1_type: Entity type of the first argument
        arg2_type: Entity type of the second argument
        is_inverse: True for the backwards traversal of a declared relation
    """

    name: str
    arg1_type: TypeName
    arg2_type: TypeName
    is_inverse: bool = False

    def __post_init__(self):
        if not self.name:
            raise ValueError("Predicate name must be non-empty")
        if not self.arg1_type or not self.arg2_type:
            raise ValueError(f"Predicate {self.name} has an empty argument type")

    def invert(self) -> "Predicate":
        """Return the same relation traversed in the other direction."""
        return Predicate(self.name, self.arg2_type, self.arg1_type, not self.is_inverse)

    @property
    def base(self) -> "Predicate":
        """The declared (non-inverted) orientation of this relation."""
        return self.invert() if self.is_inverse else self

    @property
    def label(self) -> str:
        """Name used in walk files, e.g. ``actedin^-1``."""
        return f"{self.name}{INVERSE_SUFFIX}" if self.is_inverse else self.name

    def __str__(self) -> str:
        return f"{self.label}({self.arg1_type},{self.arg2_type})"


@dataclass(frozen=True, order=True)
class Constant:
    """An entity; the symbol is unique within its type."""

    symbol: str
    type: TypeName

    def __str__(self) -> str:
        return self.symbol


@dataclass(frozen=True)
class Atom:
    """
    A ground atom ``predicate(arg1, arg2)``.

    Argument types are checked against the predicate on construction.
    """

    predicate: Predicate
    arg1: Constant
    arg2: Constant
    _key: Tuple[str, str, str] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.arg1.type != self.predicate.arg1_type or self.arg2.type != self.predicate.arg2_type:
            raise TypeMismatchError(
                f"Atom {self.predicate.label}({self.arg1.symbol},{self.arg2.symbol}) has argument types "
                f"({self.arg1.type},{self.arg2.type}) but {self.predicate} expects "
                f"({self.predicate.arg1_type},{self.predicate.arg2_type})"
            )
        object.__setattr__(self, "_key", (self.predicate.label, self.arg1.symbol, self.arg2.symbol))

    def canonical(self) -> "Atom":
        """The same fact stated with the declared orientation of the predicate."""
        if self.predicate.is_inverse:
            return Atom(self.predicate.invert(), self.arg2, self.arg1)
        return self

    def sort_key(self) -> Tuple[str, str, str]:
        return self._key

    def __str__(self) -> str:
        return f"{self.predicate.label}({self.arg1.symbol},{self.arg2.symbol})"
