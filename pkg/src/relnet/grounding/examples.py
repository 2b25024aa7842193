"""
Labelled ground atoms of the target predicate.
"""

from dataclasses import dataclass
from enum import IntEnum
from typing import Tuple

from relnet.errors import TypeMismatchError
from relnet.logic.atoms import Atom, Constant, Predicate


class Label(IntEnum):
    """Class index of an example in the softmax output (one-hot position)."""

    NEGATIVE = 0
    POSITIVE = 1


@dataclass(frozen=True)
class TargetExample:
    """
    One labelled instance ``target(arg1, arg2)``.

    Args:
        target: The (binary) target predicate
        arg1: First argument, the walk start
        arg2: Second argument, the walk end
        label: POSITIVE or NEGATIVE
    """

    target: Predicate
    arg1: Constant
    arg2: Constant
    label: Label = Label.POSITIVE

    def __post_init__(self):
        if self.arg1.type != self.target.arg1_type or self.arg2.type != self.target.arg2_type:
            raise TypeMismatchError(
                f"Example {self.target.name}({self.arg1.symbol},{self.arg2.symbol}) does not match {self.target}"
            )

    @property
    def example_id(self) -> str:
        return f"{self.target.name}({self.arg1.symbol},{self.arg2.symbol})"

    @property
    def is_positive(self) -> bool:
        return self.label == Label.POSITIVE

    def as_atom(self) -> Atom:
        return Atom(self.target, self.arg1, self.arg2)

    def sort_key(self) -> Tuple[int, str, str]:
        """Canonical order: label first, then argument symbols."""
        return (-int(self.label), self.arg1.symbol, self.arg2.symbol)

    def __str__(self) -> str:
        return f"{self.example_id}[{self.label.name.lower()}]"
