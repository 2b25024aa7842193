from relnet.logic.atoms import Atom, Constant, Predicate, TypeName
from relnet.logic.binarize import BOOL_TYPE, TRUE_CONSTANT, RawAtom, RawDatabase, RawDeclaration, binarize
from relnet.logic.fact_store import FactStore

__all__ = [
    "Atom",
    "BOOL_TYPE",
    "Constant",
    "FactStore",
    "Predicate",
    "RawAtom",
    "RawDatabase",
    "RawDeclaration",
    "TRUE_CONSTANT",
    "TypeName",
    "binarize",
]
