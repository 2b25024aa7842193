"""
The evidence database: a set of ground binary atoms with lookup indexes.

Constants are interned to integer ids; both traversal directions of every
declared predicate are indexed so walk joins never scan the fact list.
"""

import logging
from collections import defaultdict
from typing import AbstractSet, Dict, Iterable, Iterator, List, Optional, Set, Tuple

from relnet.errors import SchemaError, TypeMismatchError
from relnet.logic.atoms import Atom, Constant, Predicate, TypeName

logger = logging.getLogger(__name__)

_EMPTY: AbstractSet[int] = frozenset()


class FactStore:
    """
    Indexed set of Boolean facts over declared binary predicates.

    The store is built single-threaded and frozen afterwards; a frozen store
    only answers queries and is safe to share between threads.
    """

    def __init__(self, declarations: Optional[Iterable[Predicate]] = None):
        self._declarations: Dict[str, Predicate] = {}
        self._facts: Set[Atom] = set()
        self._const_ids: Dict[Constant, int] = {}
        self._constants: List[Constant] = []
        self._by_type: Dict[TypeName, Set[int]] = defaultdict(set)
        # (predicate name, is_inverse, arg id) -> ids reachable in one step
        self._index: Dict[Tuple[str, bool, int], Set[int]] = defaultdict(set)
        self._frozen = False

        for predicate in declarations or []:
            self.declare(predicate)

    # ------------------------------------------------------------------
    # construction
    # ------------------------------------------------------------------

    def declare(self, predicate: Predicate) -> Predicate:
        """
        Declare a binary predicate.

        Args:
            predicate: The relation; an inverse is stored in its base orientation

        Returns:
            Predicate: The declared (base) predicate
        """
        self._check_mutable()
        base = predicate.base
        existing = self._declarations.get(base.name)
        if existing is not None and existing != base:
            raise SchemaError(f"Predicate {base.name} already declared as {existing}, cannot redeclare as {base}")
        self._declarations[base.name] = base
        return base

    def add_fact(self, atom: Atom) -> "FactStore":
        """
        Add a ground atom to the evidence.

        Args:
            atom: The fact; inverse atoms are stored in the declared orientation

        Returns:
            FactStore: This store (adding is idempotent)
        """
        self._check_mutable()
        fact = atom.canonical()
        declared = self._declarations.get(fact.predicate.name)
        if declared is None:
            raise SchemaError(f"Undeclared predicate in atom {atom}")
        if declared != fact.predicate:
            raise TypeMismatchError(f"Atom {atom} does not match declaration {declared}")
        if fact in self._facts:
            return self

        left = self._intern(fact.arg1)
        right = self._intern(fact.arg2)
        self._facts.add(fact)
        self._index[(fact.predicate.name, False, left)].add(right)
        self._index[(fact.predicate.name, True, right)].add(left)
        return self

    def add_constant(self, constant: Constant) -> int:
        """Register an entity that may not occur in any fact (e.g. from examples)."""
        self._check_mutable()
        return self._intern(constant)

    def freeze(self) -> "FactStore":
        """Make the store read-only."""
        self._frozen = True
        logger.debug(f"FactStore frozen with {len(self._facts)} facts over {len(self._constants)} constants")
        return self

    # ------------------------------------------------------------------
    # queries
    # ------------------------------------------------------------------

    def contains(self, atom: Atom) -> bool:
        """True iff the atom (or its inverse reading) is in the evidence."""
        return atom.canonical() in self._facts

    def successors(self, predicate: Predicate, constant: Constant) -> Set[Constant]:
        """
        All z with ``predicate(constant, z)`` true in the evidence.

        Args:
            predicate: A declared predicate or its inverse
            constant: The first argument, typed as predicate.arg1_type

        Returns:
            Set[Constant]: Second arguments reachable in one step
        """
        return {self._constants[i] for i in self.successor_ids(predicate, constant)}

    def successor_ids(self, predicate: Predicate, constant: Constant) -> AbstractSet[int]:
        """Interned-id form of successors(); used by the grounder's joins."""
        self._check_declared(predicate)
        if constant.type != predicate.arg1_type:
            raise TypeMismatchError(
                f"Constant {constant.symbol}:{constant.type} cannot be first argument of {predicate}"
            )
        const_id = self._const_ids.get(constant)
        if const_id is None:
            return _EMPTY
        return self.successor_ids_by_id(predicate, const_id)

    def successor_ids_by_id(self, predicate: Predicate, const_id: int) -> AbstractSet[int]:
        """Read-only view of the index; callers must not mutate it."""
        return self._index.get((predicate.name, predicate.is_inverse, const_id), _EMPTY)

    def constant_id(self, constant: Constant) -> Optional[int]:
        return self._const_ids.get(constant)

    def constant(self, const_id: int) -> Constant:
        return self._constants[const_id]

    def constants_of_type(self, type_name: TypeName) -> List[Constant]:
        """All known constants of a type, sorted by symbol."""
        return sorted((self._constants[i] for i in self._by_type.get(type_name, ())), key=lambda c: c.symbol)

    def predicate(self, name: str) -> Predicate:
        """Declared predicate by name."""
        try:
            return self._declarations[name]
        except KeyError:
            raise SchemaError(f"Undeclared predicate: {name}") from None

    @property
    def declarations(self) -> List[Predicate]:
        return sorted(self._declarations.values())

    @property
    def types(self) -> Set[TypeName]:
        found: Set[TypeName] = set()
        for predicate in self._declarations.values():
            found.update((predicate.arg1_type, predicate.arg2_type))
        return found

    @property
    def frozen(self) -> bool:
        return self._frozen

    def facts(self) -> List[Atom]:
        """All facts in canonical order."""
        return sorted(self._facts, key=Atom.sort_key)

    def __contains__(self, atom: Atom) -> bool:
        return self.contains(atom)

    def __iter__(self) -> Iterator[Atom]:
        return iter(self.facts())

    def __len__(self) -> int:
        return len(self._facts)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FactStore):
            return NotImplemented
        return self._declarations == other._declarations and self._facts == other._facts

    def __repr__(self) -> str:
        return f"FactStore(predicates={len(self._declarations)}, facts={len(self._facts)})"

    # ------------------------------------------------------------------
    # helpers
    # ------------------------------------------------------------------

    def _intern(self, constant: Constant) -> int:
        const_id = self._const_ids.get(constant)
        if const_id is None:
            const_id = len(self._constants)
            self._const_ids[constant] = const_id
            self._constants.append(constant)
            self._by_type[constant.type].add(const_id)
        return const_id

    def _check_declared(self, predicate: Predicate) -> None:
        declared = self._declarations.get(predicate.name)
        if declared is None:
            raise SchemaError(f"Undeclared predicate: {predicate.name}")
        if declared != predicate.base:
            raise TypeMismatchError(f"{predicate} does not match declaration {declared}")

    def _check_mutable(self) -> None:
        if self._frozen:
            raise RuntimeError("FactStore is frozen; build a new store to add facts")
