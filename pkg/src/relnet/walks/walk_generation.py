"""
Lifted relational random walks: rule templates over the schema graph.

A walk for target T(A, B) is a chain of predicates Q_1 ... Q_l whose
types chain from A's type to B's type:

    T(V_0, V_l) <= Q_1(V_0, V_1) ^ Q_2(V_1, V_2) ^ ... ^ Q_l(V_{l-1}, V_l)
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Set, Tuple

from relnet.logic.atoms import Predicate, TypeName
from relnet.seeding import rng_for
from relnet.walks.schema_graph import SchemaGraph

logger = logging.getLogger(__name__)

DEFAULT_MAX_LEN = 6
EMIT_PROBABILITY = 0.5


@dataclass(frozen=True)
class LiftedWalk:
    """
    Rule template R_j.

    Args:
        rule_id: 1-based rule index j
        chain: Predicates of the body, inverses included
    """

    rule_id: int
    chain: Tuple[Predicate, ...]

    @property
    def length(self) -> int:
        return len(self.chain)

    @property
    def variable_types(self) -> List[TypeName]:
        """Types of V_0 .. V_l implied by the chain."""
        if not self.chain:
            return []
        return [self.chain[0].arg1_type] + [p.arg2_type for p in self.chain]

    @property
    def body(self) -> str:
        return " ; ".join(p.label for p in self.chain)

    def __str__(self) -> str:
        return f"{self.rule_id}: {self.body}"


def validate_walk(walk: LiftedWalk, target: Predicate) -> bool:
    """
    Check every LiftedWalk invariant for a target.

    Args:
        walk: Candidate rule template
        target: Target predicate (head)

    Returns:
        bool: True iff the chain is non-empty, type-sound, starts at the
        target's first type, ends at its second type, never uses the target
        relation and never steps straight back along an inverse
    """
    chain = walk.chain
    if not chain:
        return False
    if chain[0].arg1_type != target.arg1_type or chain[-1].arg2_type != target.arg2_type:
        return False
    for i, step in enumerate(chain):
        if step.name == target.name:
            return False
        if i + 1 < len(chain):
            following = chain[i + 1]
            if step.arg2_type != following.arg1_type:
                return False
            if following == step.invert():
                return False
    return True


class WalkGenerator:
    """
    Samples distinct, semantically sound walks from a schema graph.

    At each step one type-compatible outgoing edge is chosen uniformly,
    excluding the target relation and the inverse of the previous step.
    When the walk stands on the target's second type it stops with
    probability 0.5 (always at max_len), otherwise it keeps going.
    """

    def __init__(self, graph: SchemaGraph, target: Predicate, max_len: int = DEFAULT_MAX_LEN, seed: int = 0):
        if max_len < 1:
            raise ValueError(f"max_len must be >= 1, got {max_len}")
        self.graph = graph
        self.target = target
        self.max_len = max_len
        self.seed = seed

    def _options(self, current: TypeName, previous: Optional[Predicate]) -> List[Predicate]:
        backtrack = previous.invert() if previous is not None else None
        return [
            edge for edge in self.graph.outgoing(current)
            if edge.name != self.target.name and edge != backtrack
        ]

    def sample_chain(self, rng) -> Optional[Tuple[Predicate, ...]]:
        """One random walk attempt; None when it dead-ends or runs out of length."""
        current = self.target.arg1_type
        chain: List[Predicate] = []
        for step in range(self.max_len):
            options = self._options(current, chain[-1] if chain else None)
            if not options:
                return None
            edge = options[int(rng.integers(len(options)))]
            chain.append(edge)
            current = edge.arg2_type
            if current == self.target.arg2_type:
                if step == self.max_len - 1 or rng.random() < EMIT_PROBABILITY:
                    return tuple(chain)
        return None

    def generate(self, num_walks: int, max_attempts: Optional[int] = None) -> List[LiftedWalk]:
        """
        Generate up to num_walks distinct walks.

        Args:
            num_walks: M, the number of rule templates wanted
            max_attempts: Sampling attempts before giving up (default 1000 * M)

        Returns:
            List[LiftedWalk]: Walks numbered 1..len in generation order
        """
        if num_walks < 1:
            raise ValueError(f"num_walks must be >= 1, got {num_walks}")
        max_attempts = max_attempts if max_attempts is not None else 1000 * num_walks

        distance = self.graph.distance(self.target.arg1_type, self.target.arg2_type, excluded=self.target.name)
        if distance is None or distance > self.max_len:
            logger.warning(
                f"No walk can connect {self.target.arg1_type} to {self.target.arg2_type} "
                f"within {self.max_len} steps without using {self.target.name}"
            )
            return []

        rng = rng_for(self.seed, "walks")
        walks: List[LiftedWalk] = []
        seen: Set[Tuple[Predicate, ...]] = set()
        attempts = 0
        while len(walks) < num_walks and attempts < max_attempts:
            attempts += 1
            chain = self.sample_chain(rng)
            if chain is None or chain in seen:
                continue
            seen.add(chain)
            walks.append(LiftedWalk(len(walks) + 1, chain))

        if len(walks) < num_walks:
            logger.warning(
                f"Generated only {len(walks)} of {num_walks} walks for {self.target.name} "
                f"after {attempts} attempts"
            )
        else:
            logger.info(f"Generated {len(walks)} walks for {self.target.name} in {attempts} attempts")
        return walks


def generate_walks(
    graph: SchemaGraph,
    target: Predicate,
    num_walks: int,
    max_len: int = DEFAULT_MAX_LEN,
    max_attempts: Optional[int] = None,
    seed: int = 0
) -> List[LiftedWalk]:
    """Generate M lifted walks for a target; see WalkGenerator."""
    return WalkGenerator(graph, target, max_len=max_len, seed=seed).generate(num_walks, max_attempts)
