"""
Grounding of lifted walks for one target example.

A grounding of walk R_j for example T(a, b) is a constant chain
c_0 = a, c_1, ..., c_l = b with every body atom Q_k(c_{k-1}, c_k) true in
the evidence. Two strategies:

    exhaustive  forward join over the successor index, pruned to constants
                that can still reach b (also the test oracle)
    sampled     random forward walks drawing distinct complete groundings
                without replacement, at most S of them
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import AbstractSet, Dict, Iterator, List, Optional, Set, Tuple

from relnet.grounding.examples import TargetExample
from relnet.logic.atoms import Atom, Constant
from relnet.logic.fact_store import FactStore
from relnet.seeding import rng_for
from relnet.walks.walk_generation import LiftedWalk

logger = logging.getLogger(__name__)

TRIALS_PER_SAMPLE = 50

IdPath = Tuple[int, ...]


@dataclass(frozen=True)
class Grounding:
    """One substitution theta_i: the constants bound to V_0 .. V_l."""

    walk_id: int
    bindings: Tuple[Constant, ...]

    def atoms(self, walk: LiftedWalk) -> List[Atom]:
        """Body atoms R_j theta_i, each in the predicate's declared orientation."""
        return [
            Atom(predicate, self.bindings[k], self.bindings[k + 1]).canonical()
            for k, predicate in enumerate(walk.chain)
        ]

    def sort_key(self) -> Tuple[str, ...]:
        return tuple(c.symbol for c in self.bindings)


@dataclass
class GroundingSet:
    """All (or a sample of the) groundings of one walk for one example."""

    walk: LiftedWalk
    groundings: List[Grounding] = field(default_factory=list)
    truncated: bool = False

    @property
    def walk_id(self) -> int:
        return self.walk.rule_id

    @property
    def count(self) -> int:
        """N_j."""
        return len(self.groundings)

    def __len__(self) -> int:
        return len(self.groundings)

    def __iter__(self) -> Iterator[Grounding]:
        return iter(self.groundings)


def _reachable_sets(walk: LiftedWalk, store: FactStore, b_id: int) -> List[AbstractSet[int]]:
    """
    reach[k]: ids that can sit at position k and still reach b at position l.

    Computed backwards through the inverse index; reach[l] = {b}.
    """
    length = walk.length
    reach: List[AbstractSet[int]] = [set() for _ in range(length + 1)]
    reach[length] = {b_id}
    for k in range(length - 1, -1, -1):
        backwards = walk.chain[k].invert()
        found: Set[int] = set()
        for y in reach[k + 1]:
            found.update(store.successor_ids_by_id(backwards, y))
        reach[k] = found
        if not found:
            break
    return reach


def _to_groundings(walk: LiftedWalk, store: FactStore, paths: List[IdPath]) -> List[Grounding]:
    groundings = [Grounding(walk.rule_id, tuple(store.constant(i) for i in path)) for path in paths]
    groundings.sort(key=Grounding.sort_key)
    return groundings


def _endpoint_ids(ex: TargetExample, store: FactStore) -> Tuple[Optional[int], Optional[int]]:
    return store.constant_id(ex.arg1), store.constant_id(ex.arg2)


def ground_exhaustive(walk: LiftedWalk, ex: TargetExample, store: FactStore) -> GroundingSet:
    """
    Every grounding of a walk for an example.

    Args:
        walk: Rule template, valid for ex.target
        ex: Target example T(a, b)
        store: Evidence

    Returns:
        GroundingSet: All true instantiations, sorted by binding symbols;
        never truncated
    """
    a_id, b_id = _endpoint_ids(ex, store)
    if a_id is None or b_id is None:
        return GroundingSet(walk)

    reach = _reachable_sets(walk, store, b_id)
    if a_id not in reach[0]:
        return GroundingSet(walk)

    paths: List[IdPath] = [(a_id,)]
    for k, predicate in enumerate(walk.chain):
        allowed = reach[k + 1]
        extended: List[IdPath] = []
        for path in paths:
            for z in store.successor_ids_by_id(predicate, path[-1]):
                if z in allowed:
                    extended.append(path + (z,))
        paths = extended

    return GroundingSet(walk, _to_groundings(walk, store, paths))


class _SamplingTree:
    """Search tree over grounding prefixes with exhausted-branch bookkeeping."""

    def __init__(self, walk: LiftedWalk, store: FactStore, reach: List[AbstractSet[int]]):
        self.walk = walk
        self.store = store
        self.reach = reach
        self._children: Dict[IdPath, List[int]] = {}
        self._exhausted: Dict[IdPath, Set[int]] = defaultdict(set)
        self.root_done = False

    def children(self, prefix: IdPath) -> List[int]:
        kids = self._children.get(prefix)
        if kids is None:
            k = len(prefix) - 1
            successors = self.store.successor_ids_by_id(self.walk.chain[k], prefix[-1])
            allowed = self.reach[k + 1]
            kids = sorted((z for z in successors if z in allowed), key=lambda z: self.store.constant(z).symbol)
            self._children[prefix] = kids
        return kids

    def available(self, prefix: IdPath) -> List[int]:
        used = self._exhausted.get(prefix)
        kids = self.children(prefix)
        return [z for z in kids if z not in used] if used else kids

    def exhaust(self, prefix: IdPath) -> None:
        """Mark a finished prefix and close every ancestor with no open child left."""
        while len(prefix) > 1:
            parent = prefix[:-1]
            self._exhausted[parent].add(prefix[-1])
            if len(self._exhausted[parent]) < len(self.children(parent)):
                return
            prefix = parent
        self.root_done = True


def ground_sampled(
    walk: LiftedWalk,
    ex: TargetExample,
    store: FactStore,
    budget: int,
    seed: int = 0
) -> GroundingSet:
    """
    Sample at most ``budget`` distinct groundings.

    Each trial walks forward from a, choosing uniformly among successors
    that can still reach b and whose subtree is not used up; a trial that
    reaches b at the last step yields a new grounding. Sampling stops after
    ``budget`` groundings, after 50 * budget trials, or when the search tree
    is exhausted.

    Args:
        walk: Rule template, valid for ex.target
        ex: Target example T(a, b)
        store: Evidence
        budget: S, the maximum number of groundings
        seed: Master seed; the stream also depends on walk id and example

    Returns:
        GroundingSet: A subset of ground_exhaustive's result; truncated is
        True unless the whole search tree was explored
    """
    if budget < 1:
        raise ValueError(f"Sampling budget must be >= 1, got {budget}")

    a_id, b_id = _endpoint_ids(ex, store)
    if a_id is None or b_id is None:
        return GroundingSet(walk)
    reach = _reachable_sets(walk, store, b_id)
    if a_id not in reach[0]:
        return GroundingSet(walk)

    rng = rng_for(seed, "ground", walk.rule_id, ex.arg1.symbol, ex.arg2.symbol)
    tree = _SamplingTree(walk, store, reach)
    accepted: List[IdPath] = []
    trials = 0

    while len(accepted) < budget and trials < TRIALS_PER_SAMPLE * budget and not tree.root_done:
        trials += 1
        prefix: IdPath = (a_id,)
        while len(prefix) <= walk.length:
            options = tree.available(prefix)
            if not options:
                tree.exhaust(prefix)
                break
            prefix = prefix + (options[int(rng.integers(len(options)))],)
        else:
            accepted.append(prefix)
            tree.exhaust(prefix)

    return GroundingSet(walk, _to_groundings(walk, store, accepted), truncated=not tree.root_done)


class GroundingCache:
    """
    Memo of grounding sets keyed by (walk id, a, b).

    Scoring re-visits examples during evaluation; the cache is cleared at
    epoch and fold boundaries.
    """

    def __init__(self):
        self._entries: Dict[Tuple[int, Constant, Constant], GroundingSet] = {}
        self.hits = 0
        self.misses = 0

    def get(self, walk: LiftedWalk, ex: TargetExample) -> Optional[GroundingSet]:
        found = self._entries.get((walk.rule_id, ex.arg1, ex.arg2))
        if found is None:
            self.misses += 1
        else:
            self.hits += 1
        return found

    def put(self, walk: LiftedWalk, ex: TargetExample, groundings: GroundingSet) -> None:
        self._entries[(walk.rule_id, ex.arg1, ex.arg2)] = groundings

    def clear(self) -> None:
        self._entries.clear()

    def __len__(self) -> int:
        return len(self._entries)


class Grounder:
    """
    Grounds walks for examples with one configured strategy.

    Args:
        store: Frozen evidence
        samples_per_walk: S; 0 selects exhaustive grounding
        seed: Master seed for sampled grounding
        cache: Optional memo shared across calls
    """

    def __init__(self, store: FactStore, samples_per_walk: int = 0, seed: int = 0, cache: Optional[GroundingCache] = None):
        if samples_per_walk < 0:
            raise ValueError(f"samples_per_walk must be >= 0, got {samples_per_walk}")
        self.store = store
        self.samples_per_walk = samples_per_walk
        self.seed = seed
        self.cache = cache

    @property
    def mode(self) -> str:
        return "exhaustive" if self.samples_per_walk == 0 else f"sampled({self.samples_per_walk})"

    def ground(self, walk: LiftedWalk, ex: TargetExample) -> GroundingSet:
        if self.cache is not None:
            cached = self.cache.get(walk, ex)
            if cached is not None:
                return cached

        if self.samples_per_walk == 0:
            result = ground_exhaustive(walk, ex, self.store)
        else:
            result = ground_sampled(walk, ex, self.store, self.samples_per_walk, self.seed)

        if result.truncated:
            logger.debug(f"Grounding of walk {walk.rule_id} for {ex.example_id} truncated at {result.count}")
        if self.cache is not None:
            self.cache.put(walk, ex, result)
        return result


def format_grounding_dump(ex: TargetExample, grounding_sets: List[GroundingSet]) -> str:
    """Debug dump: one ``j | a,b | c_0;c_1;...;c_l`` line per grounding."""
    lines = []
    for grounding_set in sorted(grounding_sets, key=lambda gs: gs.walk_id):
        for grounding in grounding_set:
            chain = ";".join(c.symbol for c in grounding.bindings)
            lines.append(f"{grounding.walk_id} | {ex.arg1.symbol},{ex.arg2.symbol} | {chain}")
    return "".join(f"{line}\n" for line in lines)
