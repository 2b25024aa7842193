"""
Closed-world negative sampling for the target predicate.
"""

import logging
from typing import Iterable, List, Optional, Sequence, Set, Tuple

from relnet.grounding.examples import Label, TargetExample
from relnet.logic.atoms import Atom, Constant, Predicate
from relnet.logic.fact_store import FactStore
from relnet.seeding import rng_for

logger = logging.getLogger(__name__)


def candidate_pool(
    store: FactStore,
    target: Predicate,
    positives: Sequence[TargetExample],
    exclude: Iterable[TargetExample] = ()
) -> List[Tuple[Constant, Constant]]:
    """
    Every admissible negative pair, in canonical order.

    First arguments come from the positives, second arguments from all
    constants of the target's second type. Pairs that are positives,
    excluded examples, evidence facts or reflexive are dropped.
    """
    heads = sorted({ex.arg1 for ex in positives})
    tails = store.constants_of_type(target.arg2_type)
    taken: Set[Tuple[Constant, Constant]] = {(ex.arg1, ex.arg2) for ex in positives}
    taken.update((ex.arg1, ex.arg2) for ex in exclude)

    pool = []
    for a in heads:
        for b in tails:
            if a == b or (a, b) in taken:
                continue
            if store.contains(Atom(target, a, b)):
                continue
            pool.append((a, b))
    return pool


def generate_negatives(
    store: FactStore,
    target: Predicate,
    positives: Sequence[TargetExample],
    ratio: int = 2,
    seed: int = 0,
    exclude: Optional[Iterable[TargetExample]] = None
) -> List[TargetExample]:
    """
    Sample ratio * |positives| negatives without replacement.

    Args:
        store: Frozen evidence (its constants define the candidates)
        target: Target predicate
        positives: Positive examples
        ratio: Negatives per positive
        seed: Master seed (stream "negatives")
        exclude: Further examples that must not be drawn

    Returns:
        List[TargetExample]: Negatives in canonical order; the whole pool
        (with a warning) when it is smaller than requested
    """
    if ratio < 1:
        raise ValueError(f"Negative ratio must be >= 1, got {ratio}")

    pool = candidate_pool(store, target, positives, exclude or ())
    wanted = ratio * len(positives)

    if len(pool) <= wanted:
        if len(pool) < wanted:
            logger.warning(f"Only {len(pool)} candidate negatives for {target.name}, {wanted} requested")
        chosen = pool
    else:
        picks = rng_for(seed, "negatives").choice(len(pool), size=wanted, replace=False)
        chosen = [pool[int(i)] for i in sorted(picks)]

    negatives = [TargetExample(target, a, b, Label.NEGATIVE) for a, b in chosen]
    logger.info(f"Generated {len(negatives)} negatives for {len(positives)} positives (ratio {ratio})")
    return negatives
