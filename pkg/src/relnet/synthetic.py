"""
Planted-rule synthetic datasets in a small movie domain.

Schema:
    actedin(Person,Movie)  directed(Person,Movie)  ingenre(Movie,Genre)
    target workedunder(Person,Person)

Every actor plays in a few movies, every movie has one director and one
genre. A pair (a, b) becomes a positive when some planted rule has a
grounding for workedunder(a, b) and fires (with its probability).
"""

import logging
from pathlib import Path
from typing import Dict, List, Set, Tuple, Union

from pydantic import BaseModel, Field, field_validator

from relnet.grounding.examples import Label, TargetExample
from relnet.grounding.grounder import ground_exhaustive
from relnet.logic.atoms import Atom, Constant, Predicate
from relnet.logic.dataloading import write_declarations, write_examples, write_facts
from relnet.logic.fact_store import FactStore
from relnet.seeding import rng_for
from relnet.walks.walk_generation import LiftedWalk, validate_walk
from relnet.walks.walk_io import parse_walk_line, write_walks

logger = logging.getLogger(__name__)

PERSON, MOVIE, GENRE = "Person", "Movie", "Genre"
ACTEDIN = Predicate("actedin", PERSON, MOVIE)
DIRECTED = Predicate("directed", PERSON, MOVIE)
INGENRE = Predicate("ingenre", MOVIE, GENRE)
WORKEDUNDER = Predicate("workedunder", PERSON, PERSON)

DEFAULT_RULES = {
    "actedin ; directed^-1": 0.9,
    "actedin ; directed^-1 ; actedin ; directed^-1": 0.9,
}


class SyntheticSpec(BaseModel):
    """
    Shape of a synthetic dataset.

    ``control`` keeps the number of positives a signal run would produce
    but draws them as random pairs, which gives a no-signal baseline.
    """

    num_persons: int = Field(20, ge=2)
    num_movies: int = Field(20, ge=1)
    num_genres: int = Field(10, ge=1)
    movies_per_actor: int = Field(2, ge=1)
    rules: Dict[str, float] = Field(default_factory=lambda: dict(DEFAULT_RULES))
    noise: float = Field(0.05, ge=0.0, le=1.0)
    control: bool = False
    seed: int = Field(0, ge=0)

    @field_validator("rules")
    @classmethod
    def _check_probabilities(cls, rules: Dict[str, float]) -> Dict[str, float]:
        for body, probability in rules.items():
            if not 0.0 <= probability <= 1.0:
                raise ValueError(f"firing probability of '{body}' must lie in [0, 1], got {probability}")
        return rules

    @property
    def num_entities(self) -> int:
        return self.num_persons + self.num_movies + self.num_genres


def planted_walks(spec: SyntheticSpec) -> List[LiftedWalk]:
    declarations = {p.name: p for p in (ACTEDIN, DIRECTED, INGENRE)}
    walks = []
    for rule_id, body in enumerate(spec.rules, start=1):
        walk = parse_walk_line(f"{rule_id}: {body}", declarations, source="<planted rules>", line=rule_id)
        if not validate_walk(walk, WORKEDUNDER):
            raise ValueError(f"Planted rule '{body}' is not a sound rule for {WORKEDUNDER}")
        walks.append(walk)
    return walks


def build_evidence(spec: SyntheticSpec) -> FactStore:
    """Random movie-domain evidence (unfrozen)."""
    rng = rng_for(spec.seed, "synthetic", "evidence")
    persons = [Constant(f"person{i:02d}", PERSON) for i in range(spec.num_persons)]
    movies = [Constant(f"movie{i:02d}", MOVIE) for i in range(spec.num_movies)]
    genres = [Constant(f"genre{i:02d}", GENRE) for i in range(spec.num_genres)]

    store = FactStore([ACTEDIN, DIRECTED, INGENRE, WORKEDUNDER])
    for constant in persons + movies + genres:
        store.add_constant(constant)
    for movie in movies:
        store.add_fact(Atom(INGENRE, movie, genres[int(rng.integers(len(genres)))]))
        store.add_fact(Atom(DIRECTED, persons[int(rng.integers(len(persons)))], movie))
    per_actor = min(spec.movies_per_actor, len(movies))
    for person in persons:
        for index in rng.choice(len(movies), size=per_actor, replace=False):
            store.add_fact(Atom(ACTEDIN, person, movies[int(index)]))
    return store


def _random_pairs(persons: List[Constant], count: int, taken: Set[Tuple[Constant, Constant]], rng) -> List[Tuple[Constant, Constant]]:
    candidates = [(a, b) for a in persons for b in persons if a != b and (a, b) not in taken]
    count = min(count, len(candidates))
    return [candidates[int(i)] for i in sorted(rng.choice(len(candidates), size=count, replace=False))]


def generate_positives(spec: SyntheticSpec, store: FactStore, walks: List[LiftedWalk]) -> List[TargetExample]:
    """Pairs where a planted rule fires, with noise and control applied."""
    rng = rng_for(spec.seed, "synthetic", "positives")
    persons = store.constants_of_type(PERSON)
    probabilities = list(spec.rules.values())

    fired: List[Tuple[Constant, Constant]] = []
    for a in persons:
        for b in persons:
            if a == b:
                continue
            example = TargetExample(WORKEDUNDER, a, b)
            draws = rng.random(len(walks))
            if any(
                draws[j] < probabilities[j] and ground_exhaustive(walk, example, store).count > 0
                for j, walk in enumerate(walks)
            ):
                fired.append((a, b))

    noise_rng = rng_for(spec.seed, "synthetic", "noise")
    if spec.control:
        pairs = _random_pairs(persons, len(fired), set(), noise_rng)
    else:
        replaced = int(round(spec.noise * len(fired)))
        dropped = set(int(i) for i in noise_rng.choice(len(fired), size=replaced, replace=False)) if replaced else set()
        kept = [pair for i, pair in enumerate(fired) if i not in dropped]
        pairs = kept + _random_pairs(persons, replaced, set(fired), noise_rng)

    positives = [TargetExample(WORKEDUNDER, a, b, Label.POSITIVE) for a, b in pairs]
    return sorted(positives, key=TargetExample.sort_key)


def generate_synthetic(spec: SyntheticSpec, out_dir: Union[str, Path]) -> Dict[str, Path]:
    """
    Write a synthetic dataset.

    Args:
        spec: Dataset shape, planted rules and seed
        out_dir: Directory for types.txt, facts.txt, pos.txt, truth_walks.txt

    Returns:
        Dict[str, Path]: Written files keyed by role
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    walks = planted_walks(spec)
    store = build_evidence(spec)
    store.freeze()
    positives = generate_positives(spec, store, walks)

    paths = {
        "types": out_dir / "types.txt",
        "facts": out_dir / "facts.txt",
        "positives": out_dir / "pos.txt",
        "truth": out_dir / "truth_walks.txt",
    }
    write_declarations([ACTEDIN, DIRECTED, INGENRE, WORKEDUNDER], paths["types"])
    write_facts(store, paths["facts"])
    write_examples(positives, paths["positives"])
    write_walks(walks, paths["truth"])

    logger.info(
        f"Synthetic dataset: {spec.num_entities} entities, {len(store)} facts, "
        f"{len(positives)} positives{' (control)' if spec.control else ''} in {out_dir}"
    )
    return paths
