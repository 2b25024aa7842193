import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from relnet.grounding.examples import Label, TargetExample  # noqa: E402
from relnet.logic.atoms import Atom, Constant, Predicate  # noqa: E402
from relnet.logic.fact_store import FactStore  # noqa: E402
from relnet.seeding import rng_for  # noqa: E402
from relnet.synthetic import SyntheticSpec, generate_synthetic  # noqa: E402
from relnet.walks.walk_generation import LiftedWalk  # noqa: E402

PERSON, MOVIE, GENRE = "Person", "Movie", "Genre"

ACTEDIN = Predicate("actedin", PERSON, MOVIE)
DIRECTED = Predicate("directed", PERSON, MOVIE)
INGENRE = Predicate("ingenre", MOVIE, GENRE)
SAMEPERSON = Predicate("sameperson", PERSON, PERSON)
SAMEGENRE = Predicate("samegenre", GENRE, GENRE)
WORKEDUNDER = Predicate("workedunder", PERSON, PERSON)

MOVIE_SCHEMA = [ACTEDIN, DIRECTED, INGENRE, SAMEPERSON, SAMEGENRE, WORKEDUNDER]


def person(symbol: str) -> Constant:
    return Constant(symbol, PERSON)


def movie(symbol: str) -> Constant:
    return Constant(symbol, MOVIE)


def worked_under(a: str, b: str, label: Label = Label.POSITIVE) -> TargetExample:
    return TargetExample(WORKEDUNDER, person(a), person(b), label)


@pytest.fixture
def movie_schema():
    return list(MOVIE_SCHEMA)


@pytest.fixture
def movie_store() -> FactStore:
    """Leo / Marty evidence: two R1 groundings, one R2 grounding for workedunder(leo,marty)."""
    leo, leonardo, marty = person("leo"), person("leonardo"), person("marty")
    departed, aviator = movie("The Departed"), movie("The Aviator")
    store = FactStore(MOVIE_SCHEMA)
    store.add_fact(Atom(ACTEDIN, leo, departed))
    store.add_fact(Atom(ACTEDIN, leo, aviator))
    store.add_fact(Atom(DIRECTED, marty, departed))
    store.add_fact(Atom(DIRECTED, marty, aviator))
    store.add_fact(Atom(SAMEPERSON, leo, leonardo))
    store.add_fact(Atom(ACTEDIN, leonardo, departed))
    return store.freeze()


@pytest.fixture
def movie_walks():
    r1 = LiftedWalk(1, (ACTEDIN, DIRECTED.invert()))
    r2 = LiftedWalk(2, (SAMEPERSON, ACTEDIN, DIRECTED.invert()))
    return [r1, r2]


MOVIE_FILES = {
    "types.txt": "% movie domain\nactedin(Person,Movie)\ndirected(Person,Movie)\nsameperson(Person,Person)\n"
                 "workedunder(Person,Person)\n",
    "facts.txt": 'actedin(leo,"The Departed").\nactedin(leo,"The Aviator").\n'
                 'directed(marty,"The Departed").\ndirected(marty,"The Aviator").\n'
                 'sameperson(leo,leonardo).\nactedin(leonardo,"The Departed").\n',
    "pos.txt": "workedunder(leo,marty).\n",
}


@pytest.fixture
def movie_files(tmp_path):
    for name, text in MOVIE_FILES.items():
        (tmp_path / name).write_text(text, encoding="utf-8")
    return tmp_path


def build_random_store(seed: int, num_persons: int = 8, num_movies: int = 6, num_genres: int = 3,
                       density: float = 0.3) -> FactStore:
    """Random movie-schema evidence with every base predicate populated at ``density``."""
    rng = rng_for(seed, "test-store")
    persons = [person(f"p{i}") for i in range(num_persons)]
    movies = [movie(f"m{i}") for i in range(num_movies)]
    genres = [Constant(f"g{i}", GENRE) for i in range(num_genres)]
    domains = {PERSON: persons, MOVIE: movies, GENRE: genres}
    store = FactStore(MOVIE_SCHEMA)
    for constant in persons + movies + genres:
        store.add_constant(constant)
    for predicate in (ACTEDIN, DIRECTED, INGENRE, SAMEPERSON, SAMEGENRE):
        for a in domains[predicate.arg1_type]:
            for b in domains[predicate.arg2_type]:
                if rng.random() < density:
                    store.add_fact(Atom(predicate, a, b))
    return store.freeze()


@pytest.fixture
def synthetic_files(tmp_path):
    """A small planted-rule dataset on disk: types.txt, facts.txt, pos.txt, truth_walks.txt."""
    spec = SyntheticSpec(num_persons=10, num_movies=10, num_genres=4, seed=1)
    return generate_synthetic(spec, tmp_path / "data")
