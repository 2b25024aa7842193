import pytest

from conftest import ACTEDIN, DIRECTED, INGENRE, MOVIE_SCHEMA, SAMEGENRE, SAMEPERSON, WORKEDUNDER
from relnet.errors import ParseError, SchemaError
from relnet.logic.atoms import Predicate
from relnet.walks.schema_graph import build_schema_graph
from relnet.walks.walk_generation import LiftedWalk, generate_walks, validate_walk
from relnet.walks.walk_io import format_walks, parse_walk_line, read_walks, write_walks

DECLARATIONS = {p.name: p for p in MOVIE_SCHEMA}


@pytest.fixture
def movie_graph():
    return build_schema_graph(MOVIE_SCHEMA)


class TestSchemaGraph:
    def test_two_edges_per_declaration(self, movie_graph):
        assert len(movie_graph.edges) == 2 * len(MOVIE_SCHEMA)
        assert movie_graph.nodes == {"Person", "Movie", "Genre"}

    def test_outgoing_includes_inverses(self, movie_graph):
        assert DIRECTED.invert() in movie_graph.outgoing("Movie")
        assert INGENRE.invert() in movie_graph.outgoing("Genre")
        assert movie_graph.declares(ACTEDIN.invert())

    def test_distance_excluding_target(self, movie_graph):
        assert movie_graph.distance("Person", "Person", excluded="workedunder") == 1
        graph = build_schema_graph([ACTEDIN, DIRECTED, WORKEDUNDER])
        assert graph.distance("Person", "Person", excluded="workedunder") == 2


class TestWalkGeneration:
    def test_generated_walks_are_sound_for_many_seeds(self, movie_graph):
        for seed in range(1000):
            walks = generate_walks(movie_graph, WORKEDUNDER, 5, max_len=4, seed=seed)
            assert walks
            for walk in walks:
                assert validate_walk(walk, WORKEDUNDER)
                assert 1 <= walk.length <= 4
                assert all(step.name != "workedunder" for step in walk.chain)
                for first, second in zip(walk.chain, walk.chain[1:]):
                    assert second != first.invert()

    def test_walks_are_distinct_and_numbered(self, movie_graph):
        walks = generate_walks(movie_graph, WORKEDUNDER, 20, seed=3)
        assert len({w.chain for w in walks}) == len(walks)
        assert [w.rule_id for w in walks] == list(range(1, len(walks) + 1))

    def test_same_seed_same_walks(self, movie_graph):
        assert generate_walks(movie_graph, WORKEDUNDER, 10, seed=7) == generate_walks(movie_graph, WORKEDUNDER, 10, seed=7)

    def test_fewer_walks_when_space_is_small(self):
        graph = build_schema_graph([ACTEDIN, DIRECTED, WORKEDUNDER])
        walks = generate_walks(graph, WORKEDUNDER, 50, max_len=2, seed=0)
        bodies = sorted(w.body for w in walks)
        assert bodies == ["actedin ; directed^-1", "directed ; actedin^-1"]

    def test_unreachable_target_gives_no_walks(self):
        course = Predicate("teaches", "Person", "Course")
        target = Predicate("takes", "Student", "Course")
        graph = build_schema_graph([course, target])
        assert generate_walks(graph, target, 5, seed=0) == []

    def test_too_short_max_len_gives_no_walks(self):
        target = Predicate("likesgenre", "Person", "Genre")
        graph = build_schema_graph([ACTEDIN, INGENRE, target])
        assert generate_walks(graph, target, 3, max_len=1, seed=0) == []
        assert generate_walks(graph, target, 1, max_len=2, seed=0)[0].body == "actedin ; ingenre"

    def test_invalid_arguments(self, movie_graph):
        with pytest.raises(ValueError):
            generate_walks(movie_graph, WORKEDUNDER, 0)
        with pytest.raises(ValueError):
            generate_walks(movie_graph, WORKEDUNDER, 3, max_len=0)


class TestValidateWalk:
    def test_typed_chain(self):
        walk = LiftedWalk(1, (ACTEDIN, INGENRE, SAMEGENRE, INGENRE.invert(), DIRECTED.invert()))
        assert validate_walk(walk, WORKEDUNDER)
        assert walk.variable_types == ["Person", "Movie", "Genre", "Genre", "Movie", "Person"]

    def test_step_back_through_genre_is_rejected(self):
        walk = LiftedWalk(1, (ACTEDIN, INGENRE, INGENRE.invert(), DIRECTED.invert()))
        assert not validate_walk(walk, WORKEDUNDER)

    def test_long_chain_through_genre_and_sameperson(self):
        chain = (ACTEDIN, INGENRE, SAMEGENRE, INGENRE.invert(), ACTEDIN.invert(), SAMEPERSON, ACTEDIN,
                 DIRECTED.invert())
        assert validate_walk(LiftedWalk(1, chain), WORKEDUNDER)

    @pytest.mark.parametrize("actedin", [ACTEDIN, Predicate("actedin", "Person", "Genre")])
    def test_mixed_signature_chain_is_rejected(self, actedin):
        # actedin is read as Person->Genre at step 1 but Movie->Person at step 5
        chain = (actedin, SAMEGENRE, actedin.invert(), SAMEPERSON, actedin.invert(), DIRECTED)
        assert not validate_walk(LiftedWalk(1, chain), WORKEDUNDER)

    @pytest.mark.parametrize("chain", [
        (),
        (ACTEDIN,),
        (ACTEDIN, ACTEDIN.invert()),
        (ACTEDIN, INGENRE, DIRECTED.invert()),
        (WORKEDUNDER,),
        (SAMEPERSON, WORKEDUNDER),
    ])
    def test_rejected_chains(self, chain):
        assert not validate_walk(LiftedWalk(1, chain), WORKEDUNDER)


class TestWalkFiles:
    def test_parse_line(self):
        walk = parse_walk_line("2: sameperson ; actedin ; directed^-1", DECLARATIONS)
        assert walk == LiftedWalk(2, (SAMEPERSON, ACTEDIN, DIRECTED.invert()))

    def test_write_then_read(self, tmp_path, movie_graph):
        walks = generate_walks(movie_graph, WORKEDUNDER, 8, seed=1)
        path = tmp_path / "walks.txt"
        write_walks(walks, path)
        assert read_walks(path, MOVIE_SCHEMA, target=WORKEDUNDER) == walks
        assert path.read_text(encoding="utf-8") == format_walks(walks)

    def test_renumbered_in_file_order(self, tmp_path):
        path = tmp_path / "walks.txt"
        path.write_text("% user rules\n7: actedin ; directed^-1\n\n3: sameperson\n", encoding="utf-8")
        walks = read_walks(path, MOVIE_SCHEMA)
        assert [(w.rule_id, w.body) for w in walks] == [(1, "actedin ; directed^-1"), (2, "sameperson")]

    def test_missing_rule_id(self):
        with pytest.raises(ParseError) as err:
            parse_walk_line("actedin ; directed^-1", DECLARATIONS, line=4)
        assert err.value.line == 4

    def test_empty_step(self):
        with pytest.raises(ParseError):
            parse_walk_line("1: actedin ; ; directed^-1", DECLARATIONS)

    def test_undeclared_predicate(self):
        with pytest.raises(SchemaError):
            parse_walk_line("1: produced ; directed^-1", DECLARATIONS)

    def test_unsound_walk_for_target(self, tmp_path):
        path = tmp_path / "walks.txt"
        path.write_text("1: actedin ; ingenre\n", encoding="utf-8")
        with pytest.raises(SchemaError):
            read_walks(path, MOVIE_SCHEMA, target=WORKEDUNDER)
