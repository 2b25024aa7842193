import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ACTEDIN, DIRECTED, MOVIE_SCHEMA, PERSON, WORKEDUNDER, movie, person
from relnet.errors import ParseError, SchemaError, TypeMismatchError
from relnet.grounding.examples import Label
from relnet.logic.atoms import Atom, Constant, Predicate
from relnet.logic.binarize import BOOL_TYPE, TRUE_CONSTANT, RawAtom, RawDatabase, RawDeclaration, binarize
from relnet.logic.dataloading import (
    example_from_text,
    format_atom,
    parse_dataset,
    read_folds,
    save_dataset,
)
from relnet.logic.fact_store import FactStore


class TestAtoms:
    def test_inverse_swaps_types_and_round_trips(self):
        inverse = DIRECTED.invert()
        assert inverse.is_inverse
        assert (inverse.arg1_type, inverse.arg2_type) == ("Movie", "Person")
        assert inverse.label == "directed^-1"
        assert inverse.invert() == DIRECTED
        assert inverse.base == DIRECTED

    def test_type_mismatch_rejected(self):
        with pytest.raises(TypeMismatchError):
            Atom(ACTEDIN, movie("m"), person("p"))

    def test_canonical_flips_inverse_atoms(self):
        atom = Atom(DIRECTED.invert(), movie("m"), person("marty"))
        assert atom.canonical() == Atom(DIRECTED, person("marty"), movie("m"))


class TestFactStore:
    def test_add_fact_is_idempotent(self):
        store = FactStore(MOVIE_SCHEMA)
        fact = Atom(ACTEDIN, person("leo"), movie("m1"))
        store.add_fact(fact).add_fact(fact)
        assert len(store) == 1
        assert store.contains(fact)

    def test_undeclared_predicate(self):
        store = FactStore([ACTEDIN])
        with pytest.raises(SchemaError):
            store.add_fact(Atom(DIRECTED, person("marty"), movie("m1")))

    def test_conflicting_declaration(self):
        store = FactStore([ACTEDIN])
        with pytest.raises(SchemaError):
            store.declare(Predicate("actedin", PERSON, "Genre"))

    def test_successors_both_directions(self, movie_store):
        departed = movie("The Departed")
        assert movie_store.successors(ACTEDIN, person("leo")) == {departed, movie("The Aviator")}
        assert movie_store.successors(ACTEDIN.invert(), departed) == {person("leo"), person("leonardo")}
        assert movie_store.successors(DIRECTED.invert(), departed) == {person("marty")}

    def test_unknown_constant_has_no_successors(self, movie_store):
        assert movie_store.successors(ACTEDIN, person("nobody")) == set()

    def test_successor_type_check(self, movie_store):
        with pytest.raises(TypeMismatchError):
            movie_store.successors(ACTEDIN, movie("The Departed"))

    def test_frozen_store_is_read_only(self, movie_store):
        assert movie_store.frozen
        with pytest.raises(RuntimeError):
            movie_store.add_fact(Atom(ACTEDIN, person("x"), movie("y")))

    def test_contains_inverse_reading(self, movie_store):
        assert movie_store.contains(Atom(DIRECTED.invert(), movie("The Aviator"), person("marty")))
        assert not movie_store.contains(Atom(DIRECTED, person("leo"), movie("The Aviator")))

    @settings(max_examples=50, deadline=None)
    @given(st.sets(st.tuples(st.integers(0, 5), st.integers(0, 5)), max_size=25))
    def test_index_agrees_with_fact_scan(self, pairs):
        store = FactStore(MOVIE_SCHEMA)
        for a, m in pairs:
            store.add_fact(Atom(ACTEDIN, person(f"p{a}"), movie(f"m{m}")))
        for a in range(6):
            expected = {movie(f"m{m}") for x, m in pairs if x == a}
            assert store.successors(ACTEDIN, person(f"p{a}")) == expected
        for m in range(6):
            expected = {person(f"p{a}") for a, x in pairs if x == m}
            assert store.successors(ACTEDIN.invert(), movie(f"m{m}")) == expected

    def test_insertion_order_does_not_matter(self):
        facts = [Atom(ACTEDIN, person(f"p{i}"), movie(f"m{i % 3}")) for i in range(9)]
        forward = FactStore(MOVIE_SCHEMA)
        backward = FactStore(MOVIE_SCHEMA)
        for fact in facts:
            forward.add_fact(fact)
        for fact in reversed(facts):
            backward.add_fact(fact)
        assert forward == backward
        assert forward.facts() == backward.facts()


class TestBinarize:
    def test_unary_becomes_boolean_pair(self):
        raw_db = RawDatabase()
        raw_db.declare(RawDeclaration("professor", ("Person",)))
        raw_db.atoms = [RawAtom("professor", ("ana",), line=1)]
        store = binarize(raw_db)
        professor = store.predicate("professor")
        assert professor == Predicate("professor", "Person", BOOL_TYPE)
        assert store.contains(Atom(professor, Constant("ana", "Person"), TRUE_CONSTANT))

    def test_ternary_becomes_three_projections(self):
        raw_db = RawDatabase()
        raw_db.declare(RawDeclaration("taught", ("Person", "Course", "Term")))
        raw_db.atoms = [RawAtom("taught", ("ana", "ai", "fall"), line=1)]
        store = binarize(raw_db)
        names = sorted(p.name for p in store.declarations)
        assert names == ["taught_12", "taught_13", "taught_23"]
        assert len(store) == 3
        assert store.contains(Atom(store.predicate("taught_23"), Constant("ai", "Course"), Constant("fall", "Term")))

    def test_five_ternary_facts_give_fifteen_binary(self):
        raw_db = RawDatabase()
        raw_db.declare(RawDeclaration("taught", ("Person", "Course", "Term")))
        raw_db.declare(RawDeclaration("student", ("Person",)))
        triples = [("ana", "ai", "fall"), ("ana", "db", "spring"), ("bo", "ai", "spring"),
                   ("cy", "ml", "fall"), ("bo", "ml", "summer")]
        raw_db.atoms = [RawAtom("taught", triple, line=i) for i, triple in enumerate(triples, start=1)]
        raw_db.atoms += [RawAtom("student", ("dee",), line=6), RawAtom("student", ("eve",), line=7)]
        store = binarize(raw_db)

        taught = [store.predicate(f"taught_{suffix}") for suffix in ("12", "13", "23")]
        assert [(p.arg1_type, p.arg2_type) for p in taught] == [
            ("Person", "Course"), ("Person", "Term"), ("Course", "Term")
        ]
        assert sum(1 for fact in store if fact.predicate.name.startswith("taught_")) == 15
        for a, b, c in triples:
            pa, cb, tc = Constant(a, "Person"), Constant(b, "Course"), Constant(c, "Term")
            assert store.contains(Atom(taught[0], pa, cb))
            assert store.contains(Atom(taught[1], pa, tc))
            assert store.contains(Atom(taught[2], cb, tc))

        student = store.predicate("student")
        for name in ("dee", "eve"):
            assert store.contains(Atom(student, Constant(name, "Person"), TRUE_CONSTANT))
        assert len(store) == 17

    def test_arity_four_rejected(self):
        raw_db = RawDatabase()
        raw_db.declare(RawDeclaration("quad", ("A", "B", "C", "D")))
        with pytest.raises(SchemaError):
            binarize(raw_db)

    def test_wrong_argument_count(self):
        raw_db = RawDatabase()
        raw_db.declare(RawDeclaration("actedin", ("Person", "Movie")))
        raw_db.atoms = [RawAtom("actedin", ("leo",), line=4)]
        with pytest.raises(TypeMismatchError):
            binarize(raw_db)


class TestDataLoading:
    def test_fig2_dataset(self, movie_files):
        dataset = parse_dataset(movie_files / "types.txt", movie_files / "facts.txt", movie_files / "pos.txt")
        assert dataset.target == WORKEDUNDER
        assert len(dataset.store) == 6
        assert [ex.example_id for ex in dataset.examples] == ["workedunder(leo,marty)"]
        assert dataset.examples[0].label == Label.POSITIVE
        assert dataset.store.frozen

    def test_unary_fact_file(self, tmp_path):
        (tmp_path / "types.txt").write_text("professor(Person)\nadvisedby(Person,Person)\n")
        (tmp_path / "facts.txt").write_text("professor(ana).\n")
        (tmp_path / "pos.txt").write_text("advisedby(bob,ana).\n")
        dataset = parse_dataset(tmp_path / "types.txt", tmp_path / "facts.txt", tmp_path / "pos.txt")
        professor = dataset.store.predicate("professor")
        assert dataset.store.contains(Atom(professor, Constant("ana", "Person"), TRUE_CONSTANT))

    def test_malformed_fact_reports_line_and_expected(self, movie_files):
        (movie_files / "facts.txt").write_text("actedin(leo,m1).\n\nactedin(leo\n")
        with pytest.raises(ParseError) as err:
            parse_dataset(movie_files / "types.txt", movie_files / "facts.txt", movie_files / "pos.txt")
        assert err.value.line == 3
        assert err.value.column > 0
        assert err.value.expected is not None

    def test_missing_period(self, movie_files):
        (movie_files / "facts.txt").write_text("actedin(leo,m1)\n")
        with pytest.raises(ParseError) as err:
            parse_dataset(movie_files / "types.txt", movie_files / "facts.txt", movie_files / "pos.txt")
        assert err.value.line == 1

    def test_percent_inside_quotes_is_not_a_comment(self, movie_files):
        (movie_files / "facts.txt").write_text(
            'actedin(leo,"50% Off"). % leo was in it\n'
            '% actedin(leo,"Ignored").\n'
            'directed(marty,"50% Off").\n'
        )
        dataset = parse_dataset(movie_files / "types.txt", movie_files / "facts.txt", movie_files / "pos.txt")
        film = movie("50% Off")
        assert dataset.store.contains(Atom(ACTEDIN, person("leo"), film))
        assert dataset.store.contains(Atom(DIRECTED, person("marty"), film))
        assert len(dataset.store) == 2

    def test_undeclared_fact_predicate(self, movie_files):
        (movie_files / "facts.txt").write_text("produced(marty,m1).\n")
        with pytest.raises(SchemaError):
            parse_dataset(movie_files / "types.txt", movie_files / "facts.txt", movie_files / "pos.txt")

    def test_example_both_positive_and_negative(self, movie_files):
        (movie_files / "neg.txt").write_text("workedunder(leo,marty).\n")
        with pytest.raises(SchemaError):
            parse_dataset(movie_files / "types.txt", movie_files / "facts.txt", movie_files / "pos.txt",
                          negatives_path=movie_files / "neg.txt")

    def test_missing_file(self, movie_files):
        with pytest.raises(FileNotFoundError):
            parse_dataset(movie_files / "types.txt", movie_files / "nope.txt", movie_files / "pos.txt")

    def test_round_trip(self, movie_files, tmp_path):
        (movie_files / "neg.txt").write_text("workedunder(leonardo,marty).\n")
        original = parse_dataset(movie_files / "types.txt", movie_files / "facts.txt", movie_files / "pos.txt",
                                 negatives_path=movie_files / "neg.txt")
        paths = save_dataset(original, tmp_path / "copy")
        reparsed = parse_dataset(paths["types"], paths["facts"], paths["positives"],
                                 negatives_path=paths["negatives"])
        assert reparsed.store == original.store
        assert reparsed.examples == original.examples

    def test_fold_file(self, tmp_path):
        path = tmp_path / "folds.txt"
        path.write_text("0 workedunder(leo,marty)\n1 workedunder(leonardo,marty).\n")
        assert read_folds(path) == {"workedunder(leo,marty)": 0, "workedunder(leonardo,marty)": 1}

    def test_example_from_text(self):
        example = example_from_text("workedunder(leo,marty)", WORKEDUNDER)
        assert example.arg1 == person("leo")
        assert example.arg2 == person("marty")

    def test_quoted_symbols_are_written_back_quoted(self):
        assert format_atom("actedin", ["leo", "The Departed"]) == 'actedin(leo,"The Departed").'
