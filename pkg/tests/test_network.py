import math

import numpy as np
import pytest
from scipy.special import softmax

from conftest import ACTEDIN, DIRECTED, WORKEDUNDER, build_random_store, worked_under
from relnet.errors import ConfigError, ParseError, SchemaError
from relnet.grounding.grounder import Grounding, GroundingSet
from relnet.grounding.examples import TargetExample
from relnet.network.model_io import SavedModel, format_model, load_model, save_model
from relnet.network.network import (
    GroundNetwork,
    activation,
    combine,
    forward,
    ground_activation,
    instantiate,
    score,
)
from relnet.network.params import CombinerMode, ModelParams
from relnet.walks.schema_graph import build_schema_graph
from relnet.walks.walk_generation import LiftedWalk, generate_walks

MODES = list(CombinerMode)
R1 = LiftedWalk(1, (ACTEDIN, DIRECTED.invert()))


def synthetic_network(counts):
    """Length-2 rules with the given grounding counts; forward only reads counts and lengths."""
    per_rule = []
    for j, count in enumerate(counts):
        walk = LiftedWalk(j + 1, R1.chain)
        per_rule.append(GroundingSet(walk, [Grounding(j + 1, ()) for _ in range(count)]))
    return GroundNetwork(worked_under("a", "b"), per_rule)


def random_networks(count=20):
    for seed in range(count):
        store = build_random_store(seed)
        walks = generate_walks(build_schema_graph(store.declarations), WORKEDUNDER, 4, max_len=3, seed=seed)
        persons = store.constants_of_type("Person")
        ex = TargetExample(WORKEDUNDER, persons[0], persons[1])
        yield instantiate(walks, ex, store), len(walks), seed


class TestCombinerMode:
    @pytest.mark.parametrize("text,mode", [
        ("average", CombinerMode.AVERAGE),
        ("Max", CombinerMode.MAX),
        ("noisy-or", CombinerMode.NOISY_OR),
        (" Noisy_Or ", CombinerMode.NOISY_OR),
    ])
    def test_parse(self, text, mode):
        assert CombinerMode.parse(text) is mode

    def test_unknown(self):
        with pytest.raises(ConfigError):
            CombinerMode.parse("median")


class TestParams:
    def test_initialize_ranges_and_zero_bias(self):
        params = ModelParams.initialize(5, seed=3)
        assert params.u.shape == (5, 2)
        assert np.all(np.abs(params.w) <= 0.1) and np.all(np.abs(params.u) <= 0.1)
        assert np.all(params.b == 0.0)
        assert params == ModelParams.initialize(5, seed=3)

    def test_w_stream_independent_of_u(self):
        small, large = ModelParams.initialize(3, seed=1), ModelParams.initialize(6, seed=1)
        np.testing.assert_array_equal(small.w, large.w[:3])

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            ModelParams(np.zeros(2), np.zeros((3, 2)), np.zeros(2))


class TestActivations:
    def test_zero_weight_average(self):
        assert ground_activation(0.0, 4, CombinerMode.AVERAGE) == 0.0

    def test_zero_weight_noisy_or(self):
        assert ground_activation(0.0, 3, CombinerMode.NOISY_OR) == 0.5

    def test_scaled_by_length(self):
        assert ground_activation(0.2, 2, CombinerMode.MAX) == pytest.approx(math.tanh(0.4), abs=1e-15)

    def test_length_must_be_positive(self):
        with pytest.raises(ValueError):
            ground_activation(0.2, 0, CombinerMode.AVERAGE)

    def test_sigmoid_for_noisy_or(self):
        assert activation(np.array([2.0]), CombinerMode.NOISY_OR)[0] == pytest.approx(1.0 / (1.0 + math.exp(-2.0)))


class TestCombine:
    def test_average(self):
        assert combine(np.array([0.2, 0.4]), CombinerMode.AVERAGE) == pytest.approx(0.3)

    def test_noisy_or(self):
        assert combine(np.array([0.5, 0.5]), CombinerMode.NOISY_OR) == pytest.approx(0.75)

    @pytest.mark.parametrize("mode", MODES)
    def test_empty_is_zero(self, mode):
        assert combine(np.array([]), mode) == 0.0

    def test_noisy_or_rejects_signed_input(self):
        with pytest.raises(ValueError):
            combine(np.array([-0.2]), CombinerMode.NOISY_OR)

    def test_ordering(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            acts = rng.uniform(-1.0, 1.0, size=int(rng.integers(1, 8)))
            average = combine(acts, CombinerMode.AVERAGE)
            assert acts.min() - 1e-12 <= average <= combine(acts, CombinerMode.MAX) + 1e-12


class TestInstantiate:
    def test_grounding_counts(self, movie_store, movie_walks):
        net = instantiate(movie_walks, worked_under("leo", "marty"), movie_store)
        assert list(net.counts) == [2, 1]
        assert list(net.lengths) == [2, 3]

    def test_unique_fact_nodes(self, movie_store, movie_walks):
        net = instantiate(movie_walks, worked_under("leo", "marty"), movie_store)
        assert net.num_fact_nodes == 6
        distinct = {atom for gs in net.per_rule for g in gs for atom in g.atoms(gs.walk)}
        assert net.num_fact_nodes == len(distinct)

    def test_no_groundings_is_still_a_network(self, movie_store, movie_walks):
        net = instantiate(movie_walks, worked_under("marty", "leo"), movie_store)
        assert list(net.counts) == [0, 0]
        params = ModelParams(np.array([0.3, -0.2]), np.array([[1.0, -1.0], [0.5, 0.5]]), np.array([0.1, -0.3]))
        np.testing.assert_allclose(forward(net, params, CombinerMode.AVERAGE).probs, softmax(params.b))

    def test_invalid_walk(self, movie_store):
        with pytest.raises(SchemaError):
            instantiate([LiftedWalk(1, (ACTEDIN,))], worked_under("leo", "marty"), movie_store)

    def test_needs_walks(self, movie_store):
        with pytest.raises(ValueError):
            instantiate([], worked_under("leo", "marty"), movie_store)


class TestForward:
    def test_single_grounding_by_hand(self):
        net = synthetic_network([1])
        params = ModelParams(np.array([0.2]), np.array([[-1.0, 1.0]]), np.zeros(2))
        trace = forward(net, params, CombinerMode.AVERAGE)
        a = math.tanh(0.4)
        np.testing.assert_allclose(trace.probs, softmax([-a, a]), rtol=0, atol=1e-15)
        assert trace.score == pytest.approx(1.0 / (1.0 + math.exp(-2 * a)))

    def test_average_ignores_duplicate_groundings(self):
        params = ModelParams(np.array([0.3]), np.array([[-0.5, 0.5]]), np.zeros(2))
        scores = [score(synthetic_network([n]), params, CombinerMode.AVERAGE) for n in (1, 2, 4)]
        assert scores == pytest.approx([scores[0]] * 3)

    def test_noisy_or_grows_with_groundings(self):
        params = ModelParams(np.array([0.3]), np.array([[-0.5, 0.5]]), np.zeros(2))
        traces = [forward(synthetic_network([n]), params, CombinerMode.NOISY_OR) for n in (1, 2, 4)]
        rule_values = [t.rule_acts[0] for t in traces]
        assert rule_values[0] < rule_values[1] < rule_values[2]
        assert traces[0].score < traces[1].score < traces[2].score

    def test_noisy_or_never_decreases_when_adding_groundings(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            params = ModelParams(rng.uniform(-1, 1, 1), np.array([[rng.uniform(-1, 0), rng.uniform(0, 1)]]), np.zeros(2))
            n = int(rng.integers(0, 5))
            before = score(synthetic_network([n]), params, CombinerMode.NOISY_OR)
            after = score(synthetic_network([n + 1]), params, CombinerMode.NOISY_OR)
            assert after >= before

    @pytest.mark.parametrize("mode", MODES)
    def test_probabilities_are_normalized(self, mode):
        for net, num_rules, seed in random_networks():
            params = ModelParams.initialize(num_rules, seed=seed)
            trace = forward(net, params, mode)
            assert abs(trace.probs.sum() - 1.0) < 1e-9
            assert np.all((trace.probs > 0) & (trace.probs < 1))
            for acts in trace.ground_acts:
                assert acts.size == 0 or np.ptp(acts) == 0.0

    def test_pure_function(self, movie_store, movie_walks):
        net = instantiate(movie_walks, worked_under("leo", "marty"), movie_store)
        params = ModelParams.initialize(2, seed=9)
        snapshot = params.copy()
        first = forward(net, params, CombinerMode.NOISY_OR)
        second = forward(net, params, CombinerMode.NOISY_OR)
        np.testing.assert_array_equal(first.probs, second.probs)
        assert params == snapshot

    def test_parameter_count_mismatch(self):
        with pytest.raises(ValueError):
            forward(synthetic_network([1, 1]), ModelParams.zeros(3), CombinerMode.AVERAGE)


class TestModelFile:
    def test_save_load_reproduces_scores(self, tmp_path, movie_store, movie_walks):
        params = ModelParams.initialize(2, seed=4)
        params.w[:] = [0.1234567890123, -1.0 / 3.0]
        model = SavedModel(WORKEDUNDER, movie_walks, params, CombinerMode.NOISY_OR)
        path = tmp_path / "model.txt"
        save_model(model, path)
        loaded = load_model(path)

        assert loaded.params == params
        assert loaded.walks == movie_walks
        assert loaded.combiner is CombinerMode.NOISY_OR
        assert loaded.target == WORKEDUNDER
        net = instantiate(loaded.walks, worked_under("leo", "marty"), movie_store)
        assert score(net, loaded.params, loaded.combiner) == score(net, params, CombinerMode.NOISY_OR)
        assert format_model(loaded) == path.read_text(encoding="utf-8")

    def test_header_lists_walks(self, movie_walks):
        text = format_model(SavedModel(WORKEDUNDER, movie_walks, ModelParams.zeros(2), CombinerMode.AVERAGE))
        lines = text.splitlines()
        assert lines[0] == "relnet-model 1"
        assert "rule 1 actedin ; directed^-1" in lines
        assert "rule 2 sameperson ; actedin ; directed^-1" in lines
        assert "combiner average" in lines

    def test_bad_header(self, tmp_path):
        path = tmp_path / "model.txt"
        path.write_text("relnet-model 9\n", encoding="utf-8")
        with pytest.raises(ParseError):
            load_model(path)
