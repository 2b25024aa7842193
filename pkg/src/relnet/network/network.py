"""
Per-example ground network and its forward pass.

Layers, bottom to top:

    facts       body atoms of the groundings, each unique fact once, value 1
    groundings  one AND neuron per grounding of rule j: z = w_j * l_j
    rules       combining rule c_j over the rule's grounding activations
    output      softmax over z_c = sum_j u_jc * c_j + b_c
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Set

import numpy as np
from scipy.special import expit, softmax

from relnet.errors import NumericalError, SchemaError
from relnet.grounding.examples import Label, TargetExample
from relnet.grounding.grounder import Grounder, GroundingSet
from relnet.logic.atoms import Atom
from relnet.logic.fact_store import FactStore
from relnet.network.params import CombinerMode, ModelParams
from relnet.walks.walk_generation import LiftedWalk, validate_walk

logger = logging.getLogger(__name__)


@dataclass
class GroundNetwork:
    """
    The unrolled network for one example: the groundings of every rule.

    per_rule[j] belongs to the j-th walk of the model (rule id j + 1).
    """

    example: TargetExample
    per_rule: List[GroundingSet]

    @property
    def lengths(self) -> np.ndarray:
        """Body lengths l_j."""
        return np.array([gs.walk.length for gs in self.per_rule], dtype=np.int64)

    @property
    def counts(self) -> np.ndarray:
        """Grounding counts N_j."""
        return np.array([gs.count for gs in self.per_rule], dtype=np.int64)

    def fact_nodes(self) -> Set[Atom]:
        """Distinct evidence atoms feeding the grounding layer."""
        nodes: Set[Atom] = set()
        for gs in self.per_rule:
            for grounding in gs:
                nodes.update(grounding.atoms(gs.walk))
        return nodes

    @property
    def num_fact_nodes(self) -> int:
        return len(self.fact_nodes())


@dataclass
class ForwardTrace:
    """Every intermediate value of one forward pass."""

    ground_acts: List[np.ndarray]
    rule_acts: np.ndarray
    logits: np.ndarray
    probs: np.ndarray
    pre_acts: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def score(self) -> float:
        """Probability of the positive class."""
        return float(self.probs[Label.POSITIVE])


def instantiate(
    walks: Sequence[LiftedWalk],
    ex: TargetExample,
    store: FactStore,
    samples_per_walk: int = 0,
    seed: int = 0,
    grounder: Optional[Grounder] = None
) -> GroundNetwork:
    """
    Unroll the ground network of an example.

    Args:
        walks: Rule templates, valid for ex.target
        ex: The example to unroll
        store: Evidence
        samples_per_walk: 0 for exhaustive grounding, S for sampled
        seed: Master seed for sampled grounding
        grounder: Configured grounder (with cache); overrides the two above

    Returns:
        GroundNetwork: Groundings per rule; fact nodes are their atoms
    """
    if not walks:
        raise ValueError("Cannot instantiate a network without walks")
    for walk in walks:
        if not validate_walk(walk, ex.target):
            raise SchemaError(f"Walk {walk} is not a valid rule for {ex.target}")

    grounder = grounder or Grounder(store, samples_per_walk=samples_per_walk, seed=seed)
    return GroundNetwork(ex, [grounder.ground(walk, ex) for walk in walks])


def activation(z: np.ndarray, mode: CombinerMode) -> np.ndarray:
    """tanh for Average and Max, logistic sigmoid for NoisyOr."""
    return expit(z) if mode == CombinerMode.NOISY_OR else np.tanh(z)


def activation_derivative(a: np.ndarray, mode: CombinerMode) -> np.ndarray:
    """g'(z) written in terms of a = g(z)."""
    return a * (1.0 - a) if mode == CombinerMode.NOISY_OR else 1.0 - a * a


def ground_activation(weight: float, length: int, mode: CombinerMode) -> float:
    """
    Output of one grounding neuron.

    Each of the l true fact inputs has value 1 and the tied edge weight
    w_j, so the pre-activation is w_j * l.
    """
    if length < 1:
        raise ValueError(f"Body length must be >= 1, got {length}")
    return float(activation(np.float64(weight * length), mode))


def combine(acts: np.ndarray, mode: CombinerMode) -> float:
    """
    Combining rule c_j.

    Args:
        acts: Grounding activations a_j1 .. a_jN (may be empty)
        mode: Average (mean), Max, or NoisyOr (1 - prod(1 - a))

    Returns:
        float: 0.0 for an empty rule
    """
    acts = np.asarray(acts, dtype=np.float64)
    if acts.size == 0:
        return 0.0
    if mode == CombinerMode.AVERAGE:
        return float(np.mean(acts))
    if mode == CombinerMode.MAX:
        return float(np.max(acts))
    if np.any(acts < 0.0) or np.any(acts > 1.0):
        raise ValueError("NoisyOr inputs must lie in [0, 1]")
    return float(1.0 - np.prod(1.0 - acts))


def forward(net: GroundNetwork, params: ModelParams, mode: CombinerMode) -> ForwardTrace:
    """
    Forward pass; a pure function of its arguments.

    Raises:
        NumericalError: On any non-finite activation, logit or probability
    """
    if len(net.per_rule) != params.num_rules:
        raise ValueError(f"Network has {len(net.per_rule)} rules, parameters have {params.num_rules}")

    num_rules = params.num_rules
    pre_acts = params.w * net.lengths
    ground_acts: List[np.ndarray] = []
    rule_acts = np.zeros(num_rules)

    for j, gs in enumerate(net.per_rule):
        # every grounding sees l_j unit facts through the tied weight
        acts = activation(np.full(gs.count, pre_acts[j]), mode)
        ground_acts.append(acts)
        rule_acts[j] = combine(acts, mode)

    logits = rule_acts @ params.u + params.b
    if not np.all(np.isfinite(rule_acts)) or not np.all(np.isfinite(logits)):
        raise NumericalError(f"Non-finite forward values for {net.example.example_id}")
    probs = softmax(logits)
    if not np.all(np.isfinite(probs)):
        raise NumericalError(f"Non-finite output probabilities for {net.example.example_id}")

    return ForwardTrace(ground_acts=ground_acts, rule_acts=rule_acts, logits=logits, probs=probs, pre_acts=pre_acts)


def score(net: GroundNetwork, params: ModelParams, mode: CombinerMode) -> float:
    """p(positive) for the example the network was unrolled for."""
    return forward(net, params, mode).score
