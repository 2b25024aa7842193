"""
Loss, exact backpropagation through the tied network, and L1-regularized
AdaGrad training.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator
from tqdm import tqdm

from relnet.errors import NumericalError
from relnet.grounding.examples import Label, TargetExample
from relnet.grounding.grounder import Grounder, GroundingCache
from relnet.logic.fact_store import FactStore
from relnet.network.network import (
    ForwardTrace,
    GroundNetwork,
    activation,
    activation_derivative,
    forward,
    instantiate,
)
from relnet.network.params import CombinerMode, ModelParams
from relnet.seeding import rng_for
from relnet.walks.walk_generation import DEFAULT_MAX_LEN, LiftedWalk

logger = logging.getLogger(__name__)

PROB_FLOOR = 1e-12


class TrainConfig(BaseModel):
    """Hyperparameters of one training run."""

    model_config = ConfigDict(frozen=True)

    combiner: CombinerMode = CombinerMode.AVERAGE
    lr: float = Field(0.05, gt=0)
    l1: float = Field(1e-4, ge=0)
    eps: float = Field(1e-8, gt=0)
    batch: int = Field(1, ge=1, le=1)
    epochs: int = Field(1, ge=1)
    seed: int = Field(0, ge=0)
    neg_ratio: int = Field(2, ge=1)
    num_walks: int = Field(20, ge=1)
    samples_per_walk: int = Field(0, ge=0)
    max_len: int = Field(DEFAULT_MAX_LEN, ge=1)

    @field_validator("combiner", mode="before")
    @classmethod
    def _parse_combiner(cls, value):
        return CombinerMode.parse(value)


@dataclass
class Gradients:
    """dL/dw (M,), dL/du (M, C), dL/db (C,), plus per-grounding terms of dw."""

    dw: np.ndarray
    du: np.ndarray
    db: np.ndarray
    dw_terms: List[np.ndarray] = field(default_factory=list)

    def check_finite(self) -> None:
        for name in ("dw", "du", "db"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise NumericalError(f"Non-finite gradient block {name}")


def one_hot(label: Union[Label, int, np.ndarray], num_classes: int = 2) -> np.ndarray:
    if isinstance(label, np.ndarray):
        return label.astype(np.float64)
    y = np.zeros(num_classes)
    y[int(label)] = 1.0
    return y


def loss(trace: ForwardTrace, label: Union[Label, int, np.ndarray]) -> float:
    """Cross-entropy -sum_c y_c log p_c, probabilities floored at 1e-12."""
    y = one_hot(label, trace.probs.shape[0])
    return float(-np.sum(y * np.log(np.maximum(trace.probs, PROB_FLOOR))))


def _leave_one_out_products(values: np.ndarray) -> np.ndarray:
    """prod_{i' != i} values[i'] for every i, without division."""
    prefix = np.concatenate(([1.0], np.cumprod(values)[:-1]))
    suffix = np.concatenate((np.cumprod(values[::-1])[:-1][::-1], [1.0]))
    return prefix * suffix


def combiner_shares(acts: np.ndarray, upstream: float, mode: CombinerMode) -> np.ndarray:
    """
    dL/da_ji for every grounding of one rule, given dL/dc_j.

    Max routes the whole subgradient to the first maximal grounding.
    """
    n = acts.shape[0]
    if n == 0:
        return np.zeros(0)
    if mode == CombinerMode.AVERAGE:
        return np.full(n, upstream / n)
    if mode == CombinerMode.MAX:
        shares = np.zeros(n)
        shares[int(np.argmax(acts))] = upstream
        return shares
    return upstream * _leave_one_out_products(1.0 - acts)


def backward(
    net: GroundNetwork,
    params: ModelParams,
    mode: CombinerMode,
    label: Union[Label, int, np.ndarray],
    trace: Optional[ForwardTrace] = None
) -> Gradients:
    """
    Exact gradients of the cross-entropy loss for one example.

    Args:
        net: Unrolled network
        params: Current parameters
        mode: Combining rule
        label: Class index or one-hot vector
        trace: Forward trace for (net, params, mode) if already computed

    Returns:
        Gradients: dw_j sums the per-grounding terms, which realizes the
        weight tying
    """
    trace = trace if trace is not None else forward(net, params, mode)
    y = one_hot(label, params.num_classes)
    delta = trace.probs - y

    db = delta.copy()
    du = np.outer(trace.rule_acts, delta)
    dc = params.u @ delta
    dw = np.zeros(params.num_rules)
    dw_terms: List[np.ndarray] = []

    for j, gs in enumerate(net.per_rule):
        acts = trace.ground_acts[j]
        shares = combiner_shares(acts, dc[j], mode)
        terms = shares * activation_derivative(acts, mode) * gs.walk.length
        dw_terms.append(terms)
        dw[j] = terms.sum()

    grads = Gradients(dw=dw, du=du, db=db, dw_terms=dw_terms)
    grads.check_finite()
    return grads


def grounding_contribution(
    net: GroundNetwork,
    params: ModelParams,
    mode: CombinerMode,
    label: Union[Label, int, np.ndarray],
    rule: int,
    index: int
) -> float:
    """
    dL/dw_j through one grounding only, evaluated from scratch.

    Holds every other grounding's activation fixed and differentiates the
    loss along the single edge group feeding grounding ``index`` of rule
    ``rule`` (0-based).
    """
    trace = forward(net, params, mode)
    delta = trace.probs - one_hot(label, params.num_classes)
    upstream = float(params.u[rule] @ delta)
    length = net.per_rule[rule].walk.length
    acts = trace.ground_acts[rule]
    a = float(activation(np.float64(params.w[rule] * length), mode))

    if mode == CombinerMode.AVERAGE:
        share = upstream / acts.shape[0]
    elif mode == CombinerMode.MAX:
        share = upstream if index == int(np.argmax(acts)) else 0.0
    else:
        others = np.delete(acts, index)
        share = upstream * float(np.prod(1.0 - others))
    return share * float(activation_derivative(np.float64(a), mode)) * length


@dataclass
class AdaGradState:
    """Squared-gradient accumulators plus step hyperparameters."""

    G_w: np.ndarray
    G_u: np.ndarray
    G_b: np.ndarray
    lr: float = 0.05
    l1: float = 1e-4
    eps: float = 1e-8

    @classmethod
    def for_params(cls, params: ModelParams, lr: float = 0.05, l1: float = 1e-4, eps: float = 1e-8) -> "AdaGradState":
        return cls(np.zeros_like(params.w), np.zeros_like(params.u), np.zeros_like(params.b), lr=lr, l1=l1, eps=eps)

    def copy(self) -> "AdaGradState":
        return AdaGradState(self.G_w.copy(), self.G_u.copy(), self.G_b.copy(), self.lr, self.l1, self.eps)


def _proximal_update(x: np.ndarray, g: np.ndarray, acc: np.ndarray, lr: float, l1: float, eps: float):
    """Composite-objective AdaGrad step with soft thresholding; zero-gradient entries are skipped."""
    x = x.copy()
    acc = acc.copy()
    active = g != 0.0
    acc[active] += g[active] ** 2
    scale = lr / np.sqrt(acc[active] + eps)
    moved = x[active] - scale * g[active]
    x[active] = np.sign(moved) * np.maximum(0.0, np.abs(moved) - l1 * scale)
    return x, acc


def adagrad_l1_step(params: ModelParams, grads: Gradients, state: AdaGradState):
    """
    One L1-regularized AdaGrad step.

    Per coordinate with g != 0:
        G <- G + g^2
        x <- x - lr * g / sqrt(G + eps)
        x <- sign(x) * max(0, |x| - lr * l1 / sqrt(G + eps))

    Returns:
        Tuple[ModelParams, AdaGradState]: New parameters and accumulators;
        the inputs are not modified
    """
    if grads.dw.shape != params.w.shape or grads.du.shape != params.u.shape or grads.db.shape != params.b.shape:
        raise ValueError("Gradient and parameter shapes disagree")

    w, G_w = _proximal_update(params.w, grads.dw, state.G_w, state.lr, state.l1, state.eps)
    u, G_u = _proximal_update(params.u, grads.du, state.G_u, state.lr, state.l1, state.eps)
    b, G_b = _proximal_update(params.b, grads.db, state.G_b, state.lr, state.l1, state.eps)

    updated = ModelParams(w, u, b)
    updated.check_finite()
    return updated, AdaGradState(G_w, G_u, G_b, state.lr, state.l1, state.eps)


@dataclass
class TrainingStep:
    step: int
    example: str
    loss: float
    score: float


@dataclass
class TrainResult:
    """Final parameters with the per-step log (values before each update)."""

    params: ModelParams
    log: List[TrainingStep]
    state: Optional[AdaGradState] = None

    def log_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [(s.step, s.example, s.loss, s.score) for s in self.log],
            columns=["step", "example", "loss", "score"]
        )


def train(
    store: FactStore,
    walks: Sequence[LiftedWalk],
    examples: Sequence[TargetExample],
    cfg: TrainConfig,
    run_id: int = 0,
    progress: bool = False
) -> TrainResult:
    """
    Train the network with batch-1 AdaGrad-L1.

    Examples are put in canonical order and then shuffled with a stream
    derived from (seed, run_id, epoch), so the result does not depend on the
    order they were read in.

    Args:
        store: Frozen evidence
        walks: Rule templates (M of them)
        examples: Labelled training examples
        cfg: Hyperparameters
        run_id: Stream key separating runs under one master seed (fold index)
        progress: Show a tqdm bar

    Returns:
        TrainResult: Final parameters and training log
    """
    if not examples:
        raise ValueError("Cannot train on an empty example list")
    if not walks:
        raise ValueError("Cannot train without walks")

    ordered = sorted(examples, key=TargetExample.sort_key)
    params = ModelParams.initialize(len(walks), 2, seed=cfg.seed)
    state = AdaGradState.for_params(params, lr=cfg.lr, l1=cfg.l1, eps=cfg.eps)
    cache = GroundingCache()
    grounder = Grounder(store, samples_per_walk=cfg.samples_per_walk, seed=cfg.seed, cache=cache)
    log: List[TrainingStep] = []

    logger.info(
        f"Training {len(walks)} rules on {len(ordered)} examples "
        f"({cfg.combiner.value}, lr={cfg.lr}, l1={cfg.l1}, epochs={cfg.epochs}, grounding={grounder.mode})"
    )

    step = 0
    for epoch in range(cfg.epochs):
        cache.clear()
        order = rng_for(cfg.seed, "shuffle", run_id, epoch).permutation(len(ordered))
        for index in tqdm(order, desc=f"epoch {epoch + 1}/{cfg.epochs}", disable=not progress, leave=False):
            ex = ordered[int(index)]
            net = instantiate(walks, ex, store, grounder=grounder)
            trace = forward(net, params, cfg.combiner)
            step_loss = loss(trace, ex.label)
            grads = backward(net, params, cfg.combiner, ex.label, trace=trace)
            params, state = adagrad_l1_step(params, grads, state)
            step += 1
            log.append(TrainingStep(step, ex.example_id, step_loss, trace.score))

        epoch_loss = float(np.mean([s.loss for s in log[-len(ordered):]]))
        logger.info(f"Epoch {epoch + 1}/{cfg.epochs}: mean loss {epoch_loss:.6f}")

    zeros = int(np.sum(params.w == 0.0))
    logger.debug(f"Training finished: {zeros}/{params.num_rules} rule weights exactly zero")
    return TrainResult(params=params, log=log, state=state)


def score_examples(
    store: FactStore,
    walks: Sequence[LiftedWalk],
    examples: Sequence[TargetExample],
    params: ModelParams,
    mode: CombinerMode,
    samples_per_walk: int = 0,
    seed: int = 0
) -> List[float]:
    """p(positive) for each example, in input order, with a read-only parameter snapshot."""
    grounder = Grounder(store, samples_per_walk=samples_per_walk, seed=seed, cache=GroundingCache())
    return [forward(instantiate(walks, ex, store, grounder=grounder), params, mode).score for ex in examples]


def rule_weight_report(params: ModelParams, walks: Sequence[LiftedWalk]) -> pd.DataFrame:
    """
    Learned rules ranked by influence.

    Columns: rule, walk, weight (w_j), margin (u_j,pos - u_j,neg) and
    influence (|w_j| * |margin|); rules pruned to w_j = 0 sink to the bottom.
    """
    if len(walks) != params.num_rules:
        raise ValueError(f"{len(walks)} walks for {params.num_rules} rule weights")
    margin = params.u[:, Label.POSITIVE] - params.u[:, Label.NEGATIVE]
    report = pd.DataFrame({
        "rule": [walk.rule_id for walk in walks],
        "walk": [walk.body for walk in walks],
        "weight": params.w,
        "margin": margin,
        "influence": np.abs(params.w) * np.abs(margin),
    })
    return report.sort_values(["influence", "rule"], ascending=[False, True], kind="mergesort").reset_index(drop=True)
