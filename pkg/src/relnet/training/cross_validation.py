"""
k-fold cross-validation: stratified seeded folds, per-fold training and
held-out scoring, aggregate mean and sample standard deviation.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np
import pandas as pd
from tqdm import tqdm

from relnet.errors import ConfigError, MetricUndefinedError
from relnet.evaluation.metrics import ScoredExample, auc_pr, auc_roc
from relnet.grounding.examples import TargetExample
from relnet.logic.fact_store import FactStore
from relnet.network.params import ModelParams
from relnet.seeding import rng_for
from relnet.training.trainer import TrainConfig, TrainingStep, score_examples, train
from relnet.walks.walk_generation import LiftedWalk

logger = logging.getLogger(__name__)

RESULT_COLUMNS = ["fold", "n_train", "n_test", "auc_roc", "auc_pr"]


def _round_robin(examples: Sequence[TargetExample], fold_ids: Sequence[int], seed: int) -> Dict[str, int]:
    """Canonical order, per-class seeded shuffle, positives then negatives dealt round-robin."""
    rng = rng_for(seed, "folds")
    positives = sorted((e for e in examples if e.is_positive), key=TargetExample.sort_key)
    negatives = sorted((e for e in examples if not e.is_positive), key=TargetExample.sort_key)
    dealt = [positives[int(i)] for i in rng.permutation(len(positives))]
    dealt += [negatives[int(i)] for i in rng.permutation(len(negatives))]
    return {ex.example_id: fold_ids[i % len(fold_ids)] for i, ex in enumerate(dealt)}


def assign_folds(
    examples: Sequence[TargetExample],
    k: int = 5,
    seed: int = 0,
    fold_file: Optional[Mapping[str, int]] = None
) -> Dict[str, int]:
    """
    Map every example id to a fold.

    Args:
        examples: All labelled examples
        k: Number of folds (ignored when a fold file is given)
        seed: Master seed (stream "folds")
        fold_file: Fixed assignment read with read_folds; examples it does
            not list are dealt stratified over its folds

    Returns:
        Dict[str, int]: example_id -> fold index
    """
    if fold_file:
        fold_ids = sorted(set(fold_file.values()))
        if len(fold_ids) < 2:
            raise ConfigError(f"Fold file defines {len(fold_ids)} fold(s); at least 2 are needed")
        known = {e.example_id for e in examples}
        stray = sorted(set(fold_file) - known)
        if stray:
            logger.warning(f"Fold file lists {len(stray)} unknown examples, e.g. {stray[0]}")
        missing = [e for e in examples if e.example_id not in fold_file]
        assignment = {e.example_id: fold_file[e.example_id] for e in examples if e.example_id in fold_file}
        if missing:
            logger.warning(f"{len(missing)} examples are not in the fold file; dealing them over its folds")
            assignment.update(_round_robin(missing, fold_ids, seed))
        return assignment

    if k < 2:
        raise ConfigError(f"Cross-validation needs k >= 2, got {k}")
    if len(examples) < k:
        raise ConfigError(f"{len(examples)} examples cannot fill {k} folds")
    return _round_robin(examples, list(range(k)), seed)


@dataclass
class FoldResult:
    fold: int
    n_train: int
    n_test: int
    auc_roc: Optional[float]
    auc_pr: Optional[float]
    scores: List[ScoredExample] = field(default_factory=list)
    params: Optional[ModelParams] = None
    log: List[TrainingStep] = field(default_factory=list)


def _summary(values: List[Optional[float]]) -> tuple:
    defined = np.array([v for v in values if v is not None], dtype=np.float64)
    if defined.size == 0:
        return float("nan"), float("nan")
    mean = float(np.mean(defined))
    std = float(np.std(defined, ddof=1)) if defined.size > 1 else float("nan")
    return mean, std


@dataclass
class CVResult:
    """Per-fold results plus aggregates over folds where a metric is defined."""

    folds: List[FoldResult]

    @property
    def mean_auc_roc(self) -> float:
        return _summary([f.auc_roc for f in self.folds])[0]

    @property
    def std_auc_roc(self) -> float:
        return _summary([f.auc_roc for f in self.folds])[1]

    @property
    def mean_auc_pr(self) -> float:
        return _summary([f.auc_pr for f in self.folds])[0]

    @property
    def std_auc_pr(self) -> float:
        return _summary([f.auc_pr for f in self.folds])[1]

    def to_frame(self) -> pd.DataFrame:
        rows = [
            (str(f.fold), f.n_train, f.n_test,
             np.nan if f.auc_roc is None else f.auc_roc,
             np.nan if f.auc_pr is None else f.auc_pr)
            for f in self.folds
        ]
        n_train = float(np.mean([f.n_train for f in self.folds]))
        n_test = float(np.mean([f.n_test for f in self.folds]))
        rows.append(("mean", n_train, n_test, self.mean_auc_roc, self.mean_auc_pr))
        rows.append(("std", np.nan, np.nan, self.std_auc_roc, self.std_auc_pr))
        return pd.DataFrame(rows, columns=RESULT_COLUMNS)

    def summary_line(self) -> str:
        return (
            f"AUC-ROC {self.mean_auc_roc:.3f} ± {self.std_auc_roc:.3f}, "
            f"AUC-PR {self.mean_auc_pr:.3f} ± {self.std_auc_pr:.3f}"
        )


def _metric(name: str, metric, items: List[ScoredExample], fold: int) -> Optional[float]:
    try:
        return metric(items)
    except MetricUndefinedError as e:
        logger.warning(f"Fold {fold}: {name} undefined ({e})")
        return None


def run_fold(
    store: FactStore,
    walks: Sequence[LiftedWalk],
    train_set: Sequence[TargetExample],
    test_set: Sequence[TargetExample],
    cfg: TrainConfig,
    fold: int
) -> FoldResult:
    """Train on one split and score its held-out part."""
    result = train(store, walks, train_set, cfg, run_id=fold)
    ordered = sorted(test_set, key=TargetExample.sort_key)
    scores = score_examples(store, walks, ordered, result.params, cfg.combiner,
                            samples_per_walk=cfg.samples_per_walk, seed=cfg.seed)
    items = [ScoredExample(s, ex.label, ex.example_id) for s, ex in zip(scores, ordered)]
    fold_result = FoldResult(
        fold=fold,
        n_train=len(train_set),
        n_test=len(ordered),
        auc_roc=_metric("AUC-ROC", auc_roc, items, fold),
        auc_pr=_metric("AUC-PR", auc_pr, items, fold),
        scores=items,
        params=result.params,
        log=result.log,
    )
    logger.info(f"Fold {fold}: train {fold_result.n_train}, test {fold_result.n_test}, "
                f"AUC-ROC {fold_result.auc_roc}, AUC-PR {fold_result.auc_pr}")
    return fold_result


def cross_validate(
    store: FactStore,
    walks: Sequence[LiftedWalk],
    examples: Sequence[TargetExample],
    cfg: TrainConfig,
    k: int = 5,
    fold_file: Optional[Mapping[str, int]] = None,
    workers: int = 1,
    progress: bool = False
) -> CVResult:
    """
    k-fold cross-validation.

    Folds run on a thread pool of ``workers`` threads; each fold trains
    sequentially on an immutable store, so results do not depend on the
    worker count.

    Returns:
        CVResult: Folds in ascending fold order
    """
    assignment = assign_folds(examples, k=k, seed=cfg.seed, fold_file=fold_file)
    fold_ids = sorted(set(assignment.values()))
    splits = []
    for fold in fold_ids:
        test_set = [e for e in examples if assignment[e.example_id] == fold]
        train_set = [e for e in examples if assignment[e.example_id] != fold]
        if not train_set or not test_set:
            raise ConfigError(f"Fold {fold} leaves an empty train or test split")
        splits.append((fold, train_set, test_set))

    logger.info(f"Cross-validating over {len(fold_ids)} folds with {workers} worker(s)")
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        futures = [pool.submit(run_fold, store, walks, tr, te, cfg, fold) for fold, tr, te in splits]
        results = [f.result() for f in tqdm(futures, desc="folds", disable=not progress)]

    cv = CVResult(sorted(results, key=lambda r: r.fold))
    logger.info(f"Cross-validation: {cv.summary_line()}")
    return cv
