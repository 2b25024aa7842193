"""
Ranking metrics over scored examples and the scores file they are read from.

AUC-ROC is the Mann-Whitney statistic (ties count one half). AUC-PR is the
step-curve area: a descending-score sweep with tied scores taken as one
group, summing precision times recall increment. Both come from
scikit-learn, which computes exactly these quantities.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from sklearn.metrics import average_precision_score, roc_auc_score

from relnet.errors import MetricUndefinedError, ParseError
from relnet.grounding.examples import Label
from relnet.output_utils import write_table

logger = logging.getLogger(__name__)

SCORES_COLUMNS = ["example_id", "score", "label"]


@dataclass(frozen=True)
class ScoredExample:
    score: float
    label: Label
    example_id: str = ""

    def __post_init__(self):
        if not np.isfinite(self.score):
            raise ValueError(f"Score of {self.example_id or 'example'} is not finite: {self.score}")


def _arrays(items: Sequence[ScoredExample]) -> Tuple[np.ndarray, np.ndarray]:
    labels = np.array([int(item.label) for item in items], dtype=np.int64)
    scores = np.array([item.score for item in items], dtype=np.float64)
    return labels, scores


def auc_roc(items: Sequence[ScoredExample]) -> float:
    """
    Area under the ROC curve.

    Raises:
        MetricUndefinedError: Unless both classes are present
    """
    labels, scores = _arrays(items)
    positives = int(labels.sum())
    if positives == 0 or positives == len(labels):
        raise MetricUndefinedError(f"AUC-ROC needs both classes, got {positives} positives of {len(labels)}")
    return float(roc_auc_score(labels, scores))


def auc_pr(items: Sequence[ScoredExample]) -> float:
    """
    Area under the precision-recall step curve.

    Raises:
        MetricUndefinedError: When there is no positive example
    """
    labels, scores = _arrays(items)
    if int(labels.sum()) == 0:
        raise MetricUndefinedError(f"AUC-PR needs at least one positive, got 0 of {len(labels)}")
    return float(average_precision_score(labels, scores))


def write_scores(items: Sequence[ScoredExample], path: Union[str, Path]) -> None:
    frame = pd.DataFrame(
        [(item.example_id, item.score, int(item.label)) for item in items],
        columns=SCORES_COLUMNS
    )
    write_table(frame, path)


def read_scores(path: Union[str, Path]) -> List[ScoredExample]:
    """
    Read a scores file (``example_id,score,label``, label 1 or 0).

    Raises:
        ParseError: Missing columns or labels other than 0/1
    """
    frame = pd.read_csv(path, dtype={"example_id": str})
    missing = [c for c in SCORES_COLUMNS if c not in frame.columns]
    if missing:
        raise ParseError(f"scores file lacks columns {missing}", source=str(path), line=1, column=1,
                         expected=",".join(SCORES_COLUMNS))
    bad = ~frame["label"].isin([0, 1])
    if bad.any():
        row = int(np.flatnonzero(bad.to_numpy())[0])
        raise ParseError(f"label must be 0 or 1, got {frame['label'].iloc[row]!r}", source=str(path),
                         line=row + 2, column=1, expected="0 or 1")
    return [
        ScoredExample(float(score), Label(int(label)), example_id)
        for example_id, score, label in frame[SCORES_COLUMNS].itertuples(index=False)
    ]


def evaluate_scores(items: Sequence[ScoredExample]) -> dict:
    """Both metrics with undefined ones reported as None."""
    results = {"n": len(items), "positives": sum(1 for i in items if i.label == Label.POSITIVE)}
    for name, metric in (("auc_roc", auc_roc), ("auc_pr", auc_pr)):
        try:
            results[name] = metric(items)
        except MetricUndefinedError as e:
            logger.warning(f"{name} undefined: {e}")
            results[name] = None
    return results
