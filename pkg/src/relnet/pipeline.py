"""
End-to-end experiment pipeline: load -> walks -> negatives -> cross-validation
-> artifacts. Every stage failure is re-raised as PipelineStageError tagged
with the stage name; outputs are committed only when all stages succeed.
"""

import logging
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Sequence

import pandas as pd

from relnet.config import ExperimentConfig
from relnet.errors import PipelineStageError, RelNetError
from relnet.evaluation.metrics import write_scores
from relnet.grounding.examples import TargetExample
from relnet.logging_setup import progress_enabled
from relnet.logic.dataloading import Dataset, parse_dataset, write_examples
from relnet.network.model_io import SavedModel, save_model
from relnet.network.params import CombinerMode
from relnet.output_utils import staged_output, write_table, write_text
from relnet.training.cross_validation import CVResult, cross_validate
from relnet.training.negatives import generate_negatives
from relnet.training.trainer import TrainResult, rule_weight_report
from relnet.walks.schema_graph import build_schema_graph
from relnet.walks.walk_generation import LiftedWalk, generate_walks
from relnet.walks.walk_io import read_walks, write_walks

logger = logging.getLogger(__name__)

BANNER = "=" * 60


@dataclass
class PreparedExperiment:
    """Dataset, rule templates and full example list, ready for training."""

    dataset: Dataset
    walks: List[LiftedWalk]
    examples: List[TargetExample]
    generated_negatives: List[TargetExample]


class ExperimentPipeline:
    """
    Runs one cross-validation experiment from its configuration.

    The stages can also be called one by one (the CLI subcommands do).
    """

    def __init__(self, cfg: ExperimentConfig, progress: Optional[bool] = None):
        """
        Initialize the experiment pipeline.

        Args:
            cfg: Validated experiment configuration
            progress: Show progress bars; defaults to "log level is INFO or lower"
        """
        self.cfg = cfg
        self.train_cfg = cfg.train_config()
        self.progress = progress_enabled() if progress is None else progress

    @contextmanager
    def stage(self, name: str) -> Iterator[None]:
        logger.info(f"Stage '{name}'...")
        try:
            yield
        except PipelineStageError:
            raise
        except Exception as e:
            logger.error(f"Stage '{name}' failed: {e}")
            raise PipelineStageError(name, e) from e

    # ------------------------------------------------------------------
    # stages
    # ------------------------------------------------------------------

    def load_dataset(self) -> Dataset:
        with self.stage("load"):
            self.cfg.require("types", "facts", "pos")
            return parse_dataset(
                self.cfg.types, self.cfg.facts, self.cfg.pos,
                negatives_path=self.cfg.neg, folds_path=self.cfg.folds, target=self.cfg.target
            )

    def build_walks(self, dataset: Dataset, num_walks: Optional[int] = None) -> List[LiftedWalk]:
        """User walks from cfg.walks, otherwise num_walks generated ones."""
        with self.stage("walks"):
            if self.cfg.walks is not None:
                walks = read_walks(self.cfg.walks, dataset.store.declarations, target=dataset.target)
            else:
                graph = build_schema_graph(dataset.store.declarations)
                walks = generate_walks(
                    graph, dataset.target, num_walks or self.cfg.num_walks,
                    max_len=self.cfg.max_len, seed=self.cfg.seed
                )
            if not walks:
                raise RelNetError(f"No usable walks for target {dataset.target}")
            return walks

    def ensure_negatives(self, dataset: Dataset) -> List[TargetExample]:
        """Negatives generated when the dataset has none; [] otherwise."""
        with self.stage("negatives"):
            if dataset.negatives:
                return []
            return generate_negatives(
                dataset.store, dataset.target, dataset.positives,
                ratio=self.cfg.neg_ratio, seed=self.cfg.seed
            )

    def prepare(self) -> PreparedExperiment:
        dataset = self.load_dataset()
        walks = self.build_walks(dataset)
        generated = self.ensure_negatives(dataset)
        return PreparedExperiment(dataset, walks, dataset.examples + generated, generated)

    def run_cv(self, prepared: PreparedExperiment, walks: Optional[Sequence[LiftedWalk]] = None,
               combiner: Optional[CombinerMode] = None) -> CVResult:
        with self.stage("cv"):
            train_cfg = self.train_cfg
            if combiner is not None:
                train_cfg = train_cfg.model_copy(update={"combiner": combiner})
            return cross_validate(
                prepared.dataset.store,
                list(walks if walks is not None else prepared.walks),
                prepared.examples,
                train_cfg,
                k=self.cfg.k,
                fold_file=prepared.dataset.folds,
                workers=self.cfg.workers,
                progress=self.progress,
            )

    def write_outputs(self, staging: Path, prepared: PreparedExperiment, cv: CVResult) -> Dict[str, Path]:
        """Write walks, negatives, per-fold artifacts, results and manifest into ``staging``."""
        with self.stage("write"):
            paths = {
                "walks": staging / "walks.txt",
                "results": staging / "results.csv",
                "manifest": staging / "manifest.txt",
            }
            write_walks(prepared.walks, paths["walks"])
            if prepared.generated_negatives:
                paths["negatives"] = staging / "neg_generated.txt"
                write_examples(prepared.generated_negatives, paths["negatives"])

            for fold in cv.folds:
                fold_dir = staging / f"fold_{fold.fold}"
                fold_dir.mkdir()
                model = SavedModel(prepared.dataset.target, prepared.walks, fold.params, self.cfg.combiner)
                save_model(model, fold_dir / "model.txt")
                write_table(rule_weight_report(fold.params, prepared.walks), fold_dir / "rules.tsv", sep="\t")
                write_scores(fold.scores, fold_dir / "scores.csv")
                write_table(TrainResult(fold.params, fold.log).log_frame(), fold_dir / "train_log.csv")

            write_table(cv.to_frame(), paths["results"])
            write_text(self.cfg.to_manifest(), paths["manifest"])
            return paths

    # ------------------------------------------------------------------
    # full run
    # ------------------------------------------------------------------

    def run_full_pipeline(self) -> Dict[str, Any]:
        """
        Run the complete experiment and commit its artifacts to cfg.out.

        Returns:
            Dict: Pipeline statistics and the cross-validation result
        """
        logger.info(BANNER)
        logger.info("STARTING RELNET EXPERIMENT")
        logger.info(BANNER)

        stats: Dict[str, Any] = {"status": "running", "steps_completed": 0, "total_steps": 5}
        try:
            with staged_output(self.cfg.out) as staging:
                dataset = self.load_dataset()
                stats["facts"] = len(dataset.store)
                stats["steps_completed"] += 1

                walks = self.build_walks(dataset)
                stats["walks"] = len(walks)
                stats["steps_completed"] += 1

                generated = self.ensure_negatives(dataset)
                prepared = PreparedExperiment(dataset, walks, dataset.examples + generated, generated)
                stats["positives"] = len(dataset.positives)
                stats["negatives"] = len(prepared.examples) - len(dataset.positives)
                stats["steps_completed"] += 1

                cv = self.run_cv(prepared)
                stats["steps_completed"] += 1

                self.write_outputs(staging, prepared, cv)
                stats["steps_completed"] += 1
        except PipelineStageError as e:
            stats["status"] = "failed"
            logger.error(f"Experiment failed in stage '{e.stage}': {e.cause}")
            raise

        stats["status"] = "completed_successfully"
        stats["cv"] = cv
        stats["out"] = Path(self.cfg.out)

        logger.info(BANNER)
        logger.info("EXPERIMENT COMPLETED SUCCESSFULLY!")
        logger.info(BANNER)
        logger.info(f"Facts: {stats['facts']}")
        logger.info(f"Walks: {stats['walks']}")
        logger.info(f"Examples: {stats['positives']} positive, {stats['negatives']} negative")
        logger.info(f"Result: {cv.summary_line()}")
        logger.info(f"Outputs: {self.cfg.out}")
        logger.info(BANNER)
        return stats


def run_pipeline(cfg: ExperimentConfig) -> Dict[str, Any]:
    return ExperimentPipeline(cfg).run_full_pipeline()


def _summary_row(label: str, value: Any, cv: CVResult) -> Dict[str, Any]:
    return {
        label: value,
        "auc_roc_mean": cv.mean_auc_roc,
        "auc_roc_std": cv.std_auc_roc,
        "auc_pr_mean": cv.mean_auc_pr,
        "auc_pr_std": cv.std_auc_pr,
    }


def compare_combiners(cfg: ExperimentConfig, modes: Sequence[CombinerMode] = tuple(CombinerMode)) -> pd.DataFrame:
    """
    Cross-validate every combining rule on the same walks, negatives and folds.

    Returns:
        pd.DataFrame: One row per mode with mean and std of both metrics
    """
    pipeline = ExperimentPipeline(cfg)
    prepared = pipeline.prepare()
    rows = []
    for mode in modes:
        logger.info(f"Combiner {mode.value}")
        cv = pipeline.run_cv(prepared, combiner=mode)
        rows.append(_summary_row("combiner", mode.value, cv))
    return pd.DataFrame(rows)


def sweep_num_walks(cfg: ExperimentConfig, values: Sequence[int]) -> pd.DataFrame:
    """
    Cross-validate for several numbers of walks.

    Walk lists are prefixes of one generation with the largest value, so
    smaller settings are nested in larger ones.

    Returns:
        pd.DataFrame: One row per requested M (num_walks is the count actually used)
    """
    if not values or min(values) < 1:
        raise ValueError("sweep_num_walks needs positive walk counts")
    pipeline = ExperimentPipeline(cfg)
    dataset = pipeline.load_dataset()
    walks = pipeline.build_walks(dataset, num_walks=max(values))
    generated = pipeline.ensure_negatives(dataset)
    prepared = PreparedExperiment(dataset, walks, dataset.examples + generated, generated)

    rows = []
    for value in sorted(set(values)):
        prefix = walks[:value]
        logger.info(f"Sweep: {len(prefix)} walks")
        cv = pipeline.run_cv(prepared, walks=prefix)
        row = _summary_row("requested", value, cv)
        row["num_walks"] = len(prefix)
        rows.append(row)
    return pd.DataFrame(rows)
