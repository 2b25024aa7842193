"""
Command-line interface.

    relnet walks    generate (or check) rule templates for a target
    relnet ground   print the groundings of every walk for one example
    relnet train    train on a whole dataset and save the model
    relnet cv       k-fold cross-validation experiment (full pipeline)
    relnet predict  score an example file with a saved model
    relnet eval     AUC-ROC / AUC-PR of scores files
    relnet synth    write a planted-rule synthetic dataset
    relnet compare  cross-validate every combining rule
    relnet sweep    cross-validate several numbers of walks

Exit codes: 0 success, 2 configuration error, 3 parse/schema/type error,
4 runtime error. Errors are printed as ``error[<tag>]: <message>``.
"""

import functools
import logging
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import typer
from rich.console import Console
from rich.table import Table
from typing_extensions import Annotated

from relnet.config import ExperimentConfig, load_config
from relnet.errors import ConfigError, MetricUndefinedError, RelNetError
from relnet.evaluation.metrics import ScoredExample, evaluate_scores, read_scores, write_scores
from relnet.grounding.grounder import Grounder, format_grounding_dump
from relnet.logging_setup import setup_logging
from relnet.logic.binarize import RawDatabase, binarize
from relnet.logic.dataloading import example_from_text, parse_dataset, read_declarations, read_raw_atoms
from relnet.logic.fact_store import FactStore
from relnet.network.model_io import SavedModel, load_model, save_model
from relnet.network.params import CombinerMode
from relnet.output_utils import staged_output, write_table
from relnet.pipeline import ExperimentPipeline, compare_combiners, run_pipeline, sweep_num_walks
from relnet.synthetic import SyntheticSpec, generate_synthetic
from relnet.training.trainer import rule_weight_report, score_examples, train as train_model
from relnet.walks.schema_graph import build_schema_graph
from relnet.walks.walk_generation import generate_walks
from relnet.walks.walk_io import format_walks, read_walks, write_walks

logger = logging.getLogger(__name__)

app = typer.Typer(name="relnet", add_completion=False, no_args_is_help=True,
                  help="Relational neural networks from lifted random walks.")
console = Console()
err_console = Console(stderr=True)

# ========================================
# SHARED OPTIONS
# ========================================

ConfigOpt = Annotated[Optional[Path], typer.Option("--config", help="Flat key=value config file or manifest")]
TypesOpt = Annotated[Optional[Path], typer.Option("--types", help="Predicate declarations")]
FactsOpt = Annotated[Optional[Path], typer.Option("--facts", help="Evidence facts")]
PosOpt = Annotated[Optional[Path], typer.Option("--pos", help="Positive target atoms")]
NegOpt = Annotated[Optional[Path], typer.Option("--neg", help="Negative target atoms (generated if absent)")]
FoldsOpt = Annotated[Optional[Path], typer.Option("--folds", help="Fold assignment file")]
TargetOpt = Annotated[Optional[str], typer.Option("--target", help="Target predicate name")]
WalksOpt = Annotated[Optional[Path], typer.Option("--walks", help="Use these walks instead of generating")]
NumWalksOpt = Annotated[Optional[int], typer.Option("--num-walks", help="Number of walks M")]
MaxLenOpt = Annotated[Optional[int], typer.Option("--max-len", help="Maximum walk length")]
SamplesOpt = Annotated[Optional[int], typer.Option("--samples-per-walk", help="Groundings sampled per walk, 0 = all")]
CombinerOpt = Annotated[Optional[CombinerMode], typer.Option("--combiner", case_sensitive=False, help="Combining rule")]
LrOpt = Annotated[Optional[float], typer.Option("--lr", help="AdaGrad learning rate")]
L1Opt = Annotated[Optional[float], typer.Option("--l1", help="L1 strength")]
EpochsOpt = Annotated[Optional[int], typer.Option("--epochs", help="Passes over the training data")]
NegRatioOpt = Annotated[Optional[int], typer.Option("--neg-ratio", help="Negatives per positive")]
KOpt = Annotated[Optional[int], typer.Option("--k", help="Number of folds")]
WorkersOpt = Annotated[Optional[int], typer.Option("--workers", help="Folds run in parallel")]
SeedOpt = Annotated[Optional[int], typer.Option("--seed", help="Master seed")]
OutOpt = Annotated[Optional[Path], typer.Option("--out", help="Output directory")]
LogLevelOpt = Annotated[Optional[str], typer.Option("--log-level", help="DEBUG, INFO, WARNING or ERROR")]
LogFileOpt = Annotated[Optional[Path], typer.Option("--log-file", help="Also log to this file")]


def _handle_errors(func: Callable) -> Callable:
    """Map library errors to ``error[tag]`` messages and exit codes."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except typer.Exit:
            raise
        except RelNetError as e:
            err_console.print(f"error[{e.tag}]: {e}", markup=False, highlight=False)
            raise typer.Exit(e.exit_code)
        except FileNotFoundError as e:
            err_console.print(f"error[config]: {e}", markup=False, highlight=False)
            raise typer.Exit(ConfigError.exit_code)
        except Exception as e:
            logger.debug("Unexpected failure", exc_info=True)
            err_console.print(f"error[runtime]: {e}", markup=False, highlight=False)
            raise typer.Exit(RelNetError.exit_code)

    return wrapper


def _configure(config: Optional[Path], **overrides: Any) -> ExperimentConfig:
    cfg = load_config(config, overrides)
    setup_logging(cfg.log_level, cfg.log_file)
    return cfg


def _load_evidence(cfg: ExperimentConfig) -> FactStore:
    """Evidence only, for commands that work without example files."""
    cfg.require("types", "facts")
    raw_db = RawDatabase()
    for declaration in read_declarations(cfg.types):
        raw_db.declare(declaration)
    raw_db.atoms = read_raw_atoms(cfg.facts)
    return binarize(raw_db)


def _print_cv_table(title: str, rows: List[Dict[str, Any]], key: str) -> None:
    table = Table(title=title)
    for column in (key, "AUC-ROC", "AUC-PR"):
        table.add_column(column)
    for row in rows:
        table.add_row(
            str(row[key]),
            f"{row['auc_roc_mean']:.3f} ± {row['auc_roc_std']:.3f}",
            f"{row['auc_pr_mean']:.3f} ± {row['auc_pr_std']:.3f}",
        )
    console.print(table)


# ========================================
# COMMANDS
# ========================================


@app.command()
@_handle_errors
def walks(
    config: ConfigOpt = None, types: TypesOpt = None, target: TargetOpt = None, walks: WalksOpt = None,
    num_walks: NumWalksOpt = None, max_len: MaxLenOpt = None, seed: SeedOpt = None, out: OutOpt = None,
    log_level: LogLevelOpt = None, log_file: LogFileOpt = None,
):
    """Generate lifted random walks for the target and write walks.txt."""
    cfg = _configure(config, types=types, target=target, walks=walks, num_walks=num_walks, max_len=max_len,
                     seed=seed, out=out, log_level=log_level, log_file=log_file)
    cfg.require("types", "target")
    raw_db = RawDatabase()
    for declaration in read_declarations(cfg.types):
        raw_db.declare(declaration)
    store = binarize(raw_db)
    target_predicate = store.predicate(cfg.target)

    if cfg.walks is not None:
        found = read_walks(cfg.walks, store.declarations, target=target_predicate)
    else:
        graph = build_schema_graph(store.declarations)
        found = generate_walks(graph, target_predicate, cfg.num_walks, max_len=cfg.max_len, seed=cfg.seed)

    with staged_output(cfg.out) as staging:
        write_walks(found, staging / "walks.txt")
    console.print(format_walks(found), end="", markup=False, highlight=False)


@app.command()
@_handle_errors
def ground(
    example: Annotated[str, typer.Option("--example", help="Target atom, e.g. workedunder(leo,marty)")],
    config: ConfigOpt = None, types: TypesOpt = None, facts: FactsOpt = None, target: TargetOpt = None,
    walks: WalksOpt = None, num_walks: NumWalksOpt = None, max_len: MaxLenOpt = None,
    samples_per_walk: SamplesOpt = None, seed: SeedOpt = None,
    log_level: LogLevelOpt = None, log_file: LogFileOpt = None,
):
    """Print the groundings of every walk for one example (``j | a,b | c0;c1;...``)."""
    cfg = _configure(config, types=types, facts=facts, target=target, walks=walks, num_walks=num_walks,
                     max_len=max_len, samples_per_walk=samples_per_walk, seed=seed,
                     log_level=log_level, log_file=log_file)
    store = _load_evidence(cfg)
    target_name = cfg.target or example.split("(", 1)[0].strip()
    target_predicate = store.predicate(target_name)
    ex = example_from_text(example, target_predicate)
    store.add_constant(ex.arg1)
    store.add_constant(ex.arg2)
    store.freeze()

    if cfg.walks is not None:
        rules = read_walks(cfg.walks, store.declarations, target=target_predicate)
    else:
        rules = generate_walks(build_schema_graph(store.declarations), target_predicate, cfg.num_walks,
                               max_len=cfg.max_len, seed=cfg.seed)

    grounder = Grounder(store, samples_per_walk=cfg.samples_per_walk, seed=cfg.seed)
    grounding_sets = [grounder.ground(walk, ex) for walk in rules]
    console.print(format_grounding_dump(ex, grounding_sets), end="", markup=False, highlight=False)
    for grounding_set in grounding_sets:
        logger.info(f"walk {grounding_set.walk}: N={grounding_set.count}"
                    f"{' (truncated)' if grounding_set.truncated else ''}")


@app.command()
@_handle_errors
def train(
    config: ConfigOpt = None, types: TypesOpt = None, facts: FactsOpt = None, pos: PosOpt = None,
    neg: NegOpt = None, target: TargetOpt = None, walks: WalksOpt = None, num_walks: NumWalksOpt = None,
    max_len: MaxLenOpt = None, samples_per_walk: SamplesOpt = None, combiner: CombinerOpt = None,
    lr: LrOpt = None, l1: L1Opt = None, epochs: EpochsOpt = None, neg_ratio: NegRatioOpt = None,
    seed: SeedOpt = None, out: OutOpt = None, log_level: LogLevelOpt = None, log_file: LogFileOpt = None,
):
    """Train on all examples; write model.txt, rules.tsv, walks.txt and train_log.csv."""
    cfg = _configure(config, types=types, facts=facts, pos=pos, neg=neg, target=target, walks=walks,
                     num_walks=num_walks, max_len=max_len, samples_per_walk=samples_per_walk, combiner=combiner,
                     lr=lr, l1=l1, epochs=epochs, neg_ratio=neg_ratio, seed=seed, out=out,
                     log_level=log_level, log_file=log_file)
    pipeline = ExperimentPipeline(cfg)
    prepared = pipeline.prepare()
    with pipeline.stage("train"):
        result = train_model(prepared.dataset.store, prepared.walks, prepared.examples, pipeline.train_cfg,
                             progress=pipeline.progress)

    with staged_output(cfg.out) as staging:
        model = SavedModel(prepared.dataset.target, prepared.walks, result.params, cfg.combiner)
        save_model(model, staging / "model.txt")
        write_walks(prepared.walks, staging / "walks.txt")
        write_table(rule_weight_report(result.params, prepared.walks), staging / "rules.tsv", sep="\t")
        write_table(result.log_frame(), staging / "train_log.csv")
    console.print(f"Trained {len(prepared.walks)} rules on {len(prepared.examples)} examples -> {cfg.out}")


@app.command()
@_handle_errors
def cv(
    config: ConfigOpt = None, types: TypesOpt = None, facts: FactsOpt = None, pos: PosOpt = None,
    neg: NegOpt = None, folds: FoldsOpt = None, target: TargetOpt = None, walks: WalksOpt = None,
    num_walks: NumWalksOpt = None, max_len: MaxLenOpt = None, samples_per_walk: SamplesOpt = None,
    combiner: CombinerOpt = None, lr: LrOpt = None, l1: L1Opt = None, epochs: EpochsOpt = None,
    neg_ratio: NegRatioOpt = None, k: KOpt = None, workers: WorkersOpt = None, seed: SeedOpt = None,
    out: OutOpt = None, log_level: LogLevelOpt = None, log_file: LogFileOpt = None,
):
    """Run the full cross-validation experiment and write its artifacts."""
    cfg = _configure(config, types=types, facts=facts, pos=pos, neg=neg, folds=folds, target=target, walks=walks,
                     num_walks=num_walks, max_len=max_len, samples_per_walk=samples_per_walk, combiner=combiner,
                     lr=lr, l1=l1, epochs=epochs, neg_ratio=neg_ratio, k=k, workers=workers, seed=seed, out=out,
                     log_level=log_level, log_file=log_file)
    stats = run_pipeline(cfg)
    console.print(f"{stats['cv'].summary_line()} -> {stats['out']}")


@app.command()
@_handle_errors
def predict(
    model: Annotated[Path, typer.Option("--model", help="Model file written by train or cv")],
    config: ConfigOpt = None, types: TypesOpt = None, facts: FactsOpt = None, pos: PosOpt = None,
    neg: NegOpt = None, samples_per_walk: SamplesOpt = None, seed: SeedOpt = None, out: OutOpt = None,
    log_level: LogLevelOpt = None, log_file: LogFileOpt = None,
):
    """Score the examples of --pos (and --neg) with a saved model; write scores.csv."""
    cfg = _configure(config, types=types, facts=facts, pos=pos, neg=neg, samples_per_walk=samples_per_walk,
                     seed=seed, out=out, log_level=log_level, log_file=log_file)
    cfg.require("types", "facts", "pos")
    saved = load_model(model)
    dataset = parse_dataset(cfg.types, cfg.facts, cfg.pos, negatives_path=cfg.neg, target=saved.target.name)
    scores = score_examples(dataset.store, saved.walks, dataset.examples, saved.params, saved.combiner,
                            samples_per_walk=cfg.samples_per_walk, seed=cfg.seed)
    items = [ScoredExample(s, ex.label, ex.example_id) for s, ex in zip(scores, dataset.examples)]
    with staged_output(cfg.out) as staging:
        write_scores(items, staging / "scores.csv")
    console.print(f"Scored {len(items)} examples -> {Path(cfg.out) / 'scores.csv'}")


@app.command("eval")
@_handle_errors
def evaluate(
    scores: Annotated[List[Path], typer.Argument(help="Scores files (example_id,score,label)")],
    log_level: LogLevelOpt = None, log_file: LogFileOpt = None,
):
    """Print AUC-ROC and AUC-PR for each scores file."""
    setup_logging(log_level or "INFO", log_file)
    table = Table(title="Evaluation")
    for column in ("file", "n", "positives", "AUC-ROC", "AUC-PR"):
        table.add_column(column)
    undefined = False
    for path in scores:
        if not path.exists():
            raise ConfigError(f"Scores file not found: {path}")
        result = evaluate_scores(read_scores(path))
        undefined = undefined or result["auc_roc"] is None
        table.add_row(
            str(path), str(result["n"]), str(result["positives"]),
            "undefined" if result["auc_roc"] is None else f"{result['auc_roc']:.6f}",
            "undefined" if result["auc_pr"] is None else f"{result['auc_pr']:.6f}",
        )
    console.print(table)
    if undefined and len(scores) == 1:
        raise MetricUndefinedError(f"AUC-ROC is undefined for {scores[0]}: labels are single-class")


@app.command()
@_handle_errors
def synth(
    out: Annotated[Path, typer.Option("--out", help="Directory for the dataset files")],
    persons: Annotated[int, typer.Option("--persons")] = 20,
    movies: Annotated[int, typer.Option("--movies")] = 20,
    genres: Annotated[int, typer.Option("--genres")] = 10,
    noise: Annotated[float, typer.Option("--noise", help="Fraction of positives replaced by random pairs")] = 0.05,
    probability: Annotated[float, typer.Option("--probability", help="Firing probability of each planted rule")] = 0.9,
    control: Annotated[bool, typer.Option("--control", help="Random positives, no planted signal")] = False,
    seed: Annotated[int, typer.Option("--seed")] = 0,
    log_level: LogLevelOpt = None, log_file: LogFileOpt = None,
):
    """Write a planted-rule movie dataset (types, facts, positives, truth walks)."""
    setup_logging(log_level or "INFO", log_file)
    spec = SyntheticSpec(
        num_persons=persons, num_movies=movies, num_genres=genres, noise=noise, control=control, seed=seed,
        rules={body: probability for body in SyntheticSpec().rules},
    )
    paths = generate_synthetic(spec, out)
    console.print(f"Wrote {', '.join(p.name for p in paths.values())} to {out}")


@app.command()
@_handle_errors
def compare(
    config: ConfigOpt = None, types: TypesOpt = None, facts: FactsOpt = None, pos: PosOpt = None,
    neg: NegOpt = None, folds: FoldsOpt = None, target: TargetOpt = None, walks: WalksOpt = None,
    num_walks: NumWalksOpt = None, max_len: MaxLenOpt = None, samples_per_walk: SamplesOpt = None,
    lr: LrOpt = None, l1: L1Opt = None, epochs: EpochsOpt = None, neg_ratio: NegRatioOpt = None,
    k: KOpt = None, workers: WorkersOpt = None, seed: SeedOpt = None, out: OutOpt = None,
    log_level: LogLevelOpt = None, log_file: LogFileOpt = None,
):
    """Cross-validate the average, max and noisy-or combiners on identical folds."""
    cfg = _configure(config, types=types, facts=facts, pos=pos, neg=neg, folds=folds, target=target, walks=walks,
                     num_walks=num_walks, max_len=max_len, samples_per_walk=samples_per_walk, lr=lr, l1=l1,
                     epochs=epochs, neg_ratio=neg_ratio, k=k, workers=workers, seed=seed, out=out,
                     log_level=log_level, log_file=log_file)
    frame = compare_combiners(cfg)
    with staged_output(cfg.out) as staging:
        write_table(frame, staging / "comparison.csv")
    _print_cv_table("Combining rules", frame.to_dict("records"), "combiner")


@app.command()
@_handle_errors
def sweep(
    values: Annotated[str, typer.Option("--values", help="Comma-separated walk counts, e.g. 5,10,20")],
    config: ConfigOpt = None, types: TypesOpt = None, facts: FactsOpt = None, pos: PosOpt = None,
    neg: NegOpt = None, folds: FoldsOpt = None, target: TargetOpt = None, max_len: MaxLenOpt = None,
    samples_per_walk: SamplesOpt = None, combiner: CombinerOpt = None, lr: LrOpt = None, l1: L1Opt = None,
    epochs: EpochsOpt = None, neg_ratio: NegRatioOpt = None, k: KOpt = None, workers: WorkersOpt = None,
    seed: SeedOpt = None, out: OutOpt = None, log_level: LogLevelOpt = None, log_file: LogFileOpt = None,
):
    """Cross-validate for several numbers of walks (nested walk lists)."""
    try:
        counts = [int(v) for v in values.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"--values must be comma-separated integers, got {values!r}") from None
    cfg = _configure(config, types=types, facts=facts, pos=pos, neg=neg, folds=folds, target=target,
                     max_len=max_len, samples_per_walk=samples_per_walk, combiner=combiner, lr=lr, l1=l1,
                     epochs=epochs, neg_ratio=neg_ratio, k=k, workers=workers, seed=seed, out=out,
                     log_level=log_level, log_file=log_file)
    frame = sweep_num_walks(cfg, counts)
    with staged_output(cfg.out) as staging:
        write_table(frame, staging / "sweep.csv")
    _print_cv_table("Number of walks", frame.to_dict("records"), "num_walks")


def main() -> None:
    app()


if __name__ == "__main__":
    main()
