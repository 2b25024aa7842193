"""
Dataset loading and writing for relational benchmarks.

File formats (one item per line, ``%`` outside quotes starts a comment):

    types      pred(Type1,Type2)           arity 1-3, trailing period optional
    facts      pred(arg1,arg2).            arity 1-3, trailing period required
    examples   target(arg1,arg2).          positives or negatives file
    folds      <fold-index> target(a,b)    optional fold assignment

Constants are identifiers or double-quoted strings.
"""

import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, Tuple, Union

import pyparsing as pp

from relnet.errors import ParseError, SchemaError
from relnet.grounding.examples import Label, TargetExample
from relnet.logic.atoms import Constant, Predicate
from relnet.logic.binarize import RawAtom, RawDatabase, RawDeclaration, binarize
from relnet.logic.fact_store import FactStore

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

_PLAIN_SYMBOL = re.compile(r"[A-Za-z0-9_][A-Za-z0-9_\-]*\Z")
_EXPECTED = re.compile(r"Expected (.+?)(?:, found.*)?$")
_COMMENT = re.compile(r'"(?:[^"\\\n]|\\.)*"|%.*')


def _grammar(period: str) -> pp.ParserElement:
    """``name(term, ...)`` followed by a required, optional or absent period."""
    name = pp.Regex(r"[A-Za-z_][A-Za-z0-9_\-]*").set_name("predicate name")
    term = (pp.QuotedString('"', esc_char="\\") | pp.Regex(r"[A-Za-z0-9_][A-Za-z0-9_\-]*")).set_name("constant")
    arguments = pp.Group(pp.DelimitedList(term, min=1)).set_name("arguments")
    atom = name("name") + pp.Suppress("(") + arguments("args") + pp.Suppress(")").set_name("')'")
    if period == "required":
        return atom + pp.Suppress(".").set_name("'.'")
    if period == "optional":
        return atom + pp.Optional(pp.Suppress("."))
    return atom


_FACT = _grammar("required")
_DECL = _grammar("optional")
_FOLD = pp.Word(pp.nums)("fold") + _grammar("optional")


def _drop_comment(match: re.Match) -> str:
    token = match.group()
    return "" if token.startswith("%") else token


def _content_lines(path: PathLike) -> Iterator[Tuple[int, str, int]]:
    """Yield (line number, text without comment, column offset) for non-empty lines."""
    with open(path, "r", encoding="utf-8") as handle:
        for number, raw in enumerate(handle, start=1):
            text = _COMMENT.sub(_drop_comment, raw).rstrip()
            stripped = text.lstrip()
            if stripped:
                yield number, stripped, len(text) - len(stripped)


def _parse_line(grammar: pp.ParserElement, text: str, source: str, line: int, offset: int) -> pp.ParseResults:
    try:
        return grammar.parse_string(text, parse_all=True)
    except pp.ParseException as e:
        expected = None
        message = str(e.msg)
        if message.startswith("Expected "):
            expected = _EXPECTED.match(message).group(1)
        raise ParseError(message, source=source, line=line, column=e.col + offset, expected=expected) from None


def format_symbol(symbol: str) -> str:
    """Constant as written in data files; quoted unless it is a plain identifier."""
    if _PLAIN_SYMBOL.match(symbol):
        return symbol
    escaped = symbol.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def format_atom(name: str, symbols: Iterable[str], period: bool = True) -> str:
    text = f"{name}({','.join(format_symbol(s) for s in symbols)})"
    return f"{text}." if period else text


# ----------------------------------------------------------------------
# readers
# ----------------------------------------------------------------------

def read_declarations(path: PathLike) -> List[RawDeclaration]:
    """
    Read a types file.

    Args:
        path: File with one ``pred(Type1,...)`` per line

    Returns:
        List[RawDeclaration]: Signatures in file order
    """
    declarations = []
    for line, text, offset in _content_lines(path):
        result = _parse_line(_DECL, text, str(path), line, offset)
        declarations.append(RawDeclaration(result["name"], tuple(result["args"])))
    logger.debug(f"Read {len(declarations)} declarations from {path}")
    return declarations


def read_raw_atoms(path: PathLike) -> List[RawAtom]:
    """Read a facts or examples file without interpreting types."""
    atoms = []
    for line, text, offset in _content_lines(path):
        result = _parse_line(_FACT, text, str(path), line, offset)
        atoms.append(RawAtom(result["name"], tuple(result["args"]), line=line))
    return atoms


def read_examples(path: PathLike, target: Predicate, label: Label) -> List[TargetExample]:
    """
    Read labelled examples of the target predicate.

    Args:
        path: Examples file
        target: Declared binary target
        label: Label given to every example in the file

    Returns:
        List[TargetExample]: Distinct examples in file order
    """
    examples: List[TargetExample] = []
    seen = set()
    for raw in read_raw_atoms(path):
        if raw.name != target.name:
            raise SchemaError(f"{path}:{raw.line}: expected a {target.name} atom, got {raw.name}")
        if len(raw.args) != 2:
            raise SchemaError(f"{path}:{raw.line}: target atoms must have two arguments")
        example = TargetExample(
            target,
            Constant(raw.args[0], target.arg1_type),
            Constant(raw.args[1], target.arg2_type),
            label
        )
        if example.example_id in seen:
            continue
        seen.add(example.example_id)
        examples.append(example)
    return examples


def read_folds(path: PathLike) -> Dict[str, int]:
    """
    Read a fold assignment file.

    Returns:
        Dict[str, int]: example id -> fold index
    """
    folds: Dict[str, int] = {}
    for line, text, offset in _content_lines(path):
        result = _parse_line(_FOLD, text, str(path), line, offset)
        example_id = f"{result['name']}({','.join(result['args'])})"
        folds[example_id] = int(result["fold"])
    return folds


# ----------------------------------------------------------------------
# writers
# ----------------------------------------------------------------------

def write_declarations(predicates: Iterable[Predicate], path: PathLike) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for predicate in sorted(set(p.base for p in predicates)):
            handle.write(f"{predicate.name}({predicate.arg1_type},{predicate.arg2_type})\n")


def write_facts(store: FactStore, path: PathLike) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for fact in store.facts():
            handle.write(format_atom(fact.predicate.name, (fact.arg1.symbol, fact.arg2.symbol)) + "\n")


def write_examples(examples: Iterable[TargetExample], path: PathLike) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for example in examples:
            handle.write(format_atom(example.target.name, (example.arg1.symbol, example.arg2.symbol)) + "\n")


# ----------------------------------------------------------------------
# loader
# ----------------------------------------------------------------------

@dataclass
class Dataset:
    """Evidence plus labelled target examples."""

    store: FactStore
    target: Predicate
    examples: List[TargetExample]
    folds: Optional[Dict[str, int]] = None

    @property
    def positives(self) -> List[TargetExample]:
        return [e for e in self.examples if e.is_positive]

    @property
    def negatives(self) -> List[TargetExample]:
        return [e for e in self.examples if not e.is_positive]


class RelationalDataLoader:
    """
    Loader for a relational dataset given as text files.

    Non-binary relations are routed through binarize(); example constants
    are registered in the store so negative sampling can use them.
    """

    def __init__(
        self,
        types_path: PathLike,
        facts_path: PathLike,
        positives_path: PathLike,
        negatives_path: Optional[PathLike] = None,
        folds_path: Optional[PathLike] = None,
        target: Optional[str] = None
    ):
        """
        Initialize the RelationalDataLoader.

        Args:
            types_path: Predicate declarations
            facts_path: Evidence atoms
            positives_path: Positive target atoms
            negatives_path: Negative target atoms (generated later if absent)
            folds_path: Fold assignment (stratified folds are drawn if absent)
            target: Target predicate name; inferred from the positives if omitted
        """
        self.types_path = Path(types_path)
        self.facts_path = Path(facts_path)
        self.positives_path = Path(positives_path)
        self.negatives_path = Path(negatives_path) if negatives_path else None
        self.folds_path = Path(folds_path) if folds_path else None
        self.target_name = target

    def _resolve_target(self, raw_db: RawDatabase) -> Predicate:
        name = self.target_name
        if name is None:
            names = {raw.name for raw in read_raw_atoms(self.positives_path)}
            if len(names) != 1:
                raise SchemaError(f"Cannot infer the target predicate from {self.positives_path}: found {sorted(names)}")
            name = names.pop()
        declaration = raw_db.declarations.get(name)
        if declaration is None:
            raise SchemaError(f"Target predicate {name} is not declared in {self.types_path}")
        if declaration.arity != 2:
            raise SchemaError(f"Target predicate {name} must be binary, declared with arity {declaration.arity}")
        return Predicate(name, declaration.arg_types[0], declaration.arg_types[1])

    def load(self) -> Dataset:
        """
        Parse all files and build the frozen evidence store.

        Returns:
            Dataset: Store, target predicate, examples and optional folds
        """
        for path in (self.types_path, self.facts_path, self.positives_path, self.negatives_path, self.folds_path):
            if path is not None and not path.exists():
                raise FileNotFoundError(f"Dataset file not found: {path}")

        try:
            raw_db = RawDatabase()
            for declaration in read_declarations(self.types_path):
                raw_db.declare(declaration)
            raw_db.atoms = read_raw_atoms(self.facts_path)

            target = self._resolve_target(raw_db)
            store = binarize(raw_db)

            examples = read_examples(self.positives_path, target, Label.POSITIVE)
            if self.negatives_path is not None:
                examples += read_examples(self.negatives_path, target, Label.NEGATIVE)
            self._check_disjoint(examples)

            for example in examples:
                store.add_constant(example.arg1)
                store.add_constant(example.arg2)
            store.freeze()

            folds = read_folds(self.folds_path) if self.folds_path is not None else None

            positives = sum(1 for e in examples if e.is_positive)
            logger.info(
                f"Loaded dataset: {len(store)} facts, target {target}, "
                f"{positives} positives, {len(examples) - positives} negatives"
            )
            return Dataset(store=store, target=target, examples=examples, folds=folds)

        except (ParseError, SchemaError) as e:
            logger.error(f"Error parsing dataset: {e}")
            raise

    @staticmethod
    def _check_disjoint(examples: List[TargetExample]) -> None:
        labels: Dict[str, Label] = {}
        for example in examples:
            previous = labels.setdefault(example.example_id, example.label)
            if previous != example.label:
                raise SchemaError(f"Example {example.example_id} is listed as both positive and negative")


def parse_dataset(
    types_path: PathLike,
    facts_path: PathLike,
    positives_path: PathLike,
    negatives_path: Optional[PathLike] = None,
    folds_path: Optional[PathLike] = None,
    target: Optional[str] = None
) -> Dataset:
    """Load a dataset from its files; see RelationalDataLoader."""
    return RelationalDataLoader(
        types_path, facts_path, positives_path, negatives_path, folds_path, target
    ).load()


def save_dataset(dataset: Dataset, directory: PathLike) -> Dict[str, Path]:
    """
    Write a dataset back in the file formats above (binary predicates only).

    Returns:
        Dict[str, Path]: Paths of the written files keyed by role
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = {
        "types": directory / "types.txt",
        "facts": directory / "facts.txt",
        "positives": directory / "pos.txt",
        "negatives": directory / "neg.txt",
    }
    write_declarations(list(dataset.store.declarations) + [dataset.target], paths["types"])
    write_facts(dataset.store, paths["facts"])
    write_examples(dataset.positives, paths["positives"])
    write_examples(dataset.negatives, paths["negatives"])
    return paths


def example_from_text(text: str, target: Predicate, label: Label = Label.POSITIVE) -> TargetExample:
    """Parse a single ``target(a,b)`` string, e.g. from the command line."""
    result = _parse_line(_DECL, text.strip(), "<argument>", 1, 0)
    if result["name"] != target.name or len(result["args"]) != 2:
        raise SchemaError(f"Expected a {target.name}(a,b) atom, got {text}")
    return TargetExample(
        target,
        Constant(result["args"][0], target.arg1_type),
        Constant(result["args"][1], target.arg2_type),
        label
    )

