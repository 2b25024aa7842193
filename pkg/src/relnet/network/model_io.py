"""
Model file: a versioned, line-oriented text format.

    relnet-model 1
    target workedunder Person Person
    combiner average
    classes 2
    declare actedin Person Movie
    rules 2
    rule 1 actedin ; directed^-1
    w <M floats>
    u <j> <C floats>           one line per rule
    b <C floats>

Floats are written with repr() so a load reproduces every bit.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np

from relnet.errors import ParseError, SchemaError
from relnet.logic.atoms import Predicate
from relnet.network.params import CombinerMode, ModelParams
from relnet.walks.walk_generation import LiftedWalk, validate_walk
from relnet.walks.walk_io import parse_walk_line

logger = logging.getLogger(__name__)

FORMAT_NAME = "relnet-model"
FORMAT_VERSION = 1


@dataclass
class SavedModel:
    """Everything needed to score new examples."""

    target: Predicate
    walks: List[LiftedWalk]
    params: ModelParams
    combiner: CombinerMode

    @property
    def declarations(self) -> List[Predicate]:
        return sorted({p.base for walk in self.walks for p in walk.chain})


def _floats(values: Sequence[float]) -> str:
    return " ".join(repr(float(v)) for v in values)


def format_model(model: SavedModel) -> str:
    params = model.params
    target = model.target
    lines = [
        f"{FORMAT_NAME} {FORMAT_VERSION}",
        f"target {target.name} {target.arg1_type} {target.arg2_type}",
        f"combiner {model.combiner.value}",
        f"classes {params.num_classes}",
    ]
    lines += [f"declare {p.name} {p.arg1_type} {p.arg2_type}" for p in model.declarations]
    lines.append(f"rules {len(model.walks)}")
    lines += [f"rule {walk.rule_id} {walk.body}" for walk in model.walks]
    lines.append(f"w {_floats(params.w)}")
    lines += [f"u {j + 1} {_floats(row)}" for j, row in enumerate(params.u)]
    lines.append(f"b {_floats(params.b)}")
    return "".join(f"{line}\n" for line in lines)


def save_model(model: SavedModel, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(format_model(model))
    logger.debug(f"Saved model with {len(model.walks)} rules to {path}")


def load_model(path: Union[str, Path]) -> SavedModel:
    """
    Read a model file written by save_model.

    Raises:
        ParseError: Wrong header, unknown key or malformed numbers
        SchemaError: A stored walk is not sound for the stored target
    """
    source = str(path)
    with open(path, "r", encoding="utf-8") as handle:
        rows = [(n, raw.rstrip("\n")) for n, raw in enumerate(handle, start=1) if raw.strip()]
    if not rows:
        raise ParseError("empty model file", source=source, line=1, column=1, expected=FORMAT_NAME)

    header_line, header = rows[0]
    if header.split() != [FORMAT_NAME, str(FORMAT_VERSION)]:
        raise ParseError(f"unsupported model header {header!r}", source=source, line=header_line, column=1,
                         expected=f"{FORMAT_NAME} {FORMAT_VERSION}")

    declarations: Dict[str, Predicate] = {}
    rule_lines: List[Tuple[int, str]] = []
    u_rows: Dict[int, List[float]] = {}
    target = None
    combiner = CombinerMode.AVERAGE
    num_classes = 2
    num_rules = None
    w: List[float] = []
    b: List[float] = []

    def numbers(tokens: List[str], line: int) -> List[float]:
        try:
            return [float(t) for t in tokens]
        except ValueError:
            raise ParseError("malformed number", source=source, line=line, column=1, expected="float") from None

    for line, text in rows[1:]:
        key, _, rest = text.partition(" ")
        tokens = rest.split()
        if key == "target" and len(tokens) == 3:
            target = Predicate(*tokens)
        elif key == "combiner":
            combiner = CombinerMode.parse(rest)
        elif key == "classes":
            num_classes = int(numbers(tokens, line)[0])
        elif key == "declare" and len(tokens) == 3:
            declarations[tokens[0]] = Predicate(*tokens)
        elif key == "rules":
            num_rules = int(numbers(tokens, line)[0])
        elif key == "rule":
            rule_lines.append((line, rest))
        elif key == "w":
            w = numbers(tokens, line)
        elif key == "u" and tokens:
            u_rows[int(numbers(tokens[:1], line)[0])] = numbers(tokens[1:], line)
        elif key == "b":
            b = numbers(tokens, line)
        else:
            raise ParseError(f"unexpected entry {key!r}", source=source, line=line, column=1, expected="model key")

    if target is None:
        raise ParseError("missing target line", source=source, line=header_line, column=1, expected="target")

    walks = []
    for line, rest in rule_lines:
        rule_id, _, body = rest.partition(" ")
        walk = parse_walk_line(f"{rule_id}: {body}", declarations, source=source, line=line)
        if not validate_walk(walk, target):
            raise SchemaError(f"{source}:{line}: stored walk '{walk.body}' is not a sound rule for {target}")
        walks.append(walk)

    if num_rules is not None and num_rules != len(walks):
        raise ParseError(f"header announces {num_rules} rules, found {len(walks)}", source=source,
                         line=header_line, column=1)
    if sorted(u_rows) != list(range(1, len(walks) + 1)):
        raise ParseError("u rows do not match the rule ids", source=source, line=header_line, column=1)

    try:
        params = ModelParams(
            w=np.array(w), u=np.array([u_rows[j] for j in sorted(u_rows)]), b=np.array(b)
        )
    except ValueError as e:
        raise ParseError(str(e), source=source, line=header_line, column=1) from None
    if params.num_classes != num_classes:
        raise ParseError(f"expected {num_classes} classes, found {params.num_classes}", source=source,
                         line=header_line, column=1)

    logger.debug(f"Loaded model with {len(walks)} rules from {path}")
    return SavedModel(target=target, walks=walks, params=params, combiner=combiner)
