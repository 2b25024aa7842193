"""
Walks file: one walk per line, ``j: pred1 ; pred2^-1 ; ...``.

Predicate names resolve against the declarations, so a file written by
write_walks reads back into identical LiftedWalk objects.
"""

import logging
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Union

from relnet.errors import ParseError, SchemaError
from relnet.logic.atoms import INVERSE_SUFFIX, Predicate
from relnet.walks.walk_generation import LiftedWalk, validate_walk

logger = logging.getLogger(__name__)


def format_walks(walks: Iterable[LiftedWalk]) -> str:
    return "".join(f"{walk}\n" for walk in walks)


def write_walks(walks: Iterable[LiftedWalk], path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(format_walks(walks))


def parse_walk_line(text: str, declarations: Dict[str, Predicate], source: str = "<string>", line: int = 1) -> LiftedWalk:
    """
    Parse one ``j: body`` line.

    Args:
        text: The line without its newline
        declarations: Predicate name -> declared (base) predicate
        source: File name for error messages
        line: Line number for error messages

    Returns:
        LiftedWalk: The parsed walk
    """
    head, sep, body = text.partition(":")
    if not sep:
        raise ParseError("walk line has no rule id", source=source, line=line, column=1, expected="':'")
    try:
        rule_id = int(head.strip())
    except ValueError:
        raise ParseError(f"bad rule id {head.strip()!r}", source=source, line=line, column=1, expected="integer") from None

    chain: List[Predicate] = []
    column = len(head) + 2
    for token in body.split(";"):
        label = token.strip()
        if not label:
            raise ParseError("empty walk step", source=source, line=line, column=column, expected="predicate")
        inverse = label.endswith(INVERSE_SUFFIX)
        name = label[: -len(INVERSE_SUFFIX)] if inverse else label
        predicate = declarations.get(name)
        if predicate is None:
            raise SchemaError(f"{source}:{line}: undeclared predicate {name} in walk {rule_id}")
        chain.append(predicate.invert() if inverse else predicate)
        column += len(token) + 1
    return LiftedWalk(rule_id, tuple(chain))


def read_walks(
    path: Union[str, Path],
    declarations: Iterable[Predicate],
    target: Optional[Predicate] = None
) -> List[LiftedWalk]:
    """
    Read a walks file.

    Args:
        path: Walks file
        declarations: Declared predicates used to resolve names
        target: When given, every walk must pass validate_walk for it

    Returns:
        List[LiftedWalk]: Walks in file order, renumbered 1..M
    """
    by_name = {p.base.name: p.base for p in declarations}
    walks: List[LiftedWalk] = []
    with open(path, "r", encoding="utf-8") as handle:
        for number, raw in enumerate(handle, start=1):
            text = raw.split("%", 1)[0].strip()
            if not text:
                continue
            walk = parse_walk_line(text, by_name, source=str(path), line=number)
            if target is not None and not validate_walk(walk, target):
                raise SchemaError(f"{path}:{number}: walk '{walk.body}' is not a sound rule for {target}")
            walks.append(walk)

    renumbered = [LiftedWalk(i + 1, w.chain) for i, w in enumerate(walks)]
    if any(a.rule_id != b.rule_id for a, b in zip(walks, renumbered)):
        logger.warning(f"Walk ids in {path} are not 1..{len(walks)}; renumbered in file order")
    logger.info(f"Read {len(renumbered)} walks from {path}")
    return renumbered
