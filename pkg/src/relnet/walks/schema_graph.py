"""
The lifted schema graph: entity types as nodes, predicates as typed edges.
"""

import logging
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Set

from relnet.logic.atoms import Predicate, TypeName

logger = logging.getLogger(__name__)


@dataclass
class SchemaGraph:
    """
    Directed multigraph over entity types.

    Every declared predicate contributes two edges: itself
    (arg1_type -> arg2_type) and its inverse (arg2_type -> arg1_type).
    """

    nodes: Set[TypeName] = field(default_factory=set)
    edges: List[Predicate] = field(default_factory=list)
    _outgoing: Dict[TypeName, List[Predicate]] = field(default_factory=dict, repr=False)

    def outgoing(self, type_name: TypeName) -> List[Predicate]:
        """Edges leaving a type node, in canonical order."""
        return self._outgoing.get(type_name, [])

    def declares(self, predicate: Predicate) -> bool:
        return predicate in self._outgoing.get(predicate.arg1_type, ())

    def distance(self, source: TypeName, destination: TypeName, excluded: Optional[str] = None) -> Optional[int]:
        """
        Length of the shortest edge chain between two types.

        Args:
            source: Start type
            destination: End type
            excluded: Predicate name whose edges may not be used

        Returns:
            Optional[int]: Number of edges (at least 1), None if unreachable
        """
        frontier = deque([(source, 0)])
        visited: Set[TypeName] = set()
        while frontier:
            node, depth = frontier.popleft()
            for edge in self.outgoing(node):
                if edge.name == excluded:
                    continue
                if edge.arg2_type == destination:
                    return depth + 1
                if edge.arg2_type not in visited:
                    visited.add(edge.arg2_type)
                    frontier.append((edge.arg2_type, depth + 1))
        return None


def build_schema_graph(type_decls: Iterable[Predicate]) -> SchemaGraph:
    """
    Build the schema graph from predicate declarations.

    Args:
        type_decls: Declared binary predicates

    Returns:
        SchemaGraph: Nodes are all mentioned types, 2 edges per declaration
    """
    declarations = sorted(set(p.base for p in type_decls))
    graph = SchemaGraph()
    outgoing: Dict[TypeName, List[Predicate]] = defaultdict(list)

    for predicate in declarations:
        graph.nodes.update((predicate.arg1_type, predicate.arg2_type))
        for edge in (predicate, predicate.invert()):
            graph.edges.append(edge)
            outgoing[edge.arg1_type].append(edge)

    graph._outgoing = {node: sorted(edges) for node, edges in outgoing.items()}
    logger.debug(f"Schema graph: {len(graph.nodes)} types, {len(graph.edges)} edges")
    return graph
