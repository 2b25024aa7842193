from relnet.walks.schema_graph import SchemaGraph, build_schema_graph
from relnet.walks.walk_generation import LiftedWalk, WalkGenerator, generate_walks, validate_walk
from relnet.walks.walk_io import read_walks, write_walks

__all__ = [
    "LiftedWalk",
    "SchemaGraph",
    "WalkGenerator",
    "build_schema_graph",
    "generate_walks",
    "read_walks",
    "validate_walk",
    "write_walks",
]
