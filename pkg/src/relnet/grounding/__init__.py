from relnet.grounding.examples import Label, TargetExample
from relnet.grounding.grounder import (
    Grounder,
    Grounding,
    GroundingCache,
    GroundingSet,
    format_grounding_dump,
    ground_exhaustive,
    ground_sampled,
)

__all__ = [
    "Grounder",
    "Grounding",
    "GroundingCache",
    "GroundingSet",
    "Label",
    "TargetExample",
    "format_grounding_dump",
    "ground_exhaustive",
    "ground_sampled",
]
