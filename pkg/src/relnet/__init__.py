"""
relnet: relational neural networks built from lifted random walks.

Rule templates are sampled as type-consistent predicate chains over the
schema graph, grounded per example against the evidence, and combined in a
tied-weight network trained with L1-regularized AdaGrad.
"""

__version__ = "0.1.0"
