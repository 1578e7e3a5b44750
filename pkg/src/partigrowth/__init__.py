"""partigrowth: a Markovian growth process on integer partitions.

The growth chain inserts random rectangles of boxes into a Young diagram in
such a way that, conditionally on ever reaching total size n, the diagram
passes through every partition of n with the same probability.  This package
provides the exact transition laws, simulators for the forward (shrinking),
backward (growing) and marked-Poisson representations, uniform-partition
samplers, and desk-scale verifiers for the identities and limit laws the
construction obeys.
"""

__version__ = "0.1.0"
SCHEMA_VERSION = 1

from .logprob import LogProb
from .partitions import (
    EMPTY,
    Partition,
    add_run,
    enumerate_partitions,
    enumerate_strict_partitions,
    from_parts,
    growth_leq,
    inclusion_leq,
    remove_run,
    young_value,
)
from .rng import RngStream

__all__ = [
    "__version__",
    "SCHEMA_VERSION",
    "LogProb",
    "Partition",
    "EMPTY",
    "from_parts",
    "young_value",
    "growth_leq",
    "inclusion_leq",
    "add_run",
    "remove_run",
    "enumerate_partitions",
    "enumerate_strict_partitions",
    "RngStream",
]
