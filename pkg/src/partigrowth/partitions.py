"""Integer partitions: canonical representation, orders, diagram geometry,
and exhaustive enumeration.

A partition is stored as a non-increasing tuple of positive parts together
with a cached part-count map ``{part size: multiplicity}``.  Partitions are
immutable and hashable, so they can be shared freely across threads and used
as dictionary keys.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Iterator

__all__ = [
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
    "ENUMERATION_CAP",
]

# Exhaustive enumeration refuses weights above this unless the caller raises
# the cap explicitly; p(40) = 37338 keeps lists comfortably in memory.
ENUMERATION_CAP = 40


class Partition:
    """An integer partition in canonical (non-increasing) form."""

    __slots__ = ("parts", "_counts", "_hash")

    def __init__(self, parts: Iterable[int] = ()):
        ps = sorted(parts, reverse=True)
        for p in ps:
            if not isinstance(p, int) or p < 1:
                raise ValueError(f"parts must be positive integers, got {p!r}")
        object.__setattr__(self, "parts", tuple(ps))
        object.__setattr__(self, "_counts", None)
        object.__setattr__(self, "_hash", hash(tuple(ps)))

    def __setattr__(self, name, value):
        raise AttributeError("Partition is immutable")

    # -- basic views ---------------------------------------------------

    @property
    def counts(self) -> dict[int, int]:
        """Map part size -> multiplicity (cached)."""
        c = self._counts
        if c is None:
            c = {}
            for p in self.parts:
                c[p] = c.get(p, 0) + 1
            object.__setattr__(self, "_counts", c)
        return c

    @property
    def weight(self) -> int:
        """Sum of all parts."""
        return sum(self.parts)

    @property
    def length(self) -> int:
        """Number of parts."""
        return len(self.parts)

    def count(self, k: int) -> int:
        """Multiplicity of part size k."""
        return self.counts.get(k, 0)

    def to_json(self) -> list[int]:
        """Wire format: JSON array of parts in non-increasing order."""
        return list(self.parts)

    # -- dunder plumbing -----------------------------------------------

    def __eq__(self, other) -> bool:
        return isinstance(other, Partition) and self.parts == other.parts

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "Partition") -> bool:
        # lexicographic on the parts tuple; used only for deterministic sorting
        return self.parts < other.parts

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self) -> Iterator[int]:
        return iter(self.parts)

    def __bool__(self) -> bool:
        return bool(self.parts)

    def __repr__(self) -> str:
        return f"Partition{self.parts}"


EMPTY = Partition()


def from_parts(parts: Iterable[int]) -> Partition:
    """Build the canonical partition from any iterable of positive parts."""
    return Partition(parts)


def young_value(lam: Partition, x: float) -> int:
    """Height of the diagram of ``lam`` at abscissa x: the number of parts >= x.

    Right-continuous step function of x > 0; at x = 0 it equals the length.
    """
    if x < 0:
        raise ValueError("x must be >= 0")
    if x == 0:
        return lam.length
    n = 0
    for p in lam.parts:
        if p >= x:
            n += 1
        else:
            break
    return n


def growth_leq(mu: Partition, lam: Partition) -> bool:
    """Growth order: True iff lam can be reached from mu by only adding parts.

    Equivalently, every part-size multiplicity of mu is <= that of lam.
    Strictly stronger than diagram inclusion: (2,1) is included in (2,2) but
    cannot grow into it.
    """
    lc = lam.counts
    return all(lc.get(k, 0) >= c for k, c in mu.counts.items())


def inclusion_leq(mu: Partition, lam: Partition) -> bool:
    """Diagram inclusion: True iff mu_i <= lam_i for every row i."""
    if mu.length > lam.length:
        return False
    return all(m <= l for m, l in zip(mu.parts, lam.parts))


def add_run(mu: Partition, k: int, r: int) -> Partition:
    """Insert r new parts of size k (a k x r rectangle of boxes)."""
    if k < 1 or r < 1:
        raise ValueError("k and r must be >= 1")
    return Partition(mu.parts + (k,) * r)


def remove_run(lam: Partition, k: int, r: int) -> Partition:
    """Delete r parts of size k; fails if lam has fewer than r such parts."""
    if k < 1 or r < 1:
        raise ValueError("k and r must be >= 1")
    have = lam.count(k)
    if have < r:
        raise ValueError(f"cannot remove {r} parts of size {k}: only {have} present")
    out = []
    dropped = 0
    for p in lam.parts:
        if p == k and dropped < r:
            dropped += 1
        else:
            out.append(p)
    return Partition(out)


@lru_cache(maxsize=128)
def _partition_tuples(n: int, max_part: int) -> tuple[tuple[int, ...], ...]:
    if n == 0:
        return ((),)
    acc = []
    for first in range(min(n, max_part), 0, -1):
        for rest in _partition_tuples(n - first, first):
            acc.append((first,) + rest)
    return tuple(acc)


def enumerate_partitions(n: int, cap: int = ENUMERATION_CAP) -> list[Partition]:
    """All partitions of n, each exactly once, in decreasing lexicographic order.

    The order starts at (n) and ends at (1,...,1), so fixtures indexing into
    the list are stable.  Raises if n exceeds the cap.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n > cap:
        raise ValueError(f"enumeration of P_{n} exceeds cap {cap}")
    return [Partition(t) for t in _partition_tuples(n, n if n else 1)]


@lru_cache(maxsize=128)
def _strict_tuples(n: int, max_part: int) -> tuple[tuple[int, ...], ...]:
    if n == 0:
        return ((),)
    acc = []
    for first in range(min(n, max_part), 0, -1):
        for rest in _strict_tuples(n - first, first - 1):
            acc.append((first,) + rest)
    return tuple(acc)


def enumerate_strict_partitions(n: int, cap: int = 70) -> list[Partition]:
    """All partitions of n into distinct parts, in decreasing lexicographic order."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n > cap:
        raise ValueError(f"enumeration of strict partitions of {n} exceeds cap {cap}")
    return [Partition(t) for t in _strict_tuples(n, n if n else 1)]
