"""Domain model for splittable-item bin packing with a per-bin part limit.

All quantities are exact rationals (`fractions.Fraction`); solver paths never
touch floating point, so capacity comparisons like ``fill == 1`` are reliable.
Bins have unit capacity, items may be split across bins, and every bin holds
at most ``k`` parts with at most one part per item (same-item parts merge).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

Rational = Fraction

# A bin is a sequence of (item_id, part) entries, the central packing unit.
BinEntries = tuple[tuple[int, Fraction], ...]

DEFAULT_LABEL = "bin"


def parse_rational(text: str) -> Fraction:
    """Parse "p/q", integer or decimal strings into an exact rational.

    Decimals convert exactly (d digits become a power-of-ten denominator),
    never through a float.
    """
    if not isinstance(text, str):
        raise ValueError(f"expected a rational as string, got {text!r}")
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational: {text!r}") from exc


def render_rational(value: Fraction) -> str:
    return str(value)


class ItemClass(Enum):
    SMALL = "small"
    MEDIUM = "medium"
    LARGE = "large"


def classify(size: Fraction) -> ItemClass:
    """Classify by size: (0, 1/2] small, (1/2, 1] medium, above 1 large."""
    if size <= Fraction(1, 2):
        return ItemClass.SMALL
    if size <= 1:
        return ItemClass.MEDIUM
    return ItemClass.LARGE


def size_type(size: Fraction) -> int:
    """Half-unit bracket index i with size in ((i-1)/2, i/2]; small items are type 1."""
    return max(1, math.ceil(2 * size))


@dataclass(frozen=True)
class Instance:
    """An ordered list of positive item sizes plus the per-bin part limit k.

    Item ids are the positions 0..n-1; sizes may exceed 1 (such items must be
    split over several bins).
    """

    k: int
    sizes: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if self.k < 2:
            raise ValueError(f"k must be at least 2, got {self.k}")
        object.__setattr__(self, "sizes", tuple(Fraction(s) for s in self.sizes))
        for i, s in enumerate(self.sizes):
            if s <= 0:
                raise ValueError(f"item {i} has non-positive size {s}")

    @property
    def n(self) -> int:
        return len(self.sizes)

    def items(self) -> Iterator[tuple[int, Fraction]]:
        return iter(enumerate(self.sizes))


def _merge_bin(entries: Iterable[tuple[int, Fraction]]) -> BinEntries:
    merged: dict[int, Fraction] = {}
    for item, part in entries:
        merged[item] = merged.get(item, Fraction(0)) + Fraction(part)
    return tuple(sorted(merged.items()))


@dataclass(frozen=True)
class Packing:
    """A list of bins, each holding (item_id, part) entries, plus one
    provenance label per bin naming the algorithm step that created it."""

    bins: tuple[BinEntries, ...]
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.bins) != len(self.labels):
            raise ValueError(
                f"{len(self.bins)} bins but {len(self.labels)} labels"
            )

    @staticmethod
    def build(
        bins: Sequence[Iterable[tuple[int, Fraction]]],
        labels: Sequence[str] | None = None,
    ) -> "Packing":
        """Normalize raw bin contents: same-item parts in one bin merge and
        entries are ordered by item id."""
        merged = tuple(_merge_bin(b) for b in bins)
        if labels is None:
            labels = [DEFAULT_LABEL] * len(merged)
        return Packing(merged, tuple(labels))

    @property
    def n_bins(self) -> int:
        return len(self.bins)

    def bin_total(self, index: int) -> Fraction:
        return sum((part for _, part in self.bins[index]), Fraction(0))

    def coverage(self) -> dict[int, Fraction]:
        totals: dict[int, Fraction] = {}
        for entries in self.bins:
            for item, part in entries:
                totals[item] = totals.get(item, Fraction(0)) + part
        return totals

    def key(self) -> tuple[BinEntries, ...]:
        """Bin-order-independent canonical form, for equality up to reordering."""
        return tuple(sorted(self.bins))


EMPTY_PACKING = Packing((), ())


def validate_packing(inst: Instance, packing: Packing) -> list[str]:
    """Return every violated packing invariant, empty iff feasible.

    Checks: known item ids, per-bin cardinality <= k, per-bin capacity <= 1,
    strictly positive parts, exact per-item coverage, and no empty bins.
    """
    violations: list[str] = []
    for b, entries in enumerate(packing.bins):
        if not entries:
            violations.append(f"empty bin: bin {b} has no parts")
            continue
        for item, part in entries:
            if not (0 <= item < inst.n):
                violations.append(
                    f"unknown item: bin {b} references item {item} not in instance"
                )
            if part <= 0:
                violations.append(
                    f"positivity: bin {b} item {item} has non-positive part {part}"
                )
        if len(entries) > inst.k:
            violations.append(
                f"cardinality: bin {b} has {len(entries)} > k={inst.k} parts"
            )
        total = sum((part for _, part in entries), Fraction(0))
        if total > 1:
            violations.append(f"capacity: bin {b} holds {total} > 1")
    covered = packing.coverage()
    for item, size in inst.items():
        got = covered.get(item, Fraction(0))
        if got != size:
            violations.append(f"coverage: item {item} covered {got} of {size}")
    return violations


def item_weight(size: Fraction, k: int) -> Fraction:
    """Per-item contribution to the optimum: ceil(size) parts are unavoidable
    and a bin absorbs at most k parts, so each item accounts for ceil(size)/k."""
    if size <= 0:
        raise ValueError(f"size must be positive, got {size}")
    return Fraction(math.ceil(size), k)


@dataclass(frozen=True)
class BoundsReport:
    """Three lower bounds on the optimal bin count and their maximum."""

    size_bound: int
    weight_bound: int
    count_bound: int
    best: int


def lower_bounds(inst: Instance) -> BoundsReport:
    """size: total volume; weight: ceil-size parts over k per bin; count:
    every item needs a part and bins take at most k of them."""
    total = sum(inst.sizes, Fraction(0))
    size_bound = math.ceil(total)
    weight_bound = math.ceil(
        sum((item_weight(s, inst.k) for s in inst.sizes), Fraction(0))
    )
    count_bound = math.ceil(Fraction(inst.n, inst.k))
    return BoundsReport(
        size_bound=size_bound,
        weight_bound=weight_bound,
        count_bound=count_bound,
        best=max(size_bound, weight_bound, count_bound),
    )


@dataclass(frozen=True)
class PackingGraph:
    """Multigraph view of a k=2 packing: nodes are items, one edge per bin.

    ``edges[j]`` gives bin j's endpoints as (u, v) with u <= v; a single-item
    bin appears as the loop (u, u). Edge position doubles as the bin index,
    which makes the mapping invertible up to bin order.
    """

    n: int
    edges: tuple[tuple[int, int], ...]

    def degree(self, item: int) -> int:
        """Number of bins containing a part of the item (loops included)."""
        return sum(1 for u, v in self.edges if item in (u, v))

    def neighbor_edges(self, item: int) -> list[int]:
        """Indices of non-loop edges incident to the item."""
        return [
            j for j, (u, v) in enumerate(self.edges) if u != v and item in (u, v)
        ]

    def neighbor_count(self, item: int) -> int:
        return len(self.neighbor_edges(item))

    def is_forest(self) -> bool:
        """True iff the non-loop edges are acyclic (parallel edges count as
        cycles; loops never do)."""
        parent = list(range(self.n))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in self.edges:
            if u == v:
                continue
            ru, rv = find(u), find(v)
            if ru == rv:
                return False
            parent[ru] = rv
        return True


def graph_of(inst: Instance, packing: Packing) -> PackingGraph:
    """Build the packing graph; defined for k = 2 packings only."""
    if inst.k != 2:
        raise ValueError(f"packing graphs are defined for k=2 only, got k={inst.k}")
    problems = validate_packing(inst, packing)
    if problems:
        raise ValueError(f"packing is not valid: {problems[0]}")
    edges = []
    for entries in packing.bins:
        items = [item for item, _ in entries]
        if len(items) == 1:
            edges.append((items[0], items[0]))
        else:
            u, v = sorted(items)
            edges.append((u, v))
    return PackingGraph(n=inst.n, edges=tuple(edges))
