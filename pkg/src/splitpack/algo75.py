"""Two-stage approximation algorithm for k = 2 with repair passes.

Items are classified small (at most 1/2), medium ((1/2, 1]) and large
(above 1). The main pass works through the mediums against the sorted
smalls, then sweeps larges through small-seeded bins; two narrow repair
passes repack the rare configurations where the plain output could land
above 7/5 of the optimum.

Bin labels record the step that produced each bin, so reports and repair
triggers can classify bins without re-deriving history.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .core import (
    Instance,
    ItemClass,
    Packing,
    classify,
    lower_bounds,
    validate_packing,
)
from . import exact as exact_mod


class StepLabel:
    S2A = "S2a"
    S2B = "S2b"
    S3 = "S3"
    S4 = "S4"
    S5 = "S5"
    S6 = "S6"
    REPACKED = "Repacked"


TWO_BIN_REPACK = "TwoBinRepack"
SEVEN_BIN_SEARCH = "SevenBinSearch"

Item = tuple[int, Fraction]


@dataclass(frozen=True)
class A75Report:
    packing: Packing
    label_counts: dict[str, int]
    reclassified_small: bool
    fallback_triggered: str | None

    @property
    def n_bins(self) -> int:
        return self.packing.n_bins


def split_2b(medium: Fraction, s_a: Fraction, s_b: Fraction) -> tuple[Fraction, Fraction]:
    """Split a medium item over two bins beside the two largest smalls.

    The first bin {s_a, part1} is made exactly full (part1 = 1 - s_a); the
    remainder lands beside s_b. With s_a >= s_b both at most 1/2 and
    medium + s_a > 1, the remainder is positive and the second bin fits.
    """
    if not (0 < s_b <= s_a <= Fraction(1, 2)):
        raise ValueError(f"need two small items with s_a >= s_b, got {s_a}, {s_b}")
    if not (Fraction(1, 2) < medium <= 1):
        raise ValueError(f"need a medium item, got {medium}")
    if medium + s_a <= 1:
        raise ValueError(f"{medium} fits beside {s_a}; splitting not needed")
    part1 = 1 - s_a
    part2 = medium - part1
    return part1, part2


def reclassify_lone_small(remaining_mediums: list[Fraction], small: Fraction) -> bool:
    """When one small is left and a medium needs two: does the small turn
    into a medium for the rest of the run? True iff no unpacked medium fits
    beside it."""
    return all(m + small > 1 for m in remaining_mediums)


def _nf_stream(stream: list[Item], k: int = 2) -> list[list[Item]]:
    """Next-fit over an explicit (id, size) stream; sizes above 1 spill into
    as many fresh bins as needed."""
    bins: list[list[Item]] = []
    fill = Fraction(0)
    for item, size in stream:
        if bins and (fill == 1 or len(bins[-1]) == k):
            bins.append([])
            fill = Fraction(0)
        elif not bins:
            bins.append([])
        space = 1 - fill
        if size <= space:
            bins[-1].append((item, size))
            fill += size
            continue
        if space > 0:
            bins[-1].append((item, space))
        rest = size - space
        whole = math.ceil(rest) - 1
        for _ in range(whole):
            bins.append([(item, Fraction(1))])
        bins.append([(item, rest - whole)])
        fill = rest - whole
    return bins


def large_into_smalls(
    smalls: list[Item], larges: list[Item]
) -> tuple[list[list[Item]], list[str]]:
    """Steps 4 to 6: seed one bin per remaining small (smallest first), sweep
    the larges through them next-fit style (largest first), then pair up any
    untouched seeds; if the seeds run out inside a large item, that item and
    all later ones continue in fresh bins.
    """
    bins: list[list[Item]] = [[(sid, s)] for sid, s in smalls]
    labels = [StepLabel.S4] * len(bins)
    cursor = 0
    for idx, (lid, lsize) in enumerate(larges):
        rest = lsize
        while rest > 0 and cursor < len(smalls):
            space = 1 - smalls[cursor][1]
            take = min(rest, space)
            bins[cursor].append((lid, take))
            rest -= take
            cursor += 1  # two parts now, the bin takes nothing more
        if rest > 0:
            # Out of seeds mid-item: the remainder and every later large are
            # packed as a trailing next-fit group.
            stream = [(lid, rest)] + list(larges[idx + 1 :])
            for entries in _nf_stream(stream):
                bins.append(entries)
                labels.append(StepLabel.S6)
            return bins, labels
    if cursor < len(smalls):
        # Untouched seeds hold one small each; repack those smalls in pairs.
        spare = smalls[cursor:]
        bins = bins[:cursor]
        labels = labels[:cursor]
        for j in range(0, len(spare) - 1, 2):
            bins.append([spare[j], spare[j + 1]])
            labels.append(StepLabel.S5)
        if len(spare) % 2 == 1:
            bins.append([spare[-1]])
            labels.append(StepLabel.S5)
    return bins, labels


def _trailing_group(bins: list[list[Item]], labels: list[str]) -> list[int]:
    """The final run of trailing next-fit bins that share items pairwise;
    next-fit only ever links consecutive bins."""
    nf_bins = [b for b, lab in enumerate(labels) if lab in (StepLabel.S3, StepLabel.S6)]
    if not nf_bins:
        return []
    group = [nf_bins[-1]]
    for b in reversed(nf_bins[:-1]):
        nxt = group[0]
        if nxt - b == 1 and {i for i, _ in bins[b]} & {i for i, _ in bins[nxt]}:
            group.insert(0, b)
        else:
            break
    return group


def _items_of(bins: list[list[Item]], indices: list[int]) -> dict[int, Fraction]:
    totals: dict[int, Fraction] = {}
    for b in indices:
        for item, part in bins[b]:
            totals[item] = totals.get(item, Fraction(0)) + part
    return totals


def _repair_two_bin(
    inst: Instance, bins: list[list[Item]], labels: list[str]
) -> tuple[bool, bool]:
    """Repack one pair bin plus a two-bin trailing group into two bins when
    the instance has a single large item: medium first, then the large item
    split over both bins, then the small. Returns (triggered, changed)."""
    larges = [i for i, s in inst.items() if classify(s) is ItemClass.LARGE]
    if len(larges) != 1:
        return False, False
    s2a = [b for b, lab in enumerate(labels) if lab == StepLabel.S2A]
    trail = _trailing_group(bins, labels)
    if len(s2a) != 1 or len(trail) != 2:
        return False, False
    involved = s2a + trail
    coverage = _items_of(bins, involved)
    if any(coverage[i] != inst.sizes[i] for i in coverage):
        return True, False
    by_class: dict[ItemClass, list[int]] = {}
    for i in coverage:
        by_class.setdefault(classify(inst.sizes[i]), []).append(i)
    if any(len(by_class.get(cls, ())) != 1 for cls in ItemClass):
        return True, False
    (m,) = by_class[ItemClass.MEDIUM]
    (s,) = by_class[ItemClass.SMALL]
    (big,) = by_class[ItemClass.LARGE]
    m_size, s_size, l_size = inst.sizes[m], inst.sizes[s], inst.sizes[big]
    first = [(m, m_size)]
    if m_size < 1:
        first.append((big, 1 - m_size))
    second = [(big, l_size - (1 - m_size)), (s, s_size)]
    candidate = [first, second]
    if any(
        sum((p for _, p in entries), Fraction(0)) > 1
        or any(p <= 0 for _, p in entries)
        for entries in candidate
    ):
        return True, False
    for b in sorted(involved, reverse=True):
        del bins[b]
        del labels[b]
    bins.extend(candidate)
    labels.extend([StepLabel.REPACKED] * 2)
    return True, True


def _repair_seven_bin(
    inst: Instance,
    bins: list[list[Item]],
    labels: list[str],
    budget: exact_mod.SearchBudget | None,
) -> tuple[bool, bool]:
    """When the packing is exactly four pair-step bins, one fit-step bin and
    a five-bin trailing group, search exhaustively for a seven-bin packing of
    the whole instance and adopt it when one exists. Never increases the bin
    count. Returns (triggered, changed)."""
    counts: dict[str, int] = {}
    for lab in labels:
        counts[lab] = counts.get(lab, 0) + 1
    trail = _trailing_group(bins, labels)
    if not (
        len(bins) == 10
        and counts.get(StepLabel.S2B, 0) == 4
        and counts.get(StepLabel.S2A, 0) == 1
        and len(trail) == 5
        and counts.get(StepLabel.S3, 0) + counts.get(StepLabel.S6, 0) == 5
    ):
        return False, False
    base = budget or exact_mod.SearchBudget.from_env()
    search_budget = exact_mod.SearchBudget(
        max_items=max(base.max_items, inst.n),
        max_bins=max(base.max_bins, 7),
        max_structures=base.max_structures,
    )
    try:
        witness = exact_mod.feasible_in(inst, 7, search_budget)
    except exact_mod.BudgetExceeded:
        return True, False
    if witness is None:
        return True, False
    bins.clear()
    labels.clear()
    bins.extend([list(entries) for entries in witness.bins])
    labels.extend([StepLabel.REPACKED] * witness.n_bins)
    return True, True


def pack_75(
    inst: Instance,
    *,
    enable_repairs: bool = True,
    repair_budget: exact_mod.SearchBudget | None = None,
) -> A75Report:
    """Run the full k = 2 algorithm and return the labeled packing.

    Stage one pairs each medium with the smallest small that fits, or splits
    it over the two largest smalls; leftovers flow through next-fit. Stage
    two applies the repair passes. Output is always a valid packing.
    """
    if inst.k != 2:
        raise ValueError(f"this algorithm requires k=2, got k={inst.k}")
    smalls = sorted(
        ((i, s) for i, s in inst.items() if classify(s) is ItemClass.SMALL),
        key=lambda p: (p[1], p[0]),
    )
    mediums = sorted(
        ((i, s) for i, s in inst.items() if classify(s) is ItemClass.MEDIUM),
        key=lambda p: (-p[1], p[0]),
    )
    larges = sorted(
        ((i, s) for i, s in inst.items() if classify(s) is ItemClass.LARGE),
        key=lambda p: (-p[1], p[0]),
    )

    bins: list[list[Item]] = []
    labels: list[str] = []
    lo, hi = 0, len(smalls) - 1
    deferred: list[Item] = []
    rest_mediums: list[Item] = []
    reclassified: Item | None = None

    for idx, (mid, msize) in enumerate(mediums):
        if lo > hi:
            rest_mediums = mediums[idx:]
            break
        s_lo_id, s_lo = smalls[lo]
        if msize + s_lo <= 1:
            bins.append([(mid, msize), (s_lo_id, s_lo)])
            labels.append(StepLabel.S2A)
            lo += 1
        elif hi - lo + 1 >= 2:
            sa_id, sa = smalls[hi]
            sb_id, sb = smalls[hi - 1]
            part1, part2 = split_2b(msize, sa, sb)
            bins.append([(sa_id, sa), (mid, part1)])
            labels.append(StepLabel.S2B)
            bins.append([(mid, part2), (sb_id, sb)])
            labels.append(StepLabel.S2B)
            hi -= 2
        else:
            later = [m for _, m in mediums[idx + 1 :]]
            deferred.append((mid, msize))
            if reclassify_lone_small(later, s_lo):
                reclassified = (s_lo_id, s_lo)
                lo += 1

    smalls_left = smalls[lo : hi + 1]
    stream = deferred + rest_mediums
    if reclassified is not None:
        stream.append(reclassified)

    if not smalls_left:
        for entries in _nf_stream(stream + larges):
            bins.append(entries)
            labels.append(StepLabel.S3)
    else:
        assert not stream, "mediums remain although small items are unpacked"
        tail_bins, tail_labels = large_into_smalls(smalls_left, larges)
        bins.extend(tail_bins)
        labels.extend(tail_labels)

    fallback: str | None = None
    if enable_repairs:
        triggered, _ = _repair_two_bin(inst, bins, labels)
        if triggered:
            fallback = TWO_BIN_REPACK
        else:
            triggered, _ = _repair_seven_bin(inst, bins, labels, repair_budget)
            if triggered:
                fallback = SEVEN_BIN_SEARCH

    packing = Packing.build(bins, labels)
    problems = validate_packing(inst, packing)
    assert not problems, f"algorithm produced an invalid packing: {problems[0]}"
    counts: dict[str, int] = {}
    for lab in packing.labels:
        counts[lab] = counts.get(lab, 0) + 1
    return A75Report(
        packing=packing,
        label_counts=counts,
        reclassified_small=reclassified is not None,
        fallback_triggered=fallback,
    )
