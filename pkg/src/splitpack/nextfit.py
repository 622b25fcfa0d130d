"""Online NEXT FIT for splittable items under a per-bin part limit.

Items are consumed strictly in instance order. An item goes into the current
bin while that bin has spare capacity and fewer than k parts; an item that
does not fit entirely fills the current bin, closes it, and spills into
exactly ceil(remaining) fresh bins, all but the last filled to capacity.

The trace records why each bin stopped accepting parts and the resulting
block structure: a block is a maximal run of bins in which every bin but the
last is exactly full, and every block except possibly the final one ends
with a bin holding exactly k parts. A bin counts as closed by the part limit
only when its k-th part completed an item; a bin whose last part is the head
of an overflowing item closed by size, even though it also holds k parts,
because its last item continues in the next bin. A bin that reaches k parts
and exact fullness through a whole item ends its block, and a spilled item
whose last bin lands exactly full stays inside its block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .core import BinEntries, Instance, Packing, item_weight, validate_packing

NF_LABEL = "nf"


class CloseReason(Enum):
    FILLED = "filled"
    CARDINALITY = "cardinality"
    END_OF_INPUT = "end-of-input"


@dataclass(frozen=True)
class NfTrace:
    """Execution record: the bins, per-bin close reasons, and block spans
    (start index, length) covering all bins in order."""

    bins: tuple[BinEntries, ...]
    close_reasons: tuple[CloseReason, ...]
    blocks: tuple[tuple[int, int], ...]

    @property
    def n_bins(self) -> int:
        return len(self.bins)

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)


def next_fit(inst: Instance) -> tuple[Packing, NfTrace]:
    """Run NEXT FIT over the instance in the given order.

    Returns the packing plus the trace. Total on all valid instances; the
    packing of a prefix of the input is a prefix of the full packing except
    for the still-open current bin.
    """
    k = inst.k
    bins: list[list[tuple[int, Fraction]]] = []
    fills: list[Fraction] = []
    reasons: list[CloseReason | None] = []
    # True while the open bin's most recent part completed its item; only
    # such bins may end a block, since a spill head's item continues in
    # the next bin.
    last_completes_item = False

    def open_bin() -> None:
        bins.append([])
        fills.append(Fraction(0))
        reasons.append(None)

    def place(item: int, part: Fraction) -> None:
        bins[-1].append((item, part))
        fills[-1] += part

    def abandon_reason() -> CloseReason:
        if len(bins[-1]) == k and last_completes_item:
            return CloseReason.CARDINALITY
        return CloseReason.FILLED

    for item, size in inst.items():
        if bins and (fills[-1] == 1 or len(bins[-1]) == k):
            reasons[-1] = abandon_reason()
            open_bin()
        elif not bins:
            open_bin()
        space = 1 - fills[-1]
        if size <= space:
            place(item, size)
            last_completes_item = True
            continue
        # Overflow: fill the current bin, then spill into ceil(rest) new bins.
        if space > 0:
            place(item, space)
        reasons[-1] = CloseReason.FILLED
        rest = size - space
        whole_bins = math.ceil(rest) - 1
        for _ in range(whole_bins):
            open_bin()
            place(item, Fraction(1))
            reasons[-1] = CloseReason.FILLED
        open_bin()
        place(item, rest - whole_bins)
        last_completes_item = True  # the tail completes the item

    if bins and reasons[-1] is None:
        if len(bins[-1]) == k and last_completes_item:
            reasons[-1] = CloseReason.CARDINALITY
        elif fills[-1] == 1:
            reasons[-1] = CloseReason.FILLED
        else:
            reasons[-1] = CloseReason.END_OF_INPUT

    blocks: list[tuple[int, int]] = []
    start = 0
    for i, reason in enumerate(reasons):
        if reason is CloseReason.CARDINALITY or i == len(reasons) - 1:
            blocks.append((start, i - start + 1))
            start = i + 1

    packing = Packing.build(bins, [NF_LABEL] * len(bins))
    trace = NfTrace(
        bins=packing.bins,
        close_reasons=tuple(reasons),  # type: ignore[arg-type]
        blocks=tuple(blocks),
    )
    return packing, trace


def check_block_inequality(inst: Instance, trace: NfTrace) -> bool:
    """Check the per-block weight bound on a NEXT FIT trace.

    With nf bins in m blocks, the item weights must satisfy
    sum_i ceil(s_i)/k >= (nf + (m-1)(k-1))/k; every bin before a block's last
    is full and each non-final block ends at k parts, which forces at least
    k-1 unsplit items into that closing bin. A False return means the trace
    does not come from this implementation's NEXT FIT.
    """
    packing = Packing.build(trace.bins, [NF_LABEL] * len(trace.bins))
    problems = validate_packing(inst, packing)
    if problems:
        raise ValueError(f"trace does not match the instance: {problems[0]}")
    nf = trace.n_bins
    m = trace.n_blocks
    total_weight = sum((item_weight(s, inst.k) for s in inst.sizes), Fraction(0))
    bound = Fraction(nf + (m - 1) * (inst.k - 1), inst.k)
    return total_weight >= bound
