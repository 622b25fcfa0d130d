import random
from fractions import Fraction as F

import pytest

from splitpack import (
    Instance,
    Packing,
    bound_degrees,
    exact_opt,
    gen_random,
    graph_of,
    next_fit,
    normalization_violations,
    normalize,
    remove_cycles,
    smalls_to_leaves,
    validate_packing,
)


def three_cycle():
    inst = Instance(k=2, sizes=(F(2, 3),) * 3)
    packing = Packing.build(
        [
            [(0, F(1, 3)), (1, F(1, 3))],
            [(1, F(1, 3)), (2, F(1, 3))],
            [(2, F(1, 3)), (0, F(1, 3))],
        ]
    )
    return inst, packing


def test_remove_cycles_merges_three_cycle():
    inst, packing = three_cycle()
    out = remove_cycles(inst, packing)
    assert out.n_bins == 2
    assert validate_packing(inst, out) == []
    assert graph_of(inst, out).is_forest()
    # the two bins carry a whole item plus a half of the middle item
    assert sorted(sorted(p for _, p in b) for b in out.bins) == [
        [F(1, 3), F(2, 3)],
        [F(1, 3), F(2, 3)],
    ]


def test_remove_cycles_keeps_forest_untouched():
    inst = Instance(k=2, sizes=(F(1, 2), F(1, 2), F(1, 2)))
    packing = Packing.build([[(0, F(1, 2)), (1, F(1, 2))], [(2, F(1, 2))]])
    assert remove_cycles(inst, packing).key() == packing.key()


def test_remove_cycles_parallel_edge():
    inst = Instance(k=2, sizes=(F(3, 4), F(3, 4)))
    packing = Packing.build(
        [
            [(0, F(1, 2)), (1, F(1, 4))],
            [(0, F(1, 4)), (1, F(1, 2))],
        ]
    )
    out = remove_cycles(inst, packing)
    assert validate_packing(inst, out) == []
    assert graph_of(inst, out).is_forest()
    assert out.n_bins <= 2


def test_smalls_to_leaves_slice_branch():
    # s split (1/5, 1/5) beside 7/10 and 3/5: trade a 1/5 slice of the
    # second neighbor into bin 1, the small consolidates in bin 2.
    inst = Instance(k=2, sizes=(F(2, 5), F(7, 10), F(3, 5)))
    packing = Packing.build(
        [[(0, F(1, 5)), (1, F(7, 10))], [(0, F(1, 5)), (2, F(3, 5))]]
    )
    out = smalls_to_leaves(inst, packing)
    assert out.n_bins == 2
    assert validate_packing(inst, out) == []
    assert graph_of(inst, out).neighbor_count(0) == 1
    assert out.key() == (
        ((0, F(2, 5)), (2, F(2, 5))),
        ((1, F(7, 10)), (2, F(1, 5))),
    )


def test_smalls_to_leaves_move_branch():
    # second neighbor part is below s1: the s part moves outright and the
    # first bin keeps its occupant as a loop
    inst = Instance(k=2, sizes=(F(1, 2), F(3, 4), F(6, 5)))
    packing = Packing.build(
        [
            [(0, F(1, 4)), (1, F(3, 4))],
            [(0, F(1, 4)), (2, F(1, 5))],
            [(2, F(1))],
        ]
    )
    out = smalls_to_leaves(inst, packing)
    assert validate_packing(inst, out) == []
    assert graph_of(inst, out).neighbor_count(0) == 1
    assert out.n_bins == 3
    assert ((0, F(1, 2)), (2, F(1, 5))) in out.bins


def test_smalls_to_leaves_pair_of_smalls():
    # two smalls sharing an edge collapse into their shared bin
    inst = Instance(k=2, sizes=(F(2, 5), F(2, 5), F(4, 5), F(4, 5)))
    packing = Packing.build(
        [
            [(0, F(1, 5)), (1, F(1, 5))],
            [(0, F(1, 5)), (2, F(4, 5))],
            [(1, F(1, 5)), (3, F(4, 5))],
        ]
    )
    out = smalls_to_leaves(inst, packing)
    assert validate_packing(inst, out) == []
    graph = graph_of(inst, out)
    assert graph.neighbor_count(0) <= 1 and graph.neighbor_count(1) <= 1
    assert out.n_bins == 3


def test_smalls_already_leaves_unchanged():
    inst = Instance(k=2, sizes=(F(1, 4), F(3, 4)))
    packing = Packing.build([[(0, F(1, 4)), (1, F(3, 4))]])
    assert smalls_to_leaves(inst, packing).key() == packing.key()


def test_bound_degrees_merges_three_neighbors():
    inst = Instance(k=2, sizes=(F(1), F(4, 5), F(7, 10), F(1, 2)))
    packing = Packing.build(
        [
            [(0, F(1, 5)), (1, F(4, 5))],
            [(0, F(3, 10)), (2, F(7, 10))],
            [(0, F(1, 2)), (3, F(1, 2))],
        ]
    )
    out = bound_degrees(inst, packing)
    assert validate_packing(inst, out) == []
    assert out.n_bins == 3
    graph = graph_of(inst, out)
    assert graph.neighbor_count(0) == 2
    assert out.key() == (
        ((0, F(1, 2)), (1, F(1, 2))),
        ((0, F(1, 2)), (3, F(1, 2))),
        ((1, F(3, 10)), (2, F(7, 10))),
    )


def test_bound_degrees_within_bound_unchanged():
    # an item in (1, 3/2] may keep three neighbors
    inst = Instance(k=2, sizes=(F(5, 4), F(1, 2), F(1, 2), F(1, 2)))
    packing = Packing.build(
        [
            [(0, F(1, 2)), (1, F(1, 2))],
            [(0, F(1, 2)), (2, F(1, 2))],
            [(0, F(1, 4)), (3, F(1, 2))],
        ]
    )
    assert bound_degrees(inst, packing).key() == packing.key()


def test_normalize_requires_k2():
    inst = Instance(k=3, sizes=(F(1, 2),))
    packing = Packing.build([[(0, F(1, 2))]])
    with pytest.raises(ValueError):
        normalize(inst, packing)


def test_normalize_empty_and_loops():
    inst = Instance(k=2, sizes=())
    assert normalize(inst, Packing((), ())).n_bins == 0
    inst = Instance(k=2, sizes=(F(5, 2),))
    packing = Packing.build([[(0, F(1))], [(0, F(1))], [(0, F(1, 2))]])
    out = normalize(inst, packing)
    assert out.key() == packing.key()


def test_normalize_random_corpus():
    rng = random.Random(17)
    for _ in range(150):
        n = rng.randint(1, 6)
        inst = gen_random(n, 2, "mixed", seed=rng.randrange(2**30))
        packing, _ = next_fit(inst)
        out = normalize(inst, packing)
        assert normalization_violations(inst, out) == []
        assert out.n_bins <= packing.n_bins
        again = normalize(inst, out)
        assert again.key() == out.key()


def test_normalize_keeps_optimal_bin_count():
    rng = random.Random(23)
    for _ in range(60):
        n = rng.randint(1, 6)
        inst = gen_random(n, 2, "uniform", seed=rng.randrange(2**30))
        opt, witness = exact_opt(inst)
        out = normalize(inst, witness)
        assert normalization_violations(inst, out) == []
        assert out.n_bins == opt
