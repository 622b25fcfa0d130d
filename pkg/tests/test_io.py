from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from splitpack import Instance, Packing
from splitpack import io as spio


def test_instance_round_trip_text():
    inst = Instance(k=2, sizes=(F(3), F(1, 4), F(3, 10)))
    again = spio.loads_instance(spio.dumps_instance(inst))
    assert again == inst


def test_instance_accepts_decimals():
    inst = spio.loads_instance('{"k": 2, "items": ["0.3", "3/4", "2"]}')
    assert inst.sizes == (F(3, 10), F(3, 4), F(2))


def test_packing_round_trip_text():
    packing = Packing.build(
        [[(0, F(3, 4)), (1, F(1, 4))], [(2, F(1))]], ["S2a", "S3"]
    )
    again = spio.loads_packing(spio.dumps_packing(packing))
    assert again == packing


def test_packing_labels_default():
    packing = spio.loads_packing('{"bins": [[{"item": 0, "part": "1/2"}]]}')
    assert packing.labels == ("bin",)


@pytest.mark.parametrize(
    "text",
    [
        "not json",
        "{}",
        '{"k": "2", "items": []}',
        '{"k": 2, "items": "1/2"}',
        '{"k": 2, "items": ["0"]}',
        '{"bins": [[{"item": 0}]]}',
        '{"bins": [[{"item": "0", "part": "1/2"}]]}',
        '{"bins": [], "labels": ["x"]}',
    ],
)
def test_parse_errors(text):
    with pytest.raises(spio.ParseError):
        try:
            spio.loads_instance(text)
        finally:
            # whichever document type it resembles must still reject it
            spio.loads_packing(text)


sizes_st = st.lists(
    st.fractions(min_value=F(1, 30), max_value=F(4), max_denominator=30),
    min_size=0,
    max_size=8,
)


@given(sizes=sizes_st, k=st.integers(2, 5))
def test_instance_round_trip_property(sizes, k):
    inst = Instance(k=k, sizes=tuple(sizes))
    assert spio.loads_instance(spio.dumps_instance(inst)) == inst


@given(
    parts=st.lists(
        st.fractions(min_value=F(1, 20), max_value=F(1, 2), max_denominator=20),
        min_size=1,
        max_size=6,
    )
)
def test_packing_round_trip_property(parts):
    bins = [[(i, p)] for i, p in enumerate(parts)]
    packing = Packing.build(bins, ["bin"] * len(bins))
    assert spio.loads_packing(spio.dumps_packing(packing)) == packing
