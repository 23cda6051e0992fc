import pytest
from hypothesis import given, strategies as st

from qdiadd.railcode import (BusState, Codeword, Protocol, RailPair, classify_pair, decode_bus,
                             encode_word)

RTZ, RTO = Protocol.RTZ, Protocol.RTO


def test_classification_tables():
    assert classify_pair((1, 0), RTZ) is Codeword.DATA1
    assert classify_pair((0, 1), RTZ) is Codeword.DATA0
    assert classify_pair((0, 0), RTZ) is Codeword.SPACER
    assert classify_pair((1, 1), RTZ) is Codeword.ILLEGAL
    assert classify_pair((0, 1), RTO) is Codeword.DATA1
    assert classify_pair((1, 0), RTO) is Codeword.DATA0
    assert classify_pair((1, 1), RTO) is Codeword.SPACER
    assert classify_pair((0, 0), RTO) is Codeword.ILLEGAL


def test_encode_examples():
    assert encode_word(1, 1, RTZ) == [(1, 0)]
    assert encode_word(1, 1, RTO) == [(0, 1)]
    assert encode_word(5, 4, RTZ) == [(1, 0), (0, 1), (1, 0), (0, 1)]
    assert isinstance(encode_word(5, 4, RTZ)[0], RailPair)


def test_encode_range():
    with pytest.raises(ValueError):
        encode_word(16, 4, RTZ)
    with pytest.raises(ValueError):
        encode_word(-1, 4, RTZ)


def test_decode_examples():
    assert decode_bus(encode_word(9, 4, RTO), RTO).value == 9
    assert decode_bus([(0, 0)] * 3, RTZ).state is BusState.SPACER
    assert decode_bus([(1, 0), (0, 0)], RTZ).state is BusState.MIXED
    assert decode_bus([(1, 0), (1, 1)], RTZ).state is BusState.ILLEGAL
    assert decode_bus([(1, 1), (1, 1)], RTO).state is BusState.SPACER


@given(st.integers(1, 40).flatmap(lambda w: st.tuples(st.just(w), st.integers(0, 2**w - 1))),
       st.sampled_from(list(Protocol)))
def test_round_trip(wv, proto):
    width, value = wv
    bus = encode_word(value, width, proto)
    assert all(classify_pair(p, proto).is_data for p in bus)
    got = decode_bus(bus, proto)
    assert got.is_value and got.value == value


@pytest.mark.parametrize("width", [1, 2, 3, 4, 5])
def test_rto_is_complement_of_rtz(width):
    for v in range(1 << width):
        rtz = encode_word(v, width, RTZ)
        rto = encode_word(v, width, RTO)
        assert rto == [(1 - a, 1 - b) for a, b in rtz]
