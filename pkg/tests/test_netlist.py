import json

import pytest

from qdiadd.adders import AdderConfig, build, build_adder
from qdiadd.blocks import gen_full_adder
from qdiadd.cells import CellKind
from qdiadd.errors import NetlistParseError, NetlistValidationError
from qdiadd.netlist import (SCHEMA, NetlistBuilder, deserialize, load, save, serialize, validate)
from qdiadd.railcode import Protocol

K = CellKind


def test_generated_adder_validates():
    assert validate(build_adder(AdderConfig(32))) == []
    assert validate(build(AdderConfig(32, 8, Protocol.RTO))) == []


def test_double_driver():
    b = NetlistBuilder(Protocol.RTZ)
    x, y = b.input_port("a"), b.input_port("b")
    out = b.gate(K.AND2, (x.rail1, y.rail1), "z")
    b.gate(K.OR2, (x.rail0, y.rail0), output=out)
    report = validate(b.build())
    assert len(report) == 1
    assert "z" in report[0]


def test_arity_violation():
    b = NetlistBuilder(Protocol.RTZ)
    x, y = b.input_port("a"), b.input_port("b")
    b.gate(K.AO22, (x.rail1, y.rail1, x.rail0), "z")
    report = validate(b.build())
    assert any("arity" in v for v in report)


def test_combinational_cycle_and_self_loop():
    b = NetlistBuilder(Protocol.RTZ)
    x = b.input_port("a")
    n1 = b.net("n1")
    n2 = b.gate(K.AND2, (x.rail1, n1), "n2")
    b.gate(K.OR2, (n2, x.rail0), output=n1)
    assert any("loop" in v for v in validate(b.build()))

    b = NetlistBuilder(Protocol.RTZ)
    x = b.input_port("a")
    n = b.net("loop")
    b.gate(K.C2, (x.rail1, n), output=n)
    assert validate(b.build())


def test_driven_input_and_undriven_output():
    b = NetlistBuilder(Protocol.RTZ)
    x = b.input_port("a")
    b.gate(K.AND2, (x.rail0, x.rail0), output=x.rail1)
    b.output_port("z", (b.net("z_1"), b.net("z_0")))
    report = validate(b.build())
    assert len(report) >= 2


@pytest.mark.parametrize("proto", list(Protocol))
def test_round_trip(proto):
    net = build_adder(AdderConfig(8, 0, proto))
    assert deserialize(serialize(net)) == net
    stage = build(AdderConfig(8, 4, proto))
    assert deserialize(serialize(stage)) == stage


def test_canonical_format():
    text = serialize(gen_full_adder(Protocol.RTZ))
    doc = json.loads(text)
    assert doc["schema"] == SCHEMA
    assert doc["protocol"] == "RTZ"
    assert {"inputs", "outputs"} <= set(doc["ports"])
    assert doc["cells"][0]["kind"] == "C2"
    assert serialize(deserialize(text)) == text


def test_unknown_kind_is_parse_error():
    doc = json.loads(serialize(gen_full_adder(Protocol.RTZ)))
    doc["cells"][3]["kind"] = "XOR2"
    with pytest.raises(NetlistParseError, match="XOR2"):
        deserialize(json.dumps(doc))


def test_malformed_text_reports_position():
    with pytest.raises(NetlistParseError) as info:
        deserialize('{\n  "schema": "qdi-netlist-v1",\n  "protocol": RTZ\n}')
    assert info.value.line == 3


def test_schema_violation_is_validation_error():
    doc = json.loads(serialize(gen_full_adder(Protocol.RTZ)))
    doc["cells"][1]["output"] = doc["cells"][0]["output"]
    with pytest.raises(NetlistValidationError):
        deserialize(json.dumps(doc))


def test_degenerate_netlist():
    b = NetlistBuilder(Protocol.RTO)
    b.input_port("a")
    net = b.build()
    assert validate(net) == []
    assert deserialize(serialize(net)) == net


def test_file_io(tmp_path):
    net = build_adder(AdderConfig(4))
    path = tmp_path / "rca4.qdinet.json"
    save(net, path)
    assert load(path) == net
