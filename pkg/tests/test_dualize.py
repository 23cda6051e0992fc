import pytest

from qdiadd.adders import AdderConfig, build, build_adder, standard_configs
from qdiadd.bench import area_of
from qdiadd.cells import CellKind
from qdiadd.dualize import dualize
from qdiadd.netlist import validate
from qdiadd.railcode import Protocol


@pytest.mark.parametrize("cfg", standard_configs(), ids=lambda c: c.label)
def test_involution_and_generator_agreement(cfg):
    stage = build(cfg)
    twice = dualize(dualize(stage))
    assert twice == stage
    assert dualize(stage) == build(AdderConfig(cfg.width, cfg.approx_bits, cfg.protocol.other))
    assert area_of(dualize(stage)) == pytest.approx(area_of(stage))


def test_c_elements_preserved():
    net = build_adder(AdderConfig(16, 4))
    dual = dualize(net)
    assert dual.protocol is Protocol.RTO
    assert validate(dual) == []
    for a, b in zip(net.cells, dual.cells):
        assert a.inputs == b.inputs and a.output == b.output and a.id == b.id
        assert b.kind is a.kind.dual
        if a.kind is CellKind.C2:
            assert b.kind is CellKind.C2
    assert net.census()[CellKind.C2] == dual.census()[CellKind.C2]
    assert net.in_ports == dual.in_ports and net.out_ports == dual.out_ports
