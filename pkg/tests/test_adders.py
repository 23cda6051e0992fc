import pytest

from qdiadd.adders import AdderConfig, build, build_adder, build_stage, carry_port_name, standard_configs
from qdiadd.bench import area_of
from qdiadd.cells import CellKind
from qdiadd.errors import ConfigError
from qdiadd.netlist import validate
from qdiadd.railcode import Protocol

K = CellKind


def fa_count(net):
    return net.census().get(K.AO222, 0) + net.census().get(K.OA222, 0)


def test_config_validation():
    with pytest.raises(ConfigError):
        AdderConfig(8, 7)
    with pytest.raises(ConfigError):
        AdderConfig(1)
    assert AdderConfig(8, 6).approx_bits == 6
    assert AdderConfig(protocol="RTO").protocol is Protocol.RTO


def test_accurate_structure():
    net = build_adder(AdderConfig(32))
    # each FA carries two AO222; the HA has one more
    assert net.census()[K.AO222] == 31 * 2 + 1
    assert net.census()[K.AND2] == 1
    assert net.census()[K.C2] == 31 * 4
    assert [p.name for p in net.out_ports][-1] == "C32"
    assert net.metadata["width"] == 32 and net.metadata["approx_bits"] == 0


def test_smallest_accurate():
    net = build_adder(AdderConfig(2))
    assert net.census() == {K.C2: 4, K.OR2: 2, K.AO22: 4, K.AO222: 3, K.AND2: 1}
    assert carry_port_name(2) == "COUT"


def test_approximate_structure():
    net = build_adder(AdderConfig(32, 4))
    census = net.census()
    assert census[K.AO222] == 28 * 2
    assert census[K.C2] == 28 * 4
    # 4 OR blocks (OR2 + AND2 each), the AND block (AND2 + OR2), 2 OR2 per FA
    assert census[K.AND2] == 4 + 1
    assert census[K.OR2] == 4 + 1 + 28 * 2
    assert K.AO22 in census and len(net.cells) == 28 * 10 + 4 * 2 + 2


def test_cell_count_steps():
    counts = [len(build_adder(AdderConfig(32, k)).cells) for k in (0, 4, 8, 12, 16, 20)]
    assert all(a > b for a, b in zip(counts, counts[1:]))
    # consecutive approximate sizes differ by 4 FAs minus 4 OR blocks
    assert {b - a for a, b in zip(counts[1:], counts[2:])} == {-4 * (10 - 2)}


def test_area_steps_constant():
    areas = [area_of(build(AdderConfig(32, k))) for k in (4, 8, 12, 16, 20)]
    steps = {round(a - b, 6) for a, b in zip(areas, areas[1:])}
    assert steps == {round(4 * (28.94 - 4.06), 6)}


def test_stage_structure():
    adder = build_adder(AdderConfig(32))
    stage = build_stage(adder)
    assert validate(stage) == []
    assert stage.is_stage
    assert len(stage.out_ports) == 33
    n_out = len(stage.out_ports)
    extra = 2 * 2 * 32 + n_out + (n_out - 1)
    assert len(stage.cells) == len(adder.cells) + extra
    start, end = stage.metadata["core_cells"]
    assert end - start == len(adder.cells)
    assert [c.kind for c in stage.cells[start:end]] == [c.kind for c in adder.cells]


def test_stage_rejects_stage():
    stage = build(AdderConfig(4))
    with pytest.raises(Exception):
        build_stage(stage)


def test_standard_configs():
    cfgs = standard_configs()
    assert len(cfgs) == 12
    assert {c.approx_bits for c in cfgs} == {0, 4, 8, 12, 16, 20}
