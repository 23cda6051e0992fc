import pytest

from qdiadd.adders import AdderConfig, build, standard_configs
from qdiadd.bench import (MetricsRow, Report, area_of, average_reduction, measure, percent_reduction,
                          power_proxy, table_report)
from qdiadd.blocks import gen_gate_block
from qdiadd.cells import CellKind, CellSpec, Library
from qdiadd.errors import ConfigError
from qdiadd.netlist import NetlistBuilder
from qdiadd.railcode import Protocol

# reference cycle times in ns: accurate first, then k = 4, 8, 12, 16, 20
REFERENCE_CYCLE = {
    "RTZ": [3.62, 3.37, 3.04, 2.71, 2.37, 2.04],
    "RTO": [3.47, 3.23, 2.92, 2.62, 2.31, 2.00],
}


def test_reduction_formula_reproduces_reference_averages():
    rtz, rto = REFERENCE_CYCLE["RTZ"], REFERENCE_CYCLE["RTO"]
    assert average_reduction(rtz[0], rtz[1:]) == pytest.approx(25.1, abs=0.2)
    assert average_reduction(rto[0], rto[1:]) == pytest.approx(24.5, abs=0.2)
    cross = sum(percent_reduction(z, o) for z, o in zip(rtz, rto)) / len(rtz)
    assert cross == pytest.approx(3.3, abs=0.2)


def test_area():
    assert area_of(gen_gate_block("AND", Protocol.RTZ)) == pytest.approx(4.06)
    assert area_of(NetlistBuilder(Protocol.RTZ).build()) == 0
    with pytest.raises(ConfigError):
        area_of(gen_gate_block("AND", Protocol.RTZ), Library([CellSpec(CellKind.OR2, 1.0)]))


def test_power_proxy_zero():
    blk = gen_gate_block("OR", Protocol.RTZ)
    assert power_proxy([0, 0], blk) == 0
    assert power_proxy([3, 1], blk) == pytest.approx(4 * 2.03)


def test_metrics_row():
    r = measure(AdderConfig(8, 2), vectors=50)
    assert r.ok and r.row is not None
    m = r.row
    assert m.cycle_time == m.forward_latency + m.reverse_latency
    assert m.area == pytest.approx(area_of(build(AdderConfig(8, 2))))
    assert m.forward_latency == 8 - 2 + 2
    assert MetricsRow.header()[:3] == ["protocol", "width", "approx_bits"]


def test_report_trends_small():
    cfgs = [AdderConfig(12, k, p) for p in Protocol for k in (0, 2, 4, 6, 8, 10)]
    rep = table_report(cfgs, vectors=100, seed=1)
    assert rep.ok
    for proto in ("RTZ", "RTO"):
        rows = [r for r in rep.rows if r.protocol == proto]
        assert all(a.cycle_time > b.cycle_time for a, b in zip(rows, rows[1:]))
        assert all(a.area > b.area for a, b in zip(rows, rows[1:]))
        assert all(a.power_proxy >= b.power_proxy for a, b in zip(rows, rows[1:]))
        assert len({r.reverse_latency for r in rows}) == 1
    rtz = [r.area for r in rep.rows if r.protocol == "RTZ"]
    rto = [r.area for r in rep.rows if r.protocol == "RTO"]
    assert rtz == rto
    savings = rep.approximation_savings()
    assert set(savings) == {("RTZ", 12), ("RTO", 12)}
    assert savings[("RTZ", 12)]["cycle_time"] > 0
    text = rep.to_text()
    assert "RTO vs RTZ" in text


def test_report_csv_deterministic():
    cfgs = [AdderConfig(8, k) for k in (0, 4)]
    a = table_report(cfgs, vectors=30, seed=9).to_csv()
    b = table_report(cfgs, vectors=30, seed=9).to_csv()
    assert a == b
    assert a.splitlines()[0] == ",".join(MetricsRow.header())
    assert len(a.splitlines()) == 3


def test_failed_row_does_not_stop_report():
    cfgs = [AdderConfig(4), AdderConfig(8)]
    slow = Library([CellSpec(k, 1.0, 1.0) for k in CellKind])
    rep = table_report(cfgs, vectors=5, library=slow)
    assert rep.ok
    broken = Report([measure(AdderConfig(4), vectors=5)])
    broken.results[0].error = "boom"
    assert not broken.ok


def test_empty_configs():
    with pytest.raises(ValueError):
        table_report([])


def test_standard_matrix_shape():
    assert len(standard_configs()) == 12
