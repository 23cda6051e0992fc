import csv
import json

import pytest

from qdiadd.adders import AdderConfig, build
from qdiadd.cli import main
from qdiadd.dualize import dualize
from qdiadd.netlist import load


def test_gen_and_dualize(tmp_path):
    rtz = tmp_path / "a.qdinet.json"
    rto = tmp_path / "b.qdinet.json"
    assert main(["gen", "--width", "8", "--approx", "2", "--out", str(rtz)]) == 0
    assert load(rtz) == build(AdderConfig(8, 2))
    assert main(["dualize", str(rtz), "--out", str(rto)]) == 0
    assert load(rto) == dualize(load(rtz))
    assert main(["gen", "--width", "4", "--no-stage", "--protocol", "rto", "--out", str(rtz)]) == 0
    assert not load(rtz).is_stage


def test_gen_rejects_bad_config(capsys):
    assert main(["gen", "--width", "4", "--approx", "3"]) == 2
    assert "approx_bits" in capsys.readouterr().err


def test_sim(tmp_path, capsys):
    out, vcd = tmp_path / "v.csv", tmp_path / "t.vcd"
    rc = main(["sim", "--width", "8", "--vectors", "20", "--worst-case", "--out", str(out),
               "--trace", str(vcd)])
    assert rc == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 22
    assert float(rows[0]["forward_latency"]) == 9
    assert vcd.read_text().startswith("$version")
    assert "mismatches 0" in capsys.readouterr().out


def test_sim_from_netlist_file(tmp_path):
    path = tmp_path / "s.qdinet.json"
    main(["gen", "--width", "4", "--protocol", "RTO", "--out", str(path)])
    assert main(["sim", "--netlist", str(path), "--vectors", "10"]) == 0


def test_check(tmp_path):
    report = tmp_path / "viol.txt"
    assert main(["check", "--width", "4", "--vectors", "50", "--out", str(report)]) == 0
    assert report.read_text() == ""
    assert main(["check", "--width", "4", "--early-reset", "A0,B0,A1,B1,A2,B2,A3,B3"]) == 0


def test_check_reports_violation(tmp_path):
    # a stage whose adder is an FA fragment driven directly is fine; a lone FA is not a stage
    path = tmp_path / "fa.qdinet.json"
    from qdiadd.blocks import gen_full_adder
    from qdiadd.netlist import save
    from qdiadd.railcode import Protocol
    save(gen_full_adder(Protocol.RTZ), path)
    assert main(["check", "--netlist", str(path), "--early-reset", "cin"]) == 1
    assert main(["check", "--netlist", str(path), "--early-reset", "cin", "--outputs", "sum"]) == 0


def test_errors(tmp_path):
    out = tmp_path / "e.csv"
    assert main(["errors", "--width", "4", "--approx", "0,2", "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert [r["approx_bits"] for r in rows] == ["0", "2"]
    assert float(rows[0]["error_rate"]) == 0
    assert main(["errors", "--width", "32", "--approx", "8", "--mode", "sampled",
                 "--samples", "1000", "--out", str(out)]) == 0


def test_report(tmp_path, capsys):
    out = tmp_path / "r.csv"
    assert main(["report", "--width", "8", "--vectors", "20", "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert [(r["protocol"], r["approx_bits"]) for r in rows] == [
        ("RTZ", "0"), ("RTZ", "4"), ("RTO", "0"), ("RTO", "4")]
    assert "average reduction" in capsys.readouterr().out


def test_library_file(tmp_path):
    lib = tmp_path / "lib.json"
    lib.write_text(json.dumps({k: {"area": 1.0, "delay": 2.0} for k in
                               ["AND2", "OR2", "INV", "AO22", "OA22", "AO222", "OA222", "C2"]}))
    out = tmp_path / "r.csv"
    assert main(["report", "--width", "4", "--approx", "0", "--protocol", "RTZ", "--vectors", "5",
                 "--library", str(lib), "--out", str(out)]) == 0
    row = next(csv.DictReader(out.open()))
    assert float(row["forward_latency"]) == 2 * 5


def test_missing_subcommand():
    with pytest.raises(SystemExit):
        main([])
