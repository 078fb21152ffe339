import json
import math

import pytest

import prewet


def test_constants():
    assert prewet.critical_beta() == pytest.approx(math.log(1 + math.sqrt(2)) / 2, abs=1e-15)
    assert prewet.spontaneous_magnetization(1.0) == pytest.approx(0.9992757, abs=1e-6)
    ai, aip = prewet.airy(0.0)
    assert ai == pytest.approx(0.3550280539, abs=1e-10)
    assert aip == pytest.approx(-0.2588194038, abs=1e-10)
    assert prewet.airy_zero(1) == pytest.approx(2.3381074105, abs=1e-9)


def test_validation_maps_to_value_error():
    with pytest.raises(ValueError, match="beta below critical"):
        prewet.spontaneous_magnetization(0.3)
    with pytest.raises(prewet.ValidationError):
        prewet.run("simulate-walk", colour="red")


def test_fs_reference():
    fs = prewet.FSReference(1.0)
    assert fs.cdf(fs.quantile(0.3)) == pytest.approx(0.3, abs=1e-10)
    grid = [i * 0.01 for i in range(1, 1200)]
    mass = sum(fs.density(r) for r in grid) * 0.01
    assert mass == pytest.approx(1.0, abs=1e-3)
    assert fs.eigenvalue(1) > fs.eigenvalue(0) > 0


def test_bridges_stay_above_wall():
    walks = prewet.sample_bridges(32, 1.0, 1.0, 20, 7)
    assert len(walks) == 20
    for w in walks:
        assert w[0] == (-32, 0) and w[-1] == (32, 0)
        assert all(z >= 0 for _, z in w)
    assert walks == prewet.sample_bridges(32, 1.0, 1.0, 20, 7)


def test_run_and_report(tmp_path):
    out = str(tmp_path / "walk")
    m1 = prewet.run("simulate-walk", n=32, samples=120, seed=3, out=out)
    assert set(m1["outputs"]) == {"law.csv", "walks.csv", "walk_stats.csv"}
    m2 = prewet.run("simulate-walk", n=32, samples=120, seed=3, out=str(tmp_path / "again"))
    assert m1["outputs"] == m2["outputs"]
    prewet.run("analyze", out=out)
    text = prewet.report(out)
    assert "outputs verified" in text
    report = json.loads((tmp_path / "walk" / "report.json").read_text())
    assert report["provenance"] == "walk"
    assert len(report["ks"]) == 3
