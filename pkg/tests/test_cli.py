"""End-to-end tests of the lattice-heat command line."""

import json
import math

import pytest

from latticeheat.cli import run
from latticeheat.kernel import LatticeSequence, read_sequence_csv, write_sequence_csv

B0_AT_2 = 0.30850832255367104


def test_kernel_subcommand(tmp_path):
    out = tmp_path / "k.csv"
    assert run(["kernel", "--t", "1", "--eps", "1e-12", "--out", str(out)]) == 0
    seq = read_sequence_csv(out)
    assert seq.value(0) == pytest.approx(B0_AT_2, abs=1e-12)
    assert seq.value(1) == seq.value(-1)


def test_kernel_round_trip_through_evolve(tmp_path):
    k_csv = tmp_path / "k.csv"
    assert run(["kernel", "--t", "1", "--out", str(k_csv)]) == 0
    out = tmp_path / "u.csv"
    assert run(["evolve", "--t", "2", "--f", str(k_csv), "--out", str(out)]) == 0
    u = read_sequence_csv(out)
    direct = tmp_path / "k3.csv"
    assert run(["kernel", "--t", "3", "--out", str(direct)]) == 0
    k3 = read_sequence_csv(direct)
    assert u.mass() == pytest.approx(1.0, abs=1e-10)
    assert u.value(0) == pytest.approx(k3.value(0), abs=1e-10)
    meta = json.loads((tmp_path / "u.csv.json").read_text())
    assert meta["t"] == 2.0


def test_determinism_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        assert run(["decay", "--quantity", "G", "--p", "inf", "--grid", "dyadic:16:512", "--out", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a.csv.json").read_bytes() == (tmp_path / "b.csv.json").read_bytes()


def test_poly_roots_table(tmp_path):
    out = tmp_path / "p.csv"
    assert run(["poly", "--kmax", "6", "--roots", "--out", str(out)]) == 0
    rows = out.read_text().splitlines()
    assert rows[0] == "k,root_index,root"
    got = {}
    for line in rows[1:]:
        k, idx, root = line.split(",")
        got.setdefault(int(k), []).append(float(root))
    assert got[2][0] == pytest.approx(-1.0 / 3.0, abs=1e-10)
    assert got[4][0] == pytest.approx(-1.63703823077, abs=1e-4)


def test_poly_coefficients_table(tmp_path):
    out = tmp_path / "c.csv"
    assert run(["poly", "--kmax", "3", "--out", str(out)]) == 0
    rows = out.read_text().splitlines()
    assert rows[1].startswith("0,0,1")
    assert rows[4].split(",")[:6] == ["3", "3", "0", "1", "15", "15"]


def test_decay_sidecar_slope(tmp_path):
    out = tmp_path / "d.csv"
    assert run(["decay", "--quantity", "G", "--p", "inf", "--grid", "dyadic:16:1024", "--out", str(out)]) == 0
    meta = json.loads((tmp_path / "d.csv.json").read_text())
    assert meta["slope"] == pytest.approx(-0.5, abs=0.03)


def test_fourier_subcommand(tmp_path):
    out = tmp_path / "f.csv"
    assert run(["fourier", "--t", "1", "--out", str(out)]) == 0
    meta = json.loads((tmp_path / "f.csv.json").read_text())
    assert meta["max_abs_error"] <= 1e-10


def test_duhamel_subcommand(tmp_path):
    spatial = tmp_path / "spatial.csv"
    write_sequence_csv(spatial, LatticeSequence.delta(0))
    g_path = tmp_path / "g.json"
    g_path.write_text(json.dumps({"kind": "separable", "spatial": "spatial.csv", "gamma": 2.0, "amplitude": 1.0}))
    out = tmp_path / "ug.csv"
    assert run(["duhamel", "--t", "10", "--g", str(g_path), "--eps", "1e-9", "--out", str(out)]) == 0
    u = read_sequence_csv(out)
    assert u.mass() == pytest.approx(10.0 / 11.0, abs=1e-8)


def test_converge_subcommand(tmp_path):
    f_csv = tmp_path / "f.csv"
    write_sequence_csv(f_csv, LatticeSequence.delta(3))
    out = tmp_path / "c.csv"
    assert run(["converge", "--f", str(f_csv), "--p", "1", "--grid", "dyadic:16:1024", "--out", str(out)]) == 0
    meta = json.loads((tmp_path / "c.csv.json").read_text())
    assert meta["slope"] == pytest.approx(-0.5, abs=0.05)


def test_diffdecay_subcommand(tmp_path):
    out = tmp_path / "dd.csv"
    assert run(["diffdecay", "--order", "3", "--p", "1", "--grid", "dyadic:16:1024", "--out", str(out)]) == 0
    meta = json.loads((tmp_path / "dd.csv.json").read_text())
    assert meta["experimental"] is True
    assert math.isfinite(meta["slope"])


def test_plot_writes_svg(tmp_path):
    out = tmp_path / "d.csv"
    assert run(["decay", "--quantity", "G", "--p", "2", "--grid", "dyadic:16:512", "--plot", "--out", str(out)]) == 0
    svg = (tmp_path / "d.csv.svg").read_text()
    assert svg.startswith("<svg")
    assert "polyline" in svg


def test_usage_errors_exit_2(tmp_path):
    out = tmp_path / "x.csv"
    assert run(["kernel", "--t", "-1", "--out", str(out)]) == 2
    assert not out.exists()
    assert run(["nonsense"]) == 2
    assert run(["converge", "--p", "1", "--out", str(out)]) == 2
    assert not out.exists()


def test_computation_failure_exits_1(tmp_path):
    spatial = tmp_path / "spatial.csv"
    write_sequence_csv(spatial, LatticeSequence.delta(0))
    g_path = tmp_path / "g.json"
    g_path.write_text(json.dumps({"kind": "separable", "spatial": "spatial.csv", "gamma": 2.0, "amplitude": 1.0}))
    out = tmp_path / "ug.csv"
    assert run(["duhamel", "--t", "100", "--g", str(g_path), "--eps", "1e-15", "--out", str(out)]) == 1
    assert not out.exists()
