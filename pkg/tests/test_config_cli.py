"""Config round-trips, deterministic CSV emission, and CLI smoke runs."""

import numpy as np
import pytest

from multigibbs.cli import main
from multigibbs.config import (
    dump_config,
    kernel_from_config,
    measure_from_config,
    motif_from_config,
    parse_config,
)
from multigibbs.kernels import CouplingMatrix, StepKernel
from multigibbs.tables import Table, emit_csv, emit_plotdata

BASE_CONFIG = """\
seed = 7

[measure]
kind = "ising_pm1"

[motif]
preset = "K2"

[kernel]
preset = "complete"

[model]
theta = 1.0
B = 0.0
v = 2

[sampler]
n = 64
sweeps = 60
burn_in = 20
thin = 2
"""


class TestConfig:
    def test_round_trip_identity(self):
        cfg = parse_config(BASE_CONFIG)
        again = parse_config(dump_config(cfg))
        assert again == cfg
        assert parse_config(dump_config(again)) == again

    def test_round_trip_nested_arrays(self):
        text = (
            'seed = 3\n[kernel]\nmasses = [0.5, 0.5]\n'
            'values = [[0.0, 2.0], [2.0, 0.0]]\n'
        )
        cfg = parse_config(text)
        assert parse_config(dump_config(cfg)) == cfg
        kernel = kernel_from_config(cfg["kernel"])
        assert isinstance(kernel, StepKernel) and kernel.values[0, 1] == 2.0

    def test_seed_mandatory(self):
        with pytest.raises(ValueError):
            parse_config('[measure]\nkind = "ising_pm1"\n')

    def test_measure_kinds(self):
        assert measure_from_config({"kind": "bernoulli", "p": 0.25}).weights[1] == 0.25
        tp = measure_from_config({"kind": "three_point", "w": 0.5})
        assert tp.n_atoms == 3
        quad = measure_from_config(
            {"kind": "quadrature", "density": "uniform", "a": -1, "b": 1, "nodes": 16}
        )
        assert quad.n_atoms == 16
        atoms = measure_from_config(
            {"kind": "atoms", "points": [-1.0, 2.0], "weights": [0.75, 0.25]}
        )
        assert atoms.support_max == 2.0
        literal = measure_from_config({"atoms": [[-1.0, 2.0], [0.75, 0.25]]})
        assert literal.support_max == 2.0
        with pytest.raises(ValueError):
            measure_from_config({"kind": "cauchy"})

    def test_motif_kinds(self):
        assert motif_from_config({"preset": "K3"}).v == 3
        custom = motif_from_config({"v": 3, "edges": [[1, 2], [1, 3]]})
        assert custom.edges == ((1, 2), (1, 3))

    def test_kernel_kinds(self):
        assert kernel_from_config({"preset": "tripartite"}).k == 3
        er = kernel_from_config({"preset": "er_quenched", "n": 5, "p": 0.5, "seed": 1})
        assert isinstance(er, CouplingMatrix) and er.n == 5


class TestTables:
    def test_header_only(self, tmp_path):
        path = tmp_path / "empty.csv"
        emit_csv(Table(["a", "b"]), path)
        assert path.read_text() == "a,b\n"

    def test_byte_identical_reruns(self, tmp_path):
        tab = Table(["x", "y"])
        tab.add(1.0 / 3.0, "s")
        tab.add(2.0**-52, "t")
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        emit_csv(tab, p1)
        emit_csv(tab, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_seventeen_digits_round_trip(self, tmp_path):
        value = 0.9575040240772686
        tab = Table(["v"])
        tab.add(value)
        path = tmp_path / "v.csv"
        emit_csv(tab, path)
        text = path.read_text().splitlines()[1]
        assert float(text) == value  # 17 significant digits reproduce float64
        assert "." in text  # locale-independent decimal point

    def test_plotdata_format(self, tmp_path):
        tab = Table(["x", "y"])
        tab.add(1, 2.5)
        path = tmp_path / "p.dat"
        emit_plotdata(tab, path)
        lines = path.read_text().splitlines()
        assert lines[0].startswith("# ")
        assert lines[1] == "1 2.5"

    def test_row_width_guard(self):
        with pytest.raises(ValueError):
            Table(["a"]).add(1, 2)


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "exp.toml"
    path.write_text(BASE_CONFIG)
    return str(path)


class TestCli:
    def test_tilt(self, config_file, tmp_path):
        out = str(tmp_path / "o")
        assert main(["tilt", "--config", config_file, "--out", out]) == 0
        header = (tmp_path / "o" / "tilt.csv").read_text().splitlines()[0]
        assert header == "theta,alpha,mean,var,rate"

    def test_solve_scalar(self, config_file, tmp_path):
        out = str(tmp_path / "o")
        assert main(["solve-scalar", "--config", config_file, "--out", out]) == 0
        body = (tmp_path / "o" / "solve_scalar.csv").read_text()
        assert "0.95750402" in body

    def test_sample_deterministic(self, config_file, tmp_path):
        o1, o2 = str(tmp_path / "a"), str(tmp_path / "b")
        args = ["sample", "--config", config_file, "--seed", "5"]
        assert main(args + ["--out", o1]) == 0
        assert main(args + ["--out", o2]) == 0
        t1 = (tmp_path / "a" / "trace.csv").read_bytes()
        assert t1 == (tmp_path / "b" / "trace.csv").read_bytes()
        assert t1.startswith(b"sweep,")

    def test_phase_scan(self, config_file, tmp_path):
        out = str(tmp_path / "o")
        code = main(
            ["phase-scan", "--config", config_file, "--out", out,
             "--theta-min", "0.2", "--theta-max", "0.8", "--steps", "4"]
        )
        assert code == 0
        rows = (tmp_path / "o" / "phase_scan.csv").read_text().splitlines()
        assert len(rows) == 5
        assert (tmp_path / "o" / "phase_scan.dat").exists()

    def test_exact_small_n(self, config_file, tmp_path):
        out = str(tmp_path / "o")
        assert main(
            ["exact-small-n", "--config", config_file, "--out", out, "--n", "8"]
        ) == 0
        body = (tmp_path / "o" / "exact_small_n.csv").read_text()
        assert body.splitlines()[0].startswith("n,theta,B,Z_n")

    def test_preset_writes_tables_and_passes(self, tmp_path):
        out = str(tmp_path / "o")
        assert main(["preset", "theta-c", "--out", out]) == 0
        assert (tmp_path / "o" / "theta-c_theta_c.csv").exists()

    def test_free_energy_and_critical_theta(self, config_file, tmp_path):
        out = str(tmp_path / "o")
        assert main(["free-energy", "--config", config_file, "--out", out]) == 0
        assert main(["critical-theta", "--config", config_file, "--out", out]) == 0
        body = (tmp_path / "o" / "critical_theta.csv").read_text()
        assert abs(float(body.splitlines()[1].split(",")[1]) - 0.5) < 1e-6
