"""Config parsing and the command-line surface."""

import json
import math

import numpy as np
import pytest

from clusterflip import load_graph
from clusterflip.cli import main
from clusterflip.config import ConfigError, default_mu_for, parse_config


GOOD_RUN_CONFIG = """
[lattice]
type = square
n1 = 4
n2 = 4
bc = sides-pm

[chain]
beta = 0.5
eta = 0.1
iterations = 40
seed = 12
initial = all-minus
flip_kind = exact
involution = diagonal

[output]
trace_path = {trace}
summary_path = {summary}
"""


class TestParseConfig:
    def test_full_document(self):
        cfg = parse_config(
            """
            [lattice]
            type = disk
            bc = arcs
            arcs = 0:1.0471975511965976, 3.141592653589793:5.235987755982989
            h = 0.1
            seed = 3

            [chain]
            beta = 0.5
            eta = 0.333
            iterations = 1000
            seed = 9
            flip_kind = metropolized

            [matching]
            norm = l2
            mu = x-axis

            [output]
            trace_path = out.csv
            snapshot_interval = 100
            """
        )
        assert cfg.lattice.type == "disk"
        assert cfg.lattice.arcs == ((0.0, 1.0471975511965976), (3.141592653589793, 5.235987755982989))
        assert cfg.chain.flip_kind == "metropolized"
        assert cfg.matching.norm == "l2"
        assert cfg.output.snapshot_interval == 100

    def test_unknown_section_rejected(self):
        with pytest.raises(ConfigError):
            parse_config("[lattice]\ntype = square\nn1 = 2\nn2 = 2\nbc = sides-pm\n[extras]\nx = 1\n")

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError):
            parse_config("[lattice]\ntype = square\nn1 = 2\nn2 = 2\nbc = sides-pm\ncolour = red\n")

    def test_missing_required_key(self):
        with pytest.raises(ConfigError):
            parse_config("[lattice]\ntype = square\nbc = sides-pm\n")  # no n1/n2

    def test_bad_value_type(self):
        with pytest.raises(ConfigError):
            parse_config("[lattice]\ntype = square\nn1 = two\nn2 = 2\nbc = sides-pm\n")

    def test_bad_norm(self):
        with pytest.raises(ConfigError):
            parse_config("[matching]\nnorm = l7\n")

    def test_default_mu(self):
        assert default_mu_for("sides-pm") == "diagonal"
        assert default_mu_for("quadrant-pm") == "x-axis"
        assert default_mu_for("arcs") == "x-axis"


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestBuildLattice:
    def test_writes_graph_and_svg(self, tmp_path, capsys):
        graph_path = tmp_path / "g.graph"
        svg_path = tmp_path / "g.svg"
        cfg = write(tmp_path / "cfg.ini", f"""
[lattice]
type = square
n1 = 20
n2 = 20
bc = sides-pm

[output]
graph_path = {graph_path}
svg_path = {svg_path}
""")
        assert main(["build-lattice", "--config", cfg]) == 0
        g = load_graph(graph_path)
        assert g.n_interior == 400
        assert g.n_boundary == 80
        svg_text = svg_path.read_text()
        assert svg_text.count("<circle") == g.n_vertices
        assert svg_text.count("<line") == g.n_edges

    def test_byte_identical_on_rerun(self, tmp_path):
        graph_path = tmp_path / "g.graph"
        cfg = write(tmp_path / "cfg.ini", f"""
[lattice]
type = disk
h = 0.2
bc = quadrant-pm
seed = 5

[output]
graph_path = {graph_path}
""")
        assert main(["build-lattice", "--config", cfg, "--quiet"]) == 0
        first = graph_path.read_bytes()
        assert main(["build-lattice", "--config", cfg, "--quiet"]) == 0
        assert graph_path.read_bytes() == first

    def test_invalid_combo_exits_2(self, tmp_path, capsys):
        cfg = write(tmp_path / "cfg.ini", """
[lattice]
type = square
n1 = 3
n2 = 4
bc = quadrant-pm

[output]
graph_path = unused.graph
""")
        assert main(["build-lattice", "--config", cfg]) == 2
        assert "error:" in capsys.readouterr().err

    def test_missing_config_file_exits_2(self, capsys):
        assert main(["build-lattice", "--config", "/nonexistent/cfg.ini"]) == 2


class TestRun:
    def test_trace_and_summary(self, tmp_path):
        trace = tmp_path / "trace.csv"
        summary = tmp_path / "summary.json"
        cfg = write(tmp_path / "cfg.ini", GOOD_RUN_CONFIG.format(trace=trace, summary=summary))
        assert main(["run", "--config", cfg, "--quiet"]) == 0

        lines = trace.read_text().splitlines()
        assert lines[0] == "iter,avg_spin,move,accepted"
        assert len(lines) == 41
        assert all(line.split(",")[2] in ("sw", "flip") for line in lines[1:])

        data = json.loads(summary.read_text())
        assert set(data) == {
            "transitions", "flip_attempts", "flip_accepts",
            "final_avg_spin", "seed", "wall_time_ms",
        }
        assert data["seed"] == 12

    def test_trace_deterministic(self, tmp_path):
        trace = tmp_path / "trace.csv"
        summary = tmp_path / "summary.json"
        cfg = write(tmp_path / "cfg.ini", GOOD_RUN_CONFIG.format(trace=trace, summary=summary))
        assert main(["run", "--config", cfg, "--quiet"]) == 0
        first = trace.read_bytes()
        assert main(["run", "--config", cfg, "--quiet"]) == 0
        assert trace.read_bytes() == first

    def test_missing_involution_fails_before_outputs(self, tmp_path, capsys):
        trace = tmp_path / "trace.csv"
        cfg = write(tmp_path / "cfg.ini", f"""
[lattice]
type = square
n1 = 4
n2 = 4
bc = sides-pm

[chain]
beta = 0.5
eta = 0.1
iterations = 10
seed = 1
flip_kind = exact

[output]
trace_path = {trace}
""")
        assert main(["run", "--config", cfg]) == 2
        assert not trace.exists()

    def test_replicas_write_per_replica_traces(self, tmp_path, monkeypatch):
        monkeypatch.setenv("CLUSTERFLIP_THREADS", "2")
        trace = tmp_path / "trace.csv"
        summary = tmp_path / "summary.json"
        cfg = write(tmp_path / "cfg.ini", f"""
[lattice]
type = square
n1 = 3
n2 = 3
bc = sides-pm

[chain]
beta = 0.5
eta = 0
iterations = 20
seed = 4

[output]
trace_path = {trace}
summary_path = {summary}
""")
        assert main(["run", "--config", cfg, "--replicas", "3", "--quiet"]) == 0
        for r in range(3):
            assert (tmp_path / f"trace.r{r}.csv").exists()
        merged = json.loads(summary.read_text())
        assert len(merged["replicas"]) == 3
        assert merged["transitions"] == sum(s["transitions"] for s in merged["replicas"])

    def test_snapshots_and_svg(self, tmp_path):
        svg = tmp_path / "trace.svg"
        snaps = tmp_path / "snaps.txt"
        cfg = write(tmp_path / "cfg.ini", f"""
[lattice]
type = square
n1 = 3
n2 = 3
bc = sides-pm

[chain]
beta = 0.5
eta = 0
iterations = 30
seed = 4

[output]
svg_path = {svg}
snapshot_path = {snaps}
snapshot_interval = 10
""")
        assert main(["run", "--config", cfg, "--quiet"]) == 0
        assert "<polyline" in svg.read_text()
        lines = snaps.read_text().splitlines()
        assert len(lines) == 3
        assert all(len(line.split()[1]) == 9 for line in lines)


class TestOracleCheck:
    def test_bundled_suite_passes(self, capsys):
        assert main(["oracle-check"]) == 0
        out = capsys.readouterr().out
        assert "checks passed" in out
        assert "FAIL" not in out

    def test_tampered_kernel_fails_with_witness(self, capsys):
        assert main(["oracle-check", "--tamper"]) == 1
        out = capsys.readouterr().out
        assert "FAIL" in out
        assert "witness pair" in out

    def test_oversized_instance_refused(self, tmp_path, capsys):
        cfg = write(tmp_path / "cfg.ini", """
[lattice]
type = square
n1 = 10
n2 = 10
bc = sides-pm
""")
        assert main(["oracle-check", "--config", cfg]) == 2
        assert "cap" in capsys.readouterr().err

    def test_custom_tiny_instance(self, tmp_path, capsys):
        cfg = write(tmp_path / "cfg.ini", """
[lattice]
type = square
n1 = 1
n2 = 2
bc = sides-pm

[chain]
beta = 0.8
eta = 0.25
iterations = 1
seed = 0
""")
        assert main(["oracle-check", "--config", cfg]) == 0


class TestMatchingReport:
    def test_symmetric_square_zero_displacement(self, tmp_path, capsys):
        report = tmp_path / "matching.csv"
        svg = tmp_path / "matching.svg"
        cfg = write(tmp_path / "cfg.ini", f"""
[lattice]
type = square
n1 = 6
n2 = 6
bc = sides-pm

[matching]
norm = linf

[output]
report_path = {report}
svg_path = {svg}
""")
        assert main(["matching-report", "--config", cfg]) == 0
        lines = report.read_text().splitlines()
        assert lines[0] == "i,j,xi,yi,x_mu_i,y_mu_i,xj,yj,displacement"
        assert len(lines) == 37
        displacements = [float(line.split(",")[-1]) for line in lines[1:]]
        assert max(displacements) == 0.0
        assert "max displacement 0" in capsys.readouterr().out
        assert "<svg" in svg.read_text()

    def test_disk_report_is_local(self, tmp_path):
        report = tmp_path / "matching.csv"
        cfg = write(tmp_path / "cfg.ini", f"""
[lattice]
type = disk
h = 0.15
bc = quadrant-pm
seed = 2

[output]
report_path = {report}
""")
        assert main(["matching-report", "--config", cfg, "--quiet"]) == 0
        lines = report.read_text().splitlines()[1:]
        displacements = np.array([float(line.split(",")[-1]) for line in lines])
        assert displacements.mean() < 2 * 0.15

    def test_missing_report_path_exits_2(self, tmp_path):
        cfg = write(tmp_path / "cfg.ini", """
[lattice]
type = square
n1 = 4
n2 = 4
bc = sides-pm
""")
        assert main(["matching-report", "--config", cfg]) == 2
