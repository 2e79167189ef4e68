"""Tests for the figure scripts.

All inputs are produced through the primary package's public command-line
interface (subprocess), never its Python API: the figure layer depends
only on the documented file formats.
"""

import hashlib
import subprocess
import sys
from pathlib import Path

import pytest

RENDER = Path(__file__).parent / "render.py"


def run_cli(*args):
    proc = subprocess.run(
        [sys.executable, "-m", "torusclusters", *args], capture_output=True, text=True
    )
    assert proc.returncode == 0, proc.stderr
    return proc


def run_render(*args):
    return subprocess.run(
        [sys.executable, str(RENDER), *args], capture_output=True, text=True
    )


def sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    """Small end-to-end dataset generated via the primary CLI."""
    root = tmp_path_factory.mktemp("data")
    run_cli(
        "simulate", "--n", "120", "--beta", "25", "--h", "0.5", "--steps", "300",
        "--print-every", "10", "--dump-traj", "--seed", "2",
        "--out", str(root / "sim1d"),
    )
    run_cli(
        "simulate", "--n", "150", "--dims", "2", "--beta", "60", "--h", "0.25",
        "--steps", "200", "--print-every", "20", "--dump-traj", "--seed", "3",
        "--out", str(root / "sim2d"),
    )
    run_cli(
        "stability", "--gammas", "0.5,1,2", "--beta-min", "3", "--beta-max", "12",
        "--beta-steps", "7", "--hermite-dim", "30", "--wavenumbers", "4",
        "--skip-beta-critical", "--out", str(root / "stab"),
    )
    run_cli(
        "fluctuations", "--hermite-dim", "16", "--wavenumbers", "6",
        "--times", "0.5,5,10", "--n-offsets", "48", "--quadrature-points", "24",
        "--out", str(root / "fluc"),
    )
    run_cli(
        "sweep-convergence", "--gammas", "0.5,1", "--n", "40", "--steps", "300",
        "--h", "0.25", "--n-traj", "2", "--threshold", "2.4",
        "--out", str(root / "conv"),
    )
    run_cli(
        "sweep-onset", "--ns", "200,300,400", "--n-traj", "2", "--h", "0.5",
        "--steps", "100", "--print-every", "4", "--fit-min", "0", "--seed", "5",
        "--out", str(root / "onset"),
    )
    return root


ALL_KINDS = [
    ("observables", lambda d: [str(d / "sim1d/observables.csv")], ["--threshold", "0.707", "--beta", "25"]),
    ("psi_surface", lambda d: [str(d / "stab/psi_grid.csv")], []),
    ("fluct_snapshots", lambda d: [str(d / "fluc/covariance.csv")], []),
    ("convergence_sweep", lambda d: [str(d / "conv/convergence.csv")], []),
    ("onset_fit", lambda d: [str(d / "onset/onset.csv"), str(d / "onset/onset_fit.csv")], []),
    ("snapshot", lambda d: [str(d / "sim2d/trajectory.txt")], []),
]


class TestAllKindsRender:
    @pytest.mark.parametrize("kind,inputs,extra", ALL_KINDS, ids=[k for k, _, _ in ALL_KINDS])
    def test_renders_and_is_byte_stable(self, dataset, tmp_path, kind, inputs, extra):
        out_a = tmp_path / f"{kind}_a.png"
        out_b = tmp_path / f"{kind}_b.png"
        for out in (out_a, out_b):
            proc = run_render("--kind", kind, "--in", *inputs(dataset), "--out", str(out), *extra)
            assert proc.returncode == 0, proc.stderr
            assert out.exists() and out.stat().st_size > 1000
        assert sha256(out_a) == sha256(out_b)

    def test_1d_worldlines(self, dataset, tmp_path):
        out = tmp_path / "worldlines.png"
        proc = run_render(
            "--kind", "snapshot", "--in", str(dataset / "sim1d/trajectory.txt"),
            "--out", str(out),
        )
        assert proc.returncode == 0, proc.stderr
        assert out.exists()

    def test_2d_frame_selection(self, dataset, tmp_path):
        out0 = tmp_path / "frame0.png"
        out_last = tmp_path / "frame_last.png"
        run_render("--kind", "snapshot", "--in", str(dataset / "sim2d/trajectory.txt"),
                   "--out", str(out0), "--frame", "0")
        run_render("--kind", "snapshot", "--in", str(dataset / "sim2d/trajectory.txt"),
                   "--out", str(out_last))
        assert sha256(out0) != sha256(out_last)


class TestErrorHandling:
    def test_header_only_csv_is_an_error(self, tmp_path):
        bad = tmp_path / "empty.csv"
        bad.write_text("time,d_com,msd,t_kin,u_pot\n")
        out = tmp_path / "x.png"
        proc = run_render("--kind", "observables", "--in", str(bad), "--out", str(out))
        assert proc.returncode == 2
        assert "no data rows" in proc.stderr
        assert not out.exists()

    def test_malformed_field_names_file_line_column(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("time,d_com,msd,t_kin,u_pot\n0.0,oops,1,2,3\n")
        proc = run_render("--kind", "observables", "--in", str(bad), "--out", str(tmp_path / "x.png"))
        assert proc.returncode == 2
        assert "bad.csv" in proc.stderr
        assert "line 2" in proc.stderr
        assert "d_com" in proc.stderr

    def test_wrong_header(self, tmp_path):
        bad = tmp_path / "wrong.csv"
        bad.write_text("a,b\n1,2\n")
        proc = run_render("--kind", "psi_surface", "--in", str(bad), "--out", str(tmp_path / "x.png"))
        assert proc.returncode == 2
        assert "misses column" in proc.stderr

    def test_missing_file(self, tmp_path):
        proc = run_render(
            "--kind", "observables", "--in", str(tmp_path / "nope.csv"),
            "--out", str(tmp_path / "x.png"),
        )
        assert proc.returncode == 2

    def test_bad_frame_index(self, tmp_path):
        traj = tmp_path / "traj.txt"
        traj.write_text("# t=0\n1.0 2.0\n3.0 4.0\n")
        proc = run_render(
            "--kind", "snapshot", "--in", str(traj), "--out", str(tmp_path / "x.png"),
            "--frame", "7",
        )
        assert proc.returncode == 2
        assert "out of range" in proc.stderr
