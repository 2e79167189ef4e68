import numpy as np
import pytest

from torusclusters.cli import main
from torusclusters.simulator import read_frames, read_observables_csv


def read_csv_dict(path):
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    return header, rows


def read_manifest(path):
    out = {}
    for line in open(path):
        key, _, value = line.strip().partition("=")
        out[key] = value
    return out


class TestSimulate:
    def test_writes_observables_and_manifest(self, tmp_path):
        out = tmp_path / "sim"
        code = main([
            "simulate", "--n", "30", "--steps", "50", "--print-every", "10",
            "--h", "0.1", "--seed", "3", "--out", str(out),
        ])
        assert code == 0
        data = read_observables_csv(out / "observables.csv")
        assert len(data["time"]) == 6
        manifest = read_manifest(out / "manifest.txt")
        assert manifest["command"] == "simulate"
        assert manifest["seed"] == "3"
        assert manifest["effective_h"] == "0.1"

    def test_dump_trajectory(self, tmp_path):
        out = tmp_path / "sim"
        code = main([
            "simulate", "--n", "20", "--steps", "30", "--print-every", "10",
            "--dump-traj", "--out", str(out),
        ])
        assert code == 0
        frames = read_frames(out / "trajectory.txt")
        assert len(frames) == 4
        assert frames[0][1].shape == (20, 1)

    def test_reproducible(self, tmp_path):
        args = [
            "simulate", "--n", "20", "--steps", "30", "--print-every", "10",
            "--seed", "9",
        ]
        main(args + ["--out", str(tmp_path / "a")])
        main(args + ["--out", str(tmp_path / "b")])
        assert (tmp_path / "a/observables.csv").read_bytes() == (
            tmp_path / "b/observables.csv"
        ).read_bytes()


class TestStability:
    def test_grid_and_beta_critical(self, tmp_path):
        out = tmp_path / "stab"
        code = main([
            "stability", "--gammas", "0.5,1.0", "--beta-min", "3", "--beta-max", "9",
            "--beta-steps", "4", "--hermite-dim", "30", "--wavenumbers", "4",
            "--out", str(out),
        ])
        assert code == 0
        header, rows = read_csv_dict(out / "psi_grid.csv")
        assert header == ["gamma", "beta", "psi_max"]
        assert len(rows) == 8
        header, rows = read_csv_dict(out / "beta_critical.csv")
        assert float(rows[0][1]) == pytest.approx(6.2272, abs=5e-3)

    def test_psi_grid_floor_below_critical(self, tmp_path):
        out = tmp_path / "stab"
        main([
            "stability", "--gammas", "1.0", "--beta-min", "2", "--beta-max", "5",
            "--beta-steps", "3", "--hermite-dim", "30", "--wavenumbers", "4",
            "--skip-beta-critical", "--out", str(out),
        ])
        _, rows = read_csv_dict(out / "psi_grid.csv")
        assert all(float(r[2]) == 0.0 for r in rows)


class TestFluctuations:
    def test_outputs(self, tmp_path):
        out = tmp_path / "fluc"
        code = main([
            "fluctuations", "--hermite-dim", "12", "--wavenumbers", "4",
            "--times", "0.5,2", "--n-offsets", "16", "--quadrature-points", "16",
            "--out", str(out),
        ])
        assert code == 0
        header, rows = read_csv_dict(out / "covariance.csv")
        assert header == ["t", "dx", "covariance"]
        assert len(rows) == 32
        header, rows = read_csv_dict(out / "amplitude.csv")
        assert header == ["t", "amplitude", "gamma"]
        assert len(rows) == 2


class TestDetect:
    def test_onset_from_dump(self, tmp_path):
        sim_out = tmp_path / "sim"
        main([
            "simulate", "--n", "200", "--beta", "25", "--h", "0.5", "--steps", "60",
            "--print-every", "4", "--dump-traj", "--seed", "1", "--out", str(sim_out),
        ])
        out = tmp_path / "det"
        code = main([
            "detect", "--traj", str(sim_out / "trajectory.txt"), "--out", str(out),
        ])
        assert code == 0
        header, rows = read_csv_dict(out / "detect.csv")
        assert header == ["trajectory_id", "onset_time", "n_clusters_at_onset"]
        assert len(rows) == 1
        onset = float(rows[0][1])
        assert np.isfinite(onset) and onset > 0.0
        assert int(rows[0][2]) >= 1

    def test_missing_file_is_error(self, tmp_path):
        code = main(["detect", "--traj", str(tmp_path / "nope.txt"), "--out", str(tmp_path / "o")])
        assert code == 2


class TestSweeps:
    def test_convergence_sweep_flagged_exit(self, tmp_path):
        out = tmp_path / "conv"
        code = main([
            "sweep-convergence", "--gammas", "1.0", "--n", "30", "--steps", "40",
            "--n-traj", "2", "--threshold", "1e-9", "--out", str(out),
        ])
        assert code == 1  # nothing converges in 40 steps at that threshold
        header, rows = read_csv_dict(out / "convergence.csv")
        assert header == [
            "gamma", "mean_t", "ci95", "n_traj", "n_not_reached", "seed_lo", "seed_hi",
        ]
        assert rows[0][4] == "2"

    def test_convergence_sweep_ok(self, tmp_path):
        out = tmp_path / "conv"
        code = main([
            "sweep-convergence", "--gammas", "0.5,1.0", "--n", "30", "--steps", "200",
            "--h", "0.25", "--n-traj", "2", "--threshold", "2.5", "--out", str(out),
        ])
        assert code == 0
        _, rows = read_csv_dict(out / "convergence.csv")
        assert len(rows) == 2

    def test_onset_sweep(self, tmp_path):
        out = tmp_path / "onset"
        code = main([
            "sweep-onset", "--ns", "200,300", "--n-traj", "2", "--h", "0.5",
            "--steps", "100", "--print-every", "4", "--seed", "5", "--out", str(out),
        ])
        assert code == 0
        header, rows = read_csv_dict(out / "onset.csv")
        assert len(rows) == 2
        assert not (out / "onset_fit.csv").exists()  # below the default fit floor

    def test_critical_scan(self, tmp_path):
        out = tmp_path / "crit"
        code = main([
            "sweep-critical", "--sigma2s", "0.5", "--betas", "25,3", "--n", "50",
            "--gamma", "0.25", "--h", "0.5", "--steps", "600", "--n-traj", "2",
            "--hermite-dim", "30", "--wavenumbers", "4", "--out", str(out),
        ])
        assert code == 0
        _, rows = read_csv_dict(out / "critical.csv")
        assert len(rows) == 2
        _, refs = read_csv_dict(out / "critical_refs.csv")
        assert float(refs[0][1]) == pytest.approx(6.2272, abs=5e-3)
        assert float(refs[0][2]) == pytest.approx(5.6419, abs=1e-3)


class TestErrors:
    def test_stability_requires_potential(self, tmp_path):
        code = main(["stability", "--potential", "none", "--out", str(tmp_path / "x")])
        assert code == 2

    def test_bad_config_is_reported(self, tmp_path, capsys):
        code = main([
            "simulate", "--n", "0", "--out", str(tmp_path / "x"),
        ])
        assert code == 2
        assert "error" in capsys.readouterr().err
