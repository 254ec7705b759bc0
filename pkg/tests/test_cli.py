"""Integration tests for the command-line pipeline."""

import hashlib
import json
from pathlib import Path

import numpy as np
import pytest

from cvtomo.cli import (EXIT_CONFIG, EXIT_OK, RunConfig, SweepConfig, main,
                        run, sweep)
from cvtomo.errors import ConfigError
from cvtomo.fock import DensityMatrix, fidelity

SMALL_RUN = {
    "state": {"kind": "fock", "params": {"n": 1}},
    "trunc": {"cutoff_n": 6, "modes": 1},
    "grid": {"kind": "quadrature", "q_count": 7, "theta_count": 5},
    "subset_size": 35,
    "subset_seed": 0,
    "noise": {"enabled": False, "snr_percent": 10.0, "seed": 0},
    "method": "sdp",
}


def write_config(tmp_path, doc, name="run.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


class TestSubcommands:
    def test_full_chain(self, tmp_path):
        state = tmp_path / "state.json"
        povm = tmp_path / "povm.json"
        data = tmp_path / "data.jsonl"
        rho_out = tmp_path / "rho.json"
        metrics = tmp_path / "metrics.json"

        assert main(["gen-state", "--kind", "fock", "--param", "n=1",
                     "--cutoff", "6", "--out", str(state)]) == EXIT_OK
        assert main(["gen-povm", "--kind", "quadrature", "--cutoff", "6",
                     "--q-count", "7", "--theta-count", "5", "--out", str(povm)]) == EXIT_OK
        assert main(["simulate", "--state", str(state), "--povm", str(povm),
                     "--no-noise", "--out", str(data)]) == EXIT_OK
        assert main(["reconstruct-sdp", "--data", str(data), "--povm", str(povm),
                     "--out", str(rho_out)]) == EXIT_OK
        assert main(["metrics", "--rho", str(rho_out), "--target", str(state),
                     "--probes", str(povm), "--out", str(metrics)]) == EXIT_OK
        doc = json.loads(metrics.read_text())
        assert doc["fidelity"] >= 0.99
        assert "entropy_probe" in doc

    def test_wigner_and_irt_chain(self, tmp_path):
        state = tmp_path / "state.json"
        main(["gen-state", "--kind", "fock", "--param", "n=1",
              "--cutoff", "10", "--out", str(state)])
        wcsv = tmp_path / "w.csv"
        assert main(["wigner", "--rho", str(state), "--grid=-5:0.25:5",
                     "--out", str(wcsv)]) == EXIT_OK
        assert wcsv.exists()

        # sinogram produced by an irt run, then the standalone command
        cfg = dict(SMALL_RUN)
        cfg["trunc"] = {"cutoff_n": 10, "modes": 1}
        cfg["method"] = "irt"
        config = write_config(tmp_path, cfg)
        out_dir = tmp_path / "irt_run"
        assert main(["run", "--config", str(config), "--out-dir", str(out_dir)]) == EXIT_OK
        manifest = json.loads((out_dir / "manifest.json").read_text())
        assert manifest["metrics"]["negative_diagonal_present"] is True

        wout = tmp_path / "w2.csv"
        rho_out = tmp_path / "rho_irt.json"
        assert main(["reconstruct-irt", "--sinogram", str(out_dir / "sinogram.csv"),
                     "--kc", "4.0", "--grid=-5:0.1:5", "--out", str(wout),
                     "--rho-out", str(rho_out)]) == EXIT_OK
        doc = json.loads(rho_out.read_text())
        diag = np.array(doc["re"]).reshape(11, 11).diagonal()
        assert diag.min() < 0

    def test_missing_file_is_config_error(self, tmp_path):
        assert main(["run", "--config", str(tmp_path / "absent.json"),
                     "--out-dir", str(tmp_path)]) == EXIT_CONFIG

    def test_print_config(self, tmp_path, capsys):
        config = write_config(tmp_path, SMALL_RUN)
        assert main(["run", "--config", str(config), "--out-dir", str(tmp_path),
                     "--print-config"]) == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert doc["solver"]["algorithm"] == "interior_point"
        assert doc["probe_count"] == 10


class TestRunPipeline:
    def test_manifest_complete_and_recomputable(self, tmp_path):
        config = RunConfig.from_json_dict(SMALL_RUN)
        manifest = run(config, tmp_path / "out")
        for entry in manifest["files"].values():
            path = Path(entry["path"])
            assert path.exists()
            assert hashlib.sha256(path.read_bytes()).hexdigest() == entry["sha256"]
        rho = DensityMatrix.from_json_dict(
            json.loads(Path(manifest["files"]["rho"]["path"]).read_text()))
        target = DensityMatrix.from_json_dict(
            json.loads(Path(manifest["files"]["state"]["path"]).read_text()))
        assert fidelity(rho, target) == pytest.approx(manifest["metrics"]["fidelity"],
                                                      abs=1e-12)
        assert manifest["metrics"]["fidelity"] >= 0.99

    def test_rerun_bit_identical_outputs(self, tmp_path):
        config = RunConfig.from_json_dict(SMALL_RUN)
        m1 = run(config, tmp_path / "a")
        m2 = run(config, tmp_path / "b")
        for name in ("state", "povm", "rho"):
            a = Path(m1["files"][name]["path"]).read_bytes()
            b = Path(m2["files"][name]["path"]).read_bytes()
            assert a == b
        # dataset bodies match too; only the header timestamp may differ
        a_lines = Path(m1["files"]["data"]["path"]).read_text().splitlines()[1:]
        b_lines = Path(m2["files"]["data"]["path"]).read_text().splitlines()[1:]
        assert a_lines == b_lines

    def test_subset_seed_changes_measured_elements_only(self, tmp_path):
        doc = dict(SMALL_RUN)
        doc["subset_size"] = 20
        m1 = run(RunConfig.from_json_dict(doc), tmp_path / "a")
        doc2 = dict(doc)
        doc2["subset_seed"] = 99
        m2 = run(RunConfig.from_json_dict(doc2), tmp_path / "b")
        assert m1["files"]["state"]["sha256"] == m2["files"]["state"]["sha256"]
        ids1 = {json.loads(line)["element_id"] for line in
                Path(m1["files"]["data"]["path"]).read_text().splitlines()[1:]}
        ids2 = {json.loads(line)["element_id"] for line in
                Path(m2["files"]["data"]["path"]).read_text().splitlines()[1:]}
        assert ids1 != ids2

    def test_zero_subset_rejected_before_stages(self, tmp_path):
        doc = dict(SMALL_RUN)
        doc["subset_size"] = 0
        with pytest.raises(ConfigError):
            RunConfig.from_json_dict(doc)

    def test_two_mode_metrics_include_negativity(self, tmp_path):
        doc = {
            "state": {"kind": "noon", "params": {}},
            "trunc": {"cutoff_n": 3, "modes": 2},
            "grid": {"kind": "quadrature", "q_count": 5, "theta_count": 4},
            "subset_size": 120,
            "noise": {"enabled": False, "snr_percent": 10.0, "seed": 0},
            "method": "sdp",
        }
        manifest = run(RunConfig.from_json_dict(doc), tmp_path / "noon")
        assert "negativity" in manifest["metrics"]


class TestSweep:
    def test_rows_and_cells(self, tmp_path):
        doc = {
            "base": {
                "state": {"kind": "fock", "params": {"n": 1}},
                "trunc": {"cutoff_n": 4, "modes": 1},
                "grid": {"kind": "quadrature", "q_count": 5, "theta_count": 4},
                "subset_size": 10,
                "noise": {"enabled": True, "snr_percent": 10.0, "seed": 0},
                "method": "sdp",
            },
            "subset_sizes": [10, 20],
            "repeats": 3,
        }
        config = SweepConfig.from_json_dict(doc)
        rows = sweep(config, tmp_path / "sweep")
        assert [r["subset_size"] for r in rows] == [10, 20]
        assert all(np.isfinite(r["mean_fidelity"]) for r in rows)
        csv_text = (tmp_path / "sweep" / "sweep.csv").read_text().splitlines()
        assert csv_text[0] == "subset_size,mean_fidelity,std_fidelity,cells_failed"
        assert len(csv_text) == 3

    def test_sizes_must_increase(self):
        base = RunConfig.from_json_dict(SMALL_RUN)
        with pytest.raises(ConfigError):
            SweepConfig(base=base, subset_sizes=[20, 10], repeats=3)

    def test_noisy_sweep_needs_repeats(self):
        doc = dict(SMALL_RUN)
        doc["noise"] = {"enabled": True, "snr_percent": 10.0, "seed": 0}
        base = RunConfig.from_json_dict(doc)
        with pytest.raises(ConfigError):
            SweepConfig(base=base, subset_sizes=[10], repeats=2)


class TestConfigValidation:
    def test_bad_method(self):
        doc = dict(SMALL_RUN)
        doc["method"] = "magic"
        with pytest.raises(ConfigError):
            RunConfig.from_json_dict(doc)

    def test_subset_exceeds_grid(self):
        doc = dict(SMALL_RUN)
        doc["subset_size"] = 10_000
        with pytest.raises(ConfigError):
            RunConfig.from_json_dict(doc)

    def test_irt_needs_single_mode(self):
        doc = dict(SMALL_RUN)
        doc["method"] = "irt"
        doc["trunc"] = {"cutoff_n": 4, "modes": 2}
        doc["grid"] = {"kind": "quadrature", "q_count": 5, "theta_count": 4}
        with pytest.raises(ConfigError):
            RunConfig.from_json_dict(doc)
