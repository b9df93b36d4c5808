"""
Tests for the command-line entry point.
"""

import json

import numpy as np
import pytest

from cli import main
from config import dump_run_config, load_run_config
from face_model.annotation import read_annotation
from face_model.storage import load_model
from fitting.report import REPORT_NAME
from schemas.models import PART_ORDER


@pytest.fixture
def disc_config_path(tmp_path):
    """Two displaced-disc seeds, three iterations each."""
    config = load_run_config(
        fit={"max_iters": 3},
        anchors={"stride": 8},
        scenario={"kind": "displaced_disc", "seeds": [0, 1], "losses": ["prdl", "chamfer"]},
    )
    path = tmp_path / "disc.toml"
    path.write_text(dump_run_config(config), encoding="utf-8")
    return path


class TestGlobalFlags:
    """Tests for configuration flags and usage errors."""

    @pytest.mark.unit
    def test_dump_config(self, capsys):
        assert main(["--seed", "7", "--weights", "prdl-only", "--dump-config"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("seed = 7\n")
        assert "lmk = 0.0" in out

    @pytest.mark.unit
    def test_weights_flag_reaches_benchmarks(self, capsys):
        assert main(["--weights", "standard", "--dump-config"]) == 0
        out = capsys.readouterr().out
        assert 'weights_preset = "config"' in out
        assert "lmk = 0.0016" in out

    @pytest.mark.unit
    def test_no_command(self):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 1

    @pytest.mark.unit
    def test_unknown_option(self):
        with pytest.raises(SystemExit) as exc:
            main(["fit", "--bogus"])
        assert exc.value.code == 1

    @pytest.mark.unit
    def test_missing_config_file(self, tmp_path, capsys):
        assert main(["--config", str(tmp_path / "none.toml"), "--dump-config"]) == 1
        assert "error: file not found" in capsys.readouterr().err

    @pytest.mark.unit
    def test_invalid_config_file(self, tmp_path):
        path = tmp_path / "bad.toml"
        path.write_text("[fit]\nmax_iterations = 5\n")
        assert main(["--config", str(path), "--dump-config"]) == 1


class TestGenToy:
    """Tests for gen-toy."""

    @pytest.mark.integration
    def test_bundle_contents(self, toy_bundle):
        names = {p.name for p in toy_bundle.iterdir()}
        assert names == {"model.npz", "ground_truth.json", "labels.png", "landmarks.txt", "manifest.txt", "config.toml"}
        truth = json.loads((toy_bundle / "ground_truth.json").read_text())
        assert truth["seed"] == 5
        assert len(truth["params"]["alpha_id"]) == 8
        config = load_run_config(toy_bundle / "config.toml")
        assert config.camera.cx == 32.0
        assert config.anchors.stride == 4

    @pytest.mark.integration
    def test_identical_bytes_for_same_seed(self, tmp_path, capsys):
        for name in ("a", "b"):
            assert main(["--seed", "2", "gen-toy", "--out", str(tmp_path / name)]) == 0
        printed = capsys.readouterr().out.splitlines()
        assert len(printed) == 12
        for path in (tmp_path / "a").iterdir():
            assert path.read_bytes() == (tmp_path / "b" / path.name).read_bytes(), path.name


class TestFit:
    """Tests for the fit command."""

    @pytest.mark.integration
    def test_fit_bundle(self, toy_bundle, quick_config_path, tmp_path, capsys):
        code = main(
            [
                "--config", str(quick_config_path),
                "fit",
                "--labels", str(toy_bundle / "labels.png"),
                "--model", str(toy_bundle / "model.npz"),
                "--landmarks", str(toy_bundle / "landmarks.txt"),
                "--manifest", str(toy_bundle / "manifest.txt"),
                "--out", str(tmp_path / "out"),
            ]
        )
        assert code == 0
        assert "iterations, final loss" in capsys.readouterr().out
        assert (tmp_path / "out" / REPORT_NAME).is_file()

    @pytest.mark.unit
    def test_missing_model(self, tmp_path, capsys):
        code = main(["fit", "--labels", str(tmp_path / "l.png"), "--model", str(tmp_path / "m.npz"), "--out", str(tmp_path)])
        assert code == 1
        assert "error: file not found" in capsys.readouterr().err


class TestGradCheck:
    """Tests for grad-check."""

    @pytest.mark.integration
    def test_passes(self, capsys):
        assert main(["grad-check", "--instances", "3"]) == 0
        assert "FAIL" not in capsys.readouterr().out

    @pytest.mark.integration
    def test_injected_fault_fails(self, capsys):
        assert main(["grad-check", "--instances", "3", "--inject-fault", "sign-flip"]) == 2
        assert "FAIL" in capsys.readouterr().out


class TestBenchCommands:
    """Tests for compare and ablate."""

    @pytest.mark.integration
    def test_compare(self, disc_config_path, tmp_path):
        out = tmp_path / "compare"
        assert main(["--config", str(disc_config_path), "--jobs", "2", "compare", "--out", str(out), "--svg"]) == 0
        assert {p.name for p in out.iterdir()} == {
            "comparison_displaced_disc.csv",
            "comparison_displaced_disc.json",
            "comparison_displaced_disc_timing.json",
            "comparison_displaced_disc.svg",
        }
        data = json.loads((out / "comparison_displaced_disc.json").read_text())
        assert [row["variant"] for row in data["rows"]] == ["prdl", "chamfer"]

    @pytest.mark.integration
    def test_compare_loss_override(self, disc_config_path, tmp_path):
        out = tmp_path / "compare"
        args = ["--config", str(disc_config_path), "compare", "--out", str(out), "--scenario", "decoy", "--losses", "nn_pred_to_target"]
        assert main(args) == 0
        data = json.loads((out / "comparison_decoy.json").read_text())
        assert [row["variant"] for row in data["rows"]] == ["nn_pred_to_target"]

    @pytest.mark.integration
    def test_ablate(self, disc_config_path, tmp_path):
        out = tmp_path / "ablate"
        assert main(["--config", str(disc_config_path), "ablate", "--out", str(out)]) == 0
        data = json.loads((out / "ablation_displaced_disc.json").read_text())
        assert [row["variant"] for row in data["rows"]] == ["min", "max", "ave", "min+max+ave"]

    @pytest.mark.unit
    def test_unknown_loss(self, disc_config_path, tmp_path):
        assert main(["--config", str(disc_config_path), "compare", "--out", str(tmp_path), "--losses", "l1"]) == 1


class TestModelCommands:
    """Tests for annotate and descriptor."""

    @pytest.mark.integration
    def test_annotate_recovers_bundle_annotation(self, toy_bundle, tmp_path):
        out = tmp_path / "annotation.txt"
        code = main(
            [
                "--config", str(toy_bundle / "config.toml"),
                "--seed", "11",
                "annotate",
                "--model", str(toy_bundle / "model.npz"),
                "--labels", str(toy_bundle / "labels.png"),
                "--manifest", str(toy_bundle / "manifest.txt"),
                "--params", str(toy_bundle / "ground_truth.json"),
                "--out", str(out),
            ]
        )
        assert code == 0
        assert out.read_text().splitlines()[0] == "# seed=11"
        annotation = read_annotation(out)
        model = load_model(toy_bundle / "model.npz")
        truth = np.zeros(model.n_vertices, dtype=np.int64)
        recovered = np.zeros(model.n_vertices, dtype=np.int64)
        for part in PART_ORDER:
            truth[model.part_annotation[part]] = part.code
            recovered[annotation.get(part, np.array([], dtype=np.int64))] = part.code
        annotated = truth > 0
        assert np.mean(recovered[annotated] == truth[annotated]) >= 0.8

    @pytest.mark.integration
    def test_descriptor_export(self, toy_bundle, tmp_path, capsys):
        prefix = tmp_path / "desc" / "nose"
        code = main(
            [
                "--config", str(toy_bundle / "config.toml"),
                "--seed", "11",
                "descriptor",
                "--labels", str(toy_bundle / "labels.png"),
                "--part", "nose",
                "--out", str(prefix),
            ]
        )
        assert code == 0
        printed = capsys.readouterr().out.split()
        assert [p.rsplit("/", 1)[-1] for p in printed] == ["nose.csv", "nose_min.png", "nose_max.png", "nose_ave.png"]
        assert (prefix.parent / "nose.csv").read_text().splitlines()[0] == "# seed=11"
