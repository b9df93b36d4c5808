"""
Tests for the fit workflow nodes and the full LangGraph pipeline.
"""

import json
from unittest.mock import patch

import numpy as np
import pytest

from config import load_run_config
from errors import NothingToFitError
from fitting.report import CURVE_NAME, REPORT_NAME, TIMING_NAME
from graph import run_fit_pipeline, should_continue_after_loading, should_continue_after_preprocessing
from nodes import fit_shape, load_targets, preprocess, write_report
from nodes.report_writer import EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE
from schemas.models import (
    FitReport,
    IoUReport,
    LandmarkSet,
    LossKind,
    LossWeights,
    PartLabel,
    PartPointSets,
    PointSet2D,
    ShapeParams,
    TerminationReason,
)


def _bundle_state(initial_fit_state, toy_bundle, config=None):
    return {
        **initial_fit_state,
        "config": config or initial_fit_state["config"],
        "model_path": toy_bundle / "model.npz",
        "label_map_path": toy_bundle / "labels.png",
        "manifest_path": toy_bundle / "manifest.txt",
        "landmarks_path": toy_bundle / "landmarks.txt",
    }


def _report(termination: TerminationReason) -> FitReport:
    return FitReport(
        seed=0,
        loss=LossKind.PRDL,
        weights=LossWeights(),
        iterations=0,
        termination=termination,
        history=[],
        final_params=ShapeParams.zeros(1, 1),
        iou=IoUReport(per_part={}, mean_iou=0.0, height=4, width=4),
    )


class TestRouting:
    """Tests for the conditional edges."""

    @pytest.mark.unit
    def test_after_loading(self, initial_fit_state):
        assert should_continue_after_loading(initial_fit_state) == "target_preprocessor"
        assert should_continue_after_loading({**initial_fit_state, "load_failed": True}) == "report_writer"

    @pytest.mark.unit
    def test_after_preprocessing(self, initial_fit_state):
        assert should_continue_after_preprocessing(initial_fit_state) == "shape_fitter"
        assert should_continue_after_preprocessing({**initial_fit_state, "nothing_to_fit": True}) == "report_writer"


class TestTargetLoader:
    """Tests for the input loading node."""

    @pytest.mark.integration
    def test_loads_bundle(self, initial_fit_state, toy_bundle):
        result = load_targets(_bundle_state(initial_fit_state, toy_bundle))
        assert not result["load_failed"]
        assert result["model"].n_vertices == 200
        assert (result["raw_targets"].height, result["raw_targets"].width) == (64, 64)
        assert len(result["landmarks"]) == len(result["model"].landmark_indices)
        assert result["errors"] == []

    @pytest.mark.unit
    def test_missing_model(self, initial_fit_state):
        result = load_targets(initial_fit_state)
        assert result["load_failed"]
        assert result["errors"][0].startswith("file not found:")

    @pytest.mark.integration
    def test_landmark_beyond_model(self, initial_fit_state, toy_bundle, tmp_path):
        landmarks = tmp_path / "landmarks.txt"
        landmarks.write_text("999 1.0 2.0\n")
        state = {**_bundle_state(initial_fit_state, toy_bundle), "landmarks_path": landmarks}
        result = load_targets(state)
        assert result["load_failed"]
        assert "999" in result["errors"][0]

    @pytest.mark.integration
    def test_landmarks_optional(self, initial_fit_state, toy_bundle):
        state = {**_bundle_state(initial_fit_state, toy_bundle), "landmarks_path": None}
        assert len(load_targets(state)["landmarks"]) == 0


class TestTargetPreprocessor:
    """Tests for the cleanup node."""

    @pytest.mark.unit
    def test_nothing_to_fit(self, initial_fit_state, empty_targets):
        state = {**initial_fit_state, "raw_targets": empty_targets, "landmarks": LandmarkSet()}
        result = preprocess(state)
        assert result["nothing_to_fit"]
        assert result["errors"] == ["nothing to fit: every target part is empty"]

    @pytest.mark.unit
    def test_landmarks_keep_run_alive(self, initial_fit_state, empty_targets):
        landmarks = LandmarkSet(vertex_indices=np.array([0]), points=np.array([[1.0, 1.0]]))
        result = preprocess({**initial_fit_state, "raw_targets": empty_targets, "landmarks": landmarks})
        assert not result["nothing_to_fit"]

    @pytest.mark.unit
    def test_specks_removed(self, initial_fit_state):
        block = np.array([[x, y] for y in range(10, 15) for x in range(10, 15)], dtype=float)
        raw = PartPointSets(
            sets={
                PartLabel.NOSE: PointSet2D(points=np.vstack([block, [[30.0, 30.0]]])),
                PartLabel.LEFT_EYE: PointSet2D(points=np.array([[2.0, 2.0]])),
            },
            height=32,
            width=32,
        )
        result = preprocess({**initial_fit_state, "raw_targets": raw, "landmarks": LandmarkSet()})
        assert len(result["targets"].get(PartLabel.NOSE)) == 25
        assert result["targets"].get(PartLabel.LEFT_EYE).is_empty
        assert not result["nothing_to_fit"]


class TestShapeFitter:
    """Tests for the fitting node."""

    @pytest.mark.unit
    def test_fitting_error_is_recorded(self, initial_fit_state, tiny_model, empty_targets):
        state = {**initial_fit_state, "model": tiny_model, "targets": empty_targets, "landmarks": LandmarkSet()}
        with patch("nodes.shape_fitter.fit") as mock_fit:
            mock_fit.side_effect = NothingToFitError("nothing")
            result = fit_shape(state)
        assert result["report"] is None
        assert result["errors"] == ["Fitting: nothing"]

    @pytest.mark.unit
    def test_seed_reaches_fit_config(self, initial_fit_state, tiny_model, empty_targets):
        config = initial_fit_state["config"].model_copy(update={"seed": 42})
        state = {**initial_fit_state, "config": config, "model": tiny_model, "targets": empty_targets,
                 "landmarks": LandmarkSet()}
        with patch("nodes.shape_fitter.fit") as mock_fit:
            mock_fit.return_value = _report(TerminationReason.MAX_ITERS)
            result = fit_shape(state)
        assert mock_fit.call_args.args[4].seed == 42
        assert result["report"].termination == TerminationReason.MAX_ITERS


class TestReportWriter:
    """Tests for report writing and exit codes."""

    @pytest.mark.unit
    def test_load_failure_exits_usage(self, initial_fit_state):
        assert write_report({**initial_fit_state, "load_failed": True})["exit_code"] == EXIT_USAGE

    @pytest.mark.unit
    def test_missing_report_exits_usage(self, initial_fit_state):
        assert write_report(initial_fit_state)["exit_code"] == EXIT_USAGE

    @pytest.mark.unit
    @pytest.mark.parametrize(
        "termination, code",
        [
            (TerminationReason.CONVERGED, EXIT_OK),
            (TerminationReason.MAX_ITERS, EXIT_OK),
            (TerminationReason.NAN_ABORT, EXIT_NUMERICAL),
        ],
    )
    def test_exit_codes(self, initial_fit_state, termination, code):
        result = write_report({**initial_fit_state, "report": _report(termination)})
        assert result["exit_code"] == code
        assert [p.name for p in result["written"]] == [REPORT_NAME, CURVE_NAME, TIMING_NAME]

    @pytest.mark.unit
    def test_io_error(self, initial_fit_state):
        state = {**initial_fit_state, "report": _report(TerminationReason.CONVERGED)}
        with patch("nodes.report_writer.write_fit_report") as mock_write:
            mock_write.side_effect = OSError("disk full")
            result = write_report(state)
        assert result["exit_code"] == EXIT_USAGE
        assert result["errors"] == ["Report writing: disk full"]


class TestGraphIntegration:
    """Integration tests for the full pipeline."""

    @pytest.mark.integration
    def test_full_pipeline(self, toy_bundle, quick_config_path, tmp_path):
        config = load_run_config(quick_config_path)
        state = run_fit_pipeline(
            config,
            label_map_path=toy_bundle / "labels.png",
            model_path=toy_bundle / "model.npz",
            output_dir=tmp_path / "out",
            landmarks_path=toy_bundle / "landmarks.txt",
            manifest_path=toy_bundle / "manifest.txt",
            write_svg=True,
        )
        assert state["exit_code"] == EXIT_OK
        assert state["report"].iterations == 5
        names = {p.name for p in state["written"]}
        assert names == {REPORT_NAME, CURVE_NAME, TIMING_NAME, "overlay.svg", "loss_curve.svg"}
        data = json.loads((tmp_path / "out" / REPORT_NAME).read_text())
        assert data["seed"] == config.seed

    @pytest.mark.integration
    def test_reports_identical_across_runs(self, toy_bundle, quick_config_path, tmp_path):
        config = load_run_config(quick_config_path)
        for name in ("a", "b"):
            run_fit_pipeline(config, toy_bundle / "labels.png", toy_bundle / "model.npz", tmp_path / name)
        first = (tmp_path / "a" / REPORT_NAME).read_bytes()
        assert first == (tmp_path / "b" / REPORT_NAME).read_bytes()
        assert (tmp_path / "a" / CURVE_NAME).read_bytes() == (tmp_path / "b" / CURVE_NAME).read_bytes()

    @pytest.mark.integration
    def test_missing_label_map(self, toy_bundle, tmp_path, run_config):
        state = run_fit_pipeline(run_config, tmp_path / "none.png", toy_bundle / "model.npz", tmp_path / "out")
        assert state["exit_code"] == EXIT_USAGE
        assert state["report"] is None
        assert any("not found" in error for error in state["errors"])
        assert not (tmp_path / "out").exists()
