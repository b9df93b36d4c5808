"""
End-to-end benchmark batteries at full size.

These runs take minutes; select them with `pytest -m slow`.
"""

import numpy as np
import pytest

from bench.experiments import run_distance_ablation, run_loss_comparison
from config import RunConfig
from face_model.annotation import annotate_parts
from face_model.toy import gen_toy_model, rasterize_toy_targets, toy_camera
from schemas.models import PART_ORDER, AnchorSettings, LossKind, ScenarioKind, ScenarioSettings

TOY_SEEDS = list(range(20))
DECOY_SEEDS = list(range(10))


@pytest.fixture(scope="module")
def toy_config():
    return RunConfig(anchors=AnchorSettings(stride=4))


@pytest.fixture(scope="module")
def toy_comparison(toy_config):
    scenario = ScenarioSettings(kind=ScenarioKind.TOY, seeds=TOY_SEEDS)
    return run_loss_comparison(scenario, [LossKind.PRDL], toy_config, jobs=4)


class TestToyRecovery:
    """Fitting the toy face back onto its own rendering."""

    @pytest.mark.slow
    def test_mean_iou(self, toy_comparison):
        row = toy_comparison.row("prdl")
        assert row.mean_iou >= 0.90
        assert row.min_iou >= 0.80

    @pytest.mark.slow
    def test_no_numerical_abort(self, toy_comparison):
        assert all(run.termination.value != "nan_abort" for run in toy_comparison.runs)


class TestRendererFailure:
    """Displaced disc: the soft silhouette has no gradient, PRDL still converges."""

    @pytest.mark.slow
    def test_prdl_recovers_where_silhouette_stalls(self):
        scenario = ScenarioSettings(kind=ScenarioKind.DISPLACED_DISC, seeds=[0, 1, 2])
        table = run_loss_comparison(scenario, [LossKind.PRDL, LossKind.SOFT_SILHOUETTE], RunConfig(), jobs=3)
        prdl = [run for run in table.runs if run.variant == "prdl"]
        silhouette = [run for run in table.runs if run.variant == "soft_silhouette"]
        assert all(run.init_grad_norm < 1e-8 for run in silhouette)
        assert all(run.mean_iou < 0.2 for run in silhouette)
        assert all(run.mean_iou > 0.9 for run in prdl)


class TestDecoy:
    """Minimum-distance losses settle on a neighbouring target disc."""

    @pytest.mark.slow
    def test_prdl_beats_point_losses(self):
        scenario = ScenarioSettings(kind=ScenarioKind.DECOY, seeds=DECOY_SEEDS)
        losses = [LossKind.PRDL, LossKind.NN_PRED_TO_TARGET, LossKind.CHAMFER]
        table = run_loss_comparison(scenario, losses, RunConfig(), jobs=4)
        prdl = np.array(table.row("prdl").per_seed_iou)
        for variant in ("nn_pred_to_target", "chamfer"):
            other = np.array(table.row(variant).per_seed_iou)
            assert prdl.mean() >= other.mean()
            assert np.sum(prdl > other) >= 7


class TestDistanceAblation:
    """Combining min, max and ave against each function alone."""

    @pytest.mark.slow
    def test_combined_set_wins(self, toy_config):
        scenario = ScenarioSettings(kind=ScenarioKind.TOY, seeds=TOY_SEEDS)
        table = run_distance_ablation(scenario, toy_config, jobs=4)
        combined = table.row("min+max+ave").mean_iou
        singles = [table.row(name).mean_iou for name in ("min", "max", "ave")]
        assert all(combined >= single - 0.01 for single in singles)
        assert sum(combined > single for single in singles) >= 2


class TestAnnotationTransfer:
    """Rasterized toy parts map back onto the generating vertex sets."""

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", range(10))
    def test_exact_recovery(self, seed):
        model, truth = gen_toy_model(seed)
        camera = toy_camera(128)
        targets = rasterize_toy_targets(model, camera, truth, 128, 128)
        annotation = annotate_parts(model.with_annotation({}), camera, truth, targets, k=1)
        for part in PART_ORDER:
            np.testing.assert_array_equal(annotation[part], model.part_annotation[part])
