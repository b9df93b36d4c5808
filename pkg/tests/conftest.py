"""
Shared pytest fixtures.
"""

import numpy as np
import pytest

from config import RunConfig
from face_model.toy import gen_toy_model, rasterize_toy_targets, toy_camera
from prdl.anchors import lattice_anchors
from schemas.models import (
    BlendshapeModel,
    Camera,
    LandmarkSet,
    PartLabel,
    PartPointSets,
    PointSet2D,
    ShapeParams,
)
from schemas.state import FitState


# === Point Set Fixtures ===


@pytest.fixture
def two_point_set():
    """The set {(0,0), (3,4)} used by most distance examples."""
    return PointSet2D(points=np.array([[0.0, 0.0], [3.0, 4.0]]))


@pytest.fixture
def fps_set():
    """Unit corner plus one far outlier."""
    return PointSet2D(points=np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [10.0, 10.0]]))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_anchors():
    """Full 16×16 anchor lattice."""
    return lattice_anchors(16, 16)


# === Model Fixtures ===


@pytest.fixture
def tiny_model():
    """
    Six-vertex model with two parts of three vertices each.

    Vertices lie in the z = 0 plane; one identity column scales x, one
    expression column lifts y.
    """
    mean = np.array(
        [
            [-1.0, 0.0, 0.0],
            [-1.0, 0.5, 0.0],
            [-0.5, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [1.0, 0.5, 0.0],
            [0.5, 0.0, 0.0],
        ]
    )
    identity = np.zeros((18, 1))
    identity[0::3, 0] = 0.1 * mean[:, 0]
    expression = np.zeros((18, 1))
    expression[1::3, 0] = 0.1
    return BlendshapeModel(
        mean_shape=mean,
        identity_basis=identity,
        expression_basis=expression,
        part_annotation={PartLabel.LEFT_EYE: np.array([3, 4, 5]), PartLabel.RIGHT_EYE: np.array([0, 1, 2])},
        landmark_indices=np.array([0, 3]),
    )


@pytest.fixture
def tiny_camera():
    """Orthographic 10 px/unit camera centred in a 32×32 image."""
    return Camera(scale=10.0, cx=16.0, cy=16.0)


@pytest.fixture(scope="session")
def toy():
    """Default-size toy model and its ground-truth parameters (seed 0)."""
    return gen_toy_model(0)


@pytest.fixture(scope="session")
def toy_cam():
    return toy_camera(128)


@pytest.fixture(scope="session")
def toy_targets(toy, toy_cam):
    """Toy targets rasterized at the ground truth."""
    model, truth = toy
    return rasterize_toy_targets(model, toy_cam, truth, 128, 128)


@pytest.fixture
def zero_params(tiny_model):
    return ShapeParams.zeros(tiny_model.k_id, tiny_model.k_exp)


@pytest.fixture
def empty_targets():
    return PartPointSets(height=32, width=32)


@pytest.fixture
def empty_landmarks():
    return LandmarkSet()


# === Pipeline Fixtures ===


@pytest.fixture
def run_config():
    return RunConfig()


@pytest.fixture
def initial_fit_state(run_config, tmp_path) -> FitState:
    """Fresh pipeline state pointing at files under tmp_path."""
    return {
        "config": run_config,
        "label_map_path": tmp_path / "labels.png",
        "manifest_path": None,
        "landmarks_path": None,
        "model_path": tmp_path / "model.npz",
        "output_dir": tmp_path / "out",
        "write_svg": False,
        "model": None,
        "manifest": None,
        "raw_targets": None,
        "targets": None,
        "landmarks": None,
        "load_failed": False,
        "nothing_to_fit": False,
        "report": None,
        "written": [],
        "exit_code": 0,
        "errors": [],
    }


@pytest.fixture(scope="session")
def toy_bundle(tmp_path_factory):
    """A gen-toy bundle at 64×64 with 200 vertices."""
    from cli import cmd_gen_toy
    from schemas.models import ScenarioSettings

    out_dir = tmp_path_factory.mktemp("bundle")
    config = RunConfig(seed=5, scenario=ScenarioSettings(n_vertices=200, resolution=64))
    cmd_gen_toy(config, out_dir)
    return out_dir


@pytest.fixture
def quick_config_path(toy_bundle, tmp_path):
    """The bundle's config with a five-iteration fit and a stride-8 anchor lattice."""
    from config import dump_run_config, load_run_config

    config = load_run_config(
        toy_bundle / "config.toml",
        fit={"max_iters": 5, "learning_rate": 0.01},
        anchors={"stride": 8},
    )
    path = tmp_path / "quick.toml"
    path.write_text(dump_run_config(config), encoding="utf-8")
    return path
