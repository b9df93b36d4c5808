"""
Model container: a numpy `.npz` archive.

Members:
    header              int64 [n, k_id, k_exp]
    mean_shape          float64 n×3
    identity_basis      float64 3n×k_id (rows x0, y0, z0, x1, ...)
    expression_basis    float64 3n×k_exp
    landmark_indices    int64
    part_<name>         int64 sorted vertex indices, one member per annotated part

Archive entries carry a fixed timestamp so identical models give identical bytes.
"""

import io
import zipfile
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from errors import FormatError
from schemas.models import PART_ORDER, BlendshapeModel

_FIXED_DATE = (1980, 1, 1, 0, 0, 0)


def save_model(model: BlendshapeModel, path: Path | str) -> Path:
    path = Path(path)
    members: dict[str, np.ndarray] = {
        "header": np.array([model.n_vertices, model.k_id, model.k_exp], dtype=np.int64),
        "mean_shape": model.mean_shape,
        "identity_basis": model.identity_basis,
        "expression_basis": model.expression_basis,
        "landmark_indices": model.landmark_indices,
    }
    for part in PART_ORDER:
        if part in model.part_annotation:
            members[f"part_{part.value}"] = model.part_annotation[part]

    with zipfile.ZipFile(path, "w", compression=zipfile.ZIP_DEFLATED) as archive:
        for name, array in members.items():
            buffer = io.BytesIO()
            np.save(buffer, np.ascontiguousarray(array), allow_pickle=False)
            info = zipfile.ZipInfo(f"{name}.npy", date_time=_FIXED_DATE)
            info.compress_type = zipfile.ZIP_DEFLATED
            archive.writestr(info, buffer.getvalue())
    return path


def load_model(path: Path | str) -> BlendshapeModel:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"model file not found: {path}")
    try:
        with np.load(path, allow_pickle=False) as archive:
            data = {name: archive[name] for name in archive.files}
    except (zipfile.BadZipFile, ValueError, OSError) as e:
        raise FormatError(f"{path}: not a model archive ({e})") from e

    missing = {"header", "mean_shape", "identity_basis", "expression_basis"} - set(data)
    if missing:
        raise FormatError(f"{path}: missing members {sorted(missing)}")
    n, k_id, k_exp = (int(v) for v in data["header"])
    if data["mean_shape"].shape != (n, 3):
        raise FormatError(f"{path}: header says n={n}, mean_shape is {data['mean_shape'].shape}")
    if data["identity_basis"].shape != (3 * n, k_id) or data["expression_basis"].shape != (3 * n, k_exp):
        raise FormatError(f"{path}: basis shapes disagree with header ({n}, {k_id}, {k_exp})")

    annotation = {
        part: data[f"part_{part.value}"] for part in PART_ORDER if f"part_{part.value}" in data
    }
    try:
        return BlendshapeModel(
            mean_shape=data["mean_shape"],
            identity_basis=data["identity_basis"],
            expression_basis=data["expression_basis"],
            part_annotation=annotation,
            landmark_indices=data.get("landmark_indices", np.zeros(0, dtype=np.int64)),
        )
    except ValidationError as e:
        raise FormatError(f"{path}: {e}") from e
