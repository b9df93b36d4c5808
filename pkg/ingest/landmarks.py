"""
Landmark text files: one `vertex_index x y` line per landmark, `#` starts a comment.
"""

import math
from pathlib import Path

import numpy as np

from errors import FormatError
from schemas.models import LandmarkSet


def load_landmarks(path: Path | str) -> LandmarkSet:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"landmark file not found: {path}")
    indices: list[int] = []
    points: list[tuple[float, float]] = []
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 3:
            raise FormatError(f"{path}:{lineno}: expected 'vertex_index x y', got {raw!r}")
        try:
            index = int(fields[0])
            x, y = float(fields[1]), float(fields[2])
        except ValueError as e:
            raise FormatError(f"{path}:{lineno}: {e}") from e
        if index < 0:
            raise FormatError(f"{path}:{lineno}: negative vertex index {index}")
        if not (math.isfinite(x) and math.isfinite(y)):
            raise FormatError(f"{path}:{lineno}: non-finite coordinate")
        indices.append(index)
        points.append((x, y))
    return LandmarkSet(
        vertex_indices=np.array(indices, dtype=np.int64),
        points=np.array(points, dtype=np.float64).reshape(-1, 2),
    )


def write_landmarks(landmarks: LandmarkSet, path: Path | str) -> Path:
    path = Path(path)
    lines = ["# vertex_index x y"]
    for index, (x, y) in zip(landmarks.vertex_indices.tolist(), landmarks.points.tolist()):
        lines.append(f"{index} {x:.17g} {y:.17g}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
