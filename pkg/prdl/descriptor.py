"""
Anchor-based statistical-distance descriptors Γ.
"""

import csv
from collections.abc import Iterator
from pathlib import Path

import numpy as np
from PIL import Image
from scipy.spatial.distance import cdist

from errors import EmptySetError, InvalidArgumentError
from schemas.models import (
    AnchorGrid,
    DescriptorTensor,
    DistanceFunction,
    DistanceFunctionSet,
    PointSet2D,
)

# anchors × points scratch elements per block
BLOCK_ELEMENTS = 2_000_000


def anchor_blocks(n_anchors: int, n_points: int) -> Iterator[slice]:
    block = max(1, BLOCK_ELEMENTS // max(n_points, 1))
    for start in range(0, n_anchors, block):
        yield slice(start, min(start + block, n_anchors))


def descriptor_values(
    points: np.ndarray, anchors: np.ndarray, functions: DistanceFunctionSet
) -> np.ndarray:
    """|A|×|F| matrix of f(points, a) for raw arrays."""
    values = np.empty((len(anchors), len(functions)))
    for rows in anchor_blocks(len(anchors), len(points)):
        dist = cdist(anchors[rows], points)
        for column, function in enumerate(functions.functions):
            if function == DistanceFunction.MIN:
                values[rows, column] = dist.min(axis=1)
            elif function == DistanceFunction.MAX:
                values[rows, column] = dist.max(axis=1)
            else:
                # mean can round past the extremes when all distances coincide
                values[rows, column] = np.clip(dist.mean(axis=1), dist.min(axis=1), dist.max(axis=1))
    return values


def compute_descriptor(
    point_set: PointSet2D, anchors: AnchorGrid, functions: DistanceFunctionSet | None = None
) -> DescriptorTensor:
    """
    Γ(i, j) = f_j(point_set, a_i).

    Args:
        point_set: Non-empty point set
        anchors: Anchor grid A
        functions: Distance functions F (all three by default)

    Returns:
        DescriptorTensor of shape |A|×|F|
    """
    if point_set.is_empty:
        raise EmptySetError("descriptor of an empty point set is undefined")
    functions = functions or DistanceFunctionSet()
    values = descriptor_values(point_set.points, anchors.points, functions)
    return DescriptorTensor(values=values, functions=functions, grid=anchors)


def descriptor_image(descriptor: DescriptorTensor) -> np.ndarray:
    """Reshape Γ to rows×cols×|F| over its anchor lattice."""
    shape = descriptor.grid.lattice_shape
    if shape is None:
        raise InvalidArgumentError("descriptor anchors are not a lattice")
    return descriptor.values.reshape(shape[0], shape[1], len(descriptor.functions))


def export_descriptor(
    descriptor: DescriptorTensor, path_prefix: Path | str, seed: int | None = None
) -> list[Path]:
    """
    Write `<prefix>.csv` and, for lattice anchors, one `<prefix>_<f>.png` per function.

    The CSV starts with `# key=value` metadata lines (seed when given, height,
    width, lattice, functions) followed by one row per anchor. PNG channels are scaled so the
    channel maximum maps to 255.
    """
    prefix = Path(path_prefix)
    grid = descriptor.grid
    names = [f.value for f in descriptor.functions.functions]
    csv_path = prefix.with_name(prefix.name + ".csv")
    with csv_path.open("w", newline="", encoding="utf-8") as handle:
        if seed is not None:
            handle.write(f"# seed={seed}\n")
        handle.write(f"# height={grid.height}\n# width={grid.width}\n")
        if grid.lattice_shape is not None:
            handle.write(f"# lattice={grid.lattice_shape[0]}x{grid.lattice_shape[1]}\n")
        handle.write(f"# functions={','.join(names)}\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["anchor_x", "anchor_y", *names])
        for anchor, row in zip(grid.points.tolist(), descriptor.values.tolist()):
            writer.writerow([f"{anchor[0]:g}", f"{anchor[1]:g}", *(f"{v:.17g}" for v in row)])
    written = [csv_path]

    if grid.lattice_shape is not None:
        image = descriptor_image(descriptor)
        for column, name in enumerate(names):
            channel = image[:, :, column]
            peak = channel.max()
            scaled = channel / peak * 255.0 if peak > 0 else np.zeros_like(channel)
            png_path = prefix.with_name(f"{prefix.name}_{name}.png")
            Image.fromarray(np.rint(scaled).astype(np.uint8)).save(png_path)
            written.append(png_path)
    return written
