"""
Disc splatting of 2D points onto a pixel grid.
"""

import math

import numpy as np
from scipy import ndimage

from errors import InvalidArgumentError

_CLOSING = np.ones((3, 3), dtype=bool)


def splat_disc_mask(points: np.ndarray, height: int, width: int, radius: float) -> np.ndarray:
    """
    Splat each point as a filled disc, close once with a 3×3 element, clip to the image.

    A pixel belongs to a point's disc when its centre lies within `radius` of
    the point; the pixel nearest the point is always set, so radius 0 marks a
    single pixel.

    Args:
        points: (N, 2) pixel coordinates (x = column, y = row)
        height: Mask rows
        width: Mask columns
        radius: Disc radius in pixels, >= 0

    Returns:
        (height, width) boolean mask
    """
    if radius < 0:
        raise InvalidArgumentError(f"radius must be >= 0, got {radius}")
    if height < 1 or width < 1:
        raise InvalidArgumentError(f"mask dimensions must be positive, got {height}x{width}")
    mask = np.zeros((height, width), dtype=bool)
    points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if points.shape[0] == 0:
        return mask

    reach = int(math.ceil(radius)) + 1
    span = np.arange(-reach, reach + 1)
    dx, dy = np.meshgrid(span, span, indexing="xy")
    offsets = np.stack([dx.ravel(), dy.ravel()], axis=1)

    centres = np.rint(points).astype(np.int64)
    pixels = centres[:, None, :] + offsets[None, :, :]
    diff = pixels - points[:, None, :]
    inside = np.einsum("pkc,pkc->pk", diff, diff) <= radius * radius + 1e-9
    inside |= np.all(offsets == 0, axis=1)[None, :]

    hits = pixels[inside]
    in_bounds = (hits[:, 0] >= 0) & (hits[:, 0] < width) & (hits[:, 1] >= 0) & (hits[:, 1] < height)
    hits = hits[in_bounds]
    mask[hits[:, 1], hits[:, 0]] = True

    # pad so the erosion half of the closing does not eat the border
    padded = np.pad(mask, 2)
    closed = ndimage.binary_closing(padded, structure=_CLOSING)[2:-2, 2:-2]
    return mask | closed
