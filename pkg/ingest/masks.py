"""
Mask ↔ point-set conversion and target preprocessing.
"""

import logging

import numpy as np
from scipy import ndimage

from errors import InvalidArgumentError
from schemas.models import (
    EYEBROWS,
    PART_ORDER,
    PartLabel,
    PartMask,
    PartPointSets,
    PointSet2D,
    PreprocessSettings,
)

logger = logging.getLogger(__name__)

_EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


def mask_to_points(mask: PartMask, label: PartLabel | None = None) -> PointSet2D:
    """One point per set pixel in row-major order, as (column, row)."""
    rows, cols = np.nonzero(mask.bits)
    points = np.stack([cols, rows], axis=1).astype(np.float64)
    return PointSet2D(points=points, label=label)


def points_to_mask(point_set: PointSet2D, height: int, width: int) -> PartMask:
    """Mark the pixel under each point (nearest integer); points off the image are dropped."""
    bits = np.zeros((height, width), dtype=bool)
    if point_set.is_empty:
        return PartMask(bits=bits)
    pixels = np.rint(point_set.points).astype(np.int64)
    keep = (
        (pixels[:, 0] >= 0) & (pixels[:, 0] < width) & (pixels[:, 1] >= 0) & (pixels[:, 1] < height)
    )
    bits[pixels[keep, 1], pixels[keep, 0]] = True
    return PartMask(bits=bits)


def filter_isolated_regions(mask: PartMask, min_area: int) -> PartMask:
    """
    Remove 8-connected components smaller than `min_area` pixels.

    Args:
        mask: Part occupancy
        min_area: Smallest component area kept, >= 1

    Returns:
        Cleaned mask
    """
    if min_area < 1:
        raise InvalidArgumentError(f"min_area must be >= 1, got {min_area}")
    labels, count = ndimage.label(mask.bits, structure=_EIGHT_CONNECTED)
    if count == 0:
        return mask
    areas = np.bincount(labels.ravel())
    keep = areas >= min_area
    keep[0] = False
    removed = int(count - keep[1:].sum())
    if removed:
        logger.debug(f"Removed {removed} of {count} isolated regions below {min_area} px")
    return PartMask(bits=keep[labels])


def exclude_forehead(sets: PartPointSets) -> PartPointSets:
    """Drop skin points above the topmost eyebrow pixel; no-op when both eyebrows are empty."""
    brows = [sets.get(part).points for part in EYEBROWS if not sets.get(part).is_empty]
    skin = sets.get(PartLabel.SKIN)
    if not brows or skin.is_empty:
        return sets
    cut = min(float(points[:, 1].min()) for points in brows)
    kept = skin.points[skin.points[:, 1] >= cut]
    if len(kept) == len(skin):
        return sets
    logger.debug(f"Forehead cut at y={cut:g} removed {len(skin) - len(kept)} skin points")
    return sets.replace(PartLabel.SKIN, PointSet2D(points=kept, label=PartLabel.SKIN))


def preprocess_targets(
    sets: PartPointSets, settings: PreprocessSettings | None = None
) -> PartPointSets:
    """Isolated-region cleanup per part, then forehead exclusion."""
    settings = settings or PreprocessSettings()
    result = sets
    if settings.remove_isolated:
        cleaned: dict[PartLabel, PointSet2D] = {}
        for part in PART_ORDER:
            point_set = sets.get(part)
            if point_set.is_empty:
                cleaned[part] = point_set
                continue
            mask = points_to_mask(point_set, sets.height, sets.width)
            cleaned[part] = mask_to_points(filter_isolated_regions(mask, settings.min_area), part)
        result = PartPointSets(sets=cleaned, height=sets.height, width=sets.width)
    if settings.exclude_forehead:
        result = exclude_forehead(result)
    return result
