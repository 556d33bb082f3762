import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np

from config.config import Config
from src.layout.contour import ContourMask
from src.utils.errors import LayoutError


class QuadrantTag(str, Enum):
    TL = "TL"
    TR = "TR"
    BL = "BL"
    BR = "BR"


# Bottom corners first
TIE_ORDER = (QuadrantTag.BR, QuadrantTag.BL, QuadrantTag.TR, QuadrantTag.TL)


@dataclass(frozen=True)
class Quadrant:
    tag: QuadrantTag
    rect: Tuple[int, int, int, int]

    @property
    def width(self) -> int:
        return self.rect[2]

    @property
    def height(self) -> int:
        return self.rect[3]


@dataclass(frozen=True)
class PlacementBox:
    """Where and how the annotation is drawn.

    `origin` is the top-left pixel of the rotated text box of size
    `box_width` x `box_height`; `anchor` is the image corner pixel the box hugs.
    """
    anchor: Tuple[int, int]
    angle: float
    glyph_height: int
    quadrant: QuadrantTag
    origin: Tuple[int, int]
    box_width: int
    box_height: int
    outline_width: int

    def __post_init__(self):
        if not -Config.MAX_ANGLE_DEG <= self.angle <= Config.MAX_ANGLE_DEG:
            raise ValueError(f"angle {self.angle} outside ±{Config.MAX_ANGLE_DEG}°")
        if self.glyph_height <= 0:
            raise ValueError("glyph height must be positive")

    def fits_inside(self, width: int, height: int) -> bool:
        x, y = self.origin
        return x >= 0 and y >= 0 and x + self.box_width <= width and y + self.box_height <= height


def quadrants(width: int, height: int) -> Dict[QuadrantTag, Quadrant]:
    """Split at the floor midpoint; right and bottom quadrants take the odd row/column."""
    mid_x, mid_y = width // 2, height // 2
    return {
        QuadrantTag.TL: Quadrant(QuadrantTag.TL, (0, 0, mid_x, mid_y)),
        QuadrantTag.TR: Quadrant(QuadrantTag.TR, (mid_x, 0, width - mid_x, mid_y)),
        QuadrantTag.BL: Quadrant(QuadrantTag.BL, (0, mid_y, mid_x, height - mid_y)),
        QuadrantTag.BR: Quadrant(QuadrantTag.BR, (mid_x, mid_y, width - mid_x, height - mid_y)),
    }


def quadrant_counts(mask: ContourMask) -> Dict[QuadrantTag, int]:
    counts = {}
    for tag, quadrant in quadrants(mask.width, mask.height).items():
        x, y, w, h = quadrant.rect
        counts[tag] = int(np.count_nonzero(mask.bits[y:y + h, x:x + w]))
    return counts


def select_quadrant(mask: ContourMask) -> Quadrant:
    """
    Pick the quadrant least covered by the largest contour

    Ties go to BR, then BL, TR, TL; an empty mask therefore yields BR.

    Args:
        mask (ContourMask): Filled contour mask

    Returns:
        Quadrant: the placement region
    """
    counts = quadrant_counts(mask)
    best = min(TIE_ORDER, key=lambda tag: (counts[tag], TIE_ORDER.index(tag)))
    logging.info(f"Quadrant counts {({tag.value: n for tag, n in counts.items()})}; placing in {best.value}")
    return quadrants(mask.width, mask.height)[best]


def default_outline_width(glyph_height: int) -> int:
    return max(Config.MIN_OUTLINE_PX, int(round(Config.OUTLINE_FRACTION * glyph_height)))


def text_extent(glyph_count: int, glyph_height: int, outline_width: int) -> Tuple[int, int]:
    """Unrotated text box: square glyph cells plus the outline on every side."""
    width = int(math.ceil(glyph_count * glyph_height * Config.GLYPH_ASPECT)) + 2 * outline_width
    return width, glyph_height + 2 * outline_width


def rotated_extent(width: int, height: int, angle: float) -> Tuple[int, int]:
    """Bounding box of a width x height box rotated by angle degrees, plus 2 px resampling slack."""
    if angle == 0:
        return width, height
    theta = math.radians(angle)
    cos_t, sin_t = abs(math.cos(theta)), abs(math.sin(theta))
    return (
        int(math.ceil(width * cos_t + height * sin_t)) + 2,
        int(math.ceil(width * sin_t + height * cos_t)) + 2,
    )


def plan_placement(q: Quadrant, glyph_count: int, img_dims: Tuple[int, int], rng_seed: int,
                   outline_width: Optional[int] = None) -> PlacementBox:
    """
    Choose angle, size and position of the annotation inside a quadrant

    The angle is uniform in [-10°, +10°] and the glyph height uniform in
    [8 %, 14 %] of the image height, then shrunk until the rotated text box
    fits inside the quadrant less a margin of 4 % of the shorter image side.

    Args:
        q (Quadrant): Target quadrant
        glyph_count (int): Number of glyphs in the annotation
        img_dims (tuple): (width, height) of the photo
        rng_seed (int): Seed for the angle and size draws
        outline_width (int): Fixed outline in px; None applies the default rule

    Returns:
        PlacementBox: placement that lies fully inside the image

    Raises:
        LayoutError: the text cannot fit at the minimum glyph height
    """
    if glyph_count < 1:
        raise ValueError("glyph_count must be at least 1")
    width, height = img_dims

    rng = np.random.default_rng(rng_seed)
    angle = float(rng.uniform(-Config.MAX_ANGLE_DEG, Config.MAX_ANGLE_DEG))
    fraction = float(rng.uniform(Config.MIN_GLYPH_FRACTION, Config.MAX_GLYPH_FRACTION))

    margin = int(math.ceil(Config.MARGIN_FRACTION * min(width, height)))
    avail_w, avail_h = q.width - 2 * margin, q.height - 2 * margin

    drawn_height = fraction * height
    glyph_height = int(math.floor(drawn_height))
    box = None
    while glyph_height >= Config.MIN_GLYPH_PX:
        stroke = default_outline_width(glyph_height) if outline_width is None else outline_width
        stroke = min(stroke, glyph_height // 4)
        box = rotated_extent(*text_extent(glyph_count, glyph_height, stroke), angle)
        if box[0] <= avail_w and box[1] <= avail_h:
            break
        glyph_height -= 1
    if glyph_height < Config.MIN_GLYPH_PX:
        raise LayoutError(
            f"quadrant {q.tag.value} ({q.width}x{q.height}, margin {margin}) cannot hold {glyph_count} glyph(s): "
            f"drawn height {drawn_height:.2f}px shrinks below the {Config.MIN_GLYPH_PX}px floor"
        )

    box_w, box_h = box
    left = q.tag in (QuadrantTag.TL, QuadrantTag.BL)
    top = q.tag in (QuadrantTag.TL, QuadrantTag.TR)
    corner_x, corner_y = (0 if left else width - 1), (0 if top else height - 1)
    origin_x = margin if left else width - margin - box_w
    origin_y = margin if top else height - margin - box_h

    placement = PlacementBox(
        anchor=(corner_x, corner_y),
        angle=angle,
        glyph_height=glyph_height,
        quadrant=q.tag,
        origin=(origin_x, origin_y),
        box_width=box_w,
        box_height=box_h,
        outline_width=stroke,
    )
    logging.info(
        f"Placement {q.tag.value}: glyph height {glyph_height}px, angle {angle:.2f}°, "
        f"box {box_w}x{box_h} at {placement.origin}"
    )
    return placement
