import logging
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Dict, Optional, Tuple

import numpy as np
from fontTools.ttLib import TTFont, TTLibError
from PIL import Image, ImageDraw, ImageFont
from pydantic import BaseModel, ConfigDict, Field, field_validator

from config.config import Config
from src.layout.placement import PlacementBox, text_extent
from src.utils.errors import FontError, InputError, MissingGlyphError

Color = Tuple[int, int, int, int]


class StyleConfig(BaseModel):
    """How the annotation looks. outline_width None follows the placement's default rule."""
    model_config = ConfigDict(frozen=True)

    font_path: Path
    fill_color: Color = Config.FILL_COLOR
    outline_color: Color = Config.OUTLINE_COLOR
    outline_width: Optional[int] = Field(default=None, ge=0)
    opacity: float = Field(default=Config.DEFAULT_OPACITY, ge=0.0, le=1.0)

    @field_validator("fill_color", "outline_color")
    @classmethod
    def check_color(cls, color):
        if any(not 0 <= channel <= 255 for channel in color):
            raise ValueError("color channels must lie in 0..255")
        return color


@dataclass(frozen=True, eq=False)
class GlyphPatch:
    """Rasterized, rotated annotation.

    `coverage` is the per-pixel alpha in [0, 1] (outline and fill combined,
    color alpha included) and `color` the per-pixel RGB the alpha applies to.
    """
    coverage: np.ndarray
    color: np.ndarray
    baseline_origin: Tuple[int, int]

    @property
    def width(self) -> int:
        return int(self.coverage.shape[1])

    @property
    def height(self) -> int:
        return int(self.coverage.shape[0])


class FontFace:
    def __init__(self, font_path):
        """
        Load an outline font once for glyph checks and rasterization

        Args:
            font_path (str | Path): TrueType/OpenType font with CJK coverage
        """
        self.font_path = Path(font_path)
        if not self.font_path.is_file():
            raise InputError(f"font file not found: {self.font_path}")
        try:
            font = TTFont(str(self.font_path), lazy=True, fontNumber=0)
            self.cmap = frozenset(font.getBestCmap() or {})
            font.close()
        except (TTLibError, OSError) as e:
            raise FontError(f"unreadable font file {self.font_path}: {e}")
        self.font_cache: Dict[int, ImageFont.FreeTypeFont] = {}

    def check_coverage(self, text: str) -> None:
        for char in text:
            if ord(char) not in self.cmap:
                raise MissingGlyphError(char, str(self.font_path))

    def get_font(self, size: int) -> ImageFont.FreeTypeFont:
        if size not in self.font_cache:
            try:
                self.font_cache[size] = ImageFont.truetype(str(self.font_path), size)
            except OSError as e:
                raise FontError(f"unreadable font file {self.font_path}: {e}")
        return self.font_cache[size]


@lru_cache(maxsize=8)
def load_font_face(font_path: str) -> FontFace:
    return FontFace(font_path)


def _fit_to_box(layer: Image.Image, width: int, height: int) -> Image.Image:
    """Center the rotated layer on a canvas of exactly width x height."""
    canvas = Image.new("L", (width, height), 0)
    canvas.paste(layer, ((width - layer.width) // 2, (height - layer.height) // 2))
    return canvas


def render_text(text: str, style: StyleConfig, box: PlacementBox) -> GlyphPatch:
    """
    Rasterize the annotation: outline, then fill, anti-aliased and rotated

    Args:
        text (str): Ideophone surface form
        style (StyleConfig): Font and colors
        box (PlacementBox): Size, angle and outline width from the layout stage

    Returns:
        GlyphPatch: coverage and color of size box_width x box_height

    Raises:
        InputError: empty annotation
        MissingGlyphError: the font lacks a code point of the text
        FontError: the font cannot be read
    """
    if not text:
        raise InputError("empty annotation")
    face = load_font_face(str(style.font_path))
    face.check_coverage(text)
    font = face.get_font(box.glyph_height)

    stroke = box.outline_width
    width, height = text_extent(len(text), box.glyph_height, stroke)
    center = (width / 2, height / 2)

    fill_layer = Image.new("L", (width, height), 0)
    outline_layer = Image.new("L", (width, height), 0)
    ImageDraw.Draw(fill_layer).text(center, text, font=font, fill=255, anchor="mm")
    ImageDraw.Draw(outline_layer).text(
        center, text, font=font, fill=255, anchor="mm", stroke_width=stroke, stroke_fill=255
    )

    if box.angle != 0:
        fill_layer = fill_layer.rotate(box.angle, resample=Image.BICUBIC, expand=True)
        outline_layer = outline_layer.rotate(box.angle, resample=Image.BICUBIC, expand=True)
    fill_layer = _fit_to_box(fill_layer, box.box_width, box.box_height)
    outline_layer = _fit_to_box(outline_layer, box.box_width, box.box_height)

    fill = np.asarray(fill_layer, dtype=np.float64) / 255.0
    outline = np.maximum(np.asarray(outline_layer, dtype=np.float64) / 255.0 - fill, 0.0)

    fill_weight = fill * (style.fill_color[3] / 255.0)
    outline_weight = outline * (style.outline_color[3] / 255.0)
    coverage = np.clip(fill_weight + outline_weight, 0.0, 1.0)

    fill_rgb = np.array(style.fill_color[:3], dtype=np.float64)
    outline_rgb = np.array(style.outline_color[:3], dtype=np.float64)
    weighted = fill_weight[..., None] * fill_rgb + outline_weight[..., None] * outline_rgb
    total = (fill_weight + outline_weight)[..., None]
    color = np.divide(weighted, total, out=np.broadcast_to(fill_rgb, weighted.shape).copy(), where=total > 0)

    logging.info(
        f"Rendered {text!r} at {box.glyph_height}px, angle {box.angle:.2f}°, patch {box.box_width}x{box.box_height}"
    )
    return GlyphPatch(
        coverage=coverage,
        color=color,
        baseline_origin=(box.box_width // 2, box.box_height // 2),
    )
