import logging

import numpy as np

from src.compositor.text_renderer import GlyphPatch, StyleConfig
from src.layout.contour import RasterImage
from src.layout.placement import PlacementBox


def composite(img: RasterImage, patch: GlyphPatch, box: PlacementBox, style: StyleConfig) -> RasterImage:
    """
    Source-over blend of the glyph patch onto the photo

    Effective alpha is coverage x opacity. Pixels outside the patch rectangle,
    and pixels with zero effective alpha, are copied unchanged.

    Args:
        img (RasterImage): Photo
        patch (GlyphPatch): Rendered annotation
        box (PlacementBox): Gives the patch origin
        style (StyleConfig): Supplies the opacity

    Returns:
        RasterImage: new image; the input is not modified
    """
    if style.opacity == 0:
        logging.warning("Opacity is 0; the annotation is invisible")
        return img
    if not box.fits_inside(img.width, img.height):
        raise ValueError(f"placement box at {box.origin} does not fit a {img.width}x{img.height} image")

    x, y = box.origin
    pixels = np.array(img.pixels)
    region = pixels[y:y + patch.height, x:x + patch.width].astype(np.float64)

    alpha = patch.coverage * style.opacity
    bg_rgb = region[..., :3]
    bg_alpha = region[..., 3] / 255.0

    out_alpha = alpha + bg_alpha * (1.0 - alpha)
    numerator = patch.color * alpha[..., None] + bg_rgb * (bg_alpha * (1.0 - alpha))[..., None]
    out_rgb = np.divide(numerator, out_alpha[..., None], out=bg_rgb.copy(), where=out_alpha[..., None] > 0)

    blended = np.empty_like(region)
    blended[..., :3] = out_rgb
    blended[..., 3] = out_alpha * 255.0
    blended = np.floor(blended + 0.5).clip(0, 255)

    touched = (alpha > 0)[..., None]
    pixels[y:y + patch.height, x:x + patch.width] = np.where(touched, blended, region).astype(np.uint8)
    return RasterImage(pixels)
