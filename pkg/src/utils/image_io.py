import logging
from pathlib import Path
from typing import Optional, Union

import numpy as np
from PIL import Image, UnidentifiedImageError

from src.layout.contour import RasterImage
from src.utils.errors import InputError


def load_image(path: Union[str, Path]) -> RasterImage:
    """Read a PNG or JPEG photo as RGBA."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f"image file not found: {path}")
    try:
        with Image.open(path) as image:
            return RasterImage(np.asarray(image.convert("RGBA")))
    except (UnidentifiedImageError, OSError) as e:
        raise InputError(f"unreadable image {path}: {e}")


def save_image(img: RasterImage, path: Union[str, Path], jpeg_quality: Optional[int] = None) -> Path:
    """
    Write the image as PNG, or as JPEG when a quality is given

    Args:
        img (RasterImage): Image to write
        path (str | Path): Destination; the suffix is forced to match the format
        jpeg_quality (int): JPEG quality 1..95, None for lossless PNG

    Returns:
        Path: the written file
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    image = Image.fromarray(np.asarray(img.pixels), mode="RGBA")
    if jpeg_quality is None:
        path = path.with_suffix(".png")
        image.save(path, format="PNG")
    else:
        path = path.with_suffix(".jpg")
        image.convert("RGB").save(path, format="JPEG", quality=jpeg_quality)
    logging.info(f"Saved image to {path}")
    return path
