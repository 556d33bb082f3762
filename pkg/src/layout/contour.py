import logging
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import binary_fill_holes
from skimage.filters import threshold_otsu
from skimage.measure import label

# ITU-R BT.601 luma weights
LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


@dataclass(frozen=True, eq=False)
class RasterImage:
    """Row-major RGBA image, 8 bits per channel."""
    pixels: np.ndarray

    def __post_init__(self):
        pixels = np.asarray(self.pixels)
        if pixels.ndim != 3 or pixels.shape[2] != 4:
            raise ValueError(f"expected an HxWx4 RGBA buffer, got shape {pixels.shape}")
        if pixels.shape[0] == 0 or pixels.shape[1] == 0:
            raise ValueError("image must have positive width and height")
        pixels = np.array(pixels, dtype=np.uint8)
        pixels.setflags(write=False)
        object.__setattr__(self, "pixels", pixels)

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def dims(self):
        return (self.width, self.height)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RasterImage):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class ContourMask:
    """Filled mask of the largest foreground component."""
    bits: np.ndarray

    def __post_init__(self):
        bits = np.array(self.bits, dtype=bool)
        if bits.ndim != 2:
            raise ValueError("mask must be two-dimensional")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @property
    def width(self) -> int:
        return int(self.bits.shape[1])

    @property
    def height(self) -> int:
        return int(self.bits.shape[0])

    @property
    def area(self) -> int:
        return int(np.count_nonzero(self.bits))

    @classmethod
    def empty(cls, width: int, height: int) -> "ContourMask":
        return cls(np.zeros((height, width), dtype=bool))


def to_grayscale(img: RasterImage) -> np.ndarray:
    rgb = img.pixels[:, :, :3].astype(np.float64)
    return np.rint(rgb @ LUMA_WEIGHTS).clip(0, 255).astype(np.uint8)


def otsu_threshold(gray: np.ndarray):
    """
    Threshold maximizing the between-class variance

    Pixels <= threshold form the dark class. Returns None when the image has a
    single gray level and therefore no foreground.
    """
    if np.unique(gray).size < 2:
        return None
    return float(threshold_otsu(gray))


def largest_contour(img: RasterImage) -> ContourMask:
    """
    Find the photo's subject as the largest filled foreground component

    Grayscale -> Otsu threshold -> foreground is the smaller of the two classes
    (the dark class on a tie) -> 4-connected labeling -> largest component ->
    internal holes filled. Uniform images give an empty mask.

    Args:
        img (RasterImage): Source photo

    Returns:
        ContourMask: mask of the largest component
    """
    gray = to_grayscale(img)
    threshold = otsu_threshold(gray)
    if threshold is None:
        logging.info("Uniform image; no foreground contour")
        return ContourMask.empty(img.width, img.height)

    dark = gray <= threshold
    dark_count = int(np.count_nonzero(dark))
    foreground = dark if dark_count <= dark.size - dark_count else ~dark

    labels, count = label(foreground, connectivity=1, return_num=True)
    if count == 0:
        return ContourMask.empty(img.width, img.height)

    # Lowest label wins ties, i.e. the component met first in raster order
    areas = np.bincount(labels.ravel())[1:]
    component = labels == int(np.argmax(areas)) + 1
    mask = ContourMask(binary_fill_holes(component))
    logging.info(f"Largest contour: {mask.area} px of {img.width}x{img.height} (threshold {threshold})")
    return mask
