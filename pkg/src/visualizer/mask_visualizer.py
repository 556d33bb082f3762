import logging
import os
from pathlib import Path

import numpy as np
from PIL import Image

from config.config import Config
from src.layout.contour import ContourMask
from src.layout.placement import quadrant_counts


class MaskVisualizer:
    def __init__(self, output_path="."):
        """
        Initialize the visualizer with an output path for debug dumps

        Args:
            output_path (str): Directory where mask images will be saved
        """
        self.output_path = output_path
        os.makedirs(output_path, exist_ok=True)

    def save_mask(self, mask: ContourMask, photo_stem: str) -> Path:
        """
        Write the contour mask as a 1-bit PNG and log the quadrant counts

        Args:
            mask (ContourMask): Largest-contour mask
            photo_stem (str): Name of the source photo without extension

        Returns:
            Path: the written mask file
        """
        filepath = Path(self.output_path) / f"{photo_stem}{Config.MASK_SUFFIX}.png"
        Image.fromarray(np.asarray(mask.bits)).convert("1").save(filepath, format="PNG")

        counts = {tag.value: count for tag, count in quadrant_counts(mask).items()}
        logging.info(f"Saved mask ({mask.area} px) to {filepath}; quadrant counts {counts}")
        return filepath
