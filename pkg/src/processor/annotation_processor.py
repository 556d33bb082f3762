import logging
import os
import shutil
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple

import pandas as pd
from tqdm import tqdm

from config.config import Config
from src.compositor.blender import composite
from src.compositor.text_renderer import StyleConfig, render_text
from src.embedding.embedding_table import EmbeddingTable
from src.layout.contour import largest_contour
from src.layout.placement import plan_placement, select_quadrant
from src.lexicon.ideophone_index import IdeophoneIndex
from src.matcher.ideophone_matcher import recommend
from src.perception.detections import OBJECT, DetectionSet, load_detections
from src.perception.external_detector import ExternalDetector
from src.utils.errors import IdeophoneError, InputError
from src.utils.image_io import load_image, save_image
from src.utils.result_document import build_result_document
from src.visualizer.mask_visualizer import MaskVisualizer

IDEOPHONE = "ideophone"
OBJECT_LABEL = "object-label"


@dataclass
class AnnotationResult:
    image_path: Path
    seed: int
    document: Optional[dict] = None
    output_path: Optional[Path] = None
    error: Optional[IdeophoneError] = None

    @property
    def exit_code(self) -> int:
        return 0 if self.error is None else self.error.exit_code


def baseline_label(ds: DetectionSet) -> str:
    """Highest-confidence object label (ties by label); other classifiers only when no object was seen."""
    candidates = ds.groups.get(OBJECT) or ds.detections
    best = min(candidates, key=lambda d: (-d.confidence, d.label))
    return best.label


class AnnotationProcessor:
    def __init__(self, index: IdeophoneIndex, table: EmbeddingTable, style: StyleConfig,
                 k: int = Config.DEFAULT_K, detector: Optional[ExternalDetector] = None,
                 jpeg_quality: Optional[int] = None, debug_mask: bool = False, baseline: bool = False):
        """
        Initialize the processor that turns photos into annotated photos

        Args:
            index (IdeophoneIndex): Definition vectors
            table (EmbeddingTable): Word vectors the index was built from
            style (StyleConfig): Font, colors and opacity
            k (int): Candidates per classifier and jitter window
            detector (ExternalDetector): Used when no detection file is given
            jpeg_quality (int): Write JPEG at this quality instead of PNG
            debug_mask (bool): Dump the contour mask next to each output
            baseline (bool): Render the top object label instead of the ideophone
        """
        self.index = index
        self.table = table
        self.style = style
        self.k = k
        self.detector = detector
        self.jpeg_quality = jpeg_quality
        self.debug_mask = debug_mask
        self.baseline = baseline

    def get_detections(self, image_path: Path, detections_path: Optional[Path]) -> DetectionSet:
        if detections_path is not None:
            return load_detections(detections_path)
        if self.detector is None:
            raise InputError(f"no detections for {image_path}: pass a detection file or --detector")
        return self.detector.detect(image_path)

    def output_path_for(self, image_path: Path, out_path: Optional[Path]) -> Path:
        suffix = ".jpg" if self.jpeg_quality is not None else ".png"
        if out_path is None:
            return image_path.with_name(f"{image_path.stem}{Config.OUTPUT_SUFFIX}{suffix}")
        if out_path.is_dir():
            return out_path / f"{image_path.stem}{Config.OUTPUT_SUFFIX}{suffix}"
        return out_path

    def annotate(self, image_path, detections_path=None, seed: int = Config.NO_JITTER_SEED,
                 out_path=None) -> Tuple[dict, Path]:
        """
        Recommend, place and composite the annotation for one photo

        Args:
            image_path (str | Path): Source photo (PNG or JPEG)
            detections_path (str | Path): Detection file; None runs the detector
            seed (int): Seed for jitter and placement
            out_path (str | Path): Output file or directory; None writes beside the input

        Returns:
            tuple: (result document, written image path)
        """
        image_path = Path(image_path)
        detections_path = Path(detections_path) if detections_path is not None else None
        out_path = Path(out_path) if out_path is not None else None

        image = load_image(image_path)
        detections = self.get_detections(image_path, detections_path)
        recommendation = recommend(self.index, detections, self.table, k=self.k, seed=seed)

        entry = self.index.by_id[recommendation.selected.entry_id]
        if self.baseline:
            annotation = {"text": baseline_label(detections), "source": OBJECT_LABEL}
        else:
            annotation = {"text": entry.forms[0], "source": IDEOPHONE}

        mask = largest_contour(image)
        quadrant = select_quadrant(mask)
        box = plan_placement(
            quadrant,
            glyph_count=len(annotation["text"]),
            img_dims=image.dims,
            rng_seed=seed,
            outline_width=self.style.outline_width,
        )

        output_path = self.output_path_for(image_path, out_path)
        if self.style.opacity == 0:
            logging.warning(f"Opacity is 0; copying {image_path} unchanged")
            output_path = output_path.with_suffix(image_path.suffix)
            output_path.parent.mkdir(parents=True, exist_ok=True)
            shutil.copyfile(image_path, output_path)
        else:
            patch = render_text(annotation["text"], self.style, box)
            annotated = composite(image, patch, box, self.style)
            output_path = save_image(annotated, output_path, jpeg_quality=self.jpeg_quality)

        if self.debug_mask:
            MaskVisualizer(str(output_path.parent)).save_mask(mask, image_path.stem)

        document = build_result_document(
            detections.photo_id, recommendation, self.index, placement=box, annotation=annotation
        )
        logging.info(f"Annotated {image_path} with {annotation['text']!r} -> {output_path}")
        return document, output_path

    def _annotate_safely(self, job) -> AnnotationResult:
        image_path, detections_path, seed, out_dir = job
        try:
            document, output_path = self.annotate(image_path, detections_path, seed, out_dir)
            return AnnotationResult(image_path, seed, document=document, output_path=output_path)
        except IdeophoneError as e:
            logging.error(f"Error annotating {image_path}: {e}")
            return AnnotationResult(image_path, seed, error=e)

    def process_batch(self, image_dir, detections_dir=None, base_seed: int = Config.NO_JITTER_SEED,
                      out_dir=None, workers: int = 1) -> List[AnnotationResult]:
        """
        Annotate every photo of a directory

        Photos are taken in sorted name order and photo i uses seed base_seed + i.
        Results come back in that same order whatever the worker count.

        Args:
            image_dir (str | Path): Directory of PNG/JPEG photos
            detections_dir (str | Path): Directory of <photo stem>.json files; None runs the detector
            base_seed (int): Seed of the first photo
            out_dir (str | Path): Output directory; None writes beside the inputs
            workers (int): Photos processed concurrently

        Returns:
            list: one AnnotationResult per photo
        """
        image_dir = Path(image_dir)
        images = sorted(
            path for path in image_dir.iterdir()
            if path.suffix.lower() in Config.IMAGE_EXTENSIONS
            and not path.stem.endswith((Config.OUTPUT_SUFFIX, Config.MASK_SUFFIX))
        )
        if not images:
            raise InputError(f"no PNG or JPEG photos in {image_dir}")
        if out_dir is not None:
            os.makedirs(out_dir, exist_ok=True)

        jobs = [
            (
                path,
                Path(detections_dir) / f"{path.stem}.json" if detections_dir is not None else None,
                base_seed + position,
                Path(out_dir) if out_dir is not None else None,
            )
            for position, path in enumerate(images)
        ]
        with ThreadPoolExecutor(max_workers=workers) as executor:
            results = list(tqdm(executor.map(self._annotate_safely, jobs), total=len(jobs), desc="Annotating"))

        summary_dir = Path(out_dir) if out_dir is not None else image_dir
        self.save_summary(results, summary_dir)
        return results

    def save_summary(self, results: List[AnnotationResult], output_dir: Path) -> Path:
        """
        Save one summary row per photo to CSV

        Returns:
            Path: the summary file
        """
        rows = []
        for result in results:
            document = result.document or {}
            selected = document.get("selected") or {}
            placement = document.get("placement") or {}
            rows.append({
                "photo": result.image_path.name,
                "seed": result.seed,
                "entry_id": selected.get("id"),
                "form": (document.get("annotation") or {}).get("text"),
                "distance": selected.get("distance"),
                "classifier": selected.get("classifier"),
                "quadrant": placement.get("quadrant"),
                "output": str(result.output_path) if result.output_path else None,
                "status": "ok" if result.error is None else f"error {result.exit_code}: {result.error}",
            })

        filepath = output_dir / Config.SUMMARY_FILENAME
        pd.DataFrame(rows).to_csv(filepath, index=False)
        logging.info(f"Saved batch summary to {filepath}")
        return filepath
