import argparse
import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import List, Optional

import pandas as pd
from pydantic import ValidationError

from config.config import Config
from config.run_config import RunConfig
from src.compositor.text_renderer import StyleConfig
from src.embedding.embedding_table import EmbeddingTable, load_table
from src.embedding.semantic_vectors import mean_vector, tokenize
from src.lexicon.ideophone_index import IdeophoneIndex, build_index, load_index, save_index
from src.lexicon.lexicon_parser import parse_lexicon
from src.matcher.ideophone_matcher import recommend, top_k
from src.perception.detections import load_detections
from src.perception.external_detector import ExternalDetector
from src.processor.annotation_processor import AnnotationProcessor
from src.utils.errors import DegenerateQueryError, IdeophoneError, InputError
from src.utils.result_document import build_result_document, dumps


class IdeophonePipeline:
    def __init__(self, config: RunConfig, level: int = logging.INFO):
        """Initialize the pipeline with the settings of one invocation."""
        self.config = config
        self.setup_logging(level)
        self.table: Optional[EmbeddingTable] = None
        self.index: Optional[IdeophoneIndex] = None

    def setup_logging(self, level: int) -> None:
        """Log to a dated file and to standard error; standard output carries results only."""
        log_dir = Path(self.config.log_path)
        log_dir.mkdir(parents=True, exist_ok=True)
        log_file = log_dir / f'ideophone_{datetime.now():%Y%m%d}.log'

        logging.basicConfig(
            level=level,
            format='%(asctime)s - %(levelname)s - %(message)s',
            handlers=[
                logging.FileHandler(log_file, encoding="utf-8"),
                logging.StreamHandler(sys.stderr)
            ],
            force=True,
        )

    def initialize_components(self) -> None:
        """Load the embedding and the ideophone index (building it from a lexicon if asked)."""
        self.table = load_table(self.config.require_embedding())
        self.config.require_single_source()
        if self.config.index_path is not None:
            self.index = load_index(self.config.index_path)
            self.index.check_embedding(self.table)
        else:
            entries = parse_lexicon(self.config.lexicon_path)
            self.index = build_index(entries, self.table, gloss_mix=self.config.gloss_mix)

    def style(self) -> StyleConfig:
        return StyleConfig(
            font_path=self.config.require_font(),
            fill_color=self.config.fill_color,
            outline_color=self.config.outline_color,
            outline_width=self.config.outline_width,
            opacity=self.config.opacity,
        )

    def cmd_build_index(self) -> int:
        """Vectorize the lexicon and write the index file."""
        if self.config.lexicon_path is None:
            raise InputError("build-index needs --lexicon")
        self.table = load_table(self.config.require_embedding())
        entries = parse_lexicon(self.config.lexicon_path)
        index = build_index(entries, self.table, gloss_mix=self.config.gloss_mix)

        target = self.config.out_path or Config.INDEX_PATH or Path(self.config.lexicon_path).with_suffix(".idx")
        save_index(index, target)
        print(f"indexed {len(index)}, excluded {len(index.excluded)}, dim {index.dimension}", file=sys.stderr)
        return 0

    def cmd_match(self, detections_path) -> int:
        """Print the result document for one detection file."""
        self.initialize_components()
        detections = load_detections(detections_path)
        logging.info(f"Matching with seed {self.config.seed}")
        recommendation = recommend(self.index, detections, self.table, k=self.config.k, seed=self.config.seed)
        print(dumps(build_result_document(detections.photo_id, recommendation, self.index)))
        return 0

    def cmd_annotate(self, image_path, detections_path=None) -> int:
        """Annotate one photo, or every photo of a directory."""
        self.initialize_components()
        detector = None
        if self.config.detector:
            detector = ExternalDetector(self.config.detector, timeout=self.config.detector_timeout)
        processor = AnnotationProcessor(
            self.index,
            self.table,
            self.style(),
            k=self.config.k,
            detector=detector,
            jpeg_quality=self.config.jpeg_quality,
            debug_mask=self.config.debug_mask,
            baseline=self.config.baseline,
        )
        logging.info(f"Annotating with seed {self.config.seed}")

        image_path = Path(image_path)
        if not image_path.is_dir():
            document, _ = processor.annotate(image_path, detections_path, self.config.seed, self.config.out_path)
            print(dumps(document))
            return 0

        results = processor.process_batch(
            image_path,
            detections_dir=detections_path,
            base_seed=self.config.seed,
            out_dir=self.config.out_path,
            workers=self.config.workers,
        )
        for result in results:
            if result.document is not None:
                print(dumps(result.document))
        return max(result.exit_code for result in results)

    def cmd_nearest(self, query_text: str) -> int:
        """Print the entries closest to free query text."""
        self.initialize_components()
        vector = mean_vector(tokenize(query_text), self.table)
        if vector.is_degenerate:
            raise DegenerateQueryError(f"query {query_text!r} has no in-vocabulary tokens")

        candidates = top_k(self.index, vector, self.config.k)
        rows = []
        for rank, candidate in enumerate(candidates, start=1):
            entry = self.index.by_id[candidate.entry_id]
            rows.append({
                "rank": rank,
                "id": entry.id,
                "form": entry.forms[0],
                "romaji": entry.romaji,
                "distance": f"{candidate.distance:.6f}",
                "english": ", ".join(entry.english_equivalents),
            })
        print(pd.DataFrame(rows).to_string(index=False))
        return 0


def parse_color(value: str):
    parts = [int(part) for part in value.split(",")]
    if len(parts) == 3:
        parts.append(255)
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("colors are R,G,B or R,G,B,A")
    return tuple(parts)


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--embedding", type=Path, help="Word-vector text file")
    source = shared.add_mutually_exclusive_group()
    source.add_argument("--lexicon", type=Path, help="Ideophone lexicon (JSON Lines)")
    source.add_argument("--index", type=Path, help="Prebuilt index file")
    shared.add_argument("--font", type=Path, help="Outline font with CJK coverage")
    shared.add_argument("--k", type=int, default=Config.DEFAULT_K, help="Candidates per classifier (default 5)")
    shared.add_argument("--seed", type=int, help="Unsigned seed; 0 disables jitter")
    shared.add_argument("--opacity", type=float, default=Config.DEFAULT_OPACITY, help="Annotation opacity 0..1")
    shared.add_argument("--fill-color", type=parse_color, help="Text fill R,G,B[,A]")
    shared.add_argument("--outline-color", type=parse_color, help="Text outline R,G,B[,A]")
    shared.add_argument("--outline-width", type=int, help="Outline width in px")
    shared.add_argument("--out", type=Path, help="Output file or directory")
    shared.add_argument("--jpeg-quality", type=int, help="Write JPEG at this quality (1-100) instead of PNG")
    shared.add_argument("--debug-mask", action="store_true", help="Dump the contour mask as a 1-bit PNG")
    shared.add_argument("--detector", help='External detector command, e.g. "detect {image}"')
    shared.add_argument("--detector-timeout", type=float, help="Detector timeout in seconds")
    shared.add_argument("--gloss-mix", action="store_true", help="Average English equivalents into the definitions")
    shared.add_argument("--log-dir", help="Directory for log files")
    verbosity = shared.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true")
    verbosity.add_argument("--quiet", action="store_true")

    parser = argparse.ArgumentParser(description="Ideophone recommendation and photo annotation")
    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    subparsers.add_parser(
        "build-index", parents=[shared], help="Vectorize the lexicon into an index file (written to --out)"
    )

    match_parser = subparsers.add_parser("match", parents=[shared], help="Recommend an ideophone for detections")
    match_parser.add_argument("detections", type=Path, help="Detection file")

    annotate_parser = subparsers.add_parser("annotate", parents=[shared], help="Composite the ideophone onto photos")
    annotate_parser.add_argument("image", type=Path, help="Photo, or a directory of photos")
    annotate_parser.add_argument("--detections", type=Path, help="Detection file, or directory of <stem>.json")
    annotate_parser.add_argument("--workers", type=int, default=1, help="Photos processed concurrently")
    annotate_parser.add_argument("--baseline", action="store_true", help="Annotate with the top object label")

    nearest_parser = subparsers.add_parser("nearest", parents=[shared], help="Entries closest to query text")
    nearest_parser.add_argument("query", help="English query text")

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return 2

    try:
        config = RunConfig.from_args(args)
    except ValidationError as e:
        print(f"invalid arguments: {e}", file=sys.stderr)
        return 2

    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    pipeline = IdeophonePipeline(config, level=level)
    try:
        match args.command:
            case "build-index":
                return pipeline.cmd_build_index()
            case "match":
                return pipeline.cmd_match(args.detections)
            case "annotate":
                return pipeline.cmd_annotate(args.image, args.detections)
            case "nearest":
                return pipeline.cmd_nearest(args.query)
    except IdeophoneError as e:
        logging.error(str(e))
        return e.exit_code
    except ValidationError as e:
        logging.error(f"invalid settings: {e}")
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
