import os

from dotenv import load_dotenv

# Load environment variables
load_dotenv()


class Config:
    # Input locations (overridable through .env / environment)
    EMBEDDING_PATH = os.getenv("IDEO_EMBEDDING_PATH")
    LEXICON_PATH = os.getenv("IDEO_LEXICON_PATH")
    INDEX_PATH = os.getenv("IDEO_INDEX_PATH")
    FONT_PATH = os.getenv("IDEO_FONT_PATH")

    # Directory paths
    LOG_PATH = os.getenv("IDEO_LOG_PATH", "logs")

    # Matching
    DEFAULT_K = 5
    NO_JITTER_SEED = 0

    # Detector adapter
    DETECTOR_TIMEOUT = float(os.getenv("IDEO_DETECTOR_TIMEOUT", "60"))
    IMAGE_PLACEHOLDER = "{image}"

    # Placement thresholds
    MAX_ANGLE_DEG = 10.0
    MIN_GLYPH_FRACTION = 0.08
    MAX_GLYPH_FRACTION = 0.14
    MARGIN_FRACTION = 0.04
    MIN_GLYPH_PX = 8
    GLYPH_ASPECT = 1.0

    # Text style
    FILL_COLOR = (255, 255, 255, 255)
    OUTLINE_COLOR = (0, 0, 0, 255)
    OUTLINE_FRACTION = 0.06
    MIN_OUTLINE_PX = 2
    DEFAULT_OPACITY = 1.0

    # Index file format
    INDEX_MAGIC = b"IDEOIDX"
    INDEX_FORMAT_VERSION = 1

    # Output
    OUTPUT_SUFFIX = "_ideophone"
    MASK_SUFFIX = "_mask"
    SUMMARY_FILENAME = "annotations_summary.csv"
    IMAGE_EXTENSIONS = (".png", ".jpg", ".jpeg")
