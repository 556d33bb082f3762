import json
import shlex
import sys
from pathlib import Path

import numpy as np
import pytest

from src.embedding.embedding_table import EmbeddingTable
from src.layout.contour import RasterImage

VOCABULARY = {
    "sound": [1.0, 0.0, 0.0, 0.0],
    "clock": [0.9, 0.1, 0.0, 0.0],
    "mechanical": [0.8, 0.2, 0.0, 0.0],
    "internal": [0.5, 0.5, 0.0, 0.0],
    "mechanism": [0.7, 0.3, 0.0, 0.0],
    "ticking": [0.95, 0.05, 0.0, 0.0],
    "smile": [0.0, 0.0, 1.0, 0.0],
    "smiling": [0.0, 0.0, 0.9, 0.1],
    "grin": [0.0, 0.1, 0.9, 0.0],
    "happy": [0.0, 0.0, 0.8, 0.2],
    "frown": [0.1, 0.0, 0.5, 0.4],
    "stare": [0.0, 0.0, 0.0, 1.0],
    "staring": [0.0, 0.1, 0.0, 0.9],
    "looking": [0.0, 0.2, 0.0, 0.8],
    "whine": [0.3, 0.0, 0.0, 0.7],
    "noodles": [0.0, 1.0, 0.0, 0.0],
    "eating": [0.1, 0.9, 0.0, 0.0],
    "soup": [0.0, 0.9, 0.1, 0.0],
    "cat": [0.2, 0.2, 0.2, 0.4],
    "sofa": [0.3, 0.3, 0.1, 0.3],
    "the": [0.1, 0.1, 0.1, 0.1],
}

LEXICON = [
    {
        "id": "tokee",
        "forms": ["トケー"],
        "romaji": "toke-",
        "english": ["tic-toc"],
        "explanation": "the sound of a mechanical clock's internal mechanism",
    },
    {
        "id": "jii",
        "forms": ["ジーッ", "じーっ"],
        "romaji": "ji-",
        "english": ["whine", "stare"],
        "explanation": "(1) Like when microphone is too close to the speakers, see also *Ui-n*; "
                       "(2) As in staring at someone, or looking at something for an extended period of time.",
    },
    {
        "id": "niko",
        "forms": ["ニコッ", "にこっ"],
        "romaji": "niko",
        "english": ["smile"],
        "explanation": "smiling, a happy grin",
    },
    {
        "id": "zuruzuru",
        "forms": ["ズルズル", "ずるずる"],
        "romaji": "zuruzuru",
        "english": ["slurp"],
        "explanation": "eating soup noodles noisily",
    },
    {
        "id": "nunu",
        "forms": ["ヌヌ"],
        "romaji": "nunu",
        "english": [],
        "explanation": "zzzq qqqz",
    },
]

FONT_CANDIDATES = [
    "/usr/share/fonts/opentype/noto/NotoSansCJK-Regular.ttc",
    "/usr/share/fonts/noto-cjk/NotoSansCJK-Regular.ttc",
    "/usr/share/fonts/google-noto-cjk/NotoSansCJK-Regular.ttc",
    "/usr/share/fonts/opentype/ipafont-gothic/ipag.ttf",
    "/usr/share/fonts/truetype/fonts-japanese-gothic.ttf",
    "/usr/share/fonts/truetype/droid/DroidSansFallbackFull.ttf",
    "/System/Library/Fonts/ヒラギノ角ゴシック W3.ttc",
    "C:\\Windows\\Fonts\\msgothic.ttc",
]
LATIN_FONT_CANDIDATES = [
    "/usr/share/fonts/truetype/dejavu/DejaVuSans.ttf",
    "/usr/share/fonts/dejavu/DejaVuSans.ttf",
    "/usr/share/fonts/TTF/DejaVuSans.ttf",
    "/System/Library/Fonts/Supplemental/Arial.ttf",
    "C:\\Windows\\Fonts\\arial.ttf",
]


def write_embedding(path: Path, vectors: dict) -> Path:
    lines = [f"{token} {' '.join(repr(float(v)) for v in values)}" for token, values in vectors.items()]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_jsonl(path: Path, records) -> Path:
    path.write_text("".join(json.dumps(record, ensure_ascii=False) + "\n" for record in records), encoding="utf-8")
    return path


def write_detections(path: Path, detections, photo_id="photo") -> Path:
    path.write_text(json.dumps({"photo_id": photo_id, "detections": detections}), encoding="utf-8")
    return path


def square_image(width=100, height=100, squares=((10, 10, 20),), background=255, ink=0) -> RasterImage:
    """White RGBA image with dark squares given as (x, y, side)."""
    pixels = np.full((height, width, 4), background, dtype=np.uint8)
    pixels[..., 3] = 255
    for x, y, side in squares:
        pixels[y:y + side, x:x + side, :3] = ink
    return RasterImage(pixels)


@pytest.fixture
def tiny_table():
    return EmbeddingTable.from_vectors({"a": [1.0, 0.0], "b": [0.0, 1.0], "c": [1.0, 1.0]})


@pytest.fixture
def vocab_table():
    return EmbeddingTable.from_vectors(VOCABULARY, source_id="test-vocabulary")


@pytest.fixture
def embedding_file(tmp_path):
    return write_embedding(tmp_path / "vectors.txt", VOCABULARY)


@pytest.fixture
def lexicon_file(tmp_path):
    return write_jsonl(tmp_path / "lexicon.jsonl", LEXICON)


@pytest.fixture
def stub_detector(tmp_path):
    """Factory for detector commands that print a fixed payload and exit with a status."""
    def make(payload: str, status: int = 0, stderr: str = "", delay: float = 0.0):
        script = tmp_path / f"detector_{abs(hash((payload, status, stderr, delay)))}.py"
        script.write_text(
            "import sys\n"
            "import time\n"
            f"time.sleep({delay!r})\n"
            f"sys.stderr.write({stderr!r})\n"
            f"sys.stdout.write({payload!r})\n"
            f"sys.exit({status})\n",
            encoding="utf-8",
        )
        return f"{shlex.quote(sys.executable)} {shlex.quote(str(script))} {{image}}"
    return make


def _first_existing(candidates):
    for candidate in candidates:
        if Path(candidate).is_file():
            return Path(candidate)
    return None


@pytest.fixture
def cjk_font():
    font = _first_existing(FONT_CANDIDATES)
    if font is None:
        pytest.skip("no CJK-capable font installed")
    return font


@pytest.fixture
def any_font():
    font = _first_existing(FONT_CANDIDATES + LATIN_FONT_CANDIDATES)
    if font is None:
        pytest.skip("no outline font installed")
    return font
