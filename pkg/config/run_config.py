import secrets
from pathlib import Path
from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from config.config import Config
from src.utils.errors import InputError

Color = Tuple[int, int, int, int]


def entropy_seed() -> int:
    """Fresh unsigned seed; never the reserved no-jitter value."""
    return secrets.randbelow(2 ** 32 - 1) + 1


class RunConfig(BaseModel):
    """Settings for one CLI invocation: flags first, then environment, then Config."""
    model_config = ConfigDict(frozen=True)

    embedding_path: Optional[Path] = None
    lexicon_path: Optional[Path] = None
    index_path: Optional[Path] = None
    font_path: Optional[Path] = None
    k: int = Field(default=Config.DEFAULT_K, ge=1)
    seed: int = Field(default_factory=entropy_seed, ge=0)
    opacity: float = Field(default=Config.DEFAULT_OPACITY, ge=0.0, le=1.0)
    fill_color: Color = Config.FILL_COLOR
    outline_color: Color = Config.OUTLINE_COLOR
    outline_width: Optional[int] = Field(default=None, ge=0)
    out_path: Optional[Path] = None
    jpeg_quality: Optional[int] = Field(default=None, ge=1, le=100)
    debug_mask: bool = False
    detector: Optional[str] = None
    detector_timeout: float = Field(default=Config.DETECTOR_TIMEOUT, gt=0)
    gloss_mix: bool = False
    baseline: bool = False
    workers: int = Field(default=1, ge=1)
    log_path: Path = Path(Config.LOG_PATH)

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        """Merge parsed CLI arguments with environment defaults."""
        lexicon = getattr(args, "lexicon", None)
        index = getattr(args, "index", None)
        if getattr(args, "command", None) == "build-index":
            # build-index always reads the lexicon; the index path is its output
            lexicon = lexicon or Config.LEXICON_PATH
        elif lexicon is None and index is None:
            index = Config.INDEX_PATH
            lexicon = Config.LEXICON_PATH if index is None else None

        values = {
            "embedding_path": getattr(args, "embedding", None) or Config.EMBEDDING_PATH,
            "lexicon_path": lexicon,
            "index_path": index,
            "font_path": getattr(args, "font", None) or Config.FONT_PATH,
            "k": getattr(args, "k", Config.DEFAULT_K),
            "opacity": getattr(args, "opacity", Config.DEFAULT_OPACITY),
            "fill_color": getattr(args, "fill_color", None) or Config.FILL_COLOR,
            "outline_color": getattr(args, "outline_color", None) or Config.OUTLINE_COLOR,
            "outline_width": getattr(args, "outline_width", None),
            "out_path": getattr(args, "out", None),
            "jpeg_quality": getattr(args, "jpeg_quality", None),
            "debug_mask": getattr(args, "debug_mask", False),
            "detector": getattr(args, "detector", None),
            "detector_timeout": getattr(args, "detector_timeout", None) or Config.DETECTOR_TIMEOUT,
            "gloss_mix": getattr(args, "gloss_mix", False),
            "baseline": getattr(args, "baseline", False),
            "workers": getattr(args, "workers", 1),
            "log_path": getattr(args, "log_dir", None) or Config.LOG_PATH,
        }
        seed = getattr(args, "seed", None)
        if seed is not None:
            values["seed"] = seed
        return cls(**values)

    def require_embedding(self) -> Path:
        if self.embedding_path is None:
            raise InputError("an embedding file is required (--embedding or IDEO_EMBEDDING_PATH)")
        return self.embedding_path

    def require_font(self) -> Path:
        if self.font_path is None:
            raise InputError("a font file is required (--font or IDEO_FONT_PATH)")
        return self.font_path

    def require_single_source(self) -> None:
        """Matching needs exactly one of a lexicon or a prebuilt index."""
        if (self.lexicon_path is None) == (self.index_path is None):
            raise InputError("exactly one of --lexicon or --index is required")
