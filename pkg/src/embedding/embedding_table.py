import hashlib
import logging
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Iterator, Mapping, Optional, Tuple, Union

import numpy as np

from src.utils.errors import InputError, ParseError


@dataclass(frozen=True, eq=False)
class SemanticVector:
    """A D-dimensional vector in the word-embedding space.

    The zero vector is allowed but flagged through `is_degenerate`; it stands
    for "no in-vocabulary evidence" rather than an error.
    """
    components: np.ndarray

    def __post_init__(self):
        array = np.array(self.components, dtype=np.float64).reshape(-1)
        if not np.isfinite(array).all():
            raise ValueError("semantic vector components must be finite")
        array.setflags(write=False)
        object.__setattr__(self, "components", array)

    @classmethod
    def zeros(cls, dimension: int) -> "SemanticVector":
        return cls(np.zeros(dimension, dtype=np.float64))

    @property
    def dimension(self) -> int:
        return int(self.components.shape[0])

    @property
    def is_degenerate(self) -> bool:
        return not bool(np.any(self.components))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.components))

    def __eq__(self, other) -> bool:
        if not isinstance(other, SemanticVector):
            return NotImplemented
        return np.array_equal(self.components, other.components)

    __hash__ = None

    def __repr__(self) -> str:
        return f"SemanticVector(dim={self.dimension}, degenerate={self.is_degenerate})"


@dataclass(frozen=True)
class EmbeddingTable:
    """Immutable token -> vector map read from a word-vector text file."""
    dimension: int
    entries: Mapping[str, np.ndarray]
    source_id: str
    warnings: Tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.dimension <= 0:
            raise ValueError("embedding dimension must be positive")
        if not isinstance(self.entries, MappingProxyType):
            object.__setattr__(self, "entries", MappingProxyType(dict(self.entries)))

    def get(self, token: str) -> Optional[np.ndarray]:
        return self.entries.get(token.lower())

    def __contains__(self, token: str) -> bool:
        return token.lower() in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[str]:
        return iter(self.entries)

    @classmethod
    def from_vectors(cls, vectors: Mapping[str, object], source_id: str = "in-memory") -> "EmbeddingTable":
        """Build a table from an in-memory mapping (first key wins on case clashes)."""
        entries = {}
        dimension = None
        for token, values in vectors.items():
            array = np.array(values, dtype=np.float64).reshape(-1)
            if dimension is None:
                dimension = array.shape[0]
            if array.shape[0] != dimension:
                raise ValueError(f"vector for {token!r} has {array.shape[0]} components, expected {dimension}")
            if not np.isfinite(array).all():
                raise ValueError(f"vector for {token!r} has non-finite components")
            array.setflags(write=False)
            entries.setdefault(token.lower(), array)
        if dimension is None:
            raise ValueError("cannot build an embedding table from no vectors")
        return cls(dimension=dimension, entries=entries, source_id=source_id)


class EmbeddingLoader:
    def __init__(self, path: Union[str, Path]):
        """
        Initialize the loader for a pretrained word-vector text file

        Args:
            path (str | Path): File with one `token v1 ... vD` record per line
        """
        self.path = Path(path)

    def load(self) -> EmbeddingTable:
        """
        Parse the word-vector file into an EmbeddingTable

        Returns:
            EmbeddingTable: table with one entry per unique lowercase token

        Raises:
            InputError: the file does not exist
            ParseError: empty file, non-numeric component or inconsistent dimension
        """
        if not self.path.is_file():
            raise InputError(f"embedding file not found: {self.path}")

        entries = {}
        warnings = []
        dimension = None
        digest = hashlib.sha256()

        with open(self.path, "rb") as handle:
            for line_number, raw in enumerate(handle, start=1):
                digest.update(raw)
                try:
                    line = raw.decode("utf-8").rstrip("\r\n")
                except UnicodeDecodeError:
                    raise ParseError("line is not valid UTF-8", line=line_number)
                if not line.strip():
                    continue

                parts = line.rstrip().split(" ")
                token, values = parts[0].lower(), parts[1:]

                # Dimension is fixed by the first record
                if dimension is None:
                    dimension = len(values)
                    if dimension == 0:
                        raise ParseError("record has no vector components", line=line_number)
                elif len(values) != dimension:
                    raise ParseError(
                        f"expected {dimension} components, found {len(values)}", line=line_number
                    )

                try:
                    vector = np.array(values, dtype=np.float64)
                except ValueError:
                    raise ParseError(f"non-numeric component in record for {token!r}", line=line_number)
                if not np.isfinite(vector).all():
                    raise ParseError(f"non-finite component in record for {token!r}", line=line_number)

                if token in entries:
                    message = f"duplicate token {token!r} at line {line_number}; keeping first occurrence"
                    warnings.append(message)
                    logging.warning(message)
                    continue

                vector.setflags(write=False)
                entries[token] = vector

        if dimension is None:
            raise ParseError(f"embedding file is empty: {self.path}")

        source_id = f"{self.path.name}:sha256={digest.hexdigest()[:16]}"
        logging.info(f"Loaded {len(entries)} vectors of dimension {dimension} from {self.path}")
        return EmbeddingTable(
            dimension=dimension,
            entries=entries,
            source_id=source_id,
            warnings=tuple(warnings),
        )


def load_table(path: Union[str, Path]) -> EmbeddingTable:
    """Wrapper to load a word-vector file."""
    return EmbeddingLoader(path).load()
