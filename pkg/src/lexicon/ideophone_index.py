import hashlib
import json
import logging
import struct
import zlib
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np

from config.config import Config
from src.embedding.embedding_table import EmbeddingTable, SemanticVector
from src.embedding.semantic_vectors import mean_vector, tokenize
from src.lexicon.lexicon_parser import IdeophoneEntry
from src.utils.errors import IndexCorruptionError, IndexFormatError, IndexVersionError, InputError

NO_VOCABULARY = "no in-vocabulary tokens"

_PREFIX = struct.Struct("<7sII")
_BLOCK_LENGTH = struct.Struct("<Q")
_CHECKSUM_SIZE = hashlib.sha256().digest_size


@dataclass(frozen=True)
class IdeophoneIndex:
    """Definition vectors for every retained dictionary entry.

    Entries whose explanation has no in-vocabulary token are listed in
    `excluded` with the reason, so entries + excluded covers the whole lexicon.
    """
    entries: Tuple[Tuple[IdeophoneEntry, SemanticVector], ...]
    dimension: int
    embedding_source_id: str
    excluded: Tuple[Tuple[str, str], ...] = ()
    gloss_mix: bool = False

    def __post_init__(self):
        ids = [entry.id for entry, _ in self.entries]
        if len(ids) != len(set(ids)):
            raise ValueError("index entry ids must be unique")
        for entry, vector in self.entries:
            if vector.dimension != self.dimension:
                raise ValueError(f"vector of {entry.id!r} has dimension {vector.dimension}, expected {self.dimension}")
            if vector.is_degenerate:
                raise ValueError(f"vector of {entry.id!r} is degenerate")

    def __len__(self) -> int:
        return len(self.entries)

    @cached_property
    def matrix(self) -> np.ndarray:
        if not self.entries:
            return np.zeros((0, self.dimension), dtype=np.float64)
        return np.stack([vector.components for _, vector in self.entries])

    @cached_property
    def ids(self) -> Tuple[str, ...]:
        return tuple(entry.id for entry, _ in self.entries)

    @cached_property
    def by_id(self) -> Dict[str, IdeophoneEntry]:
        return {entry.id: entry for entry, _ in self.entries}

    def check_embedding(self, table: EmbeddingTable) -> None:
        """Refuse to pair the index with a different embedding file."""
        if table.source_id != self.embedding_source_id or table.dimension != self.dimension:
            raise IndexFormatError(
                f"index was built from {self.embedding_source_id} (dim {self.dimension}) "
                f"but the embedding is {table.source_id} (dim {table.dimension}); rebuild index"
            )


def definition_tokens(entry: IdeophoneEntry, gloss_mix: bool = False) -> List[str]:
    tokens = tokenize(entry.explanation)
    if gloss_mix:
        for gloss in entry.english_equivalents:
            tokens.extend(tokenize(gloss))
    return tokens


def build_index(entries: Sequence[IdeophoneEntry], table: EmbeddingTable, gloss_mix: bool = False) -> IdeophoneIndex:
    """
    Vectorize every dictionary entry from its English explanation

    Args:
        entries (sequence): Parsed lexicon
        table (EmbeddingTable): Word vectors
        gloss_mix (bool): Also average the English equivalents into the vector

    Returns:
        IdeophoneIndex: retained entries in input order plus exclusions
    """
    indexed = []
    excluded = []
    for entry in entries:
        vector = mean_vector(definition_tokens(entry, gloss_mix), table)
        if vector.is_degenerate:
            logging.warning(f"Excluding {entry.id}: {NO_VOCABULARY}")
            excluded.append((entry.id, NO_VOCABULARY))
            continue
        indexed.append((entry, vector))

    logging.info(f"Indexed {len(indexed)} entries, excluded {len(excluded)}, dim {table.dimension}")
    return IdeophoneIndex(
        entries=tuple(indexed),
        dimension=table.dimension,
        embedding_source_id=table.source_id,
        excluded=tuple(excluded),
        gloss_mix=gloss_mix,
    )


def serialize_index(index: IdeophoneIndex) -> bytes:
    header = {
        "embedding_source_id": index.embedding_source_id,
        "dimension": index.dimension,
        "gloss_mix": index.gloss_mix,
        "entries": [entry.to_record() for entry, _ in index.entries],
        "excluded": [list(item) for item in index.excluded],
    }
    header_bytes = json.dumps(header, ensure_ascii=False, separators=(",", ":")).encode("utf-8")
    vectors = np.ascontiguousarray(index.matrix, dtype="<f8").tobytes()
    block = zlib.compress(vectors, 9)

    body = b"".join([
        _PREFIX.pack(Config.INDEX_MAGIC, Config.INDEX_FORMAT_VERSION, len(header_bytes)),
        header_bytes,
        _BLOCK_LENGTH.pack(len(block)),
        block,
    ])
    return body + hashlib.sha256(body).digest()


def deserialize_index(data: bytes) -> IdeophoneIndex:
    if len(data) < _PREFIX.size or data[:len(Config.INDEX_MAGIC)] != Config.INDEX_MAGIC:
        raise IndexFormatError("not an ideophone index file (bad magic)")

    _, version, header_length = _PREFIX.unpack_from(data, 0)
    if version != Config.INDEX_FORMAT_VERSION:
        raise IndexVersionError(
            f"index format version {version} does not match supported version "
            f"{Config.INDEX_FORMAT_VERSION}; rebuild index"
        )

    if len(data) < _PREFIX.size + _CHECKSUM_SIZE:
        raise IndexCorruptionError("index file is truncated")
    body, checksum = data[:-_CHECKSUM_SIZE], data[-_CHECKSUM_SIZE:]
    if hashlib.sha256(body).digest() != checksum:
        raise IndexCorruptionError("index checksum mismatch; the file is corrupted")

    try:
        offset = _PREFIX.size
        header = json.loads(body[offset:offset + header_length].decode("utf-8"))
        offset += header_length
        (block_length,) = _BLOCK_LENGTH.unpack_from(body, offset)
        offset += _BLOCK_LENGTH.size
        vectors = np.frombuffer(zlib.decompress(body[offset:offset + block_length]), dtype="<f8")

        dimension = int(header["dimension"])
        records = header["entries"]
        matrix = vectors.astype(np.float64).reshape(len(records), dimension)
        entries = tuple(
            (IdeophoneEntry.model_validate(record), SemanticVector(row))
            for record, row in zip(records, matrix)
        )
        return IdeophoneIndex(
            entries=entries,
            dimension=dimension,
            embedding_source_id=header["embedding_source_id"],
            excluded=tuple((item[0], item[1]) for item in header["excluded"]),
            gloss_mix=bool(header.get("gloss_mix", False)),
        )
    except (KeyError, ValueError, zlib.error, struct.error) as e:
        raise IndexCorruptionError(f"index payload is unreadable: {e}")


def save_index(index: IdeophoneIndex, path: Union[str, Path]) -> Path:
    """
    Write the index to disk

    Args:
        index (IdeophoneIndex): Index to persist
        path (str | Path): Destination file

    Returns:
        Path: the written file
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(serialize_index(index))
    logging.info(f"Saved index of {len(index)} entries to {path}")
    return path


def load_index(path: Union[str, Path]) -> IdeophoneIndex:
    """
    Read an index written by save_index

    Raises:
        InputError: the file does not exist
        IndexVersionError: written by another format version
        IndexCorruptionError: checksum or payload failure
    """
    path = Path(path)
    if not path.is_file():
        raise InputError(f"index file not found: {path}")
    index = deserialize_index(path.read_bytes())
    logging.info(f"Loaded index of {len(index)} entries (dim {index.dimension}) from {path}")
    return index
