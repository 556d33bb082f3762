import re
from collections import Counter
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from src.embedding.embedding_table import EmbeddingTable, SemanticVector
from src.utils.errors import DegenerateVectorError, ScoreRangeError

_ALNUM_RUN = re.compile(r"[^\W_]+")


def tokenize(text: str) -> List[str]:
    """
    Split English text into lowercase alphanumeric tokens

    Digit-only fragments such as the sense markers in "(1) ... (2) ..." are dropped.

    Args:
        text (str): Free text, possibly empty

    Returns:
        list: tokens in reading order
    """
    return [token for token in _ALNUM_RUN.findall(text.lower()) if not token.isdigit()]


def mean_vector(tokens: Iterable[str], table: EmbeddingTable) -> SemanticVector:
    """
    Average the vectors of the in-vocabulary tokens

    The divisor is the number of tokens found in the table, so out-of-vocabulary
    fragments do not pull the result towards zero. When nothing is found the
    degenerate zero vector is returned.

    Args:
        tokens (iterable): Tokens to average (repeats count)
        table (EmbeddingTable): Word vectors

    Returns:
        SemanticVector: mean vector, possibly degenerate
    """
    counts = Counter(token.lower() for token in tokens if token.lower() in table.entries)
    n = sum(counts.values())
    if n == 0:
        return SemanticVector.zeros(table.dimension)

    # Grouping repeats keeps k copies of one token exactly equal to its vector
    total = np.zeros(table.dimension, dtype=np.float64)
    for token, count in counts.items():
        total += (count / n) * table.entries[token]
    return SemanticVector(total)


def weighted_vector(weighted_items: Sequence[Tuple[Sequence[str], float]], table: EmbeddingTable) -> SemanticVector:
    """
    Confidence-weighted mean of label vectors

    Each label is first averaged over its own tokens; labels with no
    in-vocabulary token are left out of both the sum and the count.

    Args:
        weighted_items (sequence): (tokens, confidence) pairs, confidence in [0, 1]
        table (EmbeddingTable): Word vectors

    Returns:
        SemanticVector: weighted mean, degenerate when every label is out of vocabulary

    Raises:
        ScoreRangeError: a confidence lies outside [0, 1]
    """
    for position, (_, confidence) in enumerate(weighted_items):
        if not 0.0 <= confidence <= 1.0:
            raise ScoreRangeError(f"confidence {confidence} of item {position} is outside [0, 1]")

    total = np.zeros(table.dimension, dtype=np.float64)
    n = 0
    for tokens, confidence in weighted_items:
        label_vector = mean_vector(tokens, table)
        if label_vector.is_degenerate:
            continue
        total += confidence * label_vector.components
        n += 1

    if n == 0:
        return SemanticVector.zeros(table.dimension)
    return SemanticVector(total / n)


def cosine_distance(a: SemanticVector, b: SemanticVector) -> float:
    """
    Cosine distance 1 - cos(a, b), in [0, 2]

    Raises:
        ValueError: dimensions differ
        DegenerateVectorError: either vector has zero norm
    """
    if a.dimension != b.dimension:
        raise ValueError(f"dimension mismatch: {a.dimension} vs {b.dimension}")
    norm_a, norm_b = a.norm, b.norm
    if norm_a == 0.0 or norm_b == 0.0:
        raise DegenerateVectorError("cosine distance is undefined for a zero vector")
    similarity = float(np.dot(a.components, b.components)) / (norm_a * norm_b)
    return float(np.clip(1.0 - similarity, 0.0, 2.0))
