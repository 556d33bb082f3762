import logging
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from config.config import Config
from src.embedding.embedding_table import EmbeddingTable, SemanticVector
from src.embedding.semantic_vectors import weighted_vector
from src.lexicon.ideophone_index import IdeophoneIndex
from src.perception.detections import DetectionSet
from src.utils.errors import DegenerateVectorError, UnmatchablePhotoError


@dataclass(frozen=True)
class MatchCandidate:
    entry_id: str
    distance: float
    classifier: str

    def __post_init__(self):
        if not (np.isfinite(self.distance) and 0.0 <= self.distance <= 2.0):
            raise ValueError(f"distance {self.distance} is outside [0, 2]")

    @property
    def sort_key(self) -> Tuple[float, str, str]:
        return (self.distance, self.classifier, self.entry_id)


@dataclass(frozen=True)
class Recommendation:
    selected: MatchCandidate
    pool: Tuple[MatchCandidate, ...]
    seed: int
    k: int = Config.DEFAULT_K

    def __post_init__(self):
        if self.selected not in self.pool[:self.k]:
            raise ValueError("selected candidate must be among the first k pool elements")


def photo_vectors(ds: DetectionSet, table: EmbeddingTable) -> Dict[str, SemanticVector]:
    """
    Compute one confidence-weighted vector per classifier group

    Args:
        ds (DetectionSet): Grouped detections of a photo
        table (EmbeddingTable): Word vectors

    Returns:
        dict: classifier tag -> photo vector, degenerate groups dropped

    Raises:
        UnmatchablePhotoError: every group is out of vocabulary
    """
    vectors = {}
    for classifier, detections in ds.groups.items():
        vector = weighted_vector([(d.tokens, d.confidence) for d in detections], table)
        if vector.is_degenerate:
            labels = ", ".join(d.label for d in detections)
            logging.warning(f"Photo {ds.photo_id}: dropping {classifier} group, no in-vocabulary labels ({labels})")
            continue
        vectors[classifier] = vector

    if not vectors:
        raise UnmatchablePhotoError(f"photo {ds.photo_id!r} has no in-vocabulary detection labels")
    return vectors


def cosine_distances(index: IdeophoneIndex, v: SemanticVector) -> np.ndarray:
    """Cosine distance from v to every indexed vector, in index order."""
    if v.dimension != index.dimension:
        raise ValueError(f"dimension mismatch: query has {v.dimension}, index has {index.dimension}")
    if v.is_degenerate:
        raise DegenerateVectorError("cannot match a zero vector")
    matrix = index.matrix
    similarities = (matrix @ v.components) / (np.linalg.norm(matrix, axis=1) * v.norm)
    return np.clip(1.0 - similarities, 0.0, 2.0)


def top_k(index: IdeophoneIndex, v: SemanticVector, k: int, classifier: str = "query") -> List[MatchCandidate]:
    """
    Exhaustive nearest-neighbor search over the index

    Args:
        index (IdeophoneIndex): Definition vectors
        v (SemanticVector): Non-degenerate query vector
        k (int): Number of candidates wanted
        classifier (str): Tag recorded on the candidates

    Returns:
        list: min(k, len(index)) candidates by ascending distance, ties by entry id
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    distances = cosine_distances(index, v)
    order = sorted(range(len(index)), key=lambda i: (distances[i], index.ids[i]))
    return [
        MatchCandidate(entry_id=index.ids[i], distance=float(distances[i]), classifier=classifier)
        for i in order[:k]
    ]


def pool_candidates(per_classifier: Dict[str, List[MatchCandidate]]) -> List[MatchCandidate]:
    """Merge per-classifier lists, keeping the best distance per entry."""
    best: Dict[str, MatchCandidate] = {}
    for candidates in per_classifier.values():
        for candidate in candidates:
            current = best.get(candidate.entry_id)
            if current is None or candidate.sort_key < current.sort_key:
                best[candidate.entry_id] = candidate
    return sorted(best.values(), key=lambda c: c.sort_key)


def select_with_jitter(pool: List[MatchCandidate], k: int, seed: int) -> MatchCandidate:
    """Uniform pick among the first k pool elements; seed 0 disables jitter."""
    if not pool:
        raise UnmatchablePhotoError("no candidates to choose from")
    if seed == Config.NO_JITTER_SEED:
        return pool[0]
    rng = np.random.default_rng(seed)
    return pool[int(rng.integers(min(k, len(pool))))]


def recommend(index: IdeophoneIndex, ds: DetectionSet, table: EmbeddingTable,
              k: int = Config.DEFAULT_K, seed: int = Config.NO_JITTER_SEED) -> Recommendation:
    """
    Recommend an ideophone for a photo

    Every classifier group retrieves its own top k, the lists are pooled and
    re-ranked, and the final term is drawn uniformly from the pooled top k.

    Args:
        index (IdeophoneIndex): Definition vectors
        ds (DetectionSet): Grouped detections
        table (EmbeddingTable): Word vectors the index was built from
        k (int): Candidates per classifier and jitter window
        seed (int): Unsigned seed; 0 always picks the closest candidate

    Returns:
        Recommendation: selected candidate, full pool and seed
    """
    if seed < 0:
        raise ValueError("seed must be unsigned")
    if len(index) == 0:
        raise UnmatchablePhotoError("the ideophone index is empty")

    per_classifier = {
        classifier: top_k(index, vector, k, classifier=classifier)
        for classifier, vector in photo_vectors(ds, table).items()
    }
    pool = pool_candidates(per_classifier)
    selected = select_with_jitter(pool, k, seed)
    logging.info(
        f"Photo {ds.photo_id}: selected {selected.entry_id} ({selected.classifier}, "
        f"distance {selected.distance:.4f}) from a pool of {len(pool)}"
    )
    return Recommendation(selected=selected, pool=tuple(pool), seed=seed, k=k)

