"""Machine-readable result document printed on standard output."""

import json
from typing import Optional

from src.layout.placement import PlacementBox
from src.lexicon.ideophone_index import IdeophoneIndex
from src.matcher.ideophone_matcher import MatchCandidate, Recommendation


def _candidate(candidate: MatchCandidate) -> dict:
    return {
        "id": candidate.entry_id,
        "distance": candidate.distance,
        "classifier": candidate.classifier,
    }


def placement_document(box: PlacementBox) -> dict:
    return {
        "quadrant": box.quadrant.value,
        "anchor": list(box.anchor),
        "angle_deg": box.angle,
        "glyph_height": box.glyph_height,
    }


def build_result_document(photo_id: str, recommendation: Recommendation, index: IdeophoneIndex,
                          placement: Optional[PlacementBox] = None,
                          annotation: Optional[dict] = None) -> dict:
    entry = index.by_id[recommendation.selected.entry_id]
    document = {
        "photo_id": photo_id,
        "selected": {
            "id": entry.id,
            "forms": list(entry.forms),
            "romaji": entry.romaji,
            "english": list(entry.english_equivalents),
            "distance": recommendation.selected.distance,
            "classifier": recommendation.selected.classifier,
        },
        "pool": [_candidate(candidate) for candidate in recommendation.pool],
        "placement": placement_document(placement) if placement is not None else None,
        "seed": recommendation.seed,
        "k": recommendation.k,
    }
    if annotation is not None:
        document["annotation"] = annotation
    return document


def recommendation_from_document(document: dict) -> Recommendation:
    """Rebuild the Recommendation a result document was written from."""
    pool = tuple(
        MatchCandidate(entry_id=item["id"], distance=float(item["distance"]), classifier=item["classifier"])
        for item in document["pool"]
    )
    selected = document["selected"]
    return Recommendation(
        selected=MatchCandidate(
            entry_id=selected["id"], distance=float(selected["distance"]), classifier=selected["classifier"]
        ),
        pool=pool,
        seed=int(document["seed"]),
        k=int(document["k"]),
    )


def dumps(document: dict) -> str:
    return json.dumps(document, ensure_ascii=False)
