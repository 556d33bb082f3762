import json
import logging
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Dict, List, Mapping, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from src.embedding.semantic_vectors import tokenize
from src.utils.errors import DetectionError, InputError, NothingDetectedError, ScoreRangeError

OBJECT = "object"
FOOD = "food"
EXPRESSION = "expression"
KNOWN_CLASSIFIERS = (OBJECT, FOOD, EXPRESSION)


class Detection(BaseModel):
    """One labeled visual observation from a classifier."""
    model_config = ConfigDict(frozen=True)

    label: str = Field(min_length=1)
    confidence: float = Field(ge=0.0, le=1.0)
    classifier: str = Field(min_length=1)

    @property
    def tokens(self) -> List[str]:
        return tokenize(self.label)


class DetectionRecord(BaseModel):
    """Wire form of a detection; `smile_raw` replaces label/confidence for expressions."""
    model_config = ConfigDict(extra="forbid")

    classifier: str = Field(min_length=1)
    label: Optional[str] = None
    confidence: Optional[float] = None
    smile_raw: Optional[float] = None

    @model_validator(mode="after")
    def check_shape(self):
        if self.smile_raw is not None:
            if self.classifier != EXPRESSION:
                raise ValueError("smile_raw is only valid for the expression classifier")
            if self.label is not None or self.confidence is not None:
                raise ValueError("smile_raw is exclusive with label/confidence")
        elif self.label is None or self.confidence is None:
            raise ValueError("label and confidence are required unless smile_raw is given")
        return self


@dataclass(frozen=True)
class DetectionSet:
    """Detections of one photo grouped by source classifier, in first-seen order."""
    photo_id: str
    groups: Mapping[str, Tuple[Detection, ...]]

    def __post_init__(self):
        groups = {tag: tuple(items) for tag, items in self.groups.items()}
        if not groups:
            raise NothingDetectedError(f"nothing detected in photo {self.photo_id!r}")
        for tag, items in groups.items():
            if not items:
                raise DetectionError(f"classifier group {tag!r} is empty")
        object.__setattr__(self, "groups", MappingProxyType(groups))

    def __eq__(self, other) -> bool:
        if not isinstance(other, DetectionSet):
            return NotImplemented
        return self.photo_id == other.photo_id and dict(self.groups) == dict(other.groups)

    __hash__ = None

    @property
    def detections(self) -> List[Detection]:
        return [detection for items in self.groups.values() for detection in items]

    def to_document(self) -> dict:
        """Serialize to the detection schema (expressions as normalized label/confidence)."""
        return {
            "photo_id": self.photo_id,
            "detections": [
                {"classifier": d.classifier, "label": d.label, "confidence": d.confidence}
                for d in self.detections
            ],
        }


def normalize_expression(s: float) -> Detection:
    """
    Turn a raw smile score into a smile or frown detection

    Scores >= 0.5 are a smile with confidence s; lower scores are a frown with
    confidence 1 - s, so 0.1 becomes a frown at 0.9.

    Raises:
        ScoreRangeError: s outside [0, 1]
    """
    if not 0.0 <= s <= 1.0:
        raise ScoreRangeError(f"smile score {s} is outside [0, 1]")
    if s >= 0.5:
        return Detection(label="smile", confidence=s, classifier=EXPRESSION)
    return Detection(label="frown", confidence=1.0 - s, classifier=EXPRESSION)


def parse_detections(payload: Union[str, bytes, dict], default_photo_id: str = "photo") -> DetectionSet:
    """
    Validate a detection document and group it by classifier

    Args:
        payload (str | bytes | dict): JSON text or already-decoded document
        default_photo_id (str): Used when the document carries no photo_id

    Returns:
        DetectionSet: validated, grouped detections

    Raises:
        DetectionError: malformed document or record (with its index)
        NothingDetectedError: the detection list is empty
    """
    if isinstance(payload, bytes):
        try:
            payload = payload.decode("utf-8")
        except UnicodeDecodeError:
            raise DetectionError("detection document is not valid UTF-8")
    if isinstance(payload, str):
        try:
            payload = json.loads(payload)
        except json.JSONDecodeError as e:
            raise DetectionError(f"invalid detection JSON: {e.msg}")
    if not isinstance(payload, dict):
        raise DetectionError("detection document must be a JSON object")

    photo_id = payload.get("photo_id", default_photo_id)
    if not isinstance(photo_id, str) or not photo_id:
        raise DetectionError("photo_id must be a non-empty string")
    records = payload.get("detections")
    if not isinstance(records, list):
        raise DetectionError("detections must be an array")
    if not records:
        raise NothingDetectedError(f"nothing detected in photo {photo_id!r}")

    groups: Dict[str, List[Detection]] = {}
    for position, raw in enumerate(records):
        try:
            record = DetectionRecord.model_validate(raw)
            if record.smile_raw is not None:
                detection = normalize_expression(record.smile_raw)
            else:
                detection = Detection(label=record.label, confidence=record.confidence, classifier=record.classifier)
        except ValidationError as e:
            problems = "; ".join(
                f"{'.'.join(str(part) for part in error['loc']) or 'record'}: {error['msg']}" for error in e.errors()
            )
            raise DetectionError(problems, record=position)
        except ScoreRangeError as e:
            raise DetectionError(str(e), record=position)

        if not detection.tokens:
            raise DetectionError(f"label {detection.label!r} has no usable tokens", record=position)
        if detection.classifier not in KNOWN_CLASSIFIERS:
            logging.info(f"Photo {photo_id}: extension classifier tag {detection.classifier!r}")
        groups.setdefault(detection.classifier, []).append(detection)

    return DetectionSet(photo_id=photo_id, groups=groups)


def load_detections(path: Union[str, Path]) -> DetectionSet:
    """
    Load a detection file written in the detection schema

    Args:
        path (str | Path): UTF-8 JSON detection document

    Returns:
        DetectionSet: grouped detections; photo_id defaults to the file stem
    """
    path = Path(path)
    if not path.is_file():
        raise InputError(f"detection file not found: {path}")
    detection_set = parse_detections(path.read_bytes(), default_photo_id=path.stem)
    logging.info(
        f"Loaded {len(detection_set.detections)} detections in {len(detection_set.groups)} groups from {path}"
    )
    return detection_set
