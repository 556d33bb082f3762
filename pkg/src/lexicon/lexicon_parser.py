import json
import logging
from pathlib import Path
from typing import List, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from src.utils.errors import InputError, LexiconError


class IdeophoneEntry(BaseModel):
    """One dictionary record: surface forms, romaji, English glosses and explanation."""
    model_config = ConfigDict(frozen=True, populate_by_name=True, extra="ignore")

    id: str = Field(min_length=1)
    forms: Tuple[str, ...]
    romaji: str = ""
    english_equivalents: Tuple[str, ...] = Field(default=(), alias="english")
    explanation: str

    @field_validator("forms")
    @classmethod
    def check_forms(cls, forms):
        forms = tuple(form for form in forms if form)
        if not forms:
            raise ValueError("at least one surface form is required")
        return forms

    @field_validator("explanation")
    @classmethod
    def check_explanation(cls, explanation):
        if not explanation.strip():
            raise ValueError("explanation must not be empty")
        return explanation

    def to_record(self) -> dict:
        """Serialize back to the ingest layout."""
        return {
            "id": self.id,
            "forms": list(self.forms),
            "romaji": self.romaji,
            "english": list(self.english_equivalents),
            "explanation": self.explanation,
        }


def parse_lexicon(path: Union[str, Path]) -> List[IdeophoneEntry]:
    """
    Read the ideophone dictionary from a JSON Lines file

    Args:
        path (str | Path): UTF-8 file with one entry object per line

    Returns:
        list: IdeophoneEntry objects in file order

    Raises:
        InputError: the file does not exist
        LexiconError: malformed record (with its 1-based record index) or duplicate id
    """
    path = Path(path)
    if not path.is_file():
        raise InputError(f"lexicon file not found: {path}")

    entries = []
    seen_ids = {}
    record = 0
    with open(path, "rb") as handle:
        for raw in handle:
            if not raw.strip():
                continue
            record += 1

            try:
                line = raw.decode("utf-8")
            except UnicodeDecodeError:
                raise LexiconError("record is not valid UTF-8", record=record)
            try:
                payload = json.loads(line)
            except json.JSONDecodeError as e:
                raise LexiconError(f"invalid JSON: {e.msg}", record=record)
            if not isinstance(payload, dict):
                raise LexiconError("record must be a JSON object", record=record)

            try:
                entry = IdeophoneEntry.model_validate(payload)
            except ValidationError as e:
                problems = "; ".join(
                    f"{'.'.join(str(part) for part in error['loc'])}: {error['msg']}" for error in e.errors()
                )
                raise LexiconError(problems, record=record)

            if entry.id in seen_ids:
                raise LexiconError(
                    f"duplicate id {entry.id!r} (first seen in record {seen_ids[entry.id]})", record=record
                )
            seen_ids[entry.id] = record
            entries.append(entry)

    logging.info(f"Parsed {len(entries)} ideophone entries from {path}")
    return entries
