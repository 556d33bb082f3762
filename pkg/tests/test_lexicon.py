import json

import numpy as np
import pytest

from conftest import LEXICON, write_embedding, write_jsonl
from src.embedding.embedding_table import EmbeddingTable, load_table
from src.embedding.semantic_vectors import mean_vector, tokenize
from src.lexicon.ideophone_index import (
    NO_VOCABULARY,
    build_index,
    deserialize_index,
    load_index,
    save_index,
    serialize_index,
)
from src.lexicon.lexicon_parser import IdeophoneEntry, parse_lexicon
from src.utils.errors import (
    IndexCorruptionError,
    IndexFormatError,
    IndexVersionError,
    InputError,
    LexiconError,
)


class TestParseLexicon:
    def test_reads_all_records(self, lexicon_file):
        entries = parse_lexicon(lexicon_file)
        assert [entry.id for entry in entries] == [record["id"] for record in LEXICON]
        assert entries[1].forms == ("ジーッ", "じーっ")
        assert entries[1].english_equivalents == ("whine", "stare")

    def test_skips_blank_lines(self, tmp_path):
        path = tmp_path / "lex.jsonl"
        path.write_text("\n" + json.dumps(LEXICON[0]) + "\n\n", encoding="utf-8")
        assert len(parse_lexicon(path)) == 1

    def test_missing_forms_reports_record(self, tmp_path):
        bad = dict(LEXICON[2], forms=[])
        path = write_jsonl(tmp_path / "lex.jsonl", [LEXICON[0], bad])
        with pytest.raises(LexiconError) as excinfo:
            parse_lexicon(path)
        assert excinfo.value.record == 2

    def test_blank_explanation_rejected(self, tmp_path):
        path = write_jsonl(tmp_path / "lex.jsonl", [dict(LEXICON[0], explanation="   ")])
        with pytest.raises(LexiconError):
            parse_lexicon(path)

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "lex.jsonl"
        path.write_text('{"id": "x"\n', encoding="utf-8")
        with pytest.raises(LexiconError, match="record 1"):
            parse_lexicon(path)

    def test_invalid_utf8_record(self, tmp_path):
        path = tmp_path / "lex.jsonl"
        path.write_bytes(json.dumps(LEXICON[0]).encode("utf-8") + b'\n{"id": "\xff\xfe"}\n')
        with pytest.raises(LexiconError) as excinfo:
            parse_lexicon(path)
        assert excinfo.value.record == 2

    def test_duplicate_id(self, tmp_path):
        path = write_jsonl(tmp_path / "lex.jsonl", [LEXICON[0], LEXICON[0]])
        with pytest.raises(LexiconError, match="duplicate id"):
            parse_lexicon(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(InputError):
            parse_lexicon(tmp_path / "absent.jsonl")

    def test_record_round_trip(self):
        entry = IdeophoneEntry.model_validate(LEXICON[1])
        assert IdeophoneEntry.model_validate(entry.to_record()) == entry


class TestBuildIndex:
    def test_excludes_out_of_vocabulary_entries(self, lexicon_file, vocab_table):
        index = build_index(parse_lexicon(lexicon_file), vocab_table)
        assert index.ids == ("tokee", "jii", "niko", "zuruzuru")
        assert index.excluded == (("nunu", NO_VOCABULARY),)
        assert len(index) + len(index.excluded) == len(LEXICON)

    def test_vectors_come_from_explanation(self, lexicon_file, vocab_table):
        entries = parse_lexicon(lexicon_file)
        index = build_index(entries, vocab_table)
        for entry, vector in index.entries:
            expected = mean_vector(tokenize(entry.explanation), vocab_table)
            np.testing.assert_allclose(vector.components, expected.components, atol=1e-12)
            assert not vector.is_degenerate
            assert vector.dimension == index.dimension == 4

    def test_gloss_mix_changes_vectors(self, lexicon_file, vocab_table):
        entries = parse_lexicon(lexicon_file)
        plain = build_index(entries, vocab_table)
        mixed = build_index(entries, vocab_table, gloss_mix=True)
        assert mixed.gloss_mix
        jii = plain.ids.index("jii")
        assert not np.allclose(plain.matrix[jii], mixed.matrix[jii])

    def test_single_token_vocabulary(self):
        table = EmbeddingTable.from_vectors({"sound": [1.0, 0.0]})
        entry = IdeophoneEntry.model_validate(LEXICON[0])
        index = build_index([entry], table)
        np.testing.assert_array_equal(index.matrix[0], [1.0, 0.0])

    def test_check_embedding_rejects_other_table(self, lexicon_file, vocab_table, tiny_table):
        index = build_index(parse_lexicon(lexicon_file), vocab_table)
        index.check_embedding(vocab_table)
        with pytest.raises(IndexFormatError, match="rebuild index"):
            index.check_embedding(tiny_table)


class TestIndexPersistence:
    @pytest.fixture
    def index(self, lexicon_file, embedding_file):
        return build_index(parse_lexicon(lexicon_file), load_table(embedding_file))

    def test_round_trip(self, index, tmp_path):
        path = save_index(index, tmp_path / "lexicon.idx")
        loaded = load_index(path)
        assert loaded.ids == index.ids
        assert loaded.excluded == index.excluded
        assert loaded.embedding_source_id == index.embedding_source_id
        assert loaded.dimension == index.dimension
        np.testing.assert_array_equal(loaded.matrix, index.matrix)
        assert [entry for entry, _ in loaded.entries] == [entry for entry, _ in index.entries]

    def test_reserialization_is_byte_identical(self, index):
        data = serialize_index(index)
        assert serialize_index(deserialize_index(data)) == data

    def test_version_mismatch(self, index):
        data = bytearray(serialize_index(index))
        data[7] += 1
        with pytest.raises(IndexVersionError, match="rebuild index"):
            deserialize_index(bytes(data))

    def test_corruption_detected(self, index):
        data = bytearray(serialize_index(index))
        data[len(data) // 2] ^= 0xFF
        with pytest.raises(IndexCorruptionError):
            deserialize_index(bytes(data))

    def test_bad_magic(self):
        with pytest.raises(IndexFormatError):
            deserialize_index(b"not an index at all")

    def test_loaded_index_tied_to_embedding(self, index, tmp_path):
        path = save_index(index, tmp_path / "lexicon.idx")
        other = load_table(write_embedding(tmp_path / "other.txt", {"sound": [1, 0, 0, 0]}))
        with pytest.raises(IndexFormatError):
            load_index(path).check_embedding(other)

    def test_missing_file(self, tmp_path):
        with pytest.raises(InputError):
            load_index(tmp_path / "absent.idx")


def test_empty_lexicon_file(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("", encoding="utf-8")
    assert parse_lexicon(path) == []


def test_all_oov_explanation_excluded(tiny_table):
    entry = IdeophoneEntry(id="q", forms=("ク",), explanation="zzzq")
    index = build_index([entry], tiny_table)
    assert len(index) == 0
    assert index.excluded == (("q", NO_VOCABULARY),)


def test_build_is_deterministic(lexicon_file, vocab_table):
    entries = parse_lexicon(lexicon_file)
    assert serialize_index(build_index(entries, vocab_table)) == serialize_index(build_index(entries, vocab_table))
