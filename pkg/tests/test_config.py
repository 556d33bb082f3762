from argparse import Namespace
from pathlib import Path

import pytest
from pydantic import ValidationError

from config.run_config import RunConfig


@pytest.fixture
def env_paths(monkeypatch, tmp_path):
    lexicon, index = tmp_path / "env.jsonl", tmp_path / "env.idx"
    monkeypatch.setattr("config.config.Config.LEXICON_PATH", lexicon)
    monkeypatch.setattr("config.config.Config.INDEX_PATH", index)
    return lexicon, index


class TestSourcePaths:
    def test_build_index_keeps_env_lexicon(self, env_paths):
        lexicon, _ = env_paths
        config = RunConfig.from_args(Namespace(command="build-index", seed=0))
        assert config.lexicon_path == lexicon
        assert config.index_path is None

    def test_match_prefers_env_index(self, env_paths):
        _, index = env_paths
        config = RunConfig.from_args(Namespace(command="match", seed=0))
        assert config.index_path == index
        assert config.lexicon_path is None

    def test_flag_overrides_env(self, env_paths, tmp_path):
        flag = tmp_path / "flag.jsonl"
        config = RunConfig.from_args(Namespace(command="build-index", lexicon=flag, seed=0))
        assert config.lexicon_path == Path(flag)


class TestJpegQuality:
    @pytest.mark.parametrize("quality", [1, 95, 100])
    def test_accepts_pillow_range(self, quality):
        assert RunConfig(seed=0, jpeg_quality=quality).jpeg_quality == quality

    @pytest.mark.parametrize("quality", [0, 101])
    def test_rejects_out_of_range(self, quality):
        with pytest.raises(ValidationError):
            RunConfig(seed=0, jpeg_quality=quality)
