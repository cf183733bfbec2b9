"""Tests for channel sources and the source factory."""

from pathlib import Path
from typing import Any
from unittest.mock import patch

import pytest

from mimo_antsel.channel import gen_iid_rayleigh
from mimo_antsel.config import ScenarioConfig
from mimo_antsel.ctf import save_channel
from mimo_antsel.exceptions import ChannelFormatError, ConfigError
from mimo_antsel.sources import (
    ChannelSourceFactory,
    FileSource,
    IidRayleighSource,
    SyntheticSource,
)


def scenario(base: dict[str, Any], source: dict[str, Any]) -> ScenarioConfig:
    return ScenarioConfig.model_validate({**base, "channel_source": source})


class TestChannelSourceFactory:
    def test_dispatch(self, scenario_dict: dict[str, Any]) -> None:
        sources = {
            "iid_rayleigh": ({"kind": "iid_rayleigh"}, IidRayleighSource),
            "synthetic": ({"kind": "synthetic"}, SyntheticSource),
            "file": ({"kind": "file", "path": "h.ctf1"}, FileSource),
        }
        for name, (block, cls) in sources.items():
            config = scenario(scenario_dict, block)
            source = ChannelSourceFactory.get_source(config.channel_source)
            assert isinstance(source, cls)
            assert source.name == name

    def test_unknown(self) -> None:
        with pytest.raises(ValueError):
            ChannelSourceFactory.get_source("nope")  # type: ignore[arg-type]


class TestIidRayleighSource:
    def test_shape_and_seed(self, scenario_dict: dict[str, Any]) -> None:
        config = scenario(scenario_dict, {"kind": "iid_rayleigh"})
        tensor = IidRayleighSource().load(config)
        assert tensor.entries.shape == (3, 2, 6)
        assert tensor.equals(gen_iid_rayleigh(2, 6, 3, seed=11))


class TestSyntheticSource:
    def test_scenario_overrides_scene(self, scenario_dict: dict[str, Any]) -> None:
        config = scenario(scenario_dict, {"kind": "synthetic", "scene": {"seed": 99}})
        source = ChannelSourceFactory.get_source(config.channel_source)
        assert isinstance(source, SyntheticSource)
        scene = source.scene_for(config)
        assert scene.seed == 11
        assert scene.bandwidth_subcarriers == 3

        tensor = source.load(config)
        assert tensor.entries.shape == (3, 2, 6)
        assert tensor.equals(source.load(config))


class TestFileSource:
    """Tests for loading CTF1 files, with retries on transient errors."""

    def test_loads(self, scenario_dict: dict[str, Any], tmp_path: Path) -> None:
        path = tmp_path / "h.ctf1"
        save_channel(gen_iid_rayleigh(2, 6, 3, seed=1), path)
        config = scenario(scenario_dict, {"kind": "file", "path": str(path)})
        assert FileSource(path).load(config).equals(gen_iid_rayleigh(2, 6, 3, seed=1))

    @pytest.mark.parametrize(("dims", "field"), [((3, 6, 3), "K"), ((2, 6, 4), "L")])
    def test_dimension_mismatch(
        self,
        scenario_dict: dict[str, Any],
        tmp_path: Path,
        dims: tuple[int, int, int],
        field: str,
    ) -> None:
        path = tmp_path / "h.ctf1"
        save_channel(gen_iid_rayleigh(*dims, seed=1), path)
        config = scenario(scenario_dict, {"kind": "file", "path": str(path)})
        with pytest.raises(ConfigError) as exc_info:
            FileSource(path).load(config)
        assert exc_info.value.field == field

    def test_transient_error_retried(self, scenario_dict: dict[str, Any], tmp_path: Path) -> None:
        path = tmp_path / "h.ctf1"
        save_channel(gen_iid_rayleigh(2, 6, 3, seed=1), path)
        config = scenario(scenario_dict, {"kind": "file", "path": str(path)})
        real_read = Path.read_bytes
        calls = []

        def flaky_read(self: Path) -> bytes:
            calls.append(self)
            if len(calls) == 1:
                raise OSError("resource temporarily unavailable")
            return real_read(self)

        with patch.object(Path, "read_bytes", flaky_read), patch("time.sleep"):
            tensor = FileSource(path).load(config)
        assert len(calls) == 2
        assert tensor.K == 2

    def test_persistent_error_gives_up(
        self, scenario_dict: dict[str, Any], tmp_path: Path
    ) -> None:
        config = scenario(scenario_dict, {"kind": "file", "path": "h.ctf1"})
        with (
            patch.object(Path, "read_bytes", side_effect=OSError("disk error")) as read,
            patch("time.sleep"),
        ):
            with pytest.raises(OSError, match="disk error"):
                FileSource(tmp_path / "h.ctf1").load(config)
        assert read.call_count == 3

    def test_missing_file_not_retried(
        self, scenario_dict: dict[str, Any], tmp_path: Path
    ) -> None:
        config = scenario(scenario_dict, {"kind": "file", "path": "absent.ctf1"})
        with patch("time.sleep") as sleep:
            with pytest.raises(FileNotFoundError):
                FileSource(tmp_path / "absent.ctf1").load(config)
        sleep.assert_not_called()

    def test_format_error_not_retried(
        self, scenario_dict: dict[str, Any], tmp_path: Path
    ) -> None:
        path = tmp_path / "garbage.ctf1"
        path.write_bytes(b"garbage")
        config = scenario(scenario_dict, {"kind": "file", "path": str(path)})
        with patch("time.sleep") as sleep:
            with pytest.raises(ChannelFormatError):
                FileSource(path).load(config)
        sleep.assert_not_called()
