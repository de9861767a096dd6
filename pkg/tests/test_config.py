"""
配置测试
全局设置、归约参数、预设与运行档案
"""

import pytest
import yaml
from loguru import logger
from pydantic import ValidationError

from config import ParamPresets, ProfileManager, ReductionParams, ReductionProfile, Settings, profile_manager


@pytest.fixture
def warnings():
    """收集 WARNING 及以上日志"""
    messages = []
    handler_id = logger.add(lambda message: messages.append(message.record["message"]), level="WARNING")
    yield messages
    logger.remove(handler_id)


class TestSettings:
    """全局设置测试"""

    @pytest.mark.smoke
    def test_defaults(self):
        settings = Settings()
        assert settings.exhaustive_check_cap == 16
        assert settings.bf_dnf_max_vars == 6
        assert set(settings.get_caps()) >= {"brute_force_cap", "exhaustive_check_cap", "rejection_cap"}

    def test_save_and_load(self, tmp_path):
        path = tmp_path / "settings.yaml"
        Settings(brute_force_cap=12, scatter_chunk=500).save_to_yaml(path)
        loaded = Settings.from_yaml(path)
        assert loaded.brute_force_cap == 12
        assert loaded.scatter_chunk == 500

    def test_missing_file_uses_defaults(self, tmp_path):
        assert Settings.from_yaml(tmp_path / "none.yaml").brute_force_cap == 24

    def test_invalid_file_uses_defaults(self, tmp_path):
        path = tmp_path / "settings.yaml"
        path.write_text("brute_force_cap: 99\n", encoding="utf-8")
        assert Settings.from_yaml(path).brute_force_cap == 24

    def test_assignment_is_validated(self):
        settings = Settings()
        with pytest.raises(ValidationError):
            settings.exhaustive_check_cap = 0

    def test_ensure_directories(self, tmp_path):
        settings = Settings(logs_dir=tmp_path / "logs", reports_dir=tmp_path / "reports")
        settings.ensure_directories()
        assert (tmp_path / "logs").is_dir()
        assert (tmp_path / "reports").is_dir()


class TestReductionParams:
    """归约参数测试"""

    @pytest.mark.smoke
    def test_parse(self):
        params = ReductionParams.parse("2, 3, 16")
        assert (params.k, params.m_blocks, params.block_size) == (2, 3, 16)
        assert params.arity == 6
        assert params.to_flag() == "2,3,16"

    @pytest.mark.parametrize("text", ["2,2", "2,2,x", "0,2,8", "2,4,2"])
    def test_parse_errors(self, text):
        with pytest.raises(ValueError):
            ReductionParams.parse(text)

    def test_feasibility(self, warnings):
        assert ParamPresets.desk().is_feasible()
        assert ParamPresets.desk().feasibility_bound() == 2
        assert not ParamPresets.distinguisher().check_feasibility()
        assert warnings

    def test_asymptotic(self, warnings):
        params = ParamPresets.asymptotic(16)
        assert params.m_blocks == 4
        assert params.block_size == 16
        assert warnings
        with pytest.raises(ValueError):
            ParamPresets.asymptotic(1)

    def test_presets(self):
        assert ParamPresets.distinguisher() == ReductionParams(k=2, m_blocks=2, block_size=8)
        assert ParamPresets.survival().m_blocks == 64


class TestProfiles:
    """运行档案测试"""

    @pytest.mark.smoke
    def test_bundled_profiles(self):
        assert {"desk", "distinguisher", "survival"} <= set(profile_manager.list_profiles())
        desk = profile_manager.get_profile("desk")
        assert desk.params == ParamPresets.desk()
        assert desk.planted

    def test_unknown_profile(self):
        with pytest.raises(KeyError):
            profile_manager.get_profile("nope")

    def test_broken_profile_skipped(self, tmp_path):
        (tmp_path / "good.yaml").write_text(yaml.safe_dump({
            "params": {"k": 1, "m_blocks": 2, "block_size": 4}, "n": 6, "m": 12,
        }), encoding="utf-8")
        (tmp_path / "bad.yaml").write_text("params: {k: 0}\n", encoding="utf-8")
        manager = ProfileManager(tmp_path)
        assert manager.list_profiles() == ["good"]
        assert manager.get_profile("good").name == "good"

    def test_save_profile(self, tmp_path):
        manager = ProfileManager(tmp_path / "profiles")
        profile = ReductionProfile(name="tiny", params=ReductionParams(k=1, m_blocks=1, block_size=1), n=3, m=3)
        manager.save_profile(profile)
        assert ProfileManager(tmp_path / "profiles").get_profile("tiny") == profile

    def test_add_profile_in_memory(self, tmp_path):
        manager = ProfileManager(tmp_path)
        profile = ReductionProfile(name="mem", params=ParamPresets.distinguisher(), planted=True, n=8, m=2048)
        manager.add_profile(profile)
        assert manager.get_profile("mem") is profile
        assert not (tmp_path / "mem.yaml").exists()
