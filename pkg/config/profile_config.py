"""
运行档案配置
从 config/profiles/*.yaml 加载命名的流水线参数组合
"""

from pathlib import Path
from typing import Dict, List, Optional

import yaml
from loguru import logger
from pydantic import BaseModel, Field, ValidationError

from .reduction_config import ReductionParams

PROFILES_DIR = Path(__file__).resolve().parent / "profiles"


class ReductionProfile(BaseModel):
    """流水线运行档案"""

    name: str = Field(..., description="档案名称")
    description: str = Field(default="", description="档案描述")
    params: ReductionParams = Field(..., description="归约参数")
    n: int = Field(..., ge=1, description="变量数")
    m: int = Field(..., ge=0, description="SAT_K 约束数")
    planted: bool = Field(default=False, description="是否生成种植可满足实例")
    trials: int = Field(default=1, ge=1, description="默认试验次数")


class ProfileManager:
    """档案管理器"""

    def __init__(self, profiles_dir: Optional[Path] = None):
        self.profiles_dir = profiles_dir or PROFILES_DIR
        self._profiles: Dict[str, ReductionProfile] = {}
        self._load_profiles()

    def _load_profiles(self) -> None:
        """加载所有档案"""
        if not self.profiles_dir.exists():
            logger.warning(f"档案目录不存在: {self.profiles_dir}")
            return

        for profile_file in sorted(self.profiles_dir.glob("*.yaml")):
            try:
                with open(profile_file, "r", encoding="utf-8") as f:
                    data = yaml.safe_load(f) or {}
                data.setdefault("name", profile_file.stem)
                self._profiles[profile_file.stem] = ReductionProfile(**data)
                logger.debug(f"加载档案: {profile_file.stem}")

            except (OSError, yaml.YAMLError, ValidationError) as e:
                logger.error(f"加载档案失败 {profile_file}: {e}")

    def list_profiles(self) -> List[str]:
        """列出所有档案"""
        return list(self._profiles.keys())

    def get_profile(self, name: str) -> ReductionProfile:
        """获取档案

        Raises:
            KeyError: 档案不存在
        """
        if name not in self._profiles:
            raise KeyError(f"档案不存在: {name}, 可用: {', '.join(self.list_profiles())}")
        return self._profiles[name]

    def add_profile(self, profile: ReductionProfile) -> None:
        """添加档案(仅内存)"""
        self._profiles[profile.name] = profile
        logger.info(f"添加档案: {profile.name}")

    def save_profile(self, profile: ReductionProfile) -> Path:
        """保存档案到YAML文件"""
        self.profiles_dir.mkdir(parents=True, exist_ok=True)
        profile_file = self.profiles_dir / f"{profile.name}.yaml"
        with open(profile_file, "w", encoding="utf-8") as f:
            yaml.safe_dump(profile.model_dump(), f, default_flow_style=False, allow_unicode=True, sort_keys=False)
        logger.info(f"档案已保存: {profile_file}")
        return profile_file


# 全局档案管理器实例
profile_manager = ProfileManager()
