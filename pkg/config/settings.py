"""
全局设置管理
上限、日志与报告目录的统一配置，从 settings.yaml 加载
"""

from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, ValidationError

CONFIG_DIR = Path(__file__).resolve().parent


class Settings(BaseModel):
    """全局设置类"""

    # Pydantic配置
    model_config = ConfigDict(arbitrary_types_allowed=True, validate_assignment=True)

    # 目录配置
    logs_dir: Path = Field(default_factory=lambda: Path.cwd() / "logs", description="日志目录")
    reports_dir: Path = Field(default_factory=lambda: Path.cwd() / "reports", description="报告目录")

    # 穷举上限
    brute_force_cap: int = Field(default=24, ge=1, le=30, description="暴力求 VAL 时变量数上限")
    exhaustive_check_cap: int = Field(default=16, ge=1, le=24, description="穷举验证(自动机/DNF)变量数上限")
    predicate_verify_cap: int = Field(default=20, ge=1, le=24, description="谓词 DNF 构造时穷举校验的元数上限")
    enumeration_chunk: int = Field(default=65536, ge=1, description="赋值枚举的分块大小")

    # 采样配置
    rejection_cap: int = Field(default=1_000_000, ge=1, description="种植公式每个约束的拒绝采样次数上限")
    scatter_chunk: int = Field(default=100_000, ge=1, description="分散性检验每批试验数")

    # 参考学习器上限
    bf_assignment_max_vars: int = Field(default=16, ge=1, le=24, description="暴力赋值学习器的 n 上限")
    bf_dnf_max_vars: int = Field(default=6, ge=1, le=10, description="暴力 DNF 学习器的维度上限")
    bf_dnf_max_candidates: int = Field(default=2_000_000, ge=1, description="暴力 DNF 学习器候选组合数上限")

    # 日志配置
    log_level: str = Field(default="INFO", description="日志级别")
    log_format: str = Field(
        default="{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | {name}:{function}:{line} | {message}",
        description="日志格式"
    )
    log_to_file: bool = Field(default=False, description="是否写入日志文件")

    def ensure_directories(self) -> None:
        """确保必要的目录存在"""
        for directory in (self.logs_dir, self.reports_dir):
            directory.mkdir(parents=True, exist_ok=True)

    @classmethod
    def from_yaml(cls, config_path: Optional[Path] = None) -> "Settings":
        """从YAML文件加载配置"""
        if config_path is None:
            config_path = CONFIG_DIR / "settings.yaml"

        if not config_path.exists():
            logger.warning(f"配置文件不存在: {config_path}, 使用默认配置")
            return cls()

        try:
            with open(config_path, "r", encoding="utf-8") as f:
                config_data = yaml.safe_load(f) or {}

            logger.debug(f"从配置文件加载设置: {config_path}")
            return cls(**config_data)

        except (OSError, yaml.YAMLError, ValidationError) as e:
            logger.error(f"加载配置文件失败: {e}, 使用默认配置")
            return cls()

    def save_to_yaml(self, config_path: Optional[Path] = None) -> None:
        """保存配置到YAML文件"""
        if config_path is None:
            config_path = CONFIG_DIR / "settings.yaml"

        config_path.parent.mkdir(parents=True, exist_ok=True)

        # Path 转字符串以便序列化
        config_dict = self.model_dump()
        for key, value in config_dict.items():
            if isinstance(value, Path):
                config_dict[key] = str(value)

        try:
            with open(config_path, "w", encoding="utf-8") as f:
                yaml.safe_dump(config_dict, f, default_flow_style=False, allow_unicode=True, sort_keys=False)

            logger.info(f"配置已保存到: {config_path}")

        except OSError as e:
            logger.error(f"保存配置文件失败: {e}")

    def get_caps(self) -> Dict[str, Any]:
        """获取所有上限配置(写入报告用)"""
        return {
            "brute_force_cap": self.brute_force_cap,
            "exhaustive_check_cap": self.exhaustive_check_cap,
            "predicate_verify_cap": self.predicate_verify_cap,
            "rejection_cap": self.rejection_cap,
            "bf_assignment_max_vars": self.bf_assignment_max_vars,
            "bf_dnf_max_vars": self.bf_dnf_max_vars,
        }


# 全局设置实例
settings = Settings.from_yaml()
