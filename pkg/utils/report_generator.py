"""
报告生成器
每个 CLI 阶段的机器可读运行报告；同一输入与种子重复运行得到逐字节相同的报告
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd
from loguru import logger
from pydantic import BaseModel, Field

from config import settings
from .data_handler import DataHandler, PathLike, data_handler, sha256_text


class RunReport(BaseModel):
    """运行报告(不含时间戳与耗时)"""

    stage: str = Field(..., description="阶段名称，如 reduce.pipeline")
    parameters: Dict[str, Any] = Field(default_factory=dict, description="运行参数")
    seed: Optional[int] = Field(default=None, description="随机种子")
    verdicts: Dict[str, Any] = Field(default_factory=dict, description="判定结果")
    statistics: Dict[str, Any] = Field(default_factory=dict, description="计数、比例、p 值等")
    provenance: Dict[str, Dict[str, str]] = Field(default_factory=dict, description="输入/输出文件的 sha256")
    caps: Dict[str, Any] = Field(default_factory=settings.get_caps, description="生效的穷举上限")

    def add_input(self, path: PathLike, digest: str) -> None:
        self.provenance.setdefault("inputs", {})[str(path)] = digest

    def add_output(self, path: PathLike, digest: str) -> None:
        self.provenance.setdefault("outputs", {})[str(path)] = digest

    def to_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), ensure_ascii=False, indent=2, sort_keys=True) + "\n"

    def digest(self) -> str:
        return sha256_text(self.to_json())


class ReportGenerator:
    """报告生成器"""

    def __init__(self, handler: Optional[DataHandler] = None):
        """初始化报告生成器

        Args:
            handler: 文件读写器
        """
        self.handler = handler or data_handler
        self.reports: List[RunReport] = []

    def add_report(self, report: RunReport) -> None:
        self.reports.append(report)
        logger.debug(f"添加报告: {report.stage}")

    def write_report(self, report: RunReport, path: PathLike) -> str:
        """写出 JSON 报告

        Returns:
            报告文件路径
        """
        self.handler.write_text(path, report.to_json())
        logger.info(f"JSON报告已生成: {path}")
        return str(path)

    def load_report(self, path: PathLike) -> RunReport:
        return RunReport(**self.handler.load_json(path))

    def export_trials_csv(self, rows: List[Dict[str, Any]], path: PathLike) -> str:
        """逐次试验记录导出为 CSV"""
        if self.handler.save_csv(rows, path):
            return str(path)
        return ""

    def summary_frame(self) -> pd.DataFrame:
        """已收集报告的判定汇总表"""
        records = [
            {"stage": r.stage, "seed": r.seed, **{f"verdict.{k}": v for k, v in r.verdicts.items()}}
            for r in self.reports
        ]
        return pd.DataFrame(records)

    def check_provenance(self, report: RunReport) -> List[str]:
        """重新计算报告中所列文件的摘要

        Returns:
            摘要不一致或缺失的文件列表
        """
        mismatched = []
        for group in report.provenance.values():
            for path, expected in sorted(group.items()):
                try:
                    actual = self.handler.digest(path)
                except OSError:
                    mismatched.append(path)
                    continue
                if actual != expected:
                    mismatched.append(path)
        return mismatched


# 全局报告生成器实例
report_generator = ReportGenerator()
