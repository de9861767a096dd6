"""
日志管理工具
基于loguru的日志配置；控制台输出走 stderr，stdout 留给 CLI 的结果输出
"""

import sys
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional

from loguru import logger

from config import settings

CONSOLE_FORMAT = (
    "<green>{time:HH:mm:ss}</green> | "
    "<level>{level: <8}</level> | "
    "<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> | "
    "<level>{message}</level>"
)


def setup_logger(
    log_level: str = "INFO",
    log_file: Optional[Path] = None,
    rotation: str = "10 MB",
    retention: str = "7 days",
    format_string: Optional[str] = None
) -> None:
    """设置日志配置

    Args:
        log_level: 控制台日志级别
        log_file: 日志文件路径，None 表示不写文件
        rotation: 日志轮转规则
        retention: 日志保留时间
        format_string: 控制台日志格式
    """
    logger.remove()

    logger.add(
        sys.stderr,
        level=log_level,
        format=format_string or CONSOLE_FORMAT,
        colorize=True,
        backtrace=False,
        diagnose=False
    )

    if log_file is not None:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        logger.add(
            str(log_file),
            level="DEBUG",
            format=settings.log_format,
            rotation=rotation,
            retention=retention,
            encoding="utf-8"
        )
        logger.debug(f"日志文件: {log_file}")


def get_logger(name: str):
    """获取绑定名称的日志器

    Args:
        name: 日志器名称

    Returns:
        绑定了 name 的 loguru 日志器
    """
    return logger.bind(name=name)


class LoggerMixin:
    """日志混入类 - 为其他类提供日志功能"""

    @property
    def logger(self):
        """获取当前类的日志器"""
        return get_logger(self.__class__.__name__)


class StepLogger:
    """分步日志器: 给测试或 CLI 阶段内的步骤编号"""

    # 避免被 pytest 当作测试类收集
    __test__ = False

    def __init__(self, name: str):
        self.name = name
        self.logger = get_logger(f"STEP.{name}")
        self.steps: List[str] = []

    def step(self, description: str) -> None:
        """记录步骤

        Args:
            description: 步骤描述
        """
        step_info = f"步骤 {len(self.steps) + 1}: {description}"
        self.steps.append(step_info)
        self.logger.info(step_info)

    def info(self, message: str) -> None:
        self.logger.info(message)

    def warning(self, message: str) -> None:
        self.logger.warning(message)

    def finish(self, passed: bool = True) -> None:
        if passed:
            self.logger.success(f"完成: {self.name}")
        else:
            self.logger.error(f"失败: {self.name}")

    def get_summary(self) -> Dict[str, Any]:
        """获取步骤摘要"""
        return {
            "name": self.name,
            "total_steps": len(self.steps),
            "steps": list(self.steps)
        }


class PerformanceLogger:
    """性能日志器(耗时只进日志，不进报告)"""

    def __init__(self, name: str):
        self.name = name
        self.logger = get_logger(f"PERF.{name}")
        self.timings: Dict[str, float] = {}
        self.start_times: Dict[str, float] = {}

    def start_timing(self, operation: str) -> None:
        """开始计时"""
        self.start_times[operation] = time.perf_counter()

    def end_timing(self, operation: str) -> float:
        """结束计时

        Returns:
            耗时（秒）
        """
        if operation not in self.start_times:
            self.logger.warning(f"未找到操作的开始时间: {operation}")
            return 0.0

        duration = time.perf_counter() - self.start_times.pop(operation)
        self.timings[operation] = duration
        self.logger.debug(f"{operation} 耗时: {duration:.3f}秒")
        return duration

    @contextmanager
    def timing(self, operation: str) -> Iterator[None]:
        """with 块计时"""
        self.start_timing(operation)
        try:
            yield
        finally:
            self.end_timing(operation)

    def get_performance_summary(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "timings": dict(self.timings),
            "total_operations": len(self.timings),
            "total_time": sum(self.timings.values())
        }


# 初始化默认日志配置
setup_logger(
    log_level=settings.log_level,
    log_file=settings.logs_dir / "rsat.log" if settings.log_to_file else None
)
