"""
工具模块
日志、文件读写、报告、统计检验与文本格式
"""

from .logger import setup_logger, get_logger, LoggerMixin, StepLogger, PerformanceLogger
from .data_handler import DataHandler, data_handler, sha256_text
from .report_generator import RunReport, ReportGenerator, report_generator

__all__ = [
    'setup_logger',
    'get_logger',
    'LoggerMixin',
    'StepLogger',
    'PerformanceLogger',
    'DataHandler',
    'data_handler',
    'sha256_text',
    'RunReport',
    'ReportGenerator',
    'report_generator',
]
