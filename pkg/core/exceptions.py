"""
异常定义
库内所有拒绝/失败都以这里的异常抛出，CLI 据此映射退出码
"""

from typing import Optional


class RsatError(Exception):
    """基础异常"""


class MalformedInstanceError(RsatError):
    """实例不合法(下标越界、重复下标、赋值取值非 ±1 等)"""


class ArityMismatchError(RsatError):
    """元数不一致"""


class PredicateError(RsatError):
    """谓词描述不合法"""


class CapExceededError(RsatError):
    """超出穷举上限，拒绝执行(从不静默近似)"""


class GenerationError(RsatError):
    """随机/种植实例生成失败"""


class ReductionInputError(RsatError):
    """归约输入不符合前置条件"""


class DomainError(RsatError, ValueError):
    """数值参数不在定义域内"""


class LearnerFailure(RsatError):
    """学习器运行失败(与判定结果区分)"""

    def __init__(self, learner_name: str, message: str):
        self.learner_name = learner_name
        super().__init__(f"学习器 {learner_name} 失败: {message}")


class FormatError(RsatError):
    """文本格式错误，带 1 起始的行号"""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        self.detail = message
        prefix = f"第 {line} 行: " if line is not None else ""
        super().__init__(f"{prefix}{message}")


class MalformedHeaderError(FormatError):
    """头部行格式错误"""


class FormatArityError(FormatError):
    """行内字段个数与元数不符"""


class IndexRangeError(FormatError):
    """变量下标越界"""


class DuplicateIndexError(FormatError):
    """同一元组内变量下标重复"""


class LabelError(FormatError):
    """样本标签不在 {0,1}"""


class BodyCountError(FormatError):
    """正文行数与头部声明不一致"""
