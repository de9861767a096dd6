"""
学习器基类
所有参考学习器的基类: 从预言机取样例、拟合、返回假设
"""

import math
from abc import ABC, abstractmethod
from typing import Literal, Optional, Tuple, Union

import numpy as np

from core.exceptions import DomainError
from core.scatter import ExampleOracle, Hypothesis
from utils.logger import LoggerMixin

DrawPolicy = Union[int, Literal["all"], None]


class BaseLearner(ABC, LoggerMixin):
    """学习器基类

    draws 决定取样方式:
        None   按 PAC 样本量 ⌈(ln|H| + ln(1/δ))/ε⌉ 抽取
        int    固定抽取次数
        "all"  读取整个支撑集
    """

    name: str = "base"

    def __init__(self, draws: DrawPolicy = None):
        if isinstance(draws, int) and draws < 1:
            raise DomainError(f"抽取次数必须 ≥ 1: {draws}")
        self.draws = draws

    @abstractmethod
    def log_class_size(self, dim: int) -> float:
        """ln|H|"""

    @abstractmethod
    def fit(self, instances: np.ndarray, labels: np.ndarray, dim: int) -> Hypothesis:
        """由样例拟合假设"""

    def sample_size(self, epsilon: float, delta: float, dim: int) -> int:
        """PAC 样本量 ⌈(ln|H| + ln(1/δ))/ε⌉"""
        if not 0 < epsilon < 1 or not 0 < delta < 1:
            raise DomainError(f"需要 0 < ε, δ < 1: ε={epsilon}, δ={delta}")
        return max(1, math.ceil((self.log_class_size(dim) + math.log(1 / delta)) / epsilon))

    def collect(self, oracle: ExampleOracle, epsilon: float, delta: float, dim: int) -> Tuple[np.ndarray, np.ndarray]:
        if self.draws == "all":
            return oracle.exhaust()
        count = self.draws if isinstance(self.draws, int) else self.sample_size(epsilon, delta, dim)
        return oracle.draw(count)

    def learn(self, oracle: ExampleOracle, epsilon: float, delta: float, dim: int) -> Hypothesis:
        """学习器入口

        Args:
            oracle: 样例预言机
            epsilon: 精度参数 ε
            delta: 置信参数 δ
            dim: 实例长度

        Returns:
            可在任意 dim 长实例上求值的假设
        """
        if dim != oracle.dim:
            raise DomainError(f"声明的实例长度 {dim} 与预言机的 {oracle.dim} 不一致")
        instances, labels = self.collect(oracle, epsilon, delta, dim)
        self.logger.debug(f"{self.name}: 取得 {labels.shape[0]} 个样例，维度 {dim}")
        return self.fit(instances, labels, dim)

    def describe(self) -> str:
        draws = "pac" if self.draws is None else self.draws
        return f"{self.name}(draws={draws})"


def distinct_points(instances: np.ndarray, labels: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """合并重复实例

    Returns:
        (不同实例, 每个实例标签为 0 的次数, 标签为 1 的次数)
    """
    if instances.shape[0] == 0:
        return instances, np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    points, inverse = np.unique(instances, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)
    ones = np.bincount(inverse, weights=labels, minlength=points.shape[0]).astype(np.int64)
    totals = np.bincount(inverse, minlength=points.shape[0]).astype(np.int64)
    return points, totals - ones, ones


def majority_label(zeros: int, ones: int, default: Optional[int] = None) -> int:
    """多数标签，平票取 0"""
    if zeros == ones == 0 and default is not None:
        return default
    return 1 if ones > zeros else 0
