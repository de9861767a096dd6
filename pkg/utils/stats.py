"""
统计检验工具
卡方、二项检验与 3σ 容差，供随机性检查与验收测试使用
"""

import math
from typing import Sequence

import numpy as np
from loguru import logger
from scipy import stats

# 默认显著性水平
SIGNIFICANCE = 1e-3


def chi_square_uniformity(counts: Sequence[int]) -> float:
    """各类计数是否等概率，返回 p 值"""
    observed = np.asarray(counts, dtype=np.float64)
    if observed.size < 2 or observed.sum() == 0:
        return 1.0
    return float(stats.chisquare(observed).pvalue)


def chi_square_independence(table: np.ndarray) -> float:
    """列联表独立性检验，返回 p 值；全零行列先剔除"""
    table = np.asarray(table, dtype=np.float64)
    table = table[table.sum(axis=1) > 0][:, table.sum(axis=0) > 0]
    if table.shape[0] < 2 or table.shape[1] < 2:
        logger.debug("列联表退化，独立性检验记为通过")
        return 1.0
    return float(stats.chi2_contingency(table, correction=False).pvalue)


def binomial_pvalue(successes: int, trials: int, p: float = 0.5) -> float:
    """双侧精确二项检验"""
    if trials == 0:
        return 1.0
    return float(stats.binomtest(successes, trials, p).pvalue)


def three_sigma_upper(p: float, trials: int) -> float:
    """频率的 3σ 上容差 p + 3·sqrt(p(1−p)/trials)"""
    return p + 3 * math.sqrt(p * (1 - p) / trials)


def three_sigma_lower(p: float, trials: int) -> float:
    return p - 3 * math.sqrt(p * (1 - p) / trials)


def within_three_sigma(successes: int, trials: int, p: float) -> bool:
    """计数是否落在 trials·p ± 3σ 内"""
    sigma = math.sqrt(trials * p * (1 - p))
    return abs(successes - trials * p) <= 3 * sigma
