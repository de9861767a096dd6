"""
暴力参考判定
VAL(J) 与可满足性的穷举求解，仅用于小规模校验；超过上限直接拒绝
"""

from fractions import Fraction
from typing import Iterator, Optional, Tuple

import numpy as np
from loguru import logger

from config import settings
from .csp import Assignment, Formula, eval_predicate_batch
from .exceptions import CapExceededError

# 单批求值数组元素个数的目标上限
_WORK_TARGET = 1 << 24


def _check_cap(formula: Formula, cap: Optional[int]) -> int:
    limit = settings.brute_force_cap if cap is None else cap
    if formula.n > limit:
        logger.error(f"变量数 n={formula.n} 超出暴力求解上限 {limit}，拒绝执行")
        raise CapExceededError(f"变量数 n={formula.n} 超出暴力求解上限 {limit}")
    return limit


def assignment_block(start: int, stop: int, n: int) -> np.ndarray:
    """枚举序 [start, stop) 的赋值矩阵，形状 (stop-start, n)，第 i 位为 1 ⇒ ψ_{i+1} = −1"""
    counters = np.arange(start, stop, dtype=np.int64)[:, None]
    bits = (counters >> np.arange(n, dtype=np.int64)) & 1
    return (1 - 2 * bits).astype(np.int8)


def _chunk_size(formula: Formula) -> int:
    width = max(1, sum(c.predicate.arity for c in formula.constraints))
    return int(max(1, min(settings.enumeration_chunk, _WORK_TARGET // width)))


def iter_satisfied_counts(formula: Formula) -> Iterator[Tuple[int, np.ndarray]]:
    """按块枚举全部 2^n 个赋值，产出 (块起点, 每个赋值满足的约束数)"""
    total = 1 << formula.n
    step = _chunk_size(formula)
    groups = formula.predicate_groups()
    for start in range(0, total, step):
        stop = min(total, start + step)
        psi = assignment_block(start, stop, formula.n)
        counts = np.zeros(stop - start, dtype=np.int64)
        for predicate, _, signs, indices in groups:
            # (块, m_g, arity)
            z = signs[None, :, :] * psi[:, indices]
            counts += eval_predicate_batch(predicate, z).sum(axis=1, dtype=np.int64)
        yield start, counts


def brute_force_val(formula: Formula, cap: Optional[int] = None) -> Tuple[Fraction, Assignment]:
    """穷举求 VAL(J) 及一个达到最大值的赋值(枚举序中第一个)

    Args:
        formula: 公式
        cap: 变量数上限，默认取 settings.brute_force_cap

    Returns:
        (VAL, 见证赋值)

    Raises:
        CapExceededError: n 超出上限
    """
    _check_cap(formula, cap)
    if formula.m == 0:
        return Fraction(1), Assignment.from_index(0, formula.n)

    best_count, best_index = -1, 0
    for start, counts in iter_satisfied_counts(formula):
        position = int(np.argmax(counts))
        if counts[position] > best_count:
            best_count, best_index = int(counts[position]), start + position
            if best_count == formula.m:
                break

    logger.debug(f"暴力求解: n={formula.n}, m={formula.m}, 最多满足 {best_count} 个约束")
    return Fraction(best_count, formula.m), Assignment.from_index(best_index, formula.n)


def brute_force_satisfiable(formula: Formula, cap: Optional[int] = None) -> Optional[Assignment]:
    """返回第一个满足全部约束的赋值，不可满足时返回 None"""
    _check_cap(formula, cap)
    for start, counts in iter_satisfied_counts(formula):
        hits = np.flatnonzero(counts == formula.m)
        if hits.size:
            return Assignment.from_index(start + int(hits[0]), formula.n)
    return None
