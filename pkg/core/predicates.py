"""
谓词分析
谓词的 DNF 表示、满足比例的闭式与穷举计算，以及随机取反的存活概率运算
"""

import itertools
import math
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, model_validator

from config import settings
from .csp import PredicateSpec, eval_predicate_batch
from .exceptions import CapExceededError, DomainError, PredicateError
from .oracles import assignment_block

Literal = Tuple[int, int]


def all_inputs(arity: int) -> np.ndarray:
    """{±1}^arity 的全部输入，按枚举序排列，形状 (2^arity, arity)"""
    return assignment_block(0, 1 << arity, arity)


def _check_arity_cap(predicate: PredicateSpec, cap: Optional[int] = None) -> None:
    limit = settings.predicate_verify_cap if cap is None else cap
    if predicate.arity > limit:
        logger.error(f"谓词 {predicate.label} 元数 {predicate.arity} 超出穷举上限 {limit}")
        raise CapExceededError(f"谓词 {predicate.label} 元数 {predicate.arity} 超出穷举上限 {limit}")


class PredicateDnf(BaseModel):
    """谓词的 DNF 表示 C₁ ∨ … ∨ C_T

    子句中的文字为 (符号, 位置)，位置从 1 开始；(s, j) 为真当且仅当 z_j = s。
    元数不超过 predicate_verify_cap 时，构造时会在全部 2^arity 个输入上与源谓词比对。
    """

    model_config = ConfigDict(frozen=True)

    predicate: PredicateSpec = Field(..., description="源谓词")
    clauses: Tuple[Tuple[Literal, ...], ...] = Field(..., description="子句列表")

    @model_validator(mode="after")
    def _verify(self) -> "PredicateDnf":
        arity = self.predicate.arity
        for clause in self.clauses:
            for sign, position in clause:
                if sign not in (1, -1) or not 1 <= position <= arity:
                    raise PredicateError(f"非法文字 ({sign}, {position})，元数为 {arity}")
        if arity <= settings.predicate_verify_cap:
            z = all_inputs(arity)
            mismatches = np.flatnonzero(self.evaluate(z) != eval_predicate_batch(self.predicate, z))
            if mismatches.size:
                raise PredicateError(f"DNF 与谓词 {self.predicate.label} 在 {mismatches.size} 个输入上不一致")
        else:
            logger.warning(f"谓词 {self.predicate.label} 元数 {arity} 超出校验上限，跳过穷举比对")
        return self

    @property
    def arity(self) -> int:
        return self.predicate.arity

    @property
    def size(self) -> int:
        """Σ 子句长度"""
        return sum(len(clause) for clause in self.clauses)

    def evaluate(self, z: np.ndarray) -> np.ndarray:
        """对形状 (..., arity) 的 ±1 数组求值，返回 uint8"""
        z = np.asarray(z)
        result = np.zeros(z.shape[:-1], dtype=bool)
        for clause in self.clauses:
            term = np.ones(z.shape[:-1], dtype=bool)
            for sign, position in clause:
                term &= z[..., position - 1] == sign
            result |= term
        return result.astype(np.uint8)


def dnf_of_not_t(k: int, m: int) -> PredicateDnf:
    """¬T_{K,M} 的 De Morgan 形式: 第 j 个子句断言第 j 块全为 −1，共 M 个子句"""
    predicate = PredicateSpec.not_tkm(k, m)
    clauses = tuple(
        tuple((-1, block * k + r) for r in range(1, k + 1))
        for block in range(m)
    )
    return PredicateDnf(predicate=predicate, clauses=clauses)


def dnf_of_predicate(predicate: PredicateSpec) -> PredicateDnf:
    """任意谓词的规范 DNF

    SAT_K 为 K 个单文字子句；¬T 为 De Morgan 形式；T_{K,M} 按块展开为 K^M 个子句；
    真值表每个满足输入一个极小项。
    """
    if predicate.kind == "not_tkm":
        return dnf_of_not_t(predicate.k, predicate.m)

    if predicate.kind == "sat":
        clauses = tuple(((1, r),) for r in range(1, predicate.k + 1))
    elif predicate.kind == "tkm":
        _check_arity_cap(predicate)
        k = predicate.k
        clauses = tuple(
            tuple((1, block * k + r) for block, r in enumerate(choice))
            for choice in itertools.product(range(1, k + 1), repeat=predicate.m)
        )
    else:
        _check_arity_cap(predicate)
        clauses = tuple(
            tuple((1 if (index >> j) & 1 else -1, j + 1) for j in range(predicate.arity))
            for index, bit in enumerate(predicate.table)
            if bit
        )
    return PredicateDnf(predicate=predicate, clauses=clauses)


def satisfying_fraction(predicate: PredicateSpec) -> Fraction:
    """|P^{-1}(1)| / 2^arity 的闭式"""
    if predicate.kind == "sat":
        return 1 - Fraction(1, 2 ** predicate.k)
    block = 1 - Fraction(1, 2 ** predicate.k)
    if predicate.kind == "tkm":
        return block ** predicate.m
    if predicate.kind == "not_tkm":
        return 1 - block ** predicate.m
    return Fraction(sum(predicate.table), 2 ** predicate.arity)


def exhaustive_fraction(predicate: PredicateSpec, cap: Optional[int] = None) -> Fraction:
    """在全部 2^arity 个输入上计数得到的满足比例"""
    _check_arity_cap(predicate, cap)
    satisfied = int(eval_predicate_batch(predicate, all_inputs(predicate.arity)).sum(dtype=np.int64))
    return Fraction(satisfied, 2 ** predicate.arity)


def count_zero_inputs(predicate: PredicateSpec) -> int:
    """|P^{-1}(0)|，由闭式精确得到(¬T_{K,M} 时为 (2^K−1)^M)"""
    zeros = (1 - satisfying_fraction(predicate)) * 2 ** predicate.arity
    return int(zeros)


# 随机取反的存活概率

def _check_survival_args(k: int, m_blocks: int, m: Optional[int] = None) -> None:
    if k < 1 or m_blocks < 1:
        raise DomainError(f"K、M 必须 ≥ 1: K={k}, M={m_blocks}")
    if m is not None and m < 1:
        raise DomainError(f"约束数 m 必须 ≥ 1: {m}")


def negation_failure_probability(k: int, m_blocks: int) -> Fraction:
    """随机 ¬T_{K,M} 约束不被固定 ψ 满足的概率 (2^K−1)^M / 2^{KM}"""
    _check_survival_args(k, m_blocks)
    return Fraction((2 ** k - 1) ** m_blocks, 2 ** (k * m_blocks))


def survival_bound_holds(k: int, m_blocks: int, m: int) -> bool:
    """精确整数判定 m·(1−2^{−K})^M ≤ 1/m，即 m²(2^K−1)^M ≤ 2^{KM}"""
    _check_survival_args(k, m_blocks, m)
    return m * m * (2 ** k - 1) ** m_blocks <= 2 ** (k * m_blocks)


def survival_threshold(k: int, m: int) -> float:
    """充分条件 M ≥ 2^{K+2}·log₂ m 的右端"""
    _check_survival_args(k, 1, m)
    return 2 ** (k + 2) * math.log2(m)


def log2_survival_margin(k: int, m_blocks: int, m: int) -> float:
    """log₂(1/m) − log₂(m(1−2^{−K})^M)，非负当且仅当存活界成立(浮点)"""
    _check_survival_args(k, m_blocks, m)
    return k * m_blocks - m_blocks * math.log2(2 ** k - 1) - 2 * math.log2(m)


def minimal_survival_m(k: int, m: int) -> int:
    """满足精确存活界的最小 M"""
    _check_survival_args(k, 1, m)
    if m == 1:
        return 1
    rate = k - math.log2(2 ** k - 1)
    candidate = max(1, math.floor(2 * math.log2(m) / rate) - 2)
    while candidate > 1 and survival_bound_holds(k, candidate - 1, m):
        candidate -= 1
    while not survival_bound_holds(k, candidate, m):
        candidate += 1
    return candidate


def survival_chain(k: int, m_blocks: int, m: int) -> List[float]:
    """存活界推导链各项的自然对数值

    依次为 ln(m(1−2^{−K})^M)、ln m − M·2^{−K}、ln m − M·2^{−(K+1)}、ln(1/m)。
    前三项单调不减；最后一步在 M ≥ 2^{K+2}·ln m 时成立。
    """
    _check_survival_args(k, m_blocks, m)
    log_m = math.log(m)
    return [
        log_m + m_blocks * math.log1p(-(2.0 ** -k)),
        log_m - m_blocks * 2.0 ** -k,
        log_m - m_blocks * 2.0 ** -(k + 1),
        -log_m,
    ]
