"""
随机/种植实例生成器
所有函数都是 (参数, Generator) 的纯函数；抽取顺序见 core.rng
"""

from typing import List, Optional, Tuple

import numpy as np
from loguru import logger

from config import settings
from .csp import Assignment, Constraint, Formula, PredicateSpec, SignedTuple, eval_predicate_batch
from .exceptions import GenerationError, MalformedInstanceError


def _draw_indices(n: int, arity: int, rng: np.random.Generator) -> List[int]:
    """部分 Fisher–Yates: 从 [1,n] 中均匀有序地选出 arity 个不同下标"""
    picks = rng.integers(np.arange(arity), n)
    pool = list(range(1, n + 1))
    for i, j in enumerate(picks.tolist()):
        pool[i], pool[j] = pool[j], pool[i]
    return pool[:arity]


def _draw_signs(arity: int, rng: np.random.Generator) -> np.ndarray:
    return 1 - 2 * rng.integers(0, 2, size=arity, dtype=np.int8)


def random_tuple(n: int, arity: int, rng: np.random.Generator) -> SignedTuple:
    """均匀随机带符号元组"""
    if n < arity:
        raise GenerationError(f"变量数 n={n} 小于元数 {arity}")
    indices = _draw_indices(n, arity, rng)
    signs = _draw_signs(arity, rng)
    return SignedTuple.trusted(zip(signs.tolist(), indices))


def random_assignment(n: int, rng: np.random.Generator) -> Assignment:
    """均匀随机赋值"""
    return Assignment.model_construct(values=tuple(_draw_signs(n, rng).tolist()))


def random_formula(n: int, m: int, predicate: PredicateSpec, rng: np.random.Generator) -> Formula:
    """随机 P-公式: 每个元组独立均匀抽取

    Args:
        n: 变量数
        m: 约束数
        predicate: 谓词
        rng: 随机数生成器

    Returns:
        公式
    """
    if n < predicate.arity:
        raise GenerationError(f"变量数 n={n} 小于谓词 {predicate.label} 的元数 {predicate.arity}")
    constraints = [Constraint.trusted(predicate, random_tuple(n, predicate.arity, rng)) for _ in range(m)]
    logger.debug(f"生成随机公式: n={n}, m={m}, P={predicate.label}")
    return Formula.trusted(n, constraints)


def random_mixed_formula(n: int, m: int, predicate: PredicateSpec, rng: np.random.Generator) -> Formula:
    """随机 (P,¬P)-公式: 每个约束先抛硬币决定极性(1 ⇒ ¬P)，再抽元组"""
    negated = predicate.negated()
    if n < predicate.arity:
        raise GenerationError(f"变量数 n={n} 小于谓词 {predicate.label} 的元数 {predicate.arity}")
    constraints = []
    for _ in range(m):
        chosen = negated if rng.integers(0, 2) == 1 else predicate
        constraints.append(Constraint.trusted(chosen, random_tuple(n, predicate.arity, rng)))
    logger.debug(f"生成随机混合公式: n={n}, m={m}, P={predicate.label}/{negated.label}")
    return Formula.trusted(n, constraints)


def _blockwise_planted(
    n: int,
    predicate: PredicateSpec,
    psi_values: np.ndarray,
    rng: np.random.Generator,
    cap: int,
) -> Tuple[SignedTuple, int]:
    """SAT_K / T_{K,M}: 给定下标后字面值均匀，各块独立，故逐块对符号拒绝采样

    cap 限制的是所有块累计的尝试次数
    """
    k = predicate.k
    indices = _draw_indices(n, predicate.arity, rng)
    signs: List[int] = []
    attempts = 0
    for block in range(predicate.m):
        block_values = psi_values[np.asarray(indices[block * k:(block + 1) * k]) - 1]
        while True:
            if attempts >= cap:
                logger.error(f"逐块拒绝采样 {cap} 次仍未得到满足的 {predicate.label} 约束")
                raise GenerationError(f"谓词 {predicate.label} 在 {cap} 次尝试内无法被 ψ 满足")
            attempts += 1
            block_signs = _draw_signs(k, rng)
            if np.any(block_signs * block_values == 1):
                signs.extend(block_signs.tolist())
                break
    return SignedTuple.trusted(zip(signs, indices)), attempts


def planted_constraint(
    n: int,
    predicate: PredicateSpec,
    psi: Assignment,
    rng: np.random.Generator,
    rejection_cap: Optional[int] = None,
) -> Tuple[Constraint, int]:
    """抽取一个在 ψ 下满足的均匀约束

    Returns:
        (约束, 拒绝采样尝试次数)
    """
    cap = settings.rejection_cap if rejection_cap is None else rejection_cap
    psi_values = psi.as_array()

    if predicate.kind in ("sat", "tkm"):
        signed_tuple, attempts = _blockwise_planted(n, predicate, psi_values, rng, cap)
        return Constraint.trusted(predicate, signed_tuple), attempts

    for attempt in range(1, cap + 1):
        candidate = random_tuple(n, predicate.arity, rng)
        z = np.asarray(candidate.signs, dtype=np.int8) * psi_values[np.asarray(candidate.indices) - 1]
        if eval_predicate_batch(predicate, z):
            return Constraint.trusted(predicate, candidate), attempt

    logger.error(f"拒绝采样 {cap} 次仍未得到满足的 {predicate.label} 约束")
    raise GenerationError(f"谓词 {predicate.label} 在 {cap} 次尝试内无法被 ψ 满足")


def planted_formula(
    n: int,
    m: int,
    predicate: PredicateSpec,
    psi: Assignment,
    rng: np.random.Generator,
) -> Formula:
    """种植公式: 每个约束在 ψ 满足的条件下均匀抽取

    Args:
        n: 变量数
        m: 约束数
        predicate: 谓词
        psi: 种植赋值
        rng: 随机数生成器

    Returns:
        被 ψ 满足的公式
    """
    if psi.n != n:
        raise MalformedInstanceError(f"种植赋值长度 {psi.n} 与变量数 {n} 不一致")
    if n < predicate.arity:
        raise GenerationError(f"变量数 n={n} 小于谓词 {predicate.label} 的元数 {predicate.arity}")
    if predicate.kind == "table" and not any(predicate.table):
        logger.error(f"谓词 {predicate.label} 恒为 0，无法种植")
        raise GenerationError(f"谓词 {predicate.label} 没有满足输入")

    constraints = []
    total_attempts = 0
    for _ in range(m):
        constraint, attempts = planted_constraint(n, predicate, psi, rng)
        constraints.append(constraint)
        total_attempts += attempts

    if m:
        logger.debug(f"种植公式: n={n}, m={m}, P={predicate.label}, 平均尝试 {total_attempts / m:.2f} 次")
    return Formula.trusted(n, constraints)
