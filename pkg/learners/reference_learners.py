"""
参考学习器
记忆器、常值学习器，以及两个指数时间、带上限的暴力学习器
"""

import itertools
import math
from typing import Dict, Iterator, Optional

import numpy as np

from config import settings
from core.csp import Assignment, PredicateSpec, eval_predicate_batch
from core.exceptions import CapExceededError, DomainError, MalformedInstanceError
from core.oracles import assignment_block
from core.predicates import dnf_of_not_t
from core.realization import DnfFormula, realize_hypothesis
from core.scatter import ConstantHypothesis, Hypothesis
from .base_learner import BaseLearner, DrawPolicy, distinct_points, majority_label

# 单批求值数组元素个数的目标上限
_WORK_TARGET = 1 << 24
_COMBO_CHUNK = 4096


class MemorizerHypothesis:
    """查表假设；未见过的实例输出 default"""

    def __init__(self, table: Dict[bytes, int], default: int = 0):
        self.table = table
        self.default = default

    def predict(self, instances: np.ndarray) -> np.ndarray:
        rows = np.asarray(instances, dtype=np.int8)
        return np.asarray([self.table.get(row.tobytes(), self.default) for row in rows], dtype=np.uint8)


class DnfHypothesis:
    """以 DNF 为假设"""

    def __init__(self, formula: DnfFormula):
        self.formula = formula

    def predict(self, instances: np.ndarray) -> np.ndarray:
        return self.formula.evaluate(np.asarray(instances))


class AssignmentHypothesis(DnfHypothesis):
    """h_ψ 经 g 映射后的实现 DNF，同时保留 ψ"""

    def __init__(self, psi: Assignment, formula: DnfFormula):
        super().__init__(formula)
        self.psi = psi


class Memorizer(BaseLearner):
    """记忆样例(重复实例取多数标签)"""

    name = "memorizer"

    def __init__(self, draws: DrawPolicy = "all", default: int = 0):
        super().__init__(draws)
        self.default = default

    def log_class_size(self, dim: int) -> float:
        return 2 ** dim * math.log(2)

    def fit(self, instances: np.ndarray, labels: np.ndarray, dim: int) -> Hypothesis:
        points, zeros, ones = distinct_points(np.asarray(instances, dtype=np.int8), labels)
        table = {
            point.tobytes(): majority_label(int(z), int(o))
            for point, z, o in zip(points, zeros, ones)
        }
        return MemorizerHypothesis(table, self.default)


class ConstantLearner(BaseLearner):
    """常值学习器: label 为 None 时输出样例多数标签(平票取 0)"""

    name = "constant"

    def __init__(self, label: Optional[int] = None, draws: DrawPolicy = "all"):
        super().__init__(draws)
        if label not in (None, 0, 1):
            raise DomainError(f"常值标签必须为 0/1: {label}")
        self.label = label

    def log_class_size(self, dim: int) -> float:
        return math.log(2)

    def fit(self, instances: np.ndarray, labels: np.ndarray, dim: int) -> Hypothesis:
        if self.label is not None:
            return ConstantHypothesis(self.label)
        ones = int(np.asarray(labels).sum())
        return ConstantHypothesis(majority_label(labels.shape[0] - ones, ones))


def _all_terms(dim: int) -> np.ndarray:
    """全部合取项，形状 (3^dim, dim)，0 表示变量不出现"""
    return np.asarray(list(itertools.product((0, 1, -1), repeat=dim)), dtype=np.int8).reshape(-1, dim)


def _combinations(count: int, size: int) -> Iterator[np.ndarray]:
    source = itertools.combinations(range(count), size)
    while True:
        chunk = list(itertools.islice(source, _COMBO_CHUNK))
        if not chunk:
            return
        yield np.asarray(chunk, dtype=np.int64).reshape(len(chunk), size)


class BruteForceDnfLearner(BaseLearner):
    """在至多 max_clauses 个子句的 DNF 中穷举经验误差最小者(取第一个)"""

    name = "bf-dnf"

    def __init__(self, max_clauses: int = 2, draws: DrawPolicy = None):
        super().__init__(draws)
        if max_clauses < 0:
            raise DomainError(f"子句数上限必须 ≥ 0: {max_clauses}")
        self.max_clauses = max_clauses

    def log_class_size(self, dim: int) -> float:
        return max(1, self.max_clauses) * dim * math.log(3)

    def _search_space(self, count: int) -> int:
        return sum(math.comb(count, r) for r in range(self.max_clauses + 1))

    def fit(self, instances: np.ndarray, labels: np.ndarray, dim: int) -> Hypothesis:
        if dim > settings.bf_dnf_max_vars:
            self.logger.error(f"维度 {dim} 超出暴力 DNF 学习器上限 {settings.bf_dnf_max_vars}")
            raise CapExceededError(f"维度 {dim} 超出暴力 DNF 学习器上限 {settings.bf_dnf_max_vars}")

        points, zeros, ones = distinct_points(np.asarray(instances, dtype=np.int8), labels)
        terms = _all_terms(dim)
        truth = ((terms[:, None, :] == 0) | (terms[:, None, :] == points[None, :, :])).all(axis=-1)
        # 在样例上真值相同的项只保留第一个
        _, keep = np.unique(truth, axis=0, return_index=True)
        keep = np.sort(keep)
        terms, truth = terms[keep], truth[keep]

        if self._search_space(len(terms)) > settings.bf_dnf_max_candidates:
            consistent = ~(truth & (zeros > 0)[None, :]).any(axis=1)
            terms, truth = terms[consistent], truth[consistent]
            self.logger.debug(f"候选过多，只保留不覆盖负例的 {len(terms)} 个项")
            if self._search_space(len(terms)) > settings.bf_dnf_max_candidates:
                raise CapExceededError(
                    f"候选 DNF 数超出上限 {settings.bf_dnf_max_candidates}(项数 {len(terms)}, 子句数 ≤ {self.max_clauses})"
                )

        best_error, best_combo = int(ones.sum()), np.zeros(0, dtype=np.int64)
        for size in range(1, self.max_clauses + 1):
            if best_error == 0:
                break
            for combos in _combinations(len(terms), size):
                predictions = truth[combos].any(axis=1)
                errors = np.where(predictions, zeros[None, :], ones[None, :]).sum(axis=1)
                position = int(np.argmin(errors))
                if errors[position] < best_error:
                    best_error, best_combo = int(errors[position]), combos[position]
                    if best_error == 0:
                        break

        clauses = tuple(
            tuple((int(sign), var + 1) for var, sign in enumerate(terms[t]) if sign != 0)
            for t in best_combo
        )
        self.logger.debug(f"{self.name}: 最优 {len(clauses)} 子句 DNF，样例上错误 {best_error}")
        return DnfHypothesis(DnfFormula(n_vars=dim, clauses=clauses))


def decode_tuples(instances: np.ndarray, arity: int, n: int):
    """把 g 映射的像批量解码为 (符号矩阵, 1 起始下标矩阵)"""
    blocks = np.asarray(instances).reshape(instances.shape[0], arity, 2 * n) == -1
    if (blocks.sum(axis=-1) != 1).any():
        raise MalformedInstanceError("样例不在 g 映射的像中")
    half, index = np.divmod(blocks.argmax(axis=-1), n)
    return np.where(half == 0, -1, 1).astype(np.int8), index + 1


class BruteForceAssignmentLearner(BaseLearner):
    """H_{¬T_{K,M}} 的真学习器: 穷举 ψ ∈ {±1}^n，取经验误差最小的第一个

    实例须是 g 映射的像(维度 2·K·M·n)；返回 h_ψ 的实现 DNF。
    """

    name = "bf-psi"

    def __init__(self, k: int = 2, m_blocks: int = 2, draws: DrawPolicy = None):
        super().__init__(draws)
        self.predicate = PredicateSpec.not_tkm(k, m_blocks)

    @property
    def arity(self) -> int:
        return self.predicate.arity

    def variables(self, dim: int) -> int:
        if dim % (2 * self.arity) or dim == 0:
            raise DomainError(f"维度 {dim} 不是 2·K·M={2 * self.arity} 的正整数倍")
        return dim // (2 * self.arity)

    def log_class_size(self, dim: int) -> float:
        return self.variables(dim) * math.log(2)

    def fit(self, instances: np.ndarray, labels: np.ndarray, dim: int) -> Hypothesis:
        n = self.variables(dim)
        if n > settings.bf_assignment_max_vars:
            self.logger.error(f"变量数 n={n} 超出暴力赋值学习器上限 {settings.bf_assignment_max_vars}")
            raise CapExceededError(f"变量数 n={n} 超出暴力赋值学习器上限 {settings.bf_assignment_max_vars}")

        points, zeros, ones = distinct_points(np.asarray(instances, dtype=np.int8), labels)
        signs, indices = decode_tuples(points, self.arity, n)
        columns = indices - 1

        total = 1 << n
        step = max(1, _WORK_TARGET // max(1, points.shape[0] * self.arity))
        best_error, best_index = None, 0
        for start in range(0, total, step):
            psi = assignment_block(start, min(total, start + step), n)
            h = eval_predicate_batch(self.predicate, signs[None, :, :] * psi[:, columns])
            errors = np.where(h == 1, zeros[None, :], ones[None, :]).sum(axis=1)
            position = int(np.argmin(errors))
            if best_error is None or errors[position] < best_error:
                best_error, best_index = int(errors[position]), start + position
                if best_error == 0:
                    break

        psi = Assignment.from_index(best_index, n)
        self.logger.debug(f"{self.name}: ψ={psi.to_string()}，样例上错误 {best_error}")
        formula = realize_hypothesis(psi, dnf_of_not_t(self.predicate.k, self.predicate.m), n)
        return AssignmentHypothesis(psi, formula)


def reference_learners(k: int = 2, m_blocks: int = 2, max_clauses: int = 2) -> Dict[str, BaseLearner]:
    """按 CLI 名称返回全部参考学习器"""
    return {
        "memorizer": Memorizer(),
        "constant": ConstantLearner(),
        "bf-dnf": BruteForceDnfLearner(max_clauses=max_clauses),
        "bf-psi": BruteForceAssignmentLearner(k=k, m_blocks=m_blocks),
    }
