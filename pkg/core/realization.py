"""
DNF 实现
元组到 {±1}^{2·arity·n} 的 g 映射、h_ψ 的显式 DNF 构造，以及 DNF 经补 CNF 到半空间交的桥接

坐标约定(GIndex，1 起始线性编号):
    id = (j−1)·2n + (0 若 b=+1，否则 1)·n + i
即先按元组位置 j，再按 b ∈ {+1,−1}，最后按变量 i。
"""

from typing import List, Sequence, Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .csp import Assignment, PredicateSpec, SignedTuple, apply_tuple, eval_predicate, eval_predicate_batch
from .exceptions import ArityMismatchError, MalformedInstanceError
from .predicates import PredicateDnf

Literal = Tuple[int, int]


class GIndex(BaseModel):
    """g 映射的坐标 (j, b, i)"""

    model_config = ConfigDict(frozen=True)

    j: int = Field(..., ge=1, description="元组位置")
    b: int = Field(..., description="符号 ±1")
    i: int = Field(..., ge=1, description="变量下标")

    @model_validator(mode="after")
    def _check_sign(self) -> "GIndex":
        if self.b not in (1, -1):
            raise MalformedInstanceError(f"GIndex 符号必须为 ±1: {self.b}")
        return self

    def linear(self, arity: int, n: int) -> int:
        """1 起始的线性编号"""
        if self.j > arity or self.i > n:
            raise MalformedInstanceError(f"GIndex ({self.j},{self.b},{self.i}) 超出 arity={arity}, n={n}")
        return (self.j - 1) * 2 * n + (0 if self.b == 1 else 1) * n + self.i

    @classmethod
    def from_linear(cls, index: int, arity: int, n: int) -> "GIndex":
        if not 1 <= index <= 2 * arity * n:
            raise MalformedInstanceError(f"线性编号 {index} 超出 [1, {2 * arity * n}]")
        j, rest = divmod(index - 1, 2 * n)
        half, i = divmod(rest, n)
        return cls(j=j + 1, b=1 if half == 0 else -1, i=i + 1)


class _ClauseFormula(BaseModel):
    """DNF/CNF 共用的子句容器，文字为 (符号, 变量)，变量从 1 开始"""

    model_config = ConfigDict(frozen=True)

    n_vars: int = Field(..., ge=0, description="变量数")
    clauses: Tuple[Tuple[Literal, ...], ...] = Field(default=(), description="子句列表")

    @model_validator(mode="after")
    def _check_literals(self):
        for position, clause in enumerate(self.clauses, start=1):
            if len(set(clause)) != len(clause):
                raise MalformedInstanceError(f"第 {position} 个子句含重复文字")
            for sign, var in clause:
                if sign not in (1, -1) or not 1 <= var <= self.n_vars:
                    raise MalformedInstanceError(f"第 {position} 个子句的文字 ({sign}, {var}) 非法")
        return self

    @property
    def size(self) -> int:
        """Σ 子句长度"""
        return sum(len(clause) for clause in self.clauses)

    @property
    def clause_count(self) -> int:
        return len(self.clauses)

    def _literal_matrix(self, v: np.ndarray) -> List[np.ndarray]:
        v = np.asarray(v)
        if v.shape[-1] != self.n_vars:
            raise ArityMismatchError(f"输入长度 {v.shape[-1]} 与变量数 {self.n_vars} 不一致")
        out = []
        for clause in self.clauses:
            if clause:
                signs = np.asarray([s for s, _ in clause], dtype=np.int8)
                cols = np.asarray([var - 1 for _, var in clause])
                out.append(v[..., cols] == signs)
            else:
                out.append(np.zeros(v.shape[:-1] + (0,), dtype=bool))
        return out


class DnfFormula(_ClauseFormula):
    """析取范式: 子句为文字的合取；空子句恒真，空子句表恒假"""

    def evaluate(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v)
        result = np.zeros(v.shape[:-1], dtype=bool)
        for truth in self._literal_matrix(v):
            result |= truth.all(axis=-1)
        return result.astype(np.uint8)


class CnfFormula(_ClauseFormula):
    """合取范式: 子句为文字的析取；空子句恒假，空子句表恒真"""

    def evaluate(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v)
        result = np.ones(v.shape[:-1], dtype=bool)
        for truth in self._literal_matrix(v):
            result &= truth.any(axis=-1)
        return result.astype(np.uint8)


class Halfspace(BaseModel):
    """半空间 {x : ⟨w,x⟩ ≥ θ}"""

    model_config = ConfigDict(frozen=True)

    weights: Tuple[int, ...] = Field(..., description="整数权重")
    threshold: int = Field(..., description="整数阈值 θ")

    def accepts(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        return x @ np.asarray(self.weights, dtype=np.int64) >= self.threshold


# g 映射

def g_map_batch(signs: np.ndarray, indices: np.ndarray, n: int) -> np.ndarray:
    """批量 g 映射

    Args:
        signs: 形状 (N, arity) 的 ±1 数组
        indices: 形状 (N, arity) 的变量下标(1 起始)
        n: 变量数

    Returns:
        形状 (N, 2·arity·n) 的 ±1 int8 数组
    """
    signs = np.asarray(signs, dtype=np.int64)
    indices = np.asarray(indices, dtype=np.int64)
    count, arity = signs.shape
    if indices.size and (indices.min() < 1 or indices.max() > n):
        raise MalformedInstanceError(f"元组下标超出 [1, {n}]")
    out = np.ones((count, 2 * arity * n), dtype=np.int8)
    # x(j) = (α, i) 时 −1 落在 (j, −α, i)
    half = (signs == 1).astype(np.int64)
    columns = np.arange(arity)[None, :] * 2 * n + half * n + (indices - 1)
    np.put_along_axis(out, columns, -1, axis=1)
    return out


def g_map(x: SignedTuple, n: int) -> np.ndarray:
    """g(x) ∈ {±1}^{2·arity·n}: g_{j,b,i}(x) = −1 当且仅当 x(j) = (−b, i)"""
    x.check_range(n)
    return g_map_batch(np.asarray([x.signs]), np.asarray([x.indices]), n)[0]


def g_inverse(v: np.ndarray, arity: int, n: int) -> SignedTuple:
    """g 在其像上的逆映射"""
    v = np.asarray(v)
    if v.shape != (2 * arity * n,):
        raise ArityMismatchError(f"向量长度 {v.shape} 与 2·{arity}·{n} 不一致")
    entries = []
    for j, block in enumerate(v.reshape(arity, 2 * n), start=1):
        hits = np.flatnonzero(block == -1)
        if hits.size != 1:
            raise MalformedInstanceError(f"位置 {j} 的块中有 {hits.size} 个 −1，不在 g 的像中")
        half, i = divmod(int(hits[0]), n)
        entries.append((-1 if half == 0 else 1, i + 1))
    return SignedTuple(entries=tuple(entries))


# h_ψ

def h_psi_eval(psi: Assignment, predicate: PredicateSpec, x: SignedTuple) -> int:
    """h_ψ(x) = P(U_x(ψ))"""
    return eval_predicate(predicate, apply_tuple(x, psi))


def h_psi_eval_batch(psi: Assignment, predicate: PredicateSpec, signs: np.ndarray, indices: np.ndarray) -> np.ndarray:
    """对 (N, arity) 的符号/下标矩阵批量求 h_ψ"""
    values = psi.as_array()
    return eval_predicate_batch(predicate, np.asarray(signs, dtype=np.int8) * values[np.asarray(indices) - 1])


def realize_hypothesis(psi: Assignment, pd: PredicateDnf, n: int) -> DnfFormula:
    """构造 h 使 h∘g = h_ψ

    谓词 DNF 的第 t 个子句中每个文字 (b, j) 展开为 n 个正文字 x_{(j, ψ_i·b, i)}，i = 1..n。

    Args:
        psi: 赋值 ψ
        pd: 谓词的 DNF 表示
        n: 变量数

    Returns:
        2·arity·n 个变量上的 DNF，子句数与 pd 相同
    """
    if psi.n != n:
        raise MalformedInstanceError(f"赋值长度 {psi.n} 与变量数 {n} 不一致")
    arity = pd.arity
    values = psi.values
    clauses = []
    for clause in pd.clauses:
        literals = []
        for b, j in clause:
            for i in range(1, n + 1):
                literals.append((1, GIndex(j=j, b=values[i - 1] * b, i=i).linear(arity, n)))
        clauses.append(tuple(dict.fromkeys(literals)))
    realized = DnfFormula(n_vars=2 * arity * n, clauses=tuple(clauses))
    logger.debug(f"实现假设: {len(clauses)} 个子句, 规模 {realized.size}, 变量 {realized.n_vars}")
    return realized


def eval_dnf(f: DnfFormula, v: Sequence[int]) -> int:
    return int(f.evaluate(np.asarray(v, dtype=np.int8)))


def eval_dnf_batch(f: DnfFormula, v: np.ndarray) -> np.ndarray:
    return f.evaluate(v)


# 半空间桥接

def complement_to_cnf(dnf: DnfFormula) -> CnfFormula:
    """De Morgan: ¬(∨_t ∧ l) = ∧_t ∨ ¬l"""
    clauses = tuple(tuple((-s, var) for s, var in clause) for clause in dnf.clauses)
    return CnfFormula(n_vars=dnf.n_vars, clauses=clauses)


def cnf_to_halfspaces(cnf: CnfFormula) -> List[Halfspace]:
    """每个 k 文字子句对应 Σ s_i·x_i ≥ 2−k"""
    halfspaces = []
    for clause in cnf.clauses:
        weights = [0] * cnf.n_vars
        for sign, var in clause:
            weights[var - 1] += sign
        halfspaces.append(Halfspace(weights=tuple(weights), threshold=2 - len(clause)))
    return halfspaces


def halfspaces_accept(halfspaces: Sequence[Halfspace], x: np.ndarray) -> np.ndarray:
    """x(或 x 的批)是否同时落在所有半空间内；空列表接受一切"""
    x = np.asarray(x)
    accepted = np.ones(x.shape[:-1], dtype=bool)
    for halfspace in halfspaces:
        accepted &= halfspace.accepts(x)
    return accepted
