"""
CSP 实例表示与求值语义
带符号元组、谓词、约束、公式与赋值，以及 U_x、谓词求值和满足比例

约定: +1 表示真；谓词输入统一为 ±1 向量，输出为 {0,1}
"""

import re
from collections import Counter
from fractions import Fraction
from typing import Dict, Iterable, List, Literal, Sequence, Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .exceptions import ArityMismatchError, MalformedInstanceError, PredicateError

Entry = Tuple[int, int]
PredicateKind = Literal["sat", "tkm", "not_tkm", "table"]

_LABEL_PATTERN = re.compile(r"^(sat)(\d+)$|^(tkm|ntkm)(\d+)x(\d+)$|^table(\d+):([01]+)$")


class SignedTuple(BaseModel):
    """带符号元组 [(α₁,i₁),…,(α_K,i_K)]，下标互不相同且从 1 开始"""

    model_config = ConfigDict(frozen=True)

    entries: Tuple[Entry, ...] = Field(..., description="(符号, 变量下标) 序列")

    @field_validator("entries")
    @classmethod
    def _check_entries(cls, entries: Tuple[Entry, ...]) -> Tuple[Entry, ...]:
        if not entries:
            raise MalformedInstanceError("元组不能为空")
        seen = set()
        for sign, index in entries:
            if sign not in (1, -1):
                raise MalformedInstanceError(f"符号必须为 ±1: {sign}")
            if index < 1:
                raise MalformedInstanceError(f"变量下标必须 ≥ 1: {index}")
            if index in seen:
                raise MalformedInstanceError(f"元组内变量下标重复: {index}")
            seen.add(index)
        return entries

    @classmethod
    def trusted(cls, entries: Iterable[Entry]) -> "SignedTuple":
        """跳过校验构造(仅供生成器内部使用，调用方保证合法)"""
        return cls.model_construct(entries=tuple(entries))

    @classmethod
    def from_literals(cls, literals: Sequence[int]) -> "SignedTuple":
        """由带符号整数(如 [3, -1, 2])构造"""
        if any(lit == 0 for lit in literals):
            raise MalformedInstanceError("文字不能为 0")
        return cls(entries=tuple((1 if lit > 0 else -1, abs(lit)) for lit in literals))

    @property
    def arity(self) -> int:
        return len(self.entries)

    @property
    def signs(self) -> Tuple[int, ...]:
        return tuple(sign for sign, _ in self.entries)

    @property
    def indices(self) -> Tuple[int, ...]:
        return tuple(index for _, index in self.entries)

    def to_literals(self) -> Tuple[int, ...]:
        return tuple(sign * index for sign, index in self.entries)

    def check_range(self, n: int) -> None:
        """检查所有下标都在 [n] 内"""
        top = max(self.indices)
        if top > n:
            raise MalformedInstanceError(f"变量下标 {top} 超出范围 [1, {n}]")

    def shares_variable(self, other: "SignedTuple") -> bool:
        return not set(self.indices).isdisjoint(other.indices)


class Assignment(BaseModel):
    """赋值 ψ ∈ {±1}^n"""

    model_config = ConfigDict(frozen=True)

    values: Tuple[int, ...] = Field(..., description="±1 向量")

    @field_validator("values")
    @classmethod
    def _check_values(cls, values: Tuple[int, ...]) -> Tuple[int, ...]:
        for v in values:
            if v not in (1, -1):
                raise MalformedInstanceError(f"赋值取值必须为 ±1: {v}")
        return values

    @property
    def n(self) -> int:
        return len(self.values)

    @classmethod
    def from_array(cls, values: np.ndarray) -> "Assignment":
        return cls(values=tuple(int(v) for v in np.asarray(values).ravel()))

    @classmethod
    def from_index(cls, k: int, n: int) -> "Assignment":
        """枚举序中的第 k 个赋值: 第 i 位为 1 ⇒ ψ_{i+1} = −1"""
        return cls.model_construct(values=tuple(-1 if (k >> i) & 1 else 1 for i in range(n)))

    @classmethod
    def from_string(cls, text: str) -> "Assignment":
        """由 "+-+" 形式的字符串构造"""
        mapping = {"+": 1, "-": -1}
        try:
            return cls(values=tuple(mapping[ch] for ch in text.strip()))
        except KeyError as e:
            raise MalformedInstanceError(f"赋值字符串只能包含 '+' 和 '-': {text!r}") from e

    def to_string(self) -> str:
        return "".join("+" if v == 1 else "-" for v in self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.int8)


class PredicateSpec(BaseModel):
    """谓词 P: {±1}^arity → {0,1}

    kind:
        sat      SAT_K，K 个文字的析取
        tkm      T_{K,M}，M 个互不相交的 K 析取的合取
        not_tkm  ¬T_{K,M}
        table    真值表，第 j 位(从 0 起)为 1 当且仅当 z_{j+1} = +1
    """

    model_config = ConfigDict(frozen=True)

    kind: PredicateKind
    k: int = Field(default=1, description="块宽度 K")
    m: int = Field(default=1, description="块数 M")
    table: Tuple[int, ...] = Field(default=(), description="真值表比特")
    table_arity: int = Field(default=0, description="真值表元数")

    @model_validator(mode="after")
    def _check_spec(self) -> "PredicateSpec":
        if self.k < 1 or self.m < 1:
            raise PredicateError(f"K、M 必须 ≥ 1: K={self.k}, M={self.m}")
        if self.kind == "table":
            if self.table_arity < 1:
                raise PredicateError(f"真值表元数必须 ≥ 1: {self.table_arity}")
            if len(self.table) != 2 ** self.table_arity:
                raise PredicateError(
                    f"真值表长度应为 2^{self.table_arity}={2 ** self.table_arity}, 实际 {len(self.table)}"
                )
            if any(bit not in (0, 1) for bit in self.table):
                raise PredicateError("真值表只能包含 0/1")
        elif self.kind == "sat" and self.m != 1:
            raise PredicateError("SAT_K 谓词的 M 必须为 1")
        return self

    # 工厂方法
    @classmethod
    def sat(cls, k: int) -> "PredicateSpec":
        return cls(kind="sat", k=k)

    @classmethod
    def tkm(cls, k: int, m: int) -> "PredicateSpec":
        return cls(kind="tkm", k=k, m=m)

    @classmethod
    def not_tkm(cls, k: int, m: int) -> "PredicateSpec":
        return cls(kind="not_tkm", k=k, m=m)

    @classmethod
    def truth_table(cls, arity: int, bits: Sequence[int]) -> "PredicateSpec":
        return cls(kind="table", table=tuple(int(b) for b in bits), table_arity=arity)

    @classmethod
    def parse(cls, label: str) -> "PredicateSpec":
        """解析 sat3 / tkm2x4 / ntkm2x4 / table2:0111 形式的标签"""
        match = _LABEL_PATTERN.match(label.strip().lower())
        if not match:
            raise PredicateError(f"无法识别的谓词标签: {label!r}")
        if match.group(1):
            return cls.sat(int(match.group(2)))
        if match.group(3):
            k, m = int(match.group(4)), int(match.group(5))
            return cls.tkm(k, m) if match.group(3) == "tkm" else cls.not_tkm(k, m)
        return cls.truth_table(int(match.group(6)), [int(ch) for ch in match.group(7)])

    @property
    def arity(self) -> int:
        if self.kind == "table":
            return self.table_arity
        if self.kind == "sat":
            return self.k
        return self.k * self.m

    @property
    def label(self) -> str:
        if self.kind == "sat":
            return f"sat{self.k}"
        if self.kind == "tkm":
            return f"tkm{self.k}x{self.m}"
        if self.kind == "not_tkm":
            return f"ntkm{self.k}x{self.m}"
        return f"table{self.table_arity}:{''.join(str(b) for b in self.table)}"

    def negated(self) -> "PredicateSpec":
        """¬P；SAT_K 视作 T_{K,1}"""
        if self.kind in ("sat", "tkm"):
            return PredicateSpec.not_tkm(self.k, self.m)
        if self.kind == "not_tkm":
            return PredicateSpec.tkm(self.k, self.m)
        return PredicateSpec.truth_table(self.table_arity, [1 - b for b in self.table])


class Constraint(BaseModel):
    """P-约束 C = P ∘ U_x"""

    model_config = ConfigDict(frozen=True)

    predicate: PredicateSpec
    signed_tuple: SignedTuple

    @model_validator(mode="after")
    def _check_arity(self) -> "Constraint":
        if self.signed_tuple.arity != self.predicate.arity:
            raise ArityMismatchError(
                f"元组元数 {self.signed_tuple.arity} 与谓词 {self.predicate.label} 的元数 "
                f"{self.predicate.arity} 不一致"
            )
        return self

    @classmethod
    def trusted(cls, predicate: PredicateSpec, signed_tuple: SignedTuple) -> "Constraint":
        return cls.model_construct(predicate=predicate, signed_tuple=signed_tuple)


class Formula(BaseModel):
    """公式 J = {C₁,…,C_m}，n 个变量"""

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=0, description="变量数")
    constraints: Tuple[Constraint, ...] = Field(default=(), description="约束列表")

    @model_validator(mode="after")
    def _check_ranges(self) -> "Formula":
        for position, constraint in enumerate(self.constraints, start=1):
            top = max(constraint.signed_tuple.indices)
            if top > self.n:
                raise MalformedInstanceError(f"第 {position} 个约束的变量下标 {top} 超出 [1, {self.n}]")
        return self

    @classmethod
    def trusted(cls, n: int, constraints: Iterable[Constraint]) -> "Formula":
        return cls.model_construct(n=n, constraints=tuple(constraints))

    @property
    def m(self) -> int:
        return len(self.constraints)

    def predicates(self) -> List[PredicateSpec]:
        """按首次出现顺序列出不同谓词"""
        return list(dict.fromkeys(c.predicate for c in self.constraints))

    def polarity_counts(self) -> Dict[str, int]:
        return dict(Counter(c.predicate.label for c in self.constraints))

    def variables_used(self) -> List[int]:
        return sorted({i for c in self.constraints for i in c.signed_tuple.indices})

    def predicate_groups(self) -> List[Tuple[PredicateSpec, np.ndarray, np.ndarray, np.ndarray]]:
        """按谓词分组为数组，便于向量化求值

        Returns:
            [(谓词, 约束位置(m_g,), 符号矩阵(m_g,a) int8, 0 起始下标矩阵(m_g,a) int64)]
        """
        buckets: Dict[PredicateSpec, List[int]] = {}
        for position, constraint in enumerate(self.constraints):
            buckets.setdefault(constraint.predicate, []).append(position)

        groups = []
        for predicate, positions in buckets.items():
            entries = [self.constraints[p].signed_tuple.entries for p in positions]
            arr = np.asarray(entries, dtype=np.int64).reshape(len(positions), predicate.arity, 2)
            groups.append((predicate, np.asarray(positions), arr[:, :, 0].astype(np.int8), arr[:, :, 1] - 1))
        return groups


# 求值

def apply_tuple(signed_tuple: SignedTuple, psi: Assignment) -> Tuple[int, ...]:
    """U_x(ψ) = (α₁ψ_{i₁},…,α_Kψ_{i_K})"""
    if max(signed_tuple.indices) > psi.n:
        raise MalformedInstanceError(f"元组下标 {max(signed_tuple.indices)} 超出赋值长度 {psi.n}")
    return tuple(sign * psi.values[index - 1] for sign, index in signed_tuple.entries)


def eval_predicate_batch(predicate: PredicateSpec, z: np.ndarray) -> np.ndarray:
    """对最后一维为 ±1 输入的数组批量求值

    Args:
        predicate: 谓词
        z: 形状 (..., arity) 的 ±1 数组

    Returns:
        形状 (...) 的 uint8 数组
    """
    z = np.asarray(z)
    if z.shape[-1] != predicate.arity:
        raise ArityMismatchError(f"输入长度 {z.shape[-1]} 与谓词 {predicate.label} 的元数 {predicate.arity} 不一致")

    true_mask = z == 1
    if predicate.kind == "sat":
        result = true_mask.any(axis=-1)
    elif predicate.kind in ("tkm", "not_tkm"):
        blocks = true_mask.reshape(z.shape[:-1] + (predicate.m, predicate.k))
        result = blocks.any(axis=-1).all(axis=-1)
        if predicate.kind == "not_tkm":
            result = ~result
    else:
        weights = np.left_shift(1, np.arange(predicate.arity, dtype=np.int64))
        index = (true_mask.astype(np.int64) * weights).sum(axis=-1)
        result = np.asarray(predicate.table, dtype=np.uint8)[index]
    return np.asarray(result, dtype=np.uint8)


def eval_predicate(predicate: PredicateSpec, z: Sequence[int]) -> int:
    """P(z)，z 为 ±1 序列"""
    if len(z) != predicate.arity:
        raise ArityMismatchError(f"输入长度 {len(z)} 与谓词 {predicate.label} 的元数 {predicate.arity} 不一致")
    return int(eval_predicate_batch(predicate, np.asarray(z, dtype=np.int8)))


def eval_constraint(constraint: Constraint, psi: Assignment) -> int:
    """C(ψ) = P(U_x(ψ))"""
    return eval_predicate(constraint.predicate, apply_tuple(constraint.signed_tuple, psi))


def satisfied_mask(formula: Formula, psi: Assignment) -> np.ndarray:
    """每个约束在 ψ 下是否满足，形状 (m,) 的布尔数组"""
    if formula.n > psi.n:
        raise MalformedInstanceError(f"赋值长度 {psi.n} 小于变量数 {formula.n}")
    values = psi.as_array()
    mask = np.zeros(formula.m, dtype=bool)
    for predicate, positions, signs, indices in formula.predicate_groups():
        mask[positions] = eval_predicate_batch(predicate, signs * values[indices]).astype(bool)
    return mask


def value_under(formula: Formula, psi: Assignment) -> Fraction:
    """ψ 满足的约束比例；空公式记为 1"""
    if formula.m == 0:
        return Fraction(1)
    satisfied = int(satisfied_mask(formula, psi).sum())
    logger.debug(f"ψ 满足 {satisfied}/{formula.m} 个约束")
    return Fraction(satisfied, formula.m)
