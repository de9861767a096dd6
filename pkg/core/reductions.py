"""
归约链
SAT_K → T_{K,M}(贪心分块打包) → (T,¬T)(随机取反) → 带标签学习样本

标签约定: ¬T 约束 → 1，T 约束 → 0；于是 ψ 满足公式当且仅当 h_ψ(P = ¬T_{K,M}) 在样本上零误差。
"""

from typing import List, Literal, Optional, Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, model_validator

from config import ReductionParams
from utils.stats import chi_square_independence, chi_square_uniformity
from .csp import Assignment, Constraint, Formula, PredicateSpec, SignedTuple
from .exceptions import ArityMismatchError, MalformedInstanceError, ReductionInputError
from .generators import planted_constraint, planted_formula, random_assignment, random_formula, random_tuple
from .realization import g_map_batch
from .scatter import LabeledSample

RemainderPolicy = Literal["strict", "truncate"]
EarlyVerdict = Literal["satisfiable"]


class PackResult(BaseModel):
    """打包结果: 提前判定 "satisfiable"，或 T_{K,M} 公式及来源记录"""

    model_config = ConfigDict(frozen=True)

    verdict: Optional[EarlyVerdict] = Field(default=None, description="提前判定")
    formula: Optional[Formula] = Field(default=None, description="打包后的 T_{K,M} 公式")
    provenance: Tuple[Tuple[int, ...], ...] = Field(default=(), description="每个打包约束的源约束位置(0 起始)")
    failed_block: Optional[int] = Field(default=None, description="提前返回时失败的分块编号")
    dropped: int = Field(default=0, description="truncate 策略丢弃的尾部约束数")

    @property
    def early(self) -> bool:
        return self.verdict is not None


def _check_sat_input(formula: Formula, k: int) -> None:
    for position, constraint in enumerate(formula.constraints, start=1):
        predicate = constraint.predicate
        if predicate.kind != "sat":
            raise ReductionInputError(f"第 {position} 个约束不是 SAT_K 约束: {predicate.label}")
        if predicate.k != k:
            raise ArityMismatchError(f"第 {position} 个约束宽度 {predicate.k} 与参数 K={k} 不一致")


def pack_blocks(formula: Formula, params: ReductionParams, on_fail: RemainderPolicy = "strict") -> PackResult:
    """把 SAT_K 公式按分块贪心打包成 T_{K,M} 公式

    每个分块按输入顺序扫描，候选约束在已选集合不足 M 个且与已选约束变量不相交时加入；
    任一分块最终不足 M 个时返回提前判定 "satisfiable"。

    Args:
        formula: SAT_K 公式
        params: 归约参数 (K, M, B)
        on_fail: m 不能被 B 整除时的策略，strict 报错，truncate 丢弃尾部

    Returns:
        PackResult
    """
    _check_sat_input(formula, params.k)
    block_size, m_blocks = params.block_size, params.m_blocks
    remainder = formula.m % block_size
    if remainder:
        if on_fail == "strict":
            logger.error(f"约束数 {formula.m} 不能被分块大小 {block_size} 整除")
            raise ReductionInputError(f"约束数 {formula.m} 不能被分块大小 B={block_size} 整除")
        if on_fail != "truncate":
            raise ReductionInputError(f"未知的余数策略: {on_fail}")
        logger.warning(f"丢弃尾部 {remainder} 个约束")

    packed_predicate = PredicateSpec.tkm(params.k, m_blocks)
    constraints: List[Constraint] = []
    provenance: List[Tuple[int, ...]] = []
    for block in range(formula.m // block_size):
        chosen: List[int] = []
        used: set = set()
        for position in range(block * block_size, (block + 1) * block_size):
            if len(chosen) >= m_blocks:
                break
            indices = formula.constraints[position].signed_tuple.indices
            if used.isdisjoint(indices):
                chosen.append(position)
                used.update(indices)
        if len(chosen) < m_blocks:
            logger.info(f"分块 {block} 只选出 {len(chosen)}/{m_blocks} 个不相交约束，返回 satisfiable")
            return PackResult(verdict="satisfiable", failed_block=block, dropped=remainder)

        entries = [entry for position in chosen for entry in formula.constraints[position].signed_tuple.entries]
        constraints.append(Constraint.trusted(packed_predicate, SignedTuple.trusted(entries)))
        provenance.append(tuple(chosen))

    logger.info(f"打包完成: {formula.m} 个 SAT_{params.k} 约束 → {len(constraints)} 个 {packed_predicate.label} 约束")
    return PackResult(formula=Formula.trusted(formula.n, constraints), provenance=tuple(provenance), dropped=remainder)


def _tkm_shape(formula: Formula, allow_negated: bool) -> Optional[Tuple[int, int]]:
    shape = None
    allowed = ("tkm", "not_tkm") if allow_negated else ("tkm",)
    for position, constraint in enumerate(formula.constraints, start=1):
        predicate = constraint.predicate
        if predicate.kind not in allowed:
            raise ReductionInputError(f"第 {position} 个约束的谓词 {predicate.label} 不被接受")
        if shape is None:
            shape = (predicate.k, predicate.m)
        elif (predicate.k, predicate.m) != shape:
            raise ArityMismatchError(f"第 {position} 个约束的 (K,M)=({predicate.k},{predicate.m}) 与 {shape} 不一致")
    return shape


def negate_half(formula: Formula, rng: np.random.Generator, condition_on: Optional[Assignment] = None) -> Formula:
    """每个 T 约束以 1/2 概率替换为新抽取的 ¬T 约束(先抛硬币，再抽元组)

    Args:
        formula: T_{K,M} 公式
        rng: 随机数生成器
        condition_on: 给定时新元组在该赋值满足的条件下抽取

    Returns:
        (T,¬T) 混合公式
    """
    shape = _tkm_shape(formula, allow_negated=False)
    if shape is None:
        return formula
    if condition_on is not None and condition_on.n != formula.n:
        raise MalformedInstanceError(f"条件赋值长度 {condition_on.n} 与变量数 {formula.n} 不一致")

    negated = PredicateSpec.not_tkm(*shape)
    constraints = []
    flips = 0
    for constraint in formula.constraints:
        if rng.integers(0, 2) == 1:
            flips += 1
            if condition_on is None:
                constraints.append(Constraint.trusted(negated, random_tuple(formula.n, negated.arity, rng)))
            else:
                constraints.append(planted_constraint(formula.n, negated, condition_on, rng)[0])
        else:
            constraints.append(constraint)
    logger.debug(f"随机取反: {flips}/{formula.m} 个约束替换为 {negated.label}")
    return Formula.trusted(formula.n, constraints)


class TupleSample(BaseModel):
    """元组实例上的样本 ((x₁,y₁),…)"""

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1, description="变量数")
    k: int = Field(..., ge=1, description="K")
    m_blocks: int = Field(..., ge=1, description="M")
    tuples: Tuple[SignedTuple, ...] = Field(default=())
    labels: Tuple[int, ...] = Field(default=())

    @model_validator(mode="after")
    def _check_lengths(self) -> "TupleSample":
        if len(self.tuples) != len(self.labels):
            raise MalformedInstanceError(f"元组数 {len(self.tuples)} 与标签数 {len(self.labels)} 不一致")
        return self

    @property
    def arity(self) -> int:
        return self.k * self.m_blocks

    @property
    def m(self) -> int:
        return len(self.labels)

    def arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        """(符号矩阵, 下标矩阵)，形状均为 (m, arity)"""
        entries = np.asarray([t.entries for t in self.tuples], dtype=np.int64).reshape(self.m, self.arity, 2)
        return entries[:, :, 0], entries[:, :, 1]

    def to_boolean(self) -> LabeledSample:
        """用 g 映射把元组实例嵌入 {±1}^{2·K·M·n}"""
        signs, indices = self.arrays()
        instances = g_map_batch(signs, indices, self.n)
        return LabeledSample(dim=2 * self.arity * self.n, instances=instances,
                             labels=np.asarray(self.labels, dtype=np.uint8))


def formula_to_sample(formula: Formula, shape: Optional[Tuple[int, int]] = None) -> TupleSample:
    """¬T 约束 → (x, 1)，T 约束 → (x, 0)

    Args:
        formula: (T,¬T) 混合公式
        shape: (K, M)，空公式只能从这里得到；缺省时空公式记为 (1, 1)

    Raises:
        ArityMismatchError: 约束的 (K,M) 不一致，或与 shape 不一致
    """
    found = _tkm_shape(formula, allow_negated=True)
    if found is not None and shape is not None and tuple(shape) != found:
        raise ArityMismatchError(f"公式的 (K,M)={found} 与给定的 {tuple(shape)} 不一致")
    k, m_blocks = found or shape or (1, 1)
    return TupleSample(
        n=formula.n,
        k=k,
        m_blocks=m_blocks,
        tuples=tuple(c.signed_tuple for c in formula.constraints),
        labels=tuple(int(c.predicate.kind == "not_tkm") for c in formula.constraints),
    )


def sample_to_formula(sample: TupleSample) -> Formula:
    """formula_to_sample 的逆"""
    tkm = PredicateSpec.tkm(sample.k, sample.m_blocks)
    not_tkm = tkm.negated()
    constraints = [
        Constraint(predicate=not_tkm if label == 1 else tkm, signed_tuple=x)
        for x, label in zip(sample.tuples, sample.labels)
    ]
    return Formula(n=sample.n, constraints=constraints)


class PipelineResult(BaseModel):
    """full_pipeline 各阶段的产物"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    params: ReductionParams
    source: Formula
    planted: Optional[Assignment] = None
    pack: PackResult
    mixed: Optional[Formula] = None
    tuple_sample: Optional[TupleSample] = None
    sample: Optional[LabeledSample] = None

    @property
    def verdict(self) -> Optional[EarlyVerdict]:
        return self.pack.verdict


def full_pipeline(
    formula: Formula,
    params: ReductionParams,
    rng: np.random.Generator,
    condition_on: Optional[Assignment] = None,
    on_fail: RemainderPolicy = "strict",
) -> PipelineResult:
    """pack_blocks → negate_half → formula_to_sample → g 映射

    Returns:
        提前判定时只含 pack；否则含布尔样本(维度 2·K·M·n)
    """
    logger.info(f"运行归约流水线: n={formula.n}, m={formula.m}, 参数 {params.to_flag()}")
    params.check_feasibility()
    pack = pack_blocks(formula, params, on_fail=on_fail)
    if pack.early:
        return PipelineResult(params=params, source=formula, planted=condition_on, pack=pack)

    mixed = negate_half(pack.formula, rng, condition_on=condition_on)
    tuple_sample = formula_to_sample(mixed, shape=(params.k, params.m_blocks))
    return PipelineResult(
        params=params,
        source=formula,
        planted=condition_on,
        pack=pack,
        mixed=mixed,
        tuple_sample=tuple_sample,
        sample=tuple_sample.to_boolean(),
    )


def planted_pipeline(
    n: int,
    m: int,
    params: ReductionParams,
    rng: np.random.Generator,
    conditioned: bool = True,
) -> PipelineResult:
    """种植侧: 抽 ψ，生成 ψ 满足的 SAT_K 公式后运行流水线

    conditioned 为 True 时取反步骤在 ψ 存活的条件下抽取新元组。
    """
    psi = random_assignment(n, rng)
    formula = planted_formula(n, m, PredicateSpec.sat(params.k), psi, rng)
    result = full_pipeline(formula, params, rng, condition_on=psi if conditioned else None)
    return result.model_copy(update={"planted": psi})


def random_pipeline(n: int, m: int, params: ReductionParams, rng: np.random.Generator) -> PipelineResult:
    """随机侧: 均匀随机 SAT_K 公式"""
    formula = random_formula(n, m, PredicateSpec.sat(params.k), rng)
    return full_pipeline(formula, params, rng)


def packed_pipeline(
    n: int,
    m: int,
    params: ReductionParams,
    rng: np.random.Generator,
    planted: bool,
    conditioned: bool = True,
    max_attempts: int = 100,
) -> Tuple[PipelineResult, int]:
    """重复生成实例直到打包成功，即在流水线到达采样步骤的条件下取样本

    Returns:
        (流水线结果, 生成次数)

    Raises:
        ReductionInputError: max_attempts 次都提前返回
    """
    for attempt in range(1, max_attempts + 1):
        if planted:
            result = planted_pipeline(n, m, params, rng, conditioned=conditioned)
        else:
            result = random_pipeline(n, m, params, rng)
        if not result.pack.early:
            return result, attempt
        logger.debug(f"第 {attempt} 次打包在分块 {result.pack.failed_block} 提前返回，重新生成")
    logger.error(f"{max_attempts} 次生成都在打包阶段提前返回")
    raise ReductionInputError(f"参数 {params.to_flag()} 下 {max_attempts} 次打包均提前返回")


# 统计检查

def label_independence_pvalue(sample: LabeledSample) -> float:
    """标签与实例独立性检验，返回 Bonferroni 校正后的最小 p 值

    样本须在 g 映射的像中: 每行恰有 arity 个 −1，第 j 个落在第 j 段(宽 2n)内，
    段内位置即第 j 个文字的 (符号, 下标)。对每个位置做 标签 × 段内位置 的卡方独立性检验。

    Raises:
        MalformedInstanceError: 样本不在 g 映射的像中
    """
    if sample.m == 0:
        return 1.0
    minus = sample.instances == -1
    arity = int(minus[0].sum())
    if arity == 0 or sample.dim % arity or not (minus.sum(axis=1) == arity).all():
        raise MalformedInstanceError("样本不在 g 映射的像中，无法按元组位置检验")
    width = sample.dim // arity
    labels = sample.labels.astype(np.int64)
    pvalues = []
    for position in range(arity):
        segment = minus[:, position * width:(position + 1) * width]
        if not segment.any(axis=1).all():
            raise MalformedInstanceError(f"第 {position + 1} 段缺少 −1 坐标")
        table = np.zeros((2, width), dtype=np.int64)
        np.add.at(table, (labels, segment.argmax(axis=1)), 1)
        pvalues.append(chi_square_independence(table))
    return min(1.0, min(pvalues) * arity)


def packed_marginal_pvalue(pack: PackResult, n: int) -> float:
    """打包元组各位置 (符号, 下标) 边缘分布的均匀性检验，返回 Bonferroni 校正后的最小 p 值"""
    if pack.formula is None or pack.formula.m == 0:
        return 1.0
    entries = np.asarray([c.signed_tuple.entries for c in pack.formula.constraints], dtype=np.int64)
    arity = entries.shape[1]
    pvalues = []
    for position in range(arity):
        category = (entries[:, position, 0] == -1) * n + entries[:, position, 1] - 1
        pvalues.append(chi_square_uniformity(np.bincount(category, minlength=2 * n)))
    return min(1.0, min(pvalues) * arity)
