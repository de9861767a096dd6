"""
分散性与区分器
样本与经验误差、分散性界(Hoeffding / Linial–Luria)、分散性经验检验，
以及"运行学习器并对经验误差取阈值"的区分器
"""

import math
from fractions import Fraction
from typing import Callable, Dict, List, Literal, Optional, Protocol, Sequence, Tuple, runtime_checkable

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import special, stats

from config import settings
from utils.stats import three_sigma_upper
from .exceptions import CapExceededError, DomainError, LearnerFailure, MalformedInstanceError
from .rng import RngState

Verdict = Literal["realizable", "unrealizable"]
BoundMode = Literal["kl", "quadratic"]

# 区分器固定的置信参数 δ
DISTINGUISHER_DELTA = 0.25


class LabeledSample(BaseModel):
    """样本 S = ((x₁,y₁),…,(x_m,y_m))，x ∈ {±1}^dim，y ∈ {0,1}"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    dim: int = Field(..., ge=0, description="实例长度")
    instances: np.ndarray = Field(..., description="(m, dim) 的 ±1 int8 数组")
    labels: np.ndarray = Field(..., description="(m,) 的 0/1 uint8 数组")

    @model_validator(mode="after")
    def _check_arrays(self) -> "LabeledSample":
        if self.instances.ndim != 2 or self.instances.shape[1] != self.dim:
            raise MalformedInstanceError(f"实例矩阵形状 {self.instances.shape} 与维度 {self.dim} 不一致")
        if self.labels.shape != (self.instances.shape[0],):
            raise MalformedInstanceError(f"标签个数 {self.labels.shape} 与实例个数 {self.instances.shape[0]} 不一致")
        if self.instances.size and not np.isin(self.instances, (1, -1)).all():
            raise MalformedInstanceError("实例取值必须为 ±1")
        if self.labels.size and not np.isin(self.labels, (0, 1)).all():
            raise MalformedInstanceError("标签必须为 0/1")
        return self

    @classmethod
    def from_arrays(cls, instances, labels, dim: Optional[int] = None) -> "LabeledSample":
        instances = np.asarray(instances, dtype=np.int8)
        if instances.ndim == 1 and instances.size == 0:
            instances = instances.reshape(0, dim or 0)
        return cls(
            dim=instances.shape[1] if dim is None else dim,
            instances=instances,
            labels=np.asarray(labels, dtype=np.uint8).reshape(-1),
        )

    @property
    def m(self) -> int:
        return int(self.labels.shape[0])

    def covers_domain(self) -> bool:
        """样本是否覆盖 {±1}^dim 的全部点"""
        if self.dim > 62:
            return False
        return np.unique(self.instances, axis=0).shape[0] == 2 ** self.dim

    def label_counts(self) -> Dict[int, int]:
        return {0: int((self.labels == 0).sum()), 1: int((self.labels == 1).sum())}


@runtime_checkable
class Hypothesis(Protocol):
    """可在任意 dim 长实例上求值的假设"""

    def predict(self, instances: np.ndarray) -> np.ndarray:
        ...


class ConstantHypothesis:
    """常值假设"""

    def __init__(self, label: int):
        self.label = int(label)

    def predict(self, instances: np.ndarray) -> np.ndarray:
        return np.full(np.asarray(instances).shape[0], self.label, dtype=np.uint8)


class FunctionHypothesis:
    """把逐行函数或批函数包装成假设"""

    def __init__(self, fn: Callable[[np.ndarray], np.ndarray], batched: bool = True):
        self.fn = fn
        self.batched = batched

    def predict(self, instances: np.ndarray) -> np.ndarray:
        instances = np.asarray(instances)
        if self.batched:
            return np.asarray(self.fn(instances), dtype=np.uint8)
        return np.asarray([self.fn(row) for row in instances], dtype=np.uint8)


class ComplementHypothesis:
    """1 − h"""

    def __init__(self, inner: Hypothesis):
        self.inner = inner

    def predict(self, instances: np.ndarray) -> np.ndarray:
        return (1 - self.inner.predict(instances)).astype(np.uint8)


class TableHypothesis:
    """{±1}^dim 上的真值表假设，表下标第 j 位为 1 当且仅当 x_{j+1} = +1"""

    def __init__(self, table: np.ndarray):
        self.table = np.asarray(table, dtype=np.uint8)
        self.dim = int(self.table.size).bit_length() - 1
        if 2 ** self.dim != self.table.size:
            raise DomainError(f"真值表长度 {self.table.size} 不是 2 的幂")

    def predict(self, instances: np.ndarray) -> np.ndarray:
        bits = (np.asarray(instances) == 1).astype(np.int64)
        return self.table[bits @ (1 << np.arange(self.dim, dtype=np.int64))]


def random_table_hypotheses(count: int, dim: int, rng: np.random.Generator) -> List[TableHypothesis]:
    """抽取 count 个均匀随机的真值表假设"""
    if dim > settings.exhaustive_check_cap:
        raise CapExceededError(f"维度 {dim} 超出穷举上限 {settings.exhaustive_check_cap}")
    return [TableHypothesis(rng.integers(0, 2, size=2 ** dim, dtype=np.uint8)) for _ in range(count)]


def mistakes(h: Hypothesis, sample: LabeledSample) -> int:
    predictions = np.asarray(h.predict(sample.instances)).reshape(-1)
    return int((predictions != sample.labels).sum())


def empirical_error(h: Hypothesis, sample: LabeledSample) -> Fraction:
    """Err_S(h) = (1/m)·Σ 1(h(x_i) ≠ y_i)，精确有理数"""
    if sample.m == 0:
        raise DomainError("空样本的经验误差无定义")
    return Fraction(mistakes(h, sample), sample.m)


def mistake_budget(beta: float, m: int) -> int:
    """Err ≤ β 等价于错误数 ≤ ⌊β·m⌋(按 β 的精确二进制值)"""
    return math.floor(Fraction(beta) * m)


# 分散性参数与界

class ScatterParams(BaseModel):
    """(p, β)-分散: 任一固定假设经验误差 ≤ β 的概率 ≤ 2^{−p}"""

    model_config = ConfigDict(frozen=True)

    p: float = Field(..., gt=0, description="分散比特数")
    beta: float = Field(..., gt=0, lt=1, description="误差阈值 β")

    def tail_bound(self) -> float:
        return 2.0 ** -self.p


def hoeffding_scatter(m: int, beta: float = 0.25) -> ScatterParams:
    """均匀标签样本是 (2(1/2−β)²·m, β)-分散的，β = 1/4 时即 (m/8, 1/4)

    Hoeffding: Pr(Err_S(h) ≤ β) ≤ exp(−2(1/2−β)²·m) ≤ 2^{−2(1/2−β)²·m}。

    Raises:
        DomainError: m < 1 或 β 不在 (0, 1/2)
    """
    if m < 1:
        raise DomainError(f"样本量必须 ≥ 1: {m}")
    if not 0 < beta < 0.5:
        raise DomainError(f"Hoeffding 分散界需要 0 < β < 1/2: {beta}")
    return ScatterParams(p=2 * (0.5 - beta) ** 2 * m, beta=beta)


def kl_divergence(beta: float, alpha: float) -> float:
    """二元 KL 散度 D(β‖α)，自然对数"""
    if not (0 <= alpha <= 1 and 0 <= beta <= 1):
        raise DomainError(f"概率参数越界: α={alpha}, β={beta}")
    return float(special.rel_entr(beta, alpha) + special.rel_entr(1 - beta, 1 - alpha))


def linial_luria_bound(alpha: float, beta: float, n: int, mode: BoundMode = "kl") -> float:
    """上尾概率界

    kl 模式返回 exp(−D(β‖α)·n)，quadratic 模式返回 exp(−2(β−α)²·n)；恒有 kl ≤ quadratic。

    Raises:
        DomainError: 不满足 0 ≤ α < β ≤ 1 或 n < 0
    """
    if not 0 <= alpha < beta <= 1:
        logger.error(f"Linial–Luria 界参数越界: α={alpha}, β={beta}")
        raise DomainError(f"需要 0 ≤ α < β ≤ 1: α={alpha}, β={beta}")
    if n < 0:
        raise DomainError(f"n 必须 ≥ 0: {n}")
    if mode == "kl":
        return math.exp(-kl_divergence(beta, alpha) * n)
    if mode == "quadratic":
        return math.exp(-2 * (beta - alpha) ** 2 * n)
    raise DomainError(f"未知模式: {mode}")


def packing_failure_bound(k: int, n: int, coarse: bool = False) -> float:
    """打包在单个分块提前返回的概率上界

    精细形式 exp(−2(2^{−(K+1)})²·⌊n/2K⌋)，粗略形式 exp(−(1/(2^{2K+5}K))²·n)。
    """
    if k < 1 or n < 0:
        raise DomainError(f"参数越界: K={k}, n={n}")
    if coarse:
        return math.exp(-((1 / (2 ** (2 * k + 5) * k)) ** 2) * n)
    alpha = 1 - 2.0 ** -k
    return linial_luria_bound(alpha, alpha + 2.0 ** -(k + 1), n // (2 * k), mode="quadratic")


def binomial_tail(m: int, beta: float) -> float:
    """固定假设在均匀标签样本上 Err_S ≤ β 的精确概率 Pr(Bin(m,1/2) ≤ ⌊βm⌋)"""
    if m < 1:
        raise DomainError(f"样本量必须 ≥ 1: {m}")
    return float(stats.binom.cdf(mistake_budget(beta, m), m, 0.5))


# 分散性经验检验

class SampleBatch(BaseModel):
    """一批样本: instances (count, m, dim)，labels (count, m)"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    instances: np.ndarray
    labels: np.ndarray

    @property
    def count(self) -> int:
        return int(self.labels.shape[0])

    @property
    def m(self) -> int:
        return int(self.labels.shape[1])


BatchSampler = Callable[[int, np.random.Generator], SampleBatch]


def uniform_label_sampler(m: int, dim: int) -> BatchSampler:
    """实例与标签都均匀独立的采样器(先抽实例，再抽标签)"""

    def sample(count: int, rng: np.random.Generator) -> SampleBatch:
        instances = (1 - 2 * rng.integers(0, 2, size=(count, m, dim), dtype=np.int8)).astype(np.int8)
        labels = rng.integers(0, 2, size=(count, m), dtype=np.uint8)
        return SampleBatch(instances=instances, labels=labels)

    return sample


def realizable_sampler(m: int, dim: int, h: Hypothesis) -> BatchSampler:
    """实例均匀、标签由 h 给出的采样器"""

    def sample(count: int, rng: np.random.Generator) -> SampleBatch:
        instances = (1 - 2 * rng.integers(0, 2, size=(count, m, dim), dtype=np.int8)).astype(np.int8)
        labels = np.asarray(h.predict(instances.reshape(-1, dim)), dtype=np.uint8).reshape(count, m)
        return SampleBatch(instances=instances, labels=labels)

    return sample


class ScatterReport(BaseModel):
    """分散性检验结果"""

    trials: int
    m: int
    beta: float
    params: ScatterParams
    hits: List[int] = Field(..., description="每个假设 Err_S ≤ β 的次数")
    frequencies: List[float]
    bound: float = Field(..., description="单个假设的容许频率 2^{−p}")
    threshold: float = Field(..., description="加 3σ 后的判定阈值")
    flagged: List[int] = Field(..., description="超出阈值的假设编号")
    any_hits: int = Field(..., description="至少一个假设 Err_S ≤ β 的次数")
    union_bound: float = Field(..., description="min(1, |H|·2^{−p})")
    union_flagged: bool

    @property
    def passed(self) -> bool:
        return not self.flagged and not self.union_flagged


def empirical_scatter_check(
    sampler: BatchSampler,
    hypotheses: Sequence[Hypothesis],
    beta: float,
    trials: int,
    rng: np.random.Generator,
    params: Optional[ScatterParams] = None,
    chunk: Optional[int] = None,
) -> ScatterReport:
    """对给定的有限假设列表检验分散性

    统计每个假设在多少次试验中 Err_S ≤ β，并与 2^{−p}(加 3σ 容差)比较；
    同时检查"任一假设命中"的频率不超过联合界 |H|·2^{−p}。

    Args:
        sampler: 批采样器
        hypotheses: 假设列表
        beta: 误差阈值
        trials: 试验次数
        rng: 随机数生成器
        params: 分散参数，默认按 hoeffding_scatter(m, beta)
        chunk: 每批试验数，默认 settings.scatter_chunk

    Returns:
        ScatterReport
    """
    if trials < 1:
        raise DomainError(f"试验次数必须 ≥ 1: {trials}")
    if not hypotheses:
        raise DomainError("假设列表不能为空")
    step = chunk or settings.scatter_chunk

    hits = np.zeros(len(hypotheses), dtype=np.int64)
    any_hits = 0
    m = None
    done = 0
    while done < trials:
        size = min(step, trials - done)
        batch = sampler(size, rng)
        m = batch.m
        dim = batch.instances.shape[-1]
        flat = batch.instances.reshape(-1, dim)
        budget = mistake_budget(beta, m)
        hit_any = np.zeros(size, dtype=bool)
        for position, h in enumerate(hypotheses):
            predictions = np.asarray(h.predict(flat), dtype=np.uint8).reshape(size, m)
            hit = (predictions != batch.labels).sum(axis=1) <= budget
            hits[position] += int(hit.sum())
            hit_any |= hit
        any_hits += int(hit_any.sum())
        done += size
        logger.debug(f"分散性检验进度: {done}/{trials}")

    params = params or hoeffding_scatter(m, beta)
    bound = params.tail_bound()
    threshold = three_sigma_upper(bound, trials)
    frequencies = (hits / trials).tolist()
    flagged = [i for i, freq in enumerate(frequencies) if freq > threshold]
    union_bound = min(1.0, len(hypotheses) * bound)
    union_flagged = any_hits / trials > three_sigma_upper(union_bound, trials)

    if flagged or union_flagged:
        logger.warning(f"分散性检验: {len(flagged)} 个假设超出阈值 {threshold:.3g}")
    return ScatterReport(
        trials=trials, m=m, beta=beta, params=params, hits=hits.tolist(), frequencies=frequencies,
        bound=bound, threshold=threshold, flagged=flagged, any_hits=any_hits,
        union_bound=union_bound, union_flagged=union_flagged,
    )


# 学习器接口与区分器

class ResourceMeter(BaseModel):
    """学习器资源计量"""

    examples_drawn: int = 0
    evaluations: int = 0
    hypotheses_considered: int = 0


class ExampleOracle:
    """从样本中有放回均匀抽取样例的预言机"""

    def __init__(self, sample: LabeledSample, rng: np.random.Generator, meter: Optional[ResourceMeter] = None):
        if sample.m == 0:
            raise DomainError("预言机需要非空样本")
        self.sample = sample
        self.rng = rng
        self.meter = meter or ResourceMeter()

    @property
    def dim(self) -> int:
        return self.sample.dim

    def draw(self, count: int) -> Tuple[np.ndarray, np.ndarray]:
        """抽取 count 个样例，返回 (实例, 标签)"""
        picks = self.rng.integers(0, self.sample.m, size=count)
        self.meter.examples_drawn += count
        return self.sample.instances[picks], self.sample.labels[picks]

    def exhaust(self) -> Tuple[np.ndarray, np.ndarray]:
        """读取整个支撑集(参考学习器使用)，计为 m 次抽取"""
        self.meter.examples_drawn += self.sample.m
        return self.sample.instances, self.sample.labels


@runtime_checkable
class LearnerInterface(Protocol):
    """学习器: 给定预言机与 (ε, δ, 实例长度) 返回假设"""

    name: str

    def learn(self, oracle: ExampleOracle, epsilon: float, delta: float, dim: int) -> Hypothesis:
        ...


class DistinguisherResult(BaseModel):
    """区分器输出"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    verdict: Verdict
    empirical_error: Fraction
    beta: float
    meter: ResourceMeter


def distinguisher(
    sample: LabeledSample,
    learner: LearnerInterface,
    beta: float,
    rng: np.random.Generator,
    delta: float = DISTINGUISHER_DELTA,
) -> DistinguisherResult:
    """以 (β, δ) 运行学习器，Err_S(h) ≤ β 时判 "realizable"

    Raises:
        DomainError: 空样本或 β 越界
        LearnerFailure: 学习器内部异常
        CapExceededError: 学习器拒绝超上限的输入
    """
    if not 0 < beta < 1:
        raise DomainError(f"β 必须在 (0,1) 内: {beta}")
    oracle = ExampleOracle(sample, rng)
    try:
        hypothesis = learner.learn(oracle, beta, delta, sample.dim)
    except (LearnerFailure, CapExceededError):
        raise
    except Exception as e:
        logger.error(f"学习器 {learner.name} 运行失败: {e}")
        raise LearnerFailure(learner.name, str(e)) from e

    error = empirical_error(hypothesis, sample)
    oracle.meter.evaluations += sample.m
    verdict: Verdict = "realizable" if error <= beta else "unrealizable"
    logger.debug(f"区分器: 学习器={learner.name}, Err_S={float(error):.4f}, β={beta}, 判定={verdict}")
    return DistinguisherResult(verdict=verdict, empirical_error=error, beta=beta, meter=oracle.meter)


class TrialRow(BaseModel):
    trial: int
    verdict: Verdict
    empirical_error: float
    examples_drawn: int


class TrialSummary(BaseModel):
    """多次试验的判定统计"""

    learner: str
    beta: float
    seed: int
    rows: List[TrialRow]

    @property
    def trials(self) -> int:
        return len(self.rows)

    def count(self, verdict: Verdict) -> int:
        return sum(1 for row in self.rows if row.verdict == verdict)

    def fraction(self, verdict: Verdict) -> float:
        return self.count(verdict) / self.trials if self.rows else 0.0

    def majority(self) -> Verdict:
        return "realizable" if self.count("realizable") * 2 >= self.trials else "unrealizable"


def run_distinguisher_trials(
    sample_fn: Callable[[int, np.random.Generator], LabeledSample],
    learner: LearnerInterface,
    beta: float,
    seed: int,
    trials: int,
) -> TrialSummary:
    """每次试验由 (seed, 试验编号) 派生状态，先生成样本再运行区分器"""
    base = RngState(seed=seed)
    rows = []
    for trial in range(trials):
        rng = base.derive(trial).generator()
        sample = sample_fn(trial, rng)
        result = distinguisher(sample, learner, beta, rng)
        rows.append(TrialRow(
            trial=trial,
            verdict=result.verdict,
            empirical_error=float(result.empirical_error),
            examples_drawn=result.meter.examples_drawn,
        ))
    summary = TrialSummary(learner=learner.name, beta=beta, seed=seed, rows=rows)
    logger.info(
        f"区分器试验完成: {trials} 次, realizable {summary.count('realizable')}, "
        f"unrealizable {summary.count('unrealizable')}"
    )
    return summary
