"""
归约参数配置
打包/取反/采样流水线使用的 K、M、B 参数及预设
"""

import math
from typing import Optional

from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, model_validator


class ReductionParams(BaseModel):
    """归约参数

    K 为子句宽度，M 为每个打包约束包含的子句数，B 为每个分块的约束数。
    """

    model_config = ConfigDict(frozen=True)

    k: int = Field(..., ge=1, description="SAT_K 的子句宽度 K")
    m_blocks: int = Field(..., ge=1, description="T_{K,M} 中的块数 M")
    block_size: int = Field(..., ge=1, description="每个分块的约束数 B")
    exponent_d: Optional[int] = Field(default=None, ge=1, description="约束数 n^d 中的指数 d(仅记录)")

    @model_validator(mode="after")
    def _check_block_size(self) -> "ReductionParams":
        if self.block_size < self.m_blocks:
            raise ValueError(f"分块大小 B={self.block_size} 小于 M={self.m_blocks}")
        return self

    @property
    def arity(self) -> int:
        """打包约束的元数 K·M"""
        return self.k * self.m_blocks

    @classmethod
    def parse(cls, text: str) -> "ReductionParams":
        """解析命令行形式 "K,M,B" """
        parts = [p.strip() for p in text.split(",") if p.strip()]
        if len(parts) != 3:
            raise ValueError(f"参数格式应为 K,M,B: {text!r}")
        k, m, b = (int(p) for p in parts)
        return cls(k=k, m_blocks=m, block_size=b)

    def to_flag(self) -> str:
        """转回 "K,M,B" 形式"""
        return f"{self.k},{self.m_blocks},{self.block_size}"

    def feasibility_bound(self) -> float:
        """桌面规模可行性上界 ⌊B/(2K)⌋ / 2^{K+1}"""
        return (self.block_size // (2 * self.k)) / 2 ** (self.k + 1)

    def is_feasible(self) -> bool:
        """M 是否落在集中性可以保证打包成功的区间"""
        return self.m_blocks <= self.feasibility_bound()

    def check_feasibility(self) -> bool:
        """检查可行性，不满足时只告警"""
        feasible = self.is_feasible()
        if not feasible:
            logger.warning(
                f"参数 K={self.k}, M={self.m_blocks}, B={self.block_size} 超出集中区间 "
                f"(M ≤ {self.feasibility_bound():.4g})，打包可能频繁提前返回"
            )
        return feasible


class ParamPresets:
    """归约参数预设"""

    @staticmethod
    def desk() -> ReductionParams:
        """默认桌面规模: 满足打包保持性检验"""
        return ReductionParams(k=2, m_blocks=2, block_size=64)

    @staticmethod
    def distinguisher() -> ReductionParams:
        """区分器实验: n=8 时的小参数"""
        return ReductionParams(k=2, m_blocks=2, block_size=8)

    @staticmethod
    def survival() -> ReductionParams:
        """取反存活实验: M 足够大使种植赋值大概率存活"""
        return ReductionParams(k=2, m_blocks=64, block_size=256)

    @staticmethod
    def asymptotic(n: int, k: int = 2) -> ReductionParams:
        """渐近选择 M = ⌈n/log₂ n⌉, B = n

        Args:
            n: 变量数
            k: 子句宽度

        Returns:
            归约参数(桌面规模下通常不可行，会告警)
        """
        if n < 2:
            raise ValueError(f"n 必须 ≥ 2: {n}")
        params = ReductionParams(k=k, m_blocks=math.ceil(n / math.log2(n)), block_size=n)
        params.check_feasibility()
        return params
