"""
随机数状态
所有随机操作都显式接收 numpy Generator；RngState 负责种子与按试验派生

抽取顺序约定:
    元组 = 下标选择(部分 Fisher–Yates，每个位置一个有界整数，一次抽成向量) 然后符号(一个向量)
    混合/取反约束 = 先抽极性硬币，再抽元组
"""

from typing import Callable, List, Tuple, TypeVar

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

T = TypeVar("T")

SEED_LIMIT = 2 ** 64


class RngState(BaseModel):
    """可复现的随机状态: (seed, spawn_key) 决定全部输出"""

    model_config = ConfigDict(frozen=True)

    seed: int = Field(..., ge=0, lt=SEED_LIMIT, description="64 位种子")
    spawn_key: Tuple[int, ...] = Field(default=(), description="派生路径(如试验编号)")

    def generator(self) -> np.random.Generator:
        """构造新的 Generator(每次调用都从头开始)"""
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=self.spawn_key)
        return np.random.Generator(np.random.PCG64(sequence))

    def derive(self, *keys: int) -> "RngState":
        """派生独立子状态，例如 derive(trial_index)"""
        return RngState(seed=self.seed, spawn_key=self.spawn_key + tuple(int(k) for k in keys))

    def describe(self) -> str:
        if not self.spawn_key:
            return str(self.seed)
        return f"{self.seed}/{'.'.join(str(k) for k in self.spawn_key)}"


def make_rng(seed: int) -> np.random.Generator:
    """由整数种子直接构造 Generator"""
    return RngState(seed=seed).generator()


def run_trials(seed: int, trials: int, fn: Callable[[int, np.random.Generator], T]) -> List[T]:
    """按 (seed, 试验编号) 派生状态依次运行试验，结果与调度无关

    Args:
        seed: 基础种子
        trials: 试验次数
        fn: 试验函数 fn(trial_index, rng)

    Returns:
        每次试验的结果
    """
    base = RngState(seed=seed)
    return [fn(t, base.derive(t).generator()) for t in range(trials)]
