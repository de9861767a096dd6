"""
DNF 的自动机实现
把 c 个子句、n 个变量的 DNF 构造成读入 c 份输入拷贝的确定有限自动机，状态数 ≤ 2cn+1
"""

from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .exceptions import DomainError, MalformedInstanceError
from .realization import DnfFormula

PLUS, MINUS = 0, 1


class Dfa(BaseModel):
    """二元字母表 {+1,−1} 上的 DFA

    transitions[q] = (读 +1 后的状态, 读 −1 后的状态)
    """

    model_config = ConfigDict(frozen=True)

    transitions: Tuple[Tuple[int, int], ...] = Field(..., description="转移表")
    start: int = Field(default=0, ge=0, description="初始状态")
    accepting: Tuple[bool, ...] = Field(..., description="各状态是否接受")
    sink: Optional[int] = Field(default=None, description="接受吸收态")

    @model_validator(mode="after")
    def _check_table(self) -> "Dfa":
        count = len(self.transitions)
        if count == 0:
            raise MalformedInstanceError("DFA 至少需要一个状态")
        if len(self.accepting) != count:
            raise MalformedInstanceError(f"接受标记数 {len(self.accepting)} 与状态数 {count} 不一致")
        if not 0 <= self.start < count:
            raise MalformedInstanceError(f"初始状态 {self.start} 超出范围")
        for state, successors in enumerate(self.transitions):
            for target in successors:
                if not 0 <= target < count:
                    raise MalformedInstanceError(f"状态 {state} 的后继 {target} 超出范围")
        if self.sink is not None:
            if not 0 <= self.sink < count:
                raise MalformedInstanceError(f"吸收态 {self.sink} 超出范围")
            if not self.accepting[self.sink] or self.transitions[self.sink] != (self.sink, self.sink):
                raise MalformedInstanceError(f"吸收态 {self.sink} 必须接受且对两个符号自环")
        return self

    @property
    def n_states(self) -> int:
        return len(self.transitions)

    def table(self) -> np.ndarray:
        """(状态数, 2) 的转移矩阵"""
        return np.asarray(self.transitions, dtype=np.int64).reshape(self.n_states, 2)

    @staticmethod
    def state_bound(clauses: int, n_vars: int) -> int:
        """dnf_to_dfa 的状态数上界 2cn+1"""
        return 2 * clauses * n_vars + 1


def replicate_input(x: Sequence[int], copies: int) -> np.ndarray:
    """c 份 x 首尾相接"""
    if copies < 0:
        raise DomainError(f"拷贝数必须 ≥ 0: {copies}")
    return np.tile(np.asarray(x, dtype=np.int8), copies)


def dereplicate(word: Sequence[int], copies: int) -> np.ndarray:
    """replicate_input 的逆；各份不一致时报错"""
    if copies < 1:
        raise DomainError(f"拷贝数必须 ≥ 1: {copies}")
    word = np.asarray(word, dtype=np.int8)
    if word.size % copies:
        raise MalformedInstanceError(f"长度 {word.size} 不能被拷贝数 {copies} 整除")
    parts = word.reshape(copies, -1)
    if not (parts == parts[0]).all():
        raise MalformedInstanceError("各份拷贝不一致")
    return parts[0].copy()


def _clause_requirements(clause: Sequence[Tuple[int, int]]) -> Dict[int, Optional[int]]:
    """变量 → 要求的取值；同时出现正负文字的变量记为 None(恒违反)"""
    required: Dict[int, Optional[int]] = {}
    for sign, var in clause:
        required[var] = sign if var not in required else (sign if required[var] == sign else None)
    return required


def dnf_to_dfa(formula: DnfFormula, strict: bool = False) -> Dfa:
    """把 DNF 构造成 DFA，使 run_dfa(A, replicate_input(x, c)) = eval_dnf(f, x)

    第 t 段输入检查第 t 个子句；每个位置两个状态(尚未违反/已违反)。
    干净地读完一段跳到接受吸收态；所有子句都违反时停在拒绝态。

    Args:
        formula: c 个子句、n 个变量的 DNF
        strict: 为 True 时要求 c ≤ n

    Returns:
        状态数 ≤ 2cn+1 的 DFA
    """
    c, n = formula.clause_count, formula.n_vars
    if strict and c > n:
        raise DomainError(f"严格模式要求子句数 c={c} ≤ 变量数 n={n}")

    if c == 0:
        return Dfa(transitions=((0, 0),), accepting=(False,), sink=None)
    if n == 0:
        return Dfa(transitions=((0, 0),), accepting=(True,), sink=0)

    def state(t: int, i: int, violated: bool) -> int:
        return 1 + 2 * (t * n + i) + int(violated)

    sink = 0
    transitions = [(sink, sink)] + [(0, 0)] * (2 * c * n)
    accepting = [True] + [False] * (2 * c * n)

    for t, clause in enumerate(formula.clauses):
        required = _clause_requirements(clause)
        for i in range(n):
            need = required.get(i + 1, 0)
            for violated in (False, True):
                successors = []
                for symbol in (1, -1):
                    now_violated = violated or (need is None) or (need != 0 and need != symbol)
                    if i + 1 < n:
                        successors.append(state(t, i + 1, now_violated))
                    elif not now_violated:
                        successors.append(sink)
                    elif t + 1 < c:
                        successors.append(state(t + 1, 0, False))
                    else:
                        # 最后一段违反后自环拒绝
                        successors.append(state(c - 1, n - 1, True))
                transitions[state(t, i, violated)] = tuple(successors)

    dfa = Dfa(transitions=tuple(transitions), start=state(0, 0, False), accepting=tuple(accepting), sink=sink)
    bound = Dfa.state_bound(c, n)
    if dfa.n_states > bound:
        raise MalformedInstanceError(f"构造的 DFA 有 {dfa.n_states} 个状态，超过上界 {bound}")
    logger.debug(f"DNF → DFA: c={c}, n={n}, 状态数 {dfa.n_states}")
    return dfa


def run_dfa(dfa: Dfa, word: Sequence[int]) -> int:
    """运行 DFA，终止状态接受时返回 1"""
    current = dfa.start
    for symbol in word:
        if symbol not in (1, -1):
            raise MalformedInstanceError(f"输入符号必须为 ±1: {symbol}")
        current = dfa.transitions[current][PLUS if symbol == 1 else MINUS]
        if current == dfa.sink:
            return 1
    return int(dfa.accepting[current])


def run_dfa_batch(dfa: Dfa, words: np.ndarray) -> np.ndarray:
    """对形状 (N, L) 的 ±1 词批量运行，返回 uint8"""
    words = np.asarray(words)
    table = dfa.table()
    current = np.full(words.shape[0], dfa.start, dtype=np.int64)
    for column in (words == -1).astype(np.int64).T:
        current = table[current, column]
    return np.asarray(dfa.accepting, dtype=np.uint8)[current]
