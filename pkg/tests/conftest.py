"""
pytest配置文件
定义测试夹具和配置
"""

import itertools
import sys
from pathlib import Path

import numpy as np
import pytest

# 添加项目根目录到Python路径
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from core.csp import Constraint, Formula, PredicateSpec, SignedTuple
from core.generators import planted_formula, random_assignment
from core.realization import DnfFormula
from core.rng import RngState

TEST_SEED = 20240601


@pytest.fixture
def rng_state() -> RngState:
    """固定种子的随机状态"""
    return RngState(seed=TEST_SEED)


@pytest.fixture
def rng(rng_state) -> np.random.Generator:
    """固定种子的随机数生成器"""
    return rng_state.generator()


@pytest.fixture
def small_formula() -> Formula:
    """4 个变量、3 个 SAT_3 约束的手写公式

    (x1 ∨ ¬x2 ∨ x3) ∧ (¬x1 ∨ x2 ∨ x4) ∧ (¬x3 ∨ ¬x4 ∨ x2)
    """
    sat3 = PredicateSpec.sat(3)
    literals = [(1, -2, 3), (-1, 2, 4), (-3, -4, 2)]
    return Formula(
        n=4,
        constraints=[Constraint(predicate=sat3, signed_tuple=SignedTuple.from_literals(lits)) for lits in literals],
    )


@pytest.fixture
def planted_case(rng):
    """n=8 的种植 SAT_2 公式及其种植赋值"""
    psi = random_assignment(8, rng)
    formula = planted_formula(8, 64, PredicateSpec.sat(2), psi, rng)
    return formula, psi


def make_random_dnf(rng: np.random.Generator, n_vars: int, clauses: int, max_width: int = 3) -> DnfFormula:
    """随机 DNF: 每个子句取 0..max_width 个不同变量，符号均匀"""
    result = []
    for _ in range(clauses):
        width = int(rng.integers(0, min(max_width, n_vars) + 1))
        variables = rng.choice(n_vars, size=width, replace=False) + 1
        signs = 1 - 2 * rng.integers(0, 2, size=width)
        result.append(tuple((int(s), int(v)) for s, v in zip(signs, variables)))
    return DnfFormula(n_vars=n_vars, clauses=tuple(result))


@pytest.fixture
def dnf_factory():
    """随机 DNF 构造函数"""
    return make_random_dnf


def enumerate_tuples(n: int, arity: int):
    """X_{n,arity} 的全部元素，返回 (符号矩阵, 下标矩阵)"""
    signs, indices = [], []
    for picks in itertools.permutations(range(1, n + 1), arity):
        for pattern in itertools.product((1, -1), repeat=arity):
            signs.append(pattern)
            indices.append(picks)
    return np.asarray(signs, dtype=np.int8).reshape(-1, arity), np.asarray(indices, dtype=np.int64).reshape(-1, arity)


@pytest.fixture
def tuple_space():
    """带符号元组全集的枚举函数"""
    return enumerate_tuples


@pytest.fixture
def tmp_artifacts(tmp_path) -> Path:
    """临时产物目录"""
    directory = tmp_path / "artifacts"
    directory.mkdir()
    return directory


def pytest_configure(config):
    """pytest配置"""
    # 添加自定义标记
    config.addinivalue_line("markers", "smoke: 冒烟测试")
    config.addinivalue_line("markers", "regression: 回归测试")
    config.addinivalue_line("markers", "slow: 慢速测试")
    config.addinivalue_line("markers", "acceptance: 验收测试")


def pytest_collection_modifyitems(config, items):
    """修改测试项"""
    # 为没有分类标记的测试添加默认标记(parametrize 不算分类)
    categories = {"smoke", "regression", "slow", "acceptance"}
    for item in items:
        if not any(marker.name in categories for marker in item.iter_markers()):
            item.add_marker(pytest.mark.regression)
