"""
核心功能模块
CSP 实例与求值、生成器、暴力判定、谓词分析、归约链、DNF/自动机实现与分散性区分器
"""

from .csp import Assignment, Constraint, Formula, PredicateSpec, SignedTuple
from .exceptions import RsatError
from .rng import RngState, make_rng

__all__ = [
    'SignedTuple',
    'PredicateSpec',
    'Constraint',
    'Formula',
    'Assignment',
    'RngState',
    'make_rng',
    'RsatError',
]
