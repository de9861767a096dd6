"""
学习器模块
区分器使用的学习器接口实现与参考学习器
"""

from .base_learner import BaseLearner
from .reference_learners import (
    BruteForceAssignmentLearner,
    BruteForceDnfLearner,
    ConstantLearner,
    Memorizer,
    reference_learners,
)

__all__ = [
    'BaseLearner',
    'Memorizer',
    'ConstantLearner',
    'BruteForceDnfLearner',
    'BruteForceAssignmentLearner',
    'reference_learners',
]
