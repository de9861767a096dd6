"""
配置管理模块
提供统一的配置管理接口
"""

from .settings import Settings, settings
from .reduction_config import ReductionParams, ParamPresets
from .profile_config import ReductionProfile, ProfileManager, profile_manager

__all__ = [
    'Settings',
    'settings',
    'ReductionParams',
    'ParamPresets',
    'ReductionProfile',
    'ProfileManager',
    'profile_manager',
]
