#!/usr/bin/env python3
"""
随机 K-SAT 归约工具安装脚本
"""

from setuptools import setup, find_packages
from pathlib import Path

# 读取README文件
readme_file = Path(__file__).parent / "README.md"
long_description = readme_file.read_text(encoding="utf-8") if readme_file.exists() else ""

# 运行时依赖(测试与开发工具放在 extras)
install_requires = [
    "pydantic>=2.0.0",
    "loguru>=0.7.0",
    "PyYAML>=6.0",
    "numpy>=1.24.0",
    "scipy>=1.10.0",
    "pandas>=2.0.0",
]

setup(
    name="rsat-learning-reductions",
    version="1.0.0",
    description="随机 K-SAT 到 DNF 学习的归约链: 打包、取反、样本转换、DNF 实现与区分器",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    py_modules=["rsat_cli", "run_tests"],
    include_package_data=True,
    package_data={
        "config": ["*.yaml", "profiles/*.yaml"],
    },
    install_requires=install_requires,
    extras_require={
        "dev": [
            "pytest>=7.0.0",
            "pytest-html>=3.1.0",
            "pytest-xdist>=3.0.0",
            "hypothesis>=6.80.0",
            "black>=23.0.0",
            "isort>=5.12.0",
            "flake8>=6.0.0",
        ],
    },
    python_requires=">=3.9",
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    keywords="random-ksat csp dnf pac-learning reduction automata",
    entry_points={
        "console_scripts": [
            "rsat=rsat_cli:main",
            "rsat-tests=run_tests:main",
        ],
    },
)
