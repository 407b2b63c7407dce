#!/usr/bin/env python3
"""
Goodness Lab - Build Manifest

Installs the lab library (flat modules under core/lab) and the
goodness_lab.py command line tool.

Usage:
    pip install -e .[test]
    goodness_lab.py goodness --tree path:3 --h clique:3
"""

from pathlib import Path

from setuptools import setup

PROJECT_ROOT = Path(__file__).parent
LAB_DIR = PROJECT_ROOT / "core" / "lab"

setup(
    name="goodness-lab",
    version="1.0.0",
    description="Desk-scale experiments on Ramsey goodness of bounded-degree trees",
    python_requires=">=3.10",
    package_dir={"": "core/lab"},
    py_modules=sorted(p.stem for p in LAB_DIR.glob("*.py")),
    scripts=["core/tools/goodness_lab.py"],
    install_requires=[
        "pyyaml>=6.0",
        "networkx>=3.0",
    ],
    extras_require={
        "test": [
            "pytest>=7.0",
            "hypothesis>=6.0",
        ],
    },
)
