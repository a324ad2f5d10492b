#!/usr/bin/env python3
"""
Setup script for radical-cascades
"""
import os
from setuptools import setup

setup(
    name="radical-cascades",
    version="1.0.1",
    description="Closed-form root cascades for solvable degree-8 and degree-9 polynomial families",
    long_description=open("README.md", "r", encoding="utf-8").read() if os.path.exists("README.md") else "Closed-form root cascades for solvable polynomial families",
    long_description_content_type="text/markdown",
    py_modules=[
        "numeric_core",
        "family_deg8",
        "family_deg9",
        "corpus_bench",
        "cascade_json",
        "radical_cascades",
    ],
    install_requires=[
        'numpy>=1.21.0',
        'scipy>=1.7.0',
        'pandas>=1.3.0',
        'python-dotenv>=0.19.0',
    ],
    python_requires=">=3.8",
    entry_points={
        'console_scripts': [
            'radical-cascades=radical_cascades:main',
        ],
    },
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    keywords="polynomial roots radicals composition cardano durand-kerner",
    include_package_data=True,
)
