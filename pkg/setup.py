#!/usr/bin/env python3
# -*- coding: utf-8 -*-

from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

with open("requirements.txt", "r", encoding="utf-8") as fh:
    requirements = [line for line in fh.read().splitlines() if line and not line.startswith("#")]

setup(
    name="toy-waves",
    version="0.1.0",
    author="Toy Waves Team",
    author_email="your.email@example.com",
    description="Pseudospectral simulator and verification lab for a damped toy water-wave model",
    long_description=long_description,
    long_description_content_type="text/markdown",
    url="https://github.com/yourusername/toy-waves",
    packages=find_packages(),
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires=">=3.8",
    install_requires=requirements,
    entry_points={
        "console_scripts": [
            "toy-waves=src.main:main",
        ],
    },
)
