# ----------------------------------------------------------------------------
# Copyright (c) 2024, q2-ctre development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------
import re

from setuptools import find_packages, setup

with open("q2_ctre/__init__.py") as fh:
    version = re.search(r'__version__ = "([^"]+)"', fh.read()).group(1)

description = (
    "A plugin for peaks-over-threshold analysis of bursty event series with "
    "Mittag-Leffler distributed times between threshold crossings."
)

setup(
    name="q2-ctre",
    version=version,
    license="BSD-3-Clause",
    packages=find_packages(),
    author="q2-ctre development team",
    description=description,
    url="https://github.com/q2-ctre/q2-ctre",
    install_requires=[
        "numpy",
        "scipy",
        "pandas",
        "numdifftools",
        "statsmodels",
    ],
    entry_points={
        "qiime2.plugins": ["q2_ctre=" "q2_ctre" ".plugin_setup:plugin"],
        "console_scripts": ["ctre=q2_ctre.cli:main"],
    },
    package_data={
        "q2_ctre": ["citations.bib"],
        "q2_ctre.tests": ["data/*"],
        "q2_ctre.types.tests": ["data/*", "data/*/*"],
    },
    zip_safe=False,
)
