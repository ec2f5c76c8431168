import subprocess
import textwrap

from glob import glob
from pathlib import Path

from setuptools import find_packages
from setuptools import setup

NAME = "covsim"
version = Path("lib/covsim/version").read_text().strip()

try:  # get commit from git describe
    commit = subprocess.check_output(["git", "describe", "--always"], stderr=subprocess.DEVNULL).strip().decode()
    Path("lib/covsim/commit").write_text(f"{commit}\n")
except Exception:
    pass


setup(
    name=NAME,
    version=version,
    description="Spatial channel covariance estimation for hybrid analog-digital arrays.",
    long_description=textwrap.dedent(
        """
        hybridcov estimates the spatial covariance of a sparse multipath channel from the
        few combined measurements a hybrid analog-digital receiver sees in each training
        frame, using greedy OMP-family algorithms over time-varying combiners.
        covsim runs the Monte-Carlo experiments (coherence CDFs, support recovery,
        covariance efficiency and rate loss) and writes the results as CSV."""
    ),
    author="hybridcov contributors",
    license="GPLv2",
    classifiers=[
        "Development Status :: 4 - Beta",
        "Environment :: Console",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: GNU General Public License v2 (GPLv2)",
        "Natural Language :: English",
        "Programming Language :: Python :: 3 :: Only",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering",
    ],
    python_requires=">=3.9",
    install_requires=[
        "numpy (>= 1.22)",
        "scipy (>= 1.9)",
        "PyYAML (>= 3.12)",
        "psutil (>= 5.4.3)",
    ],
    extras_require={
        "test": ["pytest", "pytest-mock", "pytest-cov"],
        "dev": ["ruff"],
    },
    package_dir={"": "lib"},
    packages=find_packages(where="lib"),
    package_data={"covsim": ["version"]},
    include_package_data=True,
    scripts=glob("bin/*"),
)
