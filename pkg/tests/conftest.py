from pathlib import Path

import pytest

from loopm.frontend import parse_file

BENCHMARKS = Path(__file__).resolve().parent.parent / "benchmarks"

CORPUS = sorted(p.stem for p in BENCHMARKS.glob("*.prob"))

# programs whose moments are solvable (no defective variables)
SOLVABLE = ["asymmetric_walks", "choice_and_gauss", "fibonacci", "random_walk_2d",
            "geometric", "sensitivity_walk"]


def bench_path(name):
    return BENCHMARKS / f"{name}.prob"


def load(name):
    return parse_file(bench_path(name))


@pytest.fixture
def program():
    return load
