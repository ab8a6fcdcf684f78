"""Shared models and formulas for the test suite."""

from pathlib import Path

import numpy as np
import pytest

from stlmpm import BoxPredicate, GridSpec, build_model, build_tree, compile_formula

ROOT = Path(__file__).resolve().parent.parent
SCENARIOS = ROOT / "scenarios"

THERMAL_INPUTS = [[0.0], [0.25], [0.5], [0.75], [1.0]]
ROBOT_INPUTS = [[dx, dy] for dx in (-1.0, 0.0, 1.0) for dy in (-1.0, 0.0, 1.0)]


def thermal_model():
    grid = GridSpec.from_step([0.0], [45.0], 0.5)
    return build_model("thermal1d", grid, THERMAL_INPUTS)


def thermal_tree(model, text="G[0,10] F[0,5] comfort"):
    preds = {"comfort": BoxPredicate.from_bounds([[20.0, 25.0]])}
    return build_tree(compile_formula(text, preds, model.grid))


def robot_model():
    grid = GridSpec.from_step([0.0, 0.0], [12.0, 12.0], 0.5)
    return build_model("robot2d", grid, ROBOT_INPUTS)


def robot_tree(model):
    preds = {"A1": BoxPredicate.from_bounds([[3, 5], [3, 5]]),
             "A2": BoxPredicate.from_bounds([[6, 8], [6, 8]])}
    return build_tree(compile_formula("F[0,6] A1 & F[0,6] G[0,2] A2", preds, model.grid))


@pytest.fixture(scope="session")
def thermal():
    return thermal_model()


@pytest.fixture(scope="session")
def thermal_phi(thermal):
    return thermal_tree(thermal)


@pytest.fixture(scope="session")
def thermal_small(thermal):
    """The short thermal instance used for exhaustive comparisons (horizon = 8)."""
    return thermal_tree(thermal, "G[0,4] F[0,2] comfort")


@pytest.fixture(scope="session")
def robot():
    return robot_model()


@pytest.fixture(scope="session")
def robot_phi(robot):
    return robot_tree(robot)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# one line per acceptance criterion, printed after the run
ACCEPTANCE: dict[int, str] = {}


def record(n: int, ok: bool, detail: str) -> bool:
    ACCEPTANCE[n] = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    print(ACCEPTANCE[n])
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.write_sep("=", "acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
