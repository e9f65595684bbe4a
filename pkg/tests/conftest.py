"""Shared fixtures and brute-force helpers for the test suite."""

import numpy as np
import pytest

from wignerlab.gaussian import random_mixed_cov, random_pure_squeezed_cov
from wignerlab.phase_space import random_mode

#: One line per acceptance criterion, echoed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


def record_acceptance(criterion: int, name: str, ok: bool, detail: str) -> None:
    line = f"criterion {criterion} ({name}): {detail} -> {'PASS' if ok else 'FAIL'}"
    ACCEPTANCE_LINES.append(line)
    print(f"[acceptance] {line}")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)


def grid2d(extent: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Axis and flattened (n^2, 2) point array over [-extent, extent]^2."""
    axis = np.linspace(-extent, extent, n)
    b1, b2 = np.meshgrid(axis, axis, indexing="ij")
    return axis, np.stack([b1.ravel(), b2.ravel()], axis=-1)


def integrate2d(values: np.ndarray, axis: np.ndarray) -> float:
    """Trapezoid integral of values sampled on the grid2d layout."""
    n = axis.size
    return float(np.trapezoid(np.trapezoid(values.reshape(n, n), axis, axis=1), axis))


def plane_points(flat: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Embed 2D grid coordinates into the (g, Jg) plane of full phase space."""
    from wignerlab.phase_space import apply_j

    return flat[:, :1] * g[None, :] + flat[:, 1:] * apply_j(g)[None, :]


@pytest.fixture(scope="session")
def pure_cov_2m():
    """A generic two-mode pure squeezed covariance."""
    return random_pure_squeezed_cov(2, [5.0, -3.0], 101)


@pytest.fixture(scope="session")
def mixed_cov_1m():
    """A generic single-mode mixed (squeezed thermal) covariance."""
    return random_mixed_cov(1, 7, max_squeezing_db=5.0, max_thermal=1.9)


def random_case(seed: int, max_modes: int = 4, mixed: bool = True):
    """One random (V, g) pair for property tests."""
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, max_modes + 1))
    v = random_mixed_cov(
        m,
        rng,
        max_squeezing_db=7.0,
        max_thermal=2.2 if mixed and rng.integers(2) else 1.0,
    )
    g = random_mode(m, rng)
    return v, g
