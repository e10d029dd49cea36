import pytest

from vemsolver.kernel.split import SplitKernel
from vemsolver.modes.grid import TimeGrid


@pytest.fixture(scope="session")
def constant_kernel() -> SplitKernel:
    """α ≡ 0.5 on [0, 1]."""
    return SplitKernel.from_spec("constant:0.5")


@pytest.fixture(scope="session")
def affine_kernel() -> SplitKernel:
    """α(t) = 0.5 + 0.2 t on [0, 1]."""
    return SplitKernel.from_spec("affine:0.5,0.2")


@pytest.fixture(scope="session")
def probe_kernel() -> SplitKernel:
    """α(t) = 0.3 + 0.2 t on [0, 1]."""
    return SplitKernel.from_spec("affine:0.3,0.2")


@pytest.fixture
def graded_grid():
    def make(kernel: SplitKernel, count: int = 128, grading: float | None = None) -> TimeGrid:
        if grading is None:
            return TimeGrid.graded_for(kernel.horizon, count, kernel.alpha0)
        return TimeGrid(kernel.horizon, count, grading)

    return make
