import numpy as np
import pytest

from loewner import (
    DescriptorSystem,
    extract_node,
    generate_modal_system,
    iss_like_system,
    log_grid,
    sample_frequency_response,
)

_ACCEPTANCE = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion."""

    def record(name, ok, detail=""):
        _ACCEPTANCE.append((name, bool(ok), detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {name}  {detail}")


@pytest.fixture
def first_order():
    """H(s) = 1/(s+1)."""
    return DescriptorSystem([[1.0]], [[-1.0]], [[1.0]], [[1.0]], [[0.0]])


def random_stable_siso(n, seed=0):
    return generate_modal_system(n // 2, (0.5, 50.0), (0.05, 0.3), m=1, p=1, seed=seed)


@pytest.fixture(scope="session")
def iss_system():
    return iss_like_system()


@pytest.fixture(scope="session")
def iss_node(iss_system):
    ds = sample_frequency_response(iss_system, log_grid(0.1, 100.0, 400))
    return extract_node(ds, 0, 0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
