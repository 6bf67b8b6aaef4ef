import time
from contextlib import contextmanager

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

_CRITERIA = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_hermitian(dim, rng, scale=1.0):
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return scale * (z + z.conj().T) / 2


@pytest.fixture
def criterion():
    """Time an acceptance criterion and record a PASS/FAIL line for the summary."""

    @contextmanager
    def run(number, title, budget_s):
        start = time.perf_counter()
        ok = False
        try:
            yield
            ok = True
        finally:
            elapsed = time.perf_counter() - start
            within = elapsed < budget_s
            status = "PASS" if ok and within else "FAIL"
            _CRITERIA.append(f"[{status}] criterion {number}: {title} ({elapsed:.2f}s / budget {budget_s}s)")
            print(_CRITERIA[-1])
        assert within, f"criterion {number} took {elapsed:.2f}s, budget {budget_s}s"

    return run


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_CRITERIA, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
