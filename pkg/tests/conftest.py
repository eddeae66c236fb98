import pytest
from hypothesis import settings

from secoff.model import SystemConfig, UserProfile

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def unit_cfg():
    """T = 1 s, B = 1 Hz: keeps hand-computed rates readable."""
    return SystemConfig(block_time_s=1.0, bandwidth_hz=1.0)


@pytest.fixture
def ref_user():
    return UserProfile(task_bits=1e5, cycles_per_bit=1e3, cap_coeff_j_per_cycle=1e-28,
                       max_cpu_hz=1e9, energy_weight=1.0)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
