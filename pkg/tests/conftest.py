import mpmath
import pytest
from hypothesis import HealthCheck, settings

mpmath.mp.dps = 30

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
    derandomize=True,
)
settings.load_profile("default")


def rel_err(got, ref):
    ref = complex(ref)
    return abs(complex(got) - ref) / abs(ref)


@pytest.fixture(autouse=True, scope="session")
def _single_thread_default(tmp_path_factory):
    # keep the verification thread pool deterministic in size for the whole session
    import os

    os.environ.setdefault("SELFZETA_THREADS", "2")
    yield


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
