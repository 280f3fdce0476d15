import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("rsl", max_examples=50, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("rsl")

# filled by test_acceptance; printed at the end of the run
ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


@pytest.fixture(scope="session")
def cache_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("rsl_cache")
    old = os.environ.get("RSL_CACHE_DIR")
    os.environ["RSL_CACHE_DIR"] = str(d)
    yield d
    if old is None:
        os.environ.pop("RSL_CACHE_DIR", None)
    else:
        os.environ["RSL_CACHE_DIR"] = old


@pytest.fixture(scope="session")
def zeros_1420(cache_dir):
    from rsl.zeros import cached_zeros

    return cached_zeros(1420.0, cache_dir)


@pytest.fixture(scope="session")
def zeros_100(zeros_1420):
    return zeros_1420.below(100.0)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
