import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=150, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def table_1e6():
    from cmdensity.primes import sieve

    return sieve(10**6)


ACCEPTANCE: dict[str, str] = {}


@pytest.fixture
def record():
    """Store one summary line per acceptance criterion; filled in before any assertion fires."""
    def _record(key: str, passed: bool, detail: str) -> bool:
        ACCEPTANCE[key] = f"{'PASS' if passed else 'FAIL'}  {detail}"
        print(f"criterion {key}: {ACCEPTANCE[key]}")
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (int("".join(c for c in k if c.isdigit())), k)):
        terminalreporter.write_line(f"criterion {key:>3}: {ACCEPTANCE[key]}")
