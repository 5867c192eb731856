import pytest
from hypothesis import settings

from flatteich.bounds import audit
from flatteich.fixtures import load_fixture

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

ACCEPTANCE_KEY = pytest.StashKey[list]()
AUDIT_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_KEY] = []


def pytest_collection_modifyitems(config, items):
    # acceptance runs last so that the soundness audit sees every bound the suite produced
    items.sort(key=lambda it: it.module.__name__.endswith("test_acceptance"))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session", autouse=True)
def bound_audit(request):
    """Every ExtInterval and DistBound produced during the session."""
    with audit() as log:
        request.config.stash[AUDIT_KEY] = log
        yield log


@pytest.fixture
def accept(request):
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""
    def report(label: str, ok: bool, detail: str = ""):
        request.config.stash[ACCEPTANCE_KEY].append(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}".rstrip())
        assert ok, f"{label}: {detail}"
    return report


@pytest.fixture(scope="session")
def slit():
    return load_fixture("genus2_slit")


@pytest.fixture(scope="session")
def torus_fx():
    return load_fixture("torus")


@pytest.fixture(scope="session")
def lshape():
    return load_fixture("genus2_L")
