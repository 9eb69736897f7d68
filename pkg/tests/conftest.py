import pytest
from hypothesis import HealthCheck, settings

from reactpatch.disk_steklov import CapacitanceModel, solve_disk_spectrum

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def spectrum():
    return solve_disk_spectrum(1.0, 64, 800)


@pytest.fixture(scope="session")
def model(spectrum):
    return CapacitanceModel(spectrum)


@pytest.fixture(scope="session")
def small_model():
    """Coarse spectrum for fast property tests."""
    return CapacitanceModel(solve_disk_spectrum(1.0, 32, 200))


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line for an acceptance criterion; returns the flag."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def report(criterion, passed, detail):
        line = f"{'PASS' if passed else 'FAIL'}  criterion {criterion}: {detail}"
        lines.append(line)
        print(line)
        return passed

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
