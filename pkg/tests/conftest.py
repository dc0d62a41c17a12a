import pytest

ACCEPTANCE = pytest.StashKey[list]()


def pytest_addoption(parser):
    parser.addoption(
        "--slow", action="store_true", default=False,
        help="run exhaustive checks (full 256x256 two-step entry comparison)",
    )


def pytest_configure(config):
    config.stash[ACCEPTANCE] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)


@pytest.fixture
def acceptance_log(request):
    """Record one pass/fail line per acceptance criterion."""
    log = request.config.stash[ACCEPTANCE]

    def record(number, title, passed, detail=""):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title}"
        if detail:
            line += f" ({detail})"
        log.append(line)
        print(line)
        return passed

    return record


@pytest.fixture
def slow(request):
    return request.config.getoption("--slow")
