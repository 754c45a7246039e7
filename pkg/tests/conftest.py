import pytest

from treestretch.instances import make_rng

# acceptance criteria report here; the summary hook prints one line each
ACCEPTANCE_LINES: dict = {}


@pytest.fixture
def rng(request):
    # a stable per-test offset keeps tests independent of collection order
    return make_rng(sum(map(ord, request.node.name)))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
