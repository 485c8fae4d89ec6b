import pytest

from alphacons import ProtocolParams, fig6_graph, run

FIG6_X0 = [7.0, 2.0, 4.0, 3.0, 1.0, 5.0]

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def fig6_runs():
    """The six-agent reference run for gamma in {1, 5, 10}, default horizon 2 gamma T*."""
    return {
        gm: run(fig6_graph(), FIG6_X0, ProtocolParams(alpha=0.6, beta=1.0, gamma=float(gm)))
        for gm in (1, 5, 10)
    }


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
