import numpy as np
import pytest

from regimescope.market_data import DailySeries


def make_series(close, pe=None, start="2000-01-03") -> DailySeries:
    close = np.asarray(close, dtype=float)
    dates = np.datetime64(start) + np.arange(len(close))
    return DailySeries(dates, close, pe)


def write_rows(path, rows, header="date,close,pe"):
    path.write_text(header + "\n" + "\n".join(rows) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def synthetic_market(n=3000, pe_from=600, seed=0):
    """Random-walk prices with a mean-reverting P/E covering a suffix."""
    rng = np.random.default_rng(seed)
    close = 100 * np.exp(np.cumsum(rng.normal(0.0004, 0.011, n)))
    pe = np.empty(n)
    pe[0] = 20.0
    shocks = rng.normal(0, 0.25, n)
    for t in range(1, n):
        pe[t] = pe[t - 1] + 0.01 * (20.0 - pe[t - 1]) + shocks[t]
    pe = np.clip(pe, 8.0, 35.0)
    pe[:pe_from] = np.nan
    return make_series(close, pe, start="2001-01-01")


@pytest.fixture(scope="session")
def market_csv(tmp_path_factory):
    from regimescope.market_data import write_csv

    path = tmp_path_factory.mktemp("data") / "market.csv"
    write_csv(synthetic_market(), path)
    return path


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
