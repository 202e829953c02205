import pytest

from decomposition import clear_cache


def pytest_addoption(parser):
    parser.addoption("--run-slow", action="store_true", default=False,
                     help="run the exhaustive acceptance-range sweeps")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: exhaustive sweep over the full acceptance range")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --run-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def fresh_cache():
    clear_cache()
    yield
    clear_cache()
