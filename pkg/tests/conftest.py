import os

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("dvlab", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("dvlab")


@pytest.fixture(scope="session", autouse=True)
def isolated_cache(tmp_path_factory):
    """Keep weight tables out of the user's cache directory."""
    path = tmp_path_factory.mktemp("dvlab-cache")
    old = os.environ.get("DVLAB_CACHE_DIR")
    os.environ["DVLAB_CACHE_DIR"] = str(path)
    yield path
    if old is None:
        os.environ.pop("DVLAB_CACHE_DIR", None)
    else:
        os.environ["DVLAB_CACHE_DIR"] = old


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion that ran."""
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[k])
