import os

import pytest


@pytest.fixture(scope="session", autouse=True)
def isolated_cache_dir(tmp_path_factory):
    """Keep test runs from writing a block cache into the working tree."""
    path = tmp_path_factory.mktemp("gsc-cache")
    old = os.environ.get("GSC_CACHE_DIR")
    os.environ["GSC_CACHE_DIR"] = str(path)
    yield path
    if old is None:
        os.environ.pop("GSC_CACHE_DIR", None)
    else:
        os.environ["GSC_CACHE_DIR"] = old
