import pytest

from temporal_support.workspace import fixture_path, load_workspace


@pytest.fixture(scope="session")
def webpages():
    return load_workspace(fixture_path("webpages"))


@pytest.fixture(scope="session")
def intro():
    return load_workspace(fixture_path("urls-intro"))


@pytest.fixture(scope="session")
def eco(webpages):
    """Look up a webpages ECO by its short label, e.g. ``eco('C3')``."""
    return lambda name: webpages.ntoi.eco(f"eco_{name}")
