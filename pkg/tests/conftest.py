import pytest

from fsosim import ConstellationSpec, LinkEngine, build_constellation


@pytest.fixture(scope="session")
def shell_spec():
    return ConstellationSpec()


@pytest.fixture(scope="session")
def shell(shell_spec):
    return build_constellation(shell_spec)


@pytest.fixture(scope="session")
def engine(shell):
    return LinkEngine(shell)
