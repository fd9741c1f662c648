import pathlib

import pytest

from contractgames.game import load_game

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def b1():
    return load_game(str(FIXTURES / "b1.game"))


@pytest.fixture(scope="session")
def b2():
    return load_game(str(FIXTURES / "b2.game"))


@pytest.fixture(scope="session")
def fig2():
    return load_game(str(FIXTURES / "fig2.game"))


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES
