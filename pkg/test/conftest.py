# test/conftest.py

import os
from fractions import Fraction
from unittest.mock import patch, MagicMock

import pytest
from typer.testing import CliRunner

# Word and graph types do not read the environment, so they can be imported at the top level.
from app.freegroup.words import Automorphism, CyclicWord
from app.outerspace.graphs import barbell, rose, theta, theta_plus_loop, subdivided_rose, uniform_rose


@pytest.fixture(scope="session", autouse=True)
def set_test_env(tmp_path_factory):
    """
    Patches the OUTSPACE_* variables for the entire test session
    before the CLI application and its providers are imported.
    """
    fixture_dir = tmp_path_factory.mktemp("fixtures")
    test_env_vars = {
        "OUTSPACE_TEST_DATA_DIR": str(fixture_dir),
        "OUTSPACE_MAX_WORKERS": "2",
        "OUTSPACE_LOG_LEVEL": "WARNING",
    }

    # No 'clear=True': rich and click read terminal variables from the environment.
    with patch.dict(os.environ, test_env_vars):
        from main import app
        from app.cli import dependencies
        from app.datamanager.data_manager_files import FileDataManager
        from app.services.experiment_service import ExperimentService

        yield app, dependencies, FileDataManager, ExperimentService


@pytest.fixture(scope="module")
def app_instance(set_test_env):
    """Provides the typer application, imported with test environment variables."""
    app_obj, _, _, _ = set_test_env
    return app_obj


@pytest.fixture(scope="module")
def FileDataManager_class(set_test_env):
    _, _, cls, _ = set_test_env
    return cls


@pytest.fixture(scope="module")
def ExperimentService_class(set_test_env):
    _, _, _, cls = set_test_env
    return cls


@pytest.fixture(scope="module")
def cli_runner():
    """Invokes commands in-process; stdout and stderr are captured separately."""
    return CliRunner(mix_stderr=False)


@pytest.fixture
def mock_data_manager(FileDataManager_class):
    """Create a mock data manager.
        Mimic the API (Interface): the mock only allows the methods of FileDataManager.
    """
    return MagicMock(spec=FileDataManager_class)


@pytest.fixture
def setup_data_manager_override(mock_data_manager):
    """
    Makes every command receive the mock data manager instead of the filesystem one.
    """
    with patch("app.cli.dependencies.get_data_manager", return_value=mock_data_manager):
        yield mock_data_manager


@pytest.fixture
def file_data_manager(FileDataManager_class, tmp_path):
    """A real data manager whose fixtures live in a fresh temporary directory."""
    return FileDataManager_class(str(tmp_path / "fixtures"))


# -----   graphs   -----

@pytest.fixture
def rose_graph():
    return uniform_rose(3)


@pytest.fixture
def unbalanced_rose():
    """Rose with petals 1/2, 1/4, 1/4."""
    return rose([Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)])


@pytest.fixture
def theta_graph():
    return theta([Fraction(1, 4)] * 4)


@pytest.fixture
def theta_plus_loop_graph():
    return theta_plus_loop([Fraction(1, 4)] * 4)


@pytest.fixture
def subdivided_rose_graph():
    return subdivided_rose([Fraction(1, 8), Fraction(1, 8), Fraction(3, 8), Fraction(3, 8)])


@pytest.fixture
def barbell_graph():
    return barbell([Fraction(1, 4)] * 4)


# -----   automorphisms and words   -----

@pytest.fixture(scope="module")
def axis_automorphism():
    """a -> b, b -> c, c -> ab: irreducible, growth rate the plastic number."""
    return Automorphism.parse("b,c,ab")


@pytest.fixture(scope="module")
def polynomial_automorphism():
    """a -> a, b -> ab, c -> ac: polynomially growing."""
    return Automorphism.parse("a,ab,ac")


@pytest.fixture
def word_a():
    return CyclicWord.parse("a")
