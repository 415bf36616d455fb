"""
    Providers shared by the CLI commands. Tests patch these to inject mocks.
"""
from app.core.config import TEST_DATA_DIR
from app.datamanager.data_manager_files import FileDataManager
from app.services.experiment_service import ExperimentService


def get_data_manager() -> FileDataManager:
    return FileDataManager(TEST_DATA_DIR)


def get_experiment_service() -> ExperimentService:
    return ExperimentService(get_data_manager())
