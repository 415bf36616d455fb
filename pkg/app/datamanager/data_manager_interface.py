"""
    Interface of the data manager: graph files, CSV reports, summaries and regression fixtures.
    The same data manager methods can be used by every CLI command and experiment.
"""
from abc import ABC, abstractmethod
from typing import Optional, Sequence

from pydantic import BaseModel


class DataManagerInterface(ABC):
    """ Defines methods for reading graphs and writing reports and fixtures. """

# Graph related
    @abstractmethod
    def load_graph(self, path: str):
        """ Parses and validates a graph file. Returns a MarkedMetricGraph. """
        pass

    @abstractmethod
    def save_graph(self, graph, path: str) -> None:
        """ Writes a graph file that load_graph reads back to the same graph. """
        pass


# Report related
    @abstractmethod
    def write_csv(self, rows: Sequence[BaseModel], path: str, columns: Sequence[str]) -> int:
        """ Writes one row per model, fixed column order. Returns the number of rows. """
        pass

    @abstractmethod
    def write_summary(self, summary: BaseModel, path: str) -> None:
        """ Writes a structured-text summary next to a report. """
        pass


# Fixture related
    @abstractmethod
    def load_fixture(self, name: str) -> Optional[dict]:
        """ Returns a recorded fixture, or None if it was never recorded. """
        pass

    @abstractmethod
    def record_fixture(self, name: str, data: dict) -> None:
        """ Pins a fixture on its first verified run. """
        pass
