"""
    Data manager for the local filesystem: graph files (JSON), CSV reports,
    JSON summaries and versioned regression fixtures.
"""
import csv
import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from pydantic import BaseModel, ValidationError

from app.core.config import TEST_DATA_DIR
from app.datamanager.data_manager_interface import DataManagerInterface
from app.datamanager.exception_classes import GraphFileError, InvalidGraphError
from app.outerspace.graphs import Edge, MarkedMetricGraph, validate
from app.schemas.pydantic_models import EdgeRecord, GraphFile

logger = logging.getLogger(__name__)

REVERSED = "~"


def dart_token(G: MarkedMetricGraph, d: int) -> str:
    edge_id = G.edges[abs(d) - 1].id
    return edge_id if d > 0 else edge_id + REVERSED


def graph_to_file(G: MarkedMetricGraph) -> GraphFile:
    """ Lengths are always written as 'numerator/denominator'. """
    return GraphFile(
        rank=G.rank,
        label=G.label,
        vertices=list(G.vertices),
        edges=[
            EdgeRecord(id=e.id, from_=e.tail, to=e.head, length=f"{e.length.numerator}/{e.length.denominator}")
            for e in G.edges
        ],
        base=G.base,
        marking=[" ".join(dart_token(G, d) for d in path) for path in G.marking],
    )


def graph_from_file(record: GraphFile, path: str = "<memory>") -> MarkedMetricGraph:
    """
    Converts a parsed graph file and validates the result.
    :raises GraphFileError: unknown edge in a marking
    :raises InvalidGraphError: the graph violates a core, volume or marking invariant
    """
    index = {edge.id: i for i, edge in enumerate(record.edges)}
    marking = []
    for k, text in enumerate(record.marking):
        darts = []
        for token in text.split():
            reverse = token.endswith(REVERSED)
            edge_id = token[:-1] if reverse else token
            if edge_id not in index:
                raise GraphFileError(path, f"marking.{k}", f"unknown edge '{edge_id}'")
            darts.append(-(index[edge_id] + 1) if reverse else index[edge_id] + 1)
        marking.append(tuple(darts))
    G = MarkedMetricGraph(
        rank=record.rank,
        vertices=tuple(record.vertices),
        edges=tuple(Edge(e.id, e.from_, e.to, Fraction(e.length)) for e in record.edges),
        base=record.base,
        marking=tuple(marking),
        label=record.label,
    )
    diagnostics = validate(G)
    if not diagnostics.valid:
        raise InvalidGraphError(diagnostics.violations)
    return G


def _line_of(text: str, key: str) -> Optional[int]:
    """ First line mentioning a JSON key, for diagnostics. """
    for number, line in enumerate(text.splitlines(), start=1):
        if f'"{key}"' in line:
            return number
    return None


class FileDataManager(DataManagerInterface):
    def __init__(self, fixture_dir: str = TEST_DATA_DIR):
        self.fixture_dir = Path(fixture_dir)

# -----    Graph related     -----
    def load_graph(self, path: str) -> MarkedMetricGraph:
        """
        Reads a JSON graph file.
        Raises GraphFileError naming the offending field (and line, when known).
        """
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise GraphFileError(path, "<file>", e.strerror or str(e))
        try:
            record = GraphFile.model_validate_json(text)
        except ValidationError as e:
            error = e.errors()[0]
            location = ".".join(str(part) for part in error["loc"]) or "<root>"
            if error["type"] == "json_invalid":
                try:
                    json.loads(text)
                except json.JSONDecodeError as decode_error:
                    raise GraphFileError(path, "<json>", decode_error.msg, decode_error.lineno)
            key = next((str(part) for part in reversed(error["loc"]) if isinstance(part, str)), None)
            raise GraphFileError(path, location, error["msg"], _line_of(text, key) if key else None)
        return graph_from_file(record, path)

    def save_graph(self, graph: MarkedMetricGraph, path: str) -> None:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(graph_to_file(graph).model_dump_json(by_alias=True, indent=2) + "\n", encoding="utf-8")

# -----    Report related     -----
    def write_csv(self, rows: Sequence[BaseModel], path: str, columns: Sequence[str]) -> int:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        with target.open("w", newline="", encoding="utf-8") as f:
            writer = csv.DictWriter(f, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n")
            writer.writeheader()
            for row in rows:
                record = row.model_dump(mode="json")
                writer.writerow({
                    key: json.dumps(value) if isinstance(value, (list, dict)) else value
                    for key, value in record.items()
                })
        logger.info("Wrote %d rows to %s", len(rows), target)
        return len(rows)

    def write_summary(self, summary: BaseModel, path: str) -> None:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(summary.model_dump_json(indent=2) + "\n", encoding="utf-8")

# -----    Fixture related     -----
    def _fixture_path(self, name: str) -> Path:
        return self.fixture_dir / f"{name}.json"

    def load_fixture(self, name: str) -> Optional[dict]:
        target = self._fixture_path(name)
        if not target.exists():
            return None
        return json.loads(target.read_text(encoding="utf-8"))

    def record_fixture(self, name: str, data: dict) -> None:
        target = self._fixture_path(name)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        logger.info("Recorded fixture %s", target)
