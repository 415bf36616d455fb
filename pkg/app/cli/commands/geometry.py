""" GRAPH AND METRIC COMMANDS """
from typing import Annotated, Optional

import typer
from rich.console import Console
from rich.table import Table

from app.cli import dependencies
from app.datamanager.data_manager_files import dart_token
from app.datamanager.exceptions_handler import EXIT_WARNINGS, handle_exceptions
from app.outerspace.graphs import is_thick, systole as graph_systole
from app.outerspace.metric import candidates as graph_candidates, diam_pair, lip_distance, sym_distance
from app.outerspace.plgraph import pl_projection
from app.schemas.pydantic_models import CandidateRecord, DistanceReport, PLConfig

# --- Create Typer instance ---
router = typer.Typer()
console = Console()


@router.command("dist")
@handle_exceptions
def dist(
    graph_a: Annotated[str, typer.Argument(help="Graph file A")],
    graph_b: Annotated[str, typer.Argument(help="Graph file B")],
    as_json: Annotated[bool, typer.Option("--json", help="Print a JSON report")] = False,
):
    """
    Prints d(A,B), d(B,A), their sum and their maximum.
    """
    data_manager = dependencies.get_data_manager()
    G, H = data_manager.load_graph(graph_a), data_manager.load_graph(graph_b)
    report = DistanceReport(
        forward=lip_distance(G, H), backward=lip_distance(H, G), sym=sym_distance(G, H), diam=diam_pair(G, H)
    )
    if as_json:
        typer.echo(report.model_dump_json())
        return
    for name, value in report.model_dump().items():
        typer.echo(f"{name}\t{value:.12g}")


@router.command("candidates")
@handle_exceptions
def candidates(graph: Annotated[str, typer.Argument(help="Graph file")]):
    """
    Lists the candidate loops of a graph with their classes and lengths.
    """
    G = dependencies.get_data_manager().load_graph(graph)
    cands = graph_candidates(G)
    records = [
        CandidateRecord(
            kind=loop.kind, word=str(alpha), path=" ".join(dart_token(G, d) for d in loop.darts),
            length=str(G.path_length(loop.darts)),
        )
        for loop, alpha in zip(cands.loops, cands.classes)
    ]
    table = Table("kind", "class", "edge path", "length")
    for record in records:
        table.add_row(record.kind, record.word, record.path, record.length)
    console.print(table)
    typer.echo(f"{len(records)} candidates")


@router.command("systole")
@handle_exceptions
def systole(
    graph: Annotated[str, typer.Argument(help="Graph file")],
    epsilon: Annotated[Optional[float], typer.Option(help="Report whether the graph is epsilon-thick")] = None,
):
    """
    Prints the shortest loop length, exactly and as a float.
    """
    G = dependencies.get_data_manager().load_graph(graph)
    shortest = graph_systole(G)
    typer.echo(f"systole\t{shortest}\t{float(shortest):.12g}")
    if epsilon is not None:
        typer.echo(f"thick\t{is_thick(G, epsilon)}")


@router.command("project-pl")
@handle_exceptions
def project_pl(
    graph: Annotated[str, typer.Argument(help="Graph file")],
    cap: Annotated[Optional[int], typer.Option(help="Partial paths explored before truncation")] = None,
):
    """
    Primitive classes of length at most 2; exits 1 when the search was truncated.
    """
    G = dependencies.get_data_manager().load_graph(graph)
    projection = pl_projection(G, cap, PLConfig(rank=G.rank))
    for word in projection.classes:
        typer.echo(word)
    if projection.truncated:
        typer.echo(f"warning: search truncated after {projection.explored} partial paths", err=True)
        raise typer.Exit(code=EXIT_WARNINGS)


@router.command("validate")
@handle_exceptions
def validate(graph: Annotated[str, typer.Argument(help="Graph file")]):
    """
    Loads a graph file and reports its invariants; violations exit with code 2.
    """
    G = dependencies.get_data_manager().load_graph(graph)
    typer.echo(f"valid\trank {G.rank}, {len(G.vertices)} vertices, {len(G.edges)} edges, volume {G.volume}")
