""" PATH AND EXPERIMENT COMMANDS """
import math
from pathlib import Path
from typing import Annotated, List, Optional

import typer

from app.cli import dependencies
from app.datamanager.exceptions_handler import EXIT_WARNINGS, handle_exceptions
from app.freegroup.words import Automorphism, CyclicWord
from app.outerspace.graphs import uniform_rose
from app.outerspace.paths import certify_geodesic, growth_rate, orbit_path, stretch_loop_path
from app.schemas.pydantic_models import ExperimentSpec, ExperimentSummary, PLConfig, SamplerConfig
from app.services.experiment_service import GEODESIC_TOLERANCE

# --- Create Typer instance ---
router = typer.Typer()

AutomorphismOption = Annotated[Optional[str], typer.Option("--automorphism", "-a", help="Images, e.g. 'b,c,ab'")]
WordOption = Annotated[Optional[str], typer.Option("--word", "-w", help="Class stretched along a geodesic")]
GraphOption = Annotated[Optional[str], typer.Option("--graph", "-g", help="Base graph file (uniform rose if omitted)")]
OutputOption = Annotated[str, typer.Option("--output", "-o", help="CSV report; the summary is written next to it")]
WordCapOption = Annotated[Optional[int], typer.Option(help="Word-length cap for PL neighbors")]
RepresentativesOption = Annotated[
    Optional[int], typer.Option(help="Measure only this many shortest PL classes per graph (approximate d_PL)")
]


def _finish(summary: ExperimentSummary) -> None:
    typer.echo(summary.model_dump_json(indent=2))
    if summary.warnings:
        raise typer.Exit(code=EXIT_WARNINGS)


def _pl_config(word_cap: Optional[int], representatives: Optional[int]) -> PLConfig:
    """ PL overrides only; the rank follows the base graph when the experiment runs. """
    overrides = {"word_cap": word_cap, "representatives": representatives}
    return PLConfig(**{key: value for key, value in overrides.items() if value is not None})


def _run(**fields) -> None:
    fields = {key: value for key, value in fields.items() if value is not None}
    spec = ExperimentSpec(**fields)
    _finish(dependencies.get_experiment_service().run(spec))


@router.command("axis")
@handle_exceptions
def axis(
    automorphism: Annotated[str, typer.Argument(help="Images, e.g. 'b,c,ab'")],
    graph: GraphOption = None,
    k_max: Annotated[int, typer.Option(help="Last orbit index")] = 6,
):
    """
    Orbit G, φG, ..., φ^k G: cumulative distances and the Perron growth rate.
    """
    phi = Automorphism.parse(automorphism)
    G = dependencies.get_data_manager().load_graph(graph) if graph else uniform_rose(phi.rank)
    path = orbit_path(phi, G, k_max)
    for k in range(len(path)):
        typer.echo(f"{k}\t{path.times[k]:.12g}\t{path.distance(0, k):.12g}")
    typer.echo(f"log growth rate\t{math.log(growth_rate(phi)):.12g}")


@router.command("geodesic")
@handle_exceptions
def geodesic(
    graph: Annotated[str, typer.Argument(help="Start graph file")],
    word: Annotated[str, typer.Argument(help="Class of an embedded loop")],
    length: Annotated[float, typer.Option("--length", "-T", help="Final time")] = 1.0,
    samples: Annotated[int, typer.Option(help="Number of samples")] = 20,
    tolerance: Annotated[float, typer.Option(help="Allowed deviation")] = GEODESIC_TOLERANCE,
):
    """
    Samples the stretch geodesic of an embedded loop and certifies it.
    """
    G = dependencies.get_data_manager().load_graph(graph)
    path = stretch_loop_path(G, CyclicWord.parse(word), length, samples)
    certificate = certify_geodesic(path, tolerance)
    typer.echo(certificate.model_dump_json())
    if not certificate.passed:
        raise typer.Exit(code=EXIT_WARNINGS)


@router.command("contract-test")
@handle_exceptions
def contract_test(
    seed: Annotated[int, typer.Option(help="Root seed (mandatory)")],
    automorphism: AutomorphismOption = None,
    word: WordOption = None,
    graph: GraphOption = None,
    pairs: Annotated[int, typer.Option(help="Number of (H, H') pairs")] = 20,
    radius: Annotated[Optional[float], typer.Option(help="Keep H within this distance of the path")] = None,
    k_max: Annotated[int, typer.Option(help="Last orbit index of an axis path")] = 6,
    length: Annotated[float, typer.Option("--length", "-T", help="Final time of a stretch path")] = 1.0,
    output: OutputOption = "contract-test.csv",
):
    """
    Empirical strong-contraction constant D of an axis or stretch path.
    """
    _run(
        command="contract-test", seed=seed, automorphisms=[automorphism] if automorphism else None, word=word,
        inputs=[graph] if graph else None, samples=pairs, k_max=k_max, length=length,
        sampler=SamplerConfig(radius=radius), output=output,
    )


@router.command("progress-test")
@handle_exceptions
def progress_test(
    automorphism: AutomorphismOption = None,
    word: WordOption = None,
    graph: GraphOption = None,
    k_max: Annotated[int, typer.Option(help="Last orbit index of an axis path")] = 6,
    length: Annotated[float, typer.Option("--length", "-T", help="Final time of a stretch path")] = 1.0,
    samples: Annotated[int, typer.Option(help="Samples of a stretch path")] = 5,
    word_cap: WordCapOption = None,
    representatives: RepresentativesOption = None,
    output: OutputOption = "progress-test.csv",
):
    """
    d_PL estimates along the path and the quasigeodesic constant K.
    """
    _run(
        command="progress-test", automorphisms=[automorphism] if automorphism else None, word=word,
        inputs=[graph] if graph else None, k_max=k_max, length=length, samples=samples,
        pl=_pl_config(word_cap, representatives), output=output,
    )


@router.command("orbit-test")
@handle_exceptions
def orbit_test(
    generator: Annotated[List[str], typer.Option("--generator", "-a", help="Generator images, repeatable")],
    graph: GraphOption = None,
    radius: Annotated[int, typer.Option(help="Word-metric radius")] = 1,
    word_cap: WordCapOption = None,
    representatives: RepresentativesOption = None,
    output: OutputOption = "orbit-test.csv",
):
    """
    Word length against Lipschitz and PL distances over a ball of the group.
    """
    _run(
        command="orbit-test", automorphisms=generator, inputs=[graph] if graph else None, radius=radius,
        pl=_pl_config(word_cap, representatives), output=output,
    )


@router.command("agree-test")
@handle_exceptions
def agree_test(
    seed: Annotated[int, typer.Option(help="Root seed (mandatory)")],
    automorphism: AutomorphismOption = None,
    word: WordOption = None,
    graph: GraphOption = None,
    samples: Annotated[int, typer.Option(help="Random graphs H")] = 20,
    min_twist: Annotated[int, typer.Option(help="Minimal number of Whitehead twists per sample")] = 2,
    k_max: Annotated[int, typer.Option(help="Last orbit index of an axis path")] = 6,
    output: OutputOption = "agree-test.csv",
):
    """
    Agreement of the length-minimizer and closest-point projections for far graphs.
    """
    _run(
        command="agree-test", seed=seed, automorphisms=[automorphism] if automorphism else None, word=word,
        inputs=[graph] if graph else None, samples=samples, k_max=k_max,
        sampler=SamplerConfig(min_twist=min_twist), output=output,
    )


@router.command("experiment")
@handle_exceptions
def experiment(spec_file: Annotated[str, typer.Argument(help="ExperimentSpec JSON file")]):
    """
    Runs an experiment spec; exit code 1 when it ran with warnings.
    """
    spec = ExperimentSpec.model_validate_json(Path(spec_file).read_text(encoding="utf-8"))
    _finish(dependencies.get_experiment_service().run(spec))
