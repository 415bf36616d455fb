""" CONSTANT CALCULATOR COMMANDS """
from typing import Annotated, Optional

import typer
from rich.console import Console
from rich.table import Table

from app.core.config import LIPSCHITZ_CONSTANT
from app.datamanager.exceptions_handler import handle_exceptions
from app.outerspace.constants import constants_table
from app.outerspace.metric import estimate_sym_constant

# --- Create Typer instance ---
router = typer.Typer()
console = Console()


@router.command("constants")
@handle_exceptions
def constants(
    d: Annotated[float, typer.Option("--d", "-D", help="Contraction constant D")],
    lipschitz: Annotated[float, typer.Option("--lipschitz", "-L", help="Coarse Lipschitz constant of the PL projection")] = LIPSCHITZ_CONSTANT,
    epsilon: Annotated[Optional[float], typer.Option(help="Thickness epsilon in (0, 1)")] = None,
    s_eps: Annotated[Optional[float], typer.Option(help="Symmetrization constant at epsilon")] = None,
    s_eps_prime: Annotated[Optional[float], typer.Option(help="Symmetrization constant at epsilon'")] = None,
    d_epsilon: Annotated[Optional[float], typer.Option(help="Transient-shortness constant D_eps")] = None,
    plain: Annotated[bool, typer.Option(help="Tab-separated output instead of a table")] = False,
):
    """
    Every constant determined by the inputs, with the formula it comes from.
    """
    rows = constants_table(d, lipschitz, epsilon, s_eps, s_eps_prime, d_epsilon)
    if plain:
        for row in rows:
            typer.echo(f"{row.name}\t{row.value!r}\t{row.provenance}")
        return
    table = Table("constant", "value", "provenance")
    for row in rows:
        table.add_row(row.name, f"{row.value:.12g}", row.provenance)
    console.print(table)


@router.command("estimate-sym")
@handle_exceptions
def estimate_sym(
    epsilon: Annotated[float, typer.Option(help="Thickness epsilon in (0, 1/rank]")],
    seed: Annotated[int, typer.Option(help="Root seed")],
    samples: Annotated[int, typer.Option(help="Random pairs")] = 50,
    rank: Annotated[int, typer.Option(help="Free group rank")] = 3,
):
    """
    Empirical lower estimate of the thick-part symmetrization constant.
    """
    typer.echo(estimate_sym_constant(epsilon, samples, seed, rank).model_dump_json())
