import logging
from functools import wraps

import typer
from pydantic import ValidationError

from app.core.logging_config import stderr_console
from app.datamanager.exception_classes import GraphFileError, InvalidGraphError, OuterSpaceError

logger = logging.getLogger(__name__)

EXIT_WARNINGS = 1
EXIT_FAILURE = 2


def handle_exceptions(func):
    """
    Wraps a CLI command: domain and validation errors become a diagnostic on
    stderr and exit code 2. typer.Exit passes through untouched.
    """
    @wraps(func)
    def decorator(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except typer.Exit:
            raise
        except InvalidGraphError as e:
            stderr_console.print("[bold red]Invalid graph[/bold red]")
            for violation in e.violations:
                stderr_console.print(f"  {violation.code}: {violation.message}", markup=False)
            raise typer.Exit(code=EXIT_FAILURE)
        except GraphFileError as e:
            stderr_console.print(f"[bold red]Graph file error[/bold red] {e}", highlight=False)
            raise typer.Exit(code=EXIT_FAILURE)
        except OuterSpaceError as e:
            stderr_console.print(f"[bold red]{type(e).__name__}[/bold red] {e}", highlight=False)
            raise typer.Exit(code=EXIT_FAILURE)
        except ValidationError as e:
            stderr_console.print("[bold red]ValidationError[/bold red]")
            for error in e.errors():
                location = ".".join(str(part) for part in error["loc"]) or "<root>"
                stderr_console.print(f"  {location}: {error['msg']}", markup=False)
            raise typer.Exit(code=EXIT_FAILURE)
        except Exception as e:
            logger.exception("Unexpected exception")
            stderr_console.print(f"[bold red]Internal error[/bold red] {e}", highlight=False)
            raise typer.Exit(code=EXIT_FAILURE)
    return decorator
