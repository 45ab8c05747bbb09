import concurrent.futures
import logging
from contextlib import contextmanager
from pathlib import Path
from typing import List, Optional

import numpy as np
import polars as pl
import typer
from rich.console import Console
from rich.logging import RichHandler
from rich.progress import Progress
from rich.table import Table

from src.classifier.engine import ClassifierEngine
from src.classifier.profile import ProfileManager
from src.classifier.report import FLAG_NAMES, ClassificationReport, Flag
from src.config import DEFAULT_SEED, MAX_WORKERS
from src.errors import NumericalError, QcorrError, ValidationError
from src.linalg.dense import herm_spectrum
from src.measures.correlations import MEASURES, MeasureOptions
from src.sppt.cholesky import Side
from src.sppt.ensemble import extract_separable_ensemble
from src.sppt.decision import find_ssppt_frame
from src.states.bipartite import partial_trace_a, partial_trace_b, purity
from src.states.catalog import FAMILIES, FamilyParams, generate
from src.storage.state_store import StateStore

app = typer.Typer()
console = Console()
err_console = Console(stderr=True)
store = StateStore()

CSV_COLUMNS = ["file", "dim_a", "dim_b", *FLAG_NAMES, "separability", "reason"]
FLAG_STYLES = {Flag.YES: "green", Flag.NO: "red", Flag.MARGINAL: "yellow"}


@app.callback()
def main(verbose: bool = typer.Option(False, "--verbose", "-v", help="Log debug output")):
    """Bipartite state classification and correlation measures."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=err_console, show_path=False)],
        force=True,
    )


@contextmanager
def _exit_on_error():
    """Validation problems exit with 1, numerical failures with 2."""
    try:
        yield
    except ValidationError as e:
        err_console.print(f"[red]{e}[/red]")
        raise typer.Exit(code=1)
    except NumericalError as e:
        err_console.print(f"[red]Numerical failure: {e}[/red]")
        raise typer.Exit(code=2)


def _key_values(pairs: Optional[List[str]]) -> dict:
    out = {}
    for item in pairs or []:
        if "=" not in item:
            raise typer.BadParameter(f"expected key=value, got {item!r}")
        key, value = item.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _print_report(report: ClassificationReport, title: str) -> None:
    table = Table(title=title)
    table.add_column("Flag", style="cyan", no_wrap=True)
    table.add_column("Value")
    table.add_column("Residual", justify="right")
    table.add_column("Tol", justify="right")
    table.add_column("Note", style="dim")
    for name in FLAG_NAMES:
        ev = report.flags[name]
        style = FLAG_STYLES[ev.flag]
        table.add_row(name, f"[{style}]{ev.flag.value}[/{style}]", f"{ev.residual:.2e}", f"{ev.tol:.0e}", ev.note)
    console.print(table)

    sep = report.separability
    reason = f" ({sep.reason.value})" if sep.reason else ""
    console.print(f"[bold]Separability:[/bold] {sep.verdict.value}{reason} {sep.detail}".rstrip())
    for name, result in report.measures.items():
        console.print(f"  {name}: {result['value']:.10g} [{result['certificate']}]")
    if report.ensemble is not None:
        console.print(
            f"  ensemble: {len(report.ensemble)} terms, residual {report.ensemble.residual:.2e}"
        )
    for warning in report.warnings:
        console.print(f"[yellow]warning: {warning}[/yellow]")


@app.command()
def classify(
    file: Path,
    json_output: bool = typer.Option(False, "--json", help="Print the report as JSON"),
    measures: bool = typer.Option(False, "--measures", help="Also compute MiN, GMQD and discord"),
    tol: Optional[float] = typer.Option(None, "--tol", help="Commutation / residual tolerance"),
    profile: Optional[str] = typer.Option(None, help="Load tolerances from a profile (YAML)"),
    save_profile: Optional[str] = typer.Option(None, help="Save the effective tolerances to a profile"),
    ensemble: bool = typer.Option(False, "--ensemble", help="Attach a separable ensemble when SSPPT holds"),
    seed: int = typer.Option(DEFAULT_SEED, help="Seed for the measure optimizer"),
    restarts: int = typer.Option(16, help="Optimizer restarts"),
):
    """
    Place a state on the product / zero-MiN / CQ / SSPPT / separable / PPT chain.
    """
    with _exit_on_error():
        # Precedence: explicit option > profile > environment default
        tolerances = ProfileManager.resolve_tolerances({"commute": tol}, profile)
        if save_profile:
            path = ProfileManager.save_profile(save_profile, tolerances.as_dict())
            err_console.print(f"[green]Profile saved to {path}[/green]")

        s = store.load_state(file, tolerances)
        engine = ClassifierEngine(tolerances)
        opts = MeasureOptions(seed=seed, restarts=restarts, tol=tolerances)
        report = engine.classify(s, with_measures=measures, with_ensemble=ensemble, measure_opts=opts)

    if json_output:
        typer.echo(report.to_json())
    else:
        _print_report(report, f"{file.name} ({s.dim_a}x{s.dim_b})")


@app.command()
def gen(
    family: str = typer.Argument(..., help=f"One of: {', '.join(FAMILIES)}"),
    output: Path = typer.Option(..., "-o", "--output", help="State file to write"),
    dim_a: int = typer.Option(2, help="Dimension of A"),
    dim_b: int = typer.Option(2, help="Dimension of B"),
    seed: int = typer.Option(0, help="Seed for random families"),
    side: str = typer.Option("b", help="SSPPT side for ssppt-random (a|b)"),
    rank: Optional[int] = typer.Option(None, help="Rank for the random family"),
    p: float = typer.Option(0.5, "--p", help="Werner weight"),
    schmidt: str = typer.Option("1", "--l", help="Comma-separated Schmidt coefficients (renormalized)"),
    a11: Optional[str] = typer.Option(None, "--a11"),
    a22: Optional[str] = typer.Option(None, "--a22"),
    b11: Optional[str] = typer.Option(None, "--b11"),
    b22: Optional[str] = typer.Option(None, "--b22"),
    a12: Optional[str] = typer.Option(None, "--a12", help="Complex, e.g. 0.1+0.05j"),
    b12: Optional[str] = typer.Option(None, "--b12", help="Complex, e.g. 0.1-0.05j"),
    param: Optional[List[str]] = typer.Option(None, "--param", help="Extra key=value family parameter"),
):
    """
    Generate a state from a named family and write it as JSON.
    Example: python main.py gen circulant --a11 .25 --a22 .25 --b11 .25 --b22 .25 -o i4.json
    """
    values = _key_values(param)
    for key, value in (("a11", a11), ("a22", a22), ("b11", b11), ("b22", b22), ("a12", a12), ("b12", b12)):
        if value is not None:
            values[key] = value
    try:
        lambdas = [float(x) for x in schmidt.split(",") if x.strip()]
    except ValueError:
        err_console.print(f"[red]Cannot parse Schmidt coefficients: {schmidt}[/red]")
        raise typer.Exit(code=1)

    params = FamilyParams(dim_a, dim_b, seed, side, rank, p, lambdas, values)
    with _exit_on_error():
        try:
            s = generate(family, params)
        except ValueError as e:
            if isinstance(e, QcorrError):
                raise
            raise ValidationError(f"bad parameter: {e}") from e
        path = store.save_state(s, output)
    console.print(f"[green]Wrote {family} state ({s.dim_a}x{s.dim_b}) to {path}[/green]")


@app.command()
def measure(
    file: Path,
    min_a: bool = typer.Option(False, "--min-a", help="MiN with measurement on A"),
    min_b: bool = typer.Option(False, "--min-b", help="MiN with measurement on B"),
    gmqd_a: bool = typer.Option(False, "--gmqd-a", help="Geometric discord on A"),
    gmqd_b: bool = typer.Option(False, "--gmqd-b", help="Geometric discord on B"),
    discord_a: bool = typer.Option(False, "--discord-a", help="Entropic discord on A"),
    discord_b: bool = typer.Option(False, "--discord-b", help="Entropic discord on B"),
    seed: int = typer.Option(DEFAULT_SEED, help="Optimizer seed"),
    restarts: int = typer.Option(16, help="Optimizer restarts"),
    grid: int = typer.Option(64, help="Bloch grid size for qubit measurements"),
):
    """
    Compute correlation measures of a stored state.
    """
    chosen = {
        "min-a": min_a,
        "min-b": min_b,
        "gmqd-a": gmqd_a,
        "gmqd-b": gmqd_b,
        "discord-a": discord_a,
        "discord-b": discord_b,
    }
    selected = [name for name, on in chosen.items() if on]
    if not selected:
        err_console.print("[red]Choose at least one measure, e.g. --min-a[/red]")
        raise typer.Exit(code=1)

    opts = MeasureOptions(seed=seed, restarts=restarts, grid=grid)
    table = Table(title=f"Measures of {file.name}")
    table.add_column("Measure", style="cyan")
    table.add_column("Value", justify="right")
    table.add_column("Certificate")
    table.add_column("Agreeing restarts", justify="right")
    table.add_column("Classical correlation", justify="right")
    with _exit_on_error():
        s = store.load_state(file)
        for name in selected:
            result = MEASURES[name](s, opts)
            classical = "-" if result.classical_correlation is None else f"{result.classical_correlation:.12g}"
            table.add_row(
                name, f"{result.value:.12g}", result.certificate.value, str(result.restarts_agreeing), classical
            )
    console.print(table)


@app.command()
def decompose(
    file: Path,
    side: str = typer.Option("b", help="Factorize up to part a or b"),
    output: Path = typer.Option(..., "-o", "--output", help="Ensemble file to write"),
):
    """
    Extract a separable ensemble from an SSPPT state.
    """
    with _exit_on_error():
        s = store.load_state(file)
        parsed = Side.parse(side)
        report = find_ssppt_frame(s, parsed)
        ensemble = extract_separable_ensemble(s, parsed, report.tol, report.frame)
        path = store.save_ensemble(ensemble, output)
    console.print(f"[green]Wrote {len(ensemble)} product terms to {path}[/green]")
    console.print(f"reconstruction residual: {ensemble.residual:.3e}")
    console.print(f"weight sum: {ensemble.weight_sum:.12g}")


def _classify_one(path: Path, engine: ClassifierEngine) -> dict:
    try:
        s = store.load_state(path, engine.tol)
        return engine.classify(s).csv_row(path.name)
    except QcorrError as e:
        row = {column: "" for column in CSV_COLUMNS}
        row.update({"file": path.name, "separability": "Error", "reason": str(e)})
        return row


@app.command()
def batch(
    directory: Path,
    report: Path = typer.Option(..., "--report", help="CSV file to write"),
    workers: int = typer.Option(MAX_WORKERS, help="Concurrent classifications"),
    profile: Optional[str] = typer.Option(None, help="Tolerance profile"),
):
    """
    Classify every *.json state in a directory and write a CSV report.
    """
    if not directory.is_dir():
        err_console.print(f"[red]Not a directory: {directory}[/red]")
        raise typer.Exit(code=1)

    with _exit_on_error():
        engine = ClassifierEngine(ProfileManager.resolve_tolerances(profile=profile))
    files = store.list_states(directory)
    if not files:
        console.print("[yellow]No state files found.[/yellow]")

    rows = []
    with Progress(console=err_console) as progress:
        task_id = progress.add_task("Classifying...", total=len(files))
        with concurrent.futures.ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
            future_to_path = {executor.submit(_classify_one, path, engine): path for path in files}
            for future in concurrent.futures.as_completed(future_to_path):
                rows.append(future.result())
                progress.advance(task_id)

    rows.sort(key=lambda r: r["file"])
    df = pl.DataFrame(
        {column: [str(r[column]) for r in rows] for column in CSV_COLUMNS},
        schema={column: pl.Utf8 for column in CSV_COLUMNS},
    )
    report.parent.mkdir(parents=True, exist_ok=True)
    df.write_csv(report)

    errors = sum(1 for r in rows if r["separability"] == "Error")
    console.print(f"[bold green]Classified {len(rows) - errors} states[/bold green] -> {report}")
    if errors:
        console.print(f"[yellow]{errors} files could not be classified[/yellow]")


@app.command()
def show(file: Path, digits: int = typer.Option(4, help="Digits per entry")):
    """
    Show dimensions, marginal spectra, purity and the matrix of a state.
    """
    with _exit_on_error():
        s = store.load_state(file)

    console.print(f"[bold]{file.name}[/bold]: {s.dim_a}x{s.dim_b}, purity {purity(s):.10g}")
    console.print(f"spectrum rho_A: {np.round(herm_spectrum(partial_trace_b(s)), digits).tolist()}")
    console.print(f"spectrum rho_B: {np.round(herm_spectrum(partial_trace_a(s)), digits).tolist()}")

    table = Table(title="rho", show_header=False)
    for _ in range(s.dim):
        table.add_column(justify="right")
    for row in s.rho:
        table.add_row(*[_format_entry(z, digits) for z in row])
    console.print(table)


def _format_entry(z: complex, digits: int) -> str:
    if abs(z) < 10 ** (-digits):
        return "0"
    if abs(z.imag) < 10 ** (-digits):
        return f"{z.real:.{digits}f}"
    return f"{z.real:.{digits}f}{z.imag:+.{digits}f}i"


@app.command()
def profiles():
    """List saved tolerance profiles."""
    names = ProfileManager.list_profiles()
    if not names:
        console.print("[yellow]No profiles found.[/yellow]")
        return
    table = Table(title="Tolerance profiles")
    table.add_column("Name", style="cyan")
    for key in ("hermitian", "positivity", "commute", "weight_gap", "marginal_factor"):
        table.add_column(key, justify="right")
    for name in names:
        with _exit_on_error():
            tol = ProfileManager.resolve_tolerances(profile=name)
        values = tol.as_dict()
        table.add_row(name, *[f"{values[k]:g}" for k in ("hermitian", "positivity", "commute", "weight_gap", "marginal_factor")])
    console.print(table)


if __name__ == "__main__":
    app()
