"""Command-line interface.

Every data-processing subcommand is a thin client of the HTTP service:
input CSVs are read locally, the numerical work happens behind the
service endpoints, and results come back as JSON for printing or writing.
By default the service runs in-process (no network, no separate process);
pass ``--server URL`` or set ``LOGQ_SERVER`` to use a running instance,
which ``logq serve`` provides.
"""

from __future__ import annotations

import asyncio
from pathlib import Path

import click
import httpx

from . import __version__
from .dataio import TableDocument, load_paired_csv, load_xy_csv, write_residual_svg, write_table_csv
from .errors import LogqError


class ServiceClient:
    """POSTs JSON to the service, in-process unless a server URL is given."""

    def __init__(self, server: str | None) -> None:
        self._server = server
        self._app = None

    def post(self, path: str, payload: dict) -> dict:
        if self._server is None:
            return asyncio.run(self._post_in_process(path, payload))
        try:
            response = httpx.post(
                self._server.rstrip("/") + path, json=payload, timeout=3600.0
            )
        except httpx.HTTPError as exc:
            raise click.ClickException(f"service request failed: {exc}")
        return self._decode(response)

    async def _post_in_process(self, path: str, payload: dict) -> dict:
        if self._app is None:
            from .service import create_app

            self._app = create_app()
        transport = httpx.ASGITransport(app=self._app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://logq.internal", timeout=None
        ) as client:
            response = await client.post(path, json=payload)
        return self._decode(response)

    @staticmethod
    def _decode(response: httpx.Response) -> dict:
        if response.status_code >= 400:
            try:
                detail = response.json().get("detail", response.text)
            except ValueError:
                detail = response.text
            raise click.ClickException(str(detail))
        return response.json()


@click.group()
@click.option(
    "--server",
    envvar="LOGQ_SERVER",
    default=None,
    metavar="URL",
    help="Base URL of a running service; by default the service runs in-process.",
)
@click.version_option(__version__, prog_name="logq")
@click.pass_context
def main(ctx: click.Context, server: str | None) -> None:
    """Relative prediction-accuracy toolkit: metrics, fits, and Monte Carlo experiments."""
    ctx.obj = ServiceClient(server)


def _local_io(fn, *args):
    try:
        return fn(*args)
    except LogqError as exc:
        raise click.ClickException(str(exc))


def _echo_pairs(pairs) -> None:
    for label, value in pairs:
        click.echo(f"{label:<12} {value}")


@main.command("metrics")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--actual", default="actual", show_default=True, help="Column of observed values.")
@click.option("--pred", default="predicted", show_default=True, help="Column of predicted values.")
@click.option("--out", default=None, type=click.Path(dir_okay=False), help="Also write the report as CSV.")
@click.pass_obj
def metrics_command(client: ServiceClient, input_path, actual, pred, out) -> None:
    """Evaluate every accuracy measure on a CSV of actual/predicted pairs."""
    observations = _local_io(load_paired_csv, input_path, actual, pred)
    report = client.post(
        "/metrics/evaluate",
        {
            "actuals": observations.actuals.tolist(),
            "predictions": observations.predictions.tolist(),
        },
    )
    lsd_text = "n/a (needs at least 2 observations)" if report["lsd"] is None else f"{report['lsd']:.6g}"
    _echo_pairs(
        [
            ("n", report["n"]),
            ("MAPE", format(report["mape"], ".6g")),
            ("SMAPE", format(report["smape"], ".6g")),
            ("MER", format(report["mer"], ".6g")),
            ("Σ(lnQ)²", format(report["sum_sq_ln_q"], ".6g")),
            ("mean lnQ", format(report["mean_ln_q"], ".6g")),
            ("LSD", lsd_text),
            ("ΠQ", format(report["q_product"], ".6f")),
        ]
    )
    if out:
        doc = TableDocument(
            "accuracy measures",
            ("n", "mape", "smape", "mer", "sum_sq_ln_q", "mean_ln_q", "lsd", "q_product"),
            (
                (
                    report["n"],
                    report["mape"],
                    report["smape"],
                    report["mer"],
                    report["sum_sq_ln_q"],
                    report["mean_ln_q"],
                    float("nan") if report["lsd"] is None else report["lsd"],
                    report["q_product"],
                ),
            ),
        )
        _local_io(write_table_csv, doc, out)
        click.echo(f"report written to {out}", err=True)


def _fit_options(fn):
    options = [
        click.option("--criterion", required=True, type=click.Choice(["mape", "lnq", "ols", "lad"])),
        click.option("--model", required=True, type=click.Choice(["constant", "linear", "power"])),
        click.option("--y", "y_column", default="y", show_default=True, help="Response column."),
        click.option("--x", "x_column", default="x", show_default=True, help="Predictor column."),
        click.option(
            "--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False)
        ),
    ]
    for option in options:
        fn = option(fn)
    return fn


def _request_fit(client: ServiceClient, input_path, x_column, y_column, model, criterion) -> dict:
    data = _local_io(load_xy_csv, input_path, x_column, y_column)
    return client.post(
        "/fit",
        {
            "data": {"xs": data.xs.tolist(), "ys": data.ys.tolist()},
            "model": model,
            "criterion": criterion,
        },
    )


def _print_fit(result: dict) -> None:
    parameters = result["model"]["parameters"]
    q = result["q_product"]
    pairs = [("family", result["model"]["family"])]
    pairs += [(name, format(parameters[name], ".6g")) for name in sorted(parameters)]
    pairs += [
        ("criterion", result["criterion"]),
        ("objective", format(result["objective"], ".6g")),
        ("n_over", result["n_over"]),
        ("n_under", result["n_under"]),
        ("ΠQ", "undefined (non-positive predictions)" if q is None else format(q, ".6f")),
        (
            "converged",
            f"{'yes' if result['converged'] else 'NO'} "
            f"({result['iterations']} objective evaluations)",
        ),
    ]
    _echo_pairs(pairs)


@main.command("fit")
@_fit_options
@click.option(
    "--residuals-out",
    default=None,
    type=click.Path(dir_okay=False),
    help="Residual CSV path; defaults to <input stem>_residuals.csv in the working directory.",
)
@click.pass_obj
def fit_command(client, input_path, x_column, y_column, model, criterion, residuals_out) -> None:
    """Fit a model to an (x, y) CSV and report coefficients and diagnostics."""
    result = _request_fit(client, input_path, x_column, y_column, model, criterion)
    _print_fit(result)
    if result["ln_q_residuals"] is None:
        click.echo(
            "residual CSV skipped: log-ratio residuals undefined (non-positive predictions)",
            err=True,
        )
    else:
        path = residuals_out or f"{Path(input_path).stem}_residuals.csv"
        doc = TableDocument(
            "log accuracy ratio residuals",
            ("x", "ln_q"),
            tuple(zip(result["xs"], result["ln_q_residuals"])),
        )
        _local_io(write_table_csv, doc, path)
        click.echo(f"residuals written to {path}", err=True)
    if not result["converged"]:
        raise click.ClickException(
            f"fit did not converge within {result['iterations']} objective evaluations"
        )


@main.command("residuals")
@_fit_options
@click.option("--svg", "svg_path", required=True, type=click.Path(dir_okay=False))
@click.pass_obj
def residuals_command(client, input_path, x_column, y_column, model, criterion, svg_path) -> None:
    """Fit a model, then chart its log-ratio residuals as an SVG bar chart."""
    result = _request_fit(client, input_path, x_column, y_column, model, criterion)
    _print_fit(result)
    if result["ln_q_residuals"] is None:
        raise click.ClickException(
            "cannot chart log-ratio residuals: the fitted model predicts non-positive values"
        )
    _local_io(write_residual_svg, result["ln_q_residuals"], result["xs"], svg_path)
    click.echo(
        f"chart written to {svg_path}, series to {Path(svg_path).with_suffix('.csv')}", err=True
    )
    if not result["converged"]:
        raise click.ClickException(
            f"fit did not converge within {result['iterations']} objective evaluations"
        )


@main.command("tables")
@click.option("--seed", default=0, show_default=True, type=click.IntRange(min=0))
@click.option("--reps", default=10_000, show_default=True, type=click.IntRange(min=1))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.pass_obj
def tables_command(client, seed, reps, out_dir) -> None:
    """Run the twelve-cell experiment grid and write Table1..Table5 CSVs."""
    response = client.post("/simulate/tables", {"seed": seed, "replications": reps})
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for table in response["tables"]:
        doc = TableDocument(
            table["title"], tuple(table["columns"]), tuple(tuple(row) for row in table["rows"])
        )
        path = out / f"{table['name']}.csv"
        _local_io(write_table_csv, doc, path)
        click.echo(f"wrote {path}", err=True)
    if response["comparison"] is None:
        click.echo(response["comparison_note"])
        return
    misses = 0
    for line in response["comparison"]:
        status = "PASS" if line["within_tolerance"] else "FAIL"
        misses += 0 if line["within_tolerance"] else 1
        click.echo(
            f"{line['table']} sigma={line['sigma']:g} {line['metric']} {line['outcome']}: "
            f"observed {line['observed']:.1f} reference {line['reference']:.1f} "
            f"|diff| {line['deviation']:.1f} {status}"
        )
    total = len(response["comparison"])
    click.echo(f"{total - misses}/{total} reference cells within ±5.0 points")


def _parse_sigma_list(raw: str) -> list[float]:
    values = []
    for piece in raw.split(","):
        piece = piece.strip()
        try:
            value = float(piece)
        except ValueError:
            raise click.BadParameter(f"'{piece}' is not a number")
        if not value > 0.0:
            raise click.BadParameter(f"sigma must be positive, got {piece}")
        values.append(value)
    if not values:
        raise click.BadParameter("need at least one sigma")
    return values


@main.command("simulate")
@click.option(
    "--scenario", required=True, type=click.Choice(["power-mult", "const-mult", "const-add"])
)
@click.option("--sigma", "sigmas", required=True, help="Comma-separated noise levels, e.g. 0.1,0.2.")
@click.option("--reps", default=1000, show_default=True, type=click.IntRange(min=1))
@click.option("--seed", default=0, show_default=True, type=click.IntRange(min=0))
@click.option("--out", default=None, type=click.Path(dir_okay=False), help="Also write rates as CSV.")
@click.pass_obj
def simulate_command(client, scenario, sigmas, reps, seed, out) -> None:
    """Monte Carlo selection rates for one scenario across noise levels."""
    sigma_values = _parse_sigma_list(sigmas)
    click.echo(f"scenario {scenario}  seed {seed}  replications {reps}")
    click.echo(f"{'sigma':<8} {'metric':<14} {'correct%':>9} {'under%':>8} {'over%':>8} {'ties':>6}")
    csv_rows = []
    metric_names = None
    for sigma in sigma_values:
        response = client.post(
            "/simulate",
            {"scenario": scenario, "sigma": sigma, "replications": reps, "seed": seed},
        )
        cells = response["metrics"]
        metric_names = list(cells)
        row = [sigma]
        for name, cell in cells.items():
            click.echo(
                f"{sigma:<8g} {name:<14} {cell['percent_correct']:>9.1f} "
                f"{cell['percent_under']:>8.1f} {cell['percent_over']:>8.1f} {cell['ties']:>6d}"
            )
            row.extend([cell["percent_correct"], cell["percent_under"], cell["percent_over"]])
        csv_rows.append(tuple(row))
    if out:
        columns = ["sigma"]
        for name in metric_names:
            columns.extend([f"{name}_correct", f"{name}_under", f"{name}_over"])
        doc = TableDocument("selection rates", tuple(columns), tuple(csv_rows))
        _local_io(write_table_csv, doc, out)
        click.echo(f"rates written to {out}", err=True)


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve_command(host: str, port: int) -> None:
    """Run the HTTP service; other subcommands can then target it with --server."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
