"""Command-line entry points: serve the HTTP API, generate demo data."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .dataset import dataset_to_csv, load_dataset
from .service import ServiceState, create_app
from .synthetic import crater_grid


@click.group()
def main():
    """Workbench backend for micro-XRF element-abundance maps."""


@main.command()
@click.option("--data", "data_path", required=True, type=click.Path(exists=True, path_type=Path),
              help="CSV file or directory of CSV files to serve.")
@click.option("--port", default=8077, show_default=True, type=int)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--seed", default=0, show_default=True, type=int,
              help="Default seed for cluster requests that omit one.")
@click.option("--workspace-dir", type=click.Path(path_type=Path), default=None,
              help="Directory where workspaces are persisted and restored from.")
def serve(data_path: Path, port: int, host: str, seed: int, workspace_dir: Path | None):
    """Load one or more datasets and serve the JSON API."""
    import uvicorn

    state = ServiceState(default_seed=seed, workspace_dir=workspace_dir)
    paths = sorted(data_path.glob("*.csv")) if data_path.is_dir() else [data_path]
    if not paths:
        click.echo(f"no CSV files found under {data_path}", err=True)
        sys.exit(1)
    for path in paths:
        dataset_id = path.stem
        ds = load_dataset(path, source_id=dataset_id)
        state.add_dataset(dataset_id, ds)
        click.echo(f"loaded {dataset_id}: {ds.n_points} points, "
                   f"{len(ds.element_names)} elements")
    uvicorn.run(create_app(state), host=host, port=port, log_level="warning")


@main.command("demo-data")
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path))
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--width", default=80, show_default=True, type=int)
@click.option("--height", default=80, show_default=True, type=int)
def demo_data(out_path: Path, seed: int, width: int, height: int):
    """Write a synthetic crater-terrain CSV for trying out the workbench."""
    grid = crater_grid(width=width, height=height, seed=seed, source_id=out_path.stem)
    out_path.write_bytes(dataset_to_csv(grid.dataset))
    click.echo(f"wrote {grid.dataset.n_points} points to {out_path}")


if __name__ == "__main__":
    main()
