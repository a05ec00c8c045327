"""
Lab Manager: runs experiments, writes their tables and the run manifest, prints summaries.
"""
import logging
import math
import os
from dataclasses import asdict
from fractions import Fraction
from importlib import metadata

import numpy as np
import yaml
from rich.console import Console
from rich.table import Table

from model.config import Config

from .base import Experiment, ExperimentResult

logger = logging.getLogger("phantomlab.lab")

OUTPUT_FORMATS = ("csv", "json")
MANIFEST_NAME = "manifest.yaml"
TRACKED_PACKAGES = ("numpy", "scipy", "mpmath", "pandas", "click", "rich", "pyyaml", "python-dotenv")
FLOAT_FORMAT = "%.17g"


def _plain(value):
    """Recursively turn numpy scalars, Fractions and tuples into YAML-safe builtins."""
    if isinstance(value, dict):
        return {_plain(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        value = float(value)
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def package_versions() -> dict[str, str]:
    versions = {}
    for name in TRACKED_PACKAGES:
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = "not installed"
    return versions


class LabManager:
    """
    Runs experiments and persists their output under config.output_dir.

    The main table goes to <experiment>.<fmt>; every further table to
    <experiment>_<name>.<fmt>. manifest.yaml records configuration, parameters,
    package versions and annotations, and nothing time-dependent.
    """

    def __init__(self, config: Config, output_format: str = "csv", console: Console | None = None):
        if output_format not in OUTPUT_FORMATS:
            raise ValueError(f"output format must be one of {OUTPUT_FORMATS} (got '{output_format}')")
        self.config = config
        self.output_format = output_format
        self.console = console or Console()
        self.history: list[ExperimentResult] = []

    def run(self, experiment: Experiment) -> ExperimentResult:
        name = experiment.get_experiment_type().value
        logger.info(f"Running {name}: {experiment.parameters()}")
        result = experiment.run()
        paths = self.write(result)
        self.history.append(result)
        logger.info(f"{name} finished ({'ok' if result.ok else 'FAILED'}); wrote {len(paths)} files")
        return result

    def write(self, result: ExperimentResult) -> list[str]:
        os.makedirs(self.config.output_dir, exist_ok=True)
        name = result.experiment.value
        paths = []
        for i, (table, frame) in enumerate(result.frames.items()):
            stem = name if i == 0 else f"{name}_{table}"
            path = os.path.join(self.config.output_dir, f"{stem}.{self.output_format}")
            if self.output_format == "csv":
                frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
            else:
                frame.to_json(path, orient="records", double_precision=15, indent=1)
            paths.append(path)

        manifest_path = os.path.join(self.config.output_dir, MANIFEST_NAME)
        with open(manifest_path, "w", encoding="utf-8") as fh:
            yaml.safe_dump(self.manifest(result, paths), fh, sort_keys=False)
        paths.append(manifest_path)
        return paths

    def manifest(self, result: ExperimentResult, paths: list[str]) -> dict:
        return _plain({
            "experiment": result.experiment.value,
            "ok": result.ok,
            "parameters": result.parameters,
            "config": asdict(self.config),
            "output_format": self.output_format,
            "files": [os.path.basename(p) for p in paths],
            "packages": package_versions(),
            "annotations": result.annotations,
        })

    def print_summary(self, result: ExperimentResult):
        table = Table(title=f"{result.experiment.value}", show_header=True)
        table.add_column("Quantity", style="cyan")
        table.add_column("Value", justify="right")
        for key, value in result.summary:
            table.add_row(key, value)
        for name, frame in result.frames.items():
            table.add_row(f"rows in {name}", str(len(frame)))
        table.add_row("status", "[green]ok[/green]" if result.ok else "[red]FAILED[/red]")
        self.console.print(table)
