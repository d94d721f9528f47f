"""Figure specifications and manifest/CSV ingestion.

These scripts are deliberately thin: every plotted quantity must
already exist as a CSV column written by the simulator (dB conversions
included), and rendering is read-only over its inputs.  A manifest is
the single entry point; CSV files are resolved relative to it and their
headers are checked against the column lists the manifest recorded.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = ["PanelSpec", "FigureSpec", "SchemaError", "load_manifest",
           "load_series", "load_wigner"]


class SchemaError(ValueError):
    """CSV missing or its header disagrees with the manifest."""


@dataclass(frozen=True)
class PanelSpec:
    """One axes worth of content.

    kind: "series" (curves from one observable CSV), "wigner_surface",
    "wigner_contour" (one snapshot), or "calibration_contour".
    """

    manifest: Path
    kind: str
    observable: str = ""            # series: which per-observable CSV
    curves: tuple[tuple[str, str], ...] = ()   # (column, legend label)
    snapshot_index: int = 0         # wigner: which snapshot
    title: str = ""
    xlabel: str = "s"
    ylabel: str = ""


@dataclass(frozen=True)
class FigureSpec:
    """A full figure: layout plus one PanelSpec per axes."""

    name: str
    panels: tuple[PanelSpec, ...]
    n_rows: int
    n_cols: int
    out_stem: str = ""

    def __post_init__(self):
        if not self.panels:
            raise ValueError(f"figure {self.name!r}: empty panel list")
        if len(self.panels) > self.n_rows * self.n_cols:
            raise ValueError(f"figure {self.name!r}: more panels than layout slots")


def load_manifest(path: Path | str) -> dict:
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"manifest not found: {path}")
    with open(path) as fh:
        manifest = json.load(fh)
    manifest["_dir"] = str(path.parent)
    return manifest


def _read_csv(path: Path, expected_columns: list[str]) -> dict[str, np.ndarray]:
    if not path.exists():
        raise SchemaError(f"missing CSV referenced by manifest: {path}")
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    if header != list(expected_columns):
        raise SchemaError(
            f"{path.name}: header {header} does not match manifest columns {expected_columns}")
    data = np.genfromtxt(path, delimiter=",", skip_header=1)
    data = np.atleast_2d(data)
    return {name: data[:, i] for i, name in enumerate(header)}


def load_series(manifest: dict, observable: str) -> dict[str, np.ndarray]:
    files = manifest.get("files", {})
    if observable not in files:
        raise SchemaError(
            f"manifest {manifest.get('name')!r} has no {observable!r} series "
            f"(available: {sorted(files)})")
    entry = files[observable]
    return _read_csv(Path(manifest["_dir"]) / entry["file"], entry["columns"])


def load_wigner(manifest: dict, index: int = 0) -> tuple[dict, np.ndarray]:
    snaps = manifest.get("wigner_snapshots", [])
    if not snaps:
        raise SchemaError(f"manifest {manifest.get('name')!r} has no Wigner snapshots")
    if not 0 <= index < len(snaps):
        raise SchemaError(f"snapshot index {index} out of range (0..{len(snaps) - 1})")
    meta = snaps[index]
    path = Path(manifest["_dir"]) / meta["file"]
    if not path.exists():
        raise SchemaError(f"missing Wigner matrix referenced by manifest: {path}")
    values = np.atleast_2d(np.genfromtxt(path, delimiter=","))
    if values.shape != (meta["n_points"], meta["n_points"]):
        raise SchemaError(
            f"{path.name}: matrix shape {values.shape} does not match manifest "
            f"n_points {meta['n_points']}")
    return meta, values
