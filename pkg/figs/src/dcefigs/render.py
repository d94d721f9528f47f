"""Render publication-style figures from simulator manifests.

Usage:
    python -m dcefigs <manifest.json|output-dir> ... [--out DIR]

Each known figure family found among the manifests is rendered to PNG
and SVG.  Wigner snapshots come as a 3-D surface with its contour map
directly below, both on a diverging color scale centered at zero so
negative regions are visually unambiguous.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .spec import (FigureSpec, PanelSpec, SchemaError, load_manifest,
                   load_series, load_wigner)

__all__ = ["render", "builtin_figure_specs", "main"]

SERIES_STYLE = {
    "n_numeric": dict(color="tab:red", lw=1.2),
    "n_numeric_lossless": dict(color="tab:orange", ls="--", lw=1.2),
    "n_analytic": dict(color="tab:green", lw=1.6, alpha=0.8),
    "q_numeric": dict(color="tab:red", lw=1.2),
    "q_numeric_lossless": dict(color="tab:orange", ls="--", lw=1.2),
    "q_analytic": dict(color="tab:green", lw=1.6, alpha=0.8),
    "s_q_db_numeric": dict(color="tab:red", lw=0.9),
    "s_p_db_numeric": dict(color="tab:red", lw=0.9),
    "s_q_db_numeric_lossless": dict(color="tab:orange", ls="--", lw=0.9),
    "s_p_db_numeric_lossless": dict(color="tab:orange", ls="--", lw=0.9),
    "s_q_db_analytic": dict(color="tab:green", lw=1.6, alpha=0.8),
    "s_p_db_analytic": dict(color="tab:green", lw=1.6, alpha=0.8),
    "negativity_kappa": dict(color="tab:blue", lw=1.4),
    "negativity_lossless": dict(color="tab:blue", ls="--", lw=1.4),
}


def _plot_series(ax, panel: PanelSpec):
    manifest = load_manifest(panel.manifest)
    cols = load_series(manifest, panel.observable)
    if not panel.curves:
        raise SchemaError(f"panel {panel.title!r}: empty curve list")
    for column, label in panel.curves:
        if column not in cols:
            raise SchemaError(
                f"{manifest['name']}: column {column!r} not in {panel.observable} CSV")
        style = SERIES_STYLE.get(column, {})
        ax.plot(cols["s"], cols[column], label=label, **style)
    ax.set_xlabel(panel.xlabel)
    ax.set_ylabel(panel.ylabel)
    ax.set_title(panel.title, fontsize=9)
    ax.legend(fontsize=7)
    ax.grid(alpha=0.25)


def _wigner_norm(values: np.ndarray):
    vmax = float(np.max(np.abs(values)))
    return -vmax, vmax


def _plot_wigner(ax, panel: PanelSpec, surface: bool):
    manifest = load_manifest(panel.manifest)
    meta, values = load_wigner(manifest, panel.snapshot_index)
    x = np.linspace(-meta["x_max"], meta["x_max"], meta["n_points"])
    p = np.linspace(-meta["p_max"], meta["p_max"], meta["n_points"])
    vmin, vmax = _wigner_norm(values)
    if surface:
        xg, pg = np.meshgrid(x, p)
        ax.plot_surface(xg, pg, values, cmap="RdBu_r", vmin=vmin, vmax=vmax,
                        rcount=80, ccount=80, linewidth=0)
        ax.set_zlabel("W")
    else:
        im = ax.contourf(x, p, values, levels=41, cmap="RdBu_r", vmin=vmin, vmax=vmax)
        ax.contour(x, p, values, levels=[0.0], colors="k", linewidths=0.4)
        plt.colorbar(im, ax=ax, shrink=0.8)
        ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("p")
    ax.set_title(panel.title, fontsize=9)


def _plot_calibration(ax, panel: PanelSpec):
    manifest = load_manifest(panel.manifest)
    cols = load_series(manifest, "calibration")
    t = np.unique(cols["temperature_k"])
    pr = np.unique(cols["p_in_ratio"])
    z = cols["g0_ratio"].reshape(len(t), len(pr))
    im = ax.contourf(pr, t, np.log10(z), levels=31, cmap="viridis")
    target = manifest.get("contour_of_interest", 1e3)
    ax.contour(pr, t, z, levels=[target], colors="k", linestyles="--", linewidths=1.2)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("P_in / P_in_ref")
    ax.set_ylabel("temperature (K)")
    ax.set_title(panel.title, fontsize=9)
    plt.colorbar(im, ax=ax, label="log10 g0/g0_ref")


def render(spec: FigureSpec, out_dir: Path | str) -> list[Path]:
    """Render one figure; returns the written file paths (PNG and SVG)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    fig = plt.figure(figsize=(3.4 * spec.n_cols, 2.9 * spec.n_rows))
    for i, panel in enumerate(spec.panels):
        is3d = panel.kind == "wigner_surface"
        ax = fig.add_subplot(spec.n_rows, spec.n_cols, i + 1,
                             projection="3d" if is3d else None)
        if panel.kind == "series":
            _plot_series(ax, panel)
        elif panel.kind == "wigner_surface":
            _plot_wigner(ax, panel, surface=True)
        elif panel.kind == "wigner_contour":
            _plot_wigner(ax, panel, surface=False)
        elif panel.kind == "calibration_contour":
            _plot_calibration(ax, panel)
        else:
            raise ValueError(f"unknown panel kind {panel.kind!r}")
    fig.suptitle(spec.name)
    fig.tight_layout()
    stem = spec.out_stem or spec.name
    paths = []
    for ext in ("png", "svg"):
        path = out_dir / f"{stem}.{ext}"
        fig.savefig(path, dpi=150 if ext == "png" else None)
        paths.append(path)
    plt.close(fig)
    return paths


# ------------------------------------------------------ built-in families

def _series_panel(manifest_path: Path, observable: str, curves, title, ylabel) -> PanelSpec:
    return PanelSpec(manifest=manifest_path, kind="series", observable=observable,
                     curves=tuple(curves), title=title, ylabel=ylabel)


def builtin_figure_specs(manifests: dict[str, Path]) -> list[FigureSpec]:
    """Figure families constructible from the discovered manifests."""
    specs: list[FigureSpec] = []

    def present(prefix: str, tags: str) -> list[str]:
        return [t for t in tags if f"{prefix}{t}" in manifests]

    fig2 = present("fig2", "abcd")
    if fig2:
        panels = [_series_panel(manifests[f"fig2{t}"], "n",
                                [("n_numeric", "numeric")], f"fig2{t}", "<n>")
                  for t in fig2]
        specs.append(FigureSpec("fig2", tuple(panels), (len(fig2) + 1) // 2, min(2, len(fig2))))
    fig3 = present("fig3", "ab")
    if fig3:
        curves = [("n_numeric", "numeric, with loss"),
                  ("n_numeric_lossless", "numeric, lossless"),
                  ("n_analytic", "closed form")]
        panels = [_series_panel(manifests[f"fig3{t}"], "n", curves, f"fig3{t}", "<n>")
                  for t in fig3]
        specs.append(FigureSpec("fig3", tuple(panels), 1, len(fig3)))
    fig4 = present("fig4", "abc")
    if fig4:
        panels = [_series_panel(manifests[f"fig4{t}"], "q_mandel",
                                [("q_numeric", "numeric")], f"fig4{t}", "Q")
                  for t in fig4]
        specs.append(FigureSpec("fig4", tuple(panels), 1, len(fig4)))
    fig5 = present("fig5", "ab")
    if fig5:
        curves = [("q_numeric", "numeric, with loss"),
                  ("q_numeric_lossless", "numeric, lossless"),
                  ("q_analytic", "closed form")]
        panels = [_series_panel(manifests[f"fig5{t}"], "q_mandel", curves, f"fig5{t}", "Q")
                  for t in fig5]
        specs.append(FigureSpec("fig5", tuple(panels), 1, len(fig5)))
    fig6 = present("fig6", "abcdefgh")
    if fig6:
        col_of = dict(zip("abcdefgh", ["s_q_db", "s_p_db"] * 4))
        panels = []
        for t in fig6:
            col = col_of[t]
            curves = [(f"{col}_numeric", f"{col} numeric")]
            name = manifests[f"fig6{t}"]
            man = load_manifest(name)
            have_cols = man["files"]["squeezing_db"]["columns"]
            if f"{col}_numeric_lossless" in have_cols:
                curves.append((f"{col}_numeric_lossless", "lossless"))
            if f"{col}_analytic" in have_cols:
                curves.append((f"{col}_analytic", "closed form"))
            panels.append(_series_panel(name, "squeezing_db", curves, f"fig6{t}", "dB"))
        specs.append(FigureSpec("fig6", tuple(panels), (len(fig6) + 1) // 2, min(2, len(fig6))))
    fig7 = [t for t in "abcd" if f"fig7{t}" in manifests]
    if fig7:
        top = [PanelSpec(manifest=manifests[f"fig7{t}"], kind="wigner_surface",
                         title=f"fig7{t}") for t in fig7]
        bottom = [PanelSpec(manifest=manifests[f"fig7{t}"], kind="wigner_contour",
                            title=f"fig7{t} contour") for t in fig7]
        specs.append(FigureSpec("fig7", tuple(top + bottom), 2, len(fig7)))
    fig8 = [t for t in "abcd" if f"fig8{t}" in manifests]
    if fig8:
        curves = [("negativity_kappa", "with loss"), ("negativity_lossless", "lossless")]
        panels = [_series_panel(manifests[f"fig8{t}"], "negativity", curves,
                                f"fig8{t}", "negativity") for t in fig8]
        ncols = 2 if len(fig8) > 1 else 1
        specs.append(FigureSpec("fig8", tuple(panels), (len(fig8) + ncols - 1) // ncols, ncols))
    if "fig9" in manifests:
        specs.append(FigureSpec("fig9", (PanelSpec(manifest=manifests["fig9"],
                                                   kind="calibration_contour",
                                                   title="coupling calibration"),), 1, 1))
    return specs


def discover_manifests(args: list[str]) -> dict[str, Path]:
    found: dict[str, Path] = {}
    for arg in args:
        path = Path(arg)
        if path.is_dir():
            candidates = sorted(path.glob("*_manifest.json"))
        else:
            candidates = [path]
        for cand in candidates:
            man = load_manifest(cand)
            found[man.get("name", cand.stem)] = cand
    return found


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="dce-figs",
                                     description="render figures from dcesim outputs")
    parser.add_argument("inputs", nargs="+",
                        help="manifest JSON files and/or directories containing them")
    parser.add_argument("--out", default="figures", help="output directory")
    args = parser.parse_args(argv)
    try:
        manifests = discover_manifests(args.inputs)
        if not manifests:
            raise SchemaError("no manifests found in the given inputs")
        specs = builtin_figure_specs(manifests)
        if not specs:
            raise SchemaError(
                f"no renderable figure family among manifests: {sorted(manifests)}")
        written = []
        for spec in specs:
            written += render(spec, args.out)
        for path in written:
            print(f"wrote {path}")
        return 0
    except (SchemaError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
