"""Rendering tests against small synthetic simulator outputs.

The fixtures are written by hand (not by importing the simulator), so
these tests exercise exactly the decoupled CSV/JSON surface the scripts
consume in production.
"""

import json
import math

import numpy as np
import pytest

from dcefigs import render, spec


def _write_csv(path, header, columns):
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in zip(*columns):
            fh.write(",".join(format(v, ".17g") for v in row) + "\n")


def make_series_manifest(tmp_path, name="fig3a", observable="n",
                         columns=("n_numeric", "n_numeric_lossless", "n_analytic")):
    s = np.linspace(0.0, 10.0, 21)
    t = s / 3.349e7
    data = [s, t] + [np.sinh(0.02 * s) ** 2 * (1 + 0.01 * i) for i in range(len(columns))]
    header = ["s", "t_seconds"] + list(columns)
    fname = f"{name}_{observable}.csv"
    _write_csv(tmp_path / fname, header, data)
    manifest = {
        "schema_version": 1, "name": name,
        "files": {observable: {"file": fname, "columns": header}},
        "wigner_snapshots": [],
    }
    mpath = tmp_path / f"{name}_manifest.json"
    mpath.write_text(json.dumps(manifest))
    return mpath


def make_wigner_manifest(tmp_path, name="fig7b", n_points=41):
    x = np.linspace(-4, 4, n_points)
    xg, pg = np.meshgrid(x, x)
    w = (2 * (xg**2 + pg**2) - 1) * np.exp(-(xg**2 + pg**2)) / math.pi
    fname = f"{name}_wigner_s15p7080.csv"
    with open(tmp_path / fname, "w", newline="\n") as fh:
        for row in w:
            fh.write(",".join(format(v, ".17g") for v in row) + "\n")
    manifest = {
        "schema_version": 1, "name": name, "files": {},
        "wigner_snapshots": [{
            "s": 15.708, "t_seconds": 4.69e-7, "file": fname,
            "x_max": 4.0, "p_max": 4.0, "n_points": n_points,
            "cell_area": (x[1] - x[0]) ** 2,
            "negativity": 0.426, "negative_regions": 1,
            "grid_integral": 1.0, "warnings": [],
        }],
    }
    mpath = tmp_path / f"{name}_manifest.json"
    mpath.write_text(json.dumps(manifest))
    return mpath


def test_series_figure_renders_png_and_svg(tmp_path):
    man = make_series_manifest(tmp_path)
    panel = spec.PanelSpec(manifest=man, kind="series", observable="n",
                           curves=(("n_numeric", "with loss"),
                                   ("n_numeric_lossless", "lossless"),
                                   ("n_analytic", "closed form")),
                           title="overlay", ylabel="<n>")
    fig = spec.FigureSpec("fig3", (panel,), 1, 1)
    written = render.render(fig, tmp_path / "out")
    assert sorted(p.suffix for p in written) == [".png", ".svg"]
    for p in written:
        assert p.exists() and p.stat().st_size > 1000


def test_wigner_surface_and_contour_pair(tmp_path):
    man = make_wigner_manifest(tmp_path)
    figspec = spec.FigureSpec("fig7", (
        spec.PanelSpec(manifest=man, kind="wigner_surface", title="surface"),
        spec.PanelSpec(manifest=man, kind="wigner_contour", title="contour"),
    ), 2, 1)
    written = render.render(figspec, tmp_path / "out")
    assert all(p.exists() for p in written)


def test_missing_csv_fails_descriptively(tmp_path):
    man = make_series_manifest(tmp_path)
    (tmp_path / "fig3a_n.csv").unlink()
    panel = spec.PanelSpec(manifest=man, kind="series", observable="n",
                           curves=(("n_numeric", "x"),))
    with pytest.raises(spec.SchemaError, match="missing CSV"):
        render.render(spec.FigureSpec("fig3", (panel,), 1, 1), tmp_path / "out")


def test_header_mismatch_fails(tmp_path):
    man = make_series_manifest(tmp_path)
    csv = tmp_path / "fig3a_n.csv"
    lines = csv.read_text().splitlines()
    lines[0] = lines[0].replace("n_numeric", "renamed")
    csv.write_text("\n".join(lines) + "\n")
    panel = spec.PanelSpec(manifest=man, kind="series", observable="n",
                           curves=(("n_numeric", "x"),))
    with pytest.raises(spec.SchemaError, match="does not match manifest"):
        render.render(spec.FigureSpec("fig3", (panel,), 1, 1), tmp_path / "out")


def test_empty_overlay_list_fails(tmp_path):
    with pytest.raises(ValueError, match="empty panel list"):
        spec.FigureSpec("fig0", (), 1, 1)
    man = make_series_manifest(tmp_path)
    panel = spec.PanelSpec(manifest=man, kind="series", observable="n", curves=())
    with pytest.raises(spec.SchemaError, match="empty curve list"):
        render.render(spec.FigureSpec("fig3", (panel,), 1, 1), tmp_path / "out")


def test_unknown_observable_fails(tmp_path):
    man = make_series_manifest(tmp_path)
    panel = spec.PanelSpec(manifest=man, kind="series", observable="negativity",
                           curves=(("negativity_kappa", "x"),))
    with pytest.raises(spec.SchemaError, match="no 'negativity' series"):
        render.render(spec.FigureSpec("fig8", (panel,), 1, 1), tmp_path / "out")


def test_wigner_matrix_shape_mismatch(tmp_path):
    man = make_wigner_manifest(tmp_path, n_points=41)
    manifest = json.loads(man.read_text())
    manifest["wigner_snapshots"][0]["n_points"] = 43
    man.write_text(json.dumps(manifest))
    with pytest.raises(spec.SchemaError, match="does not match manifest"):
        spec.load_wigner(spec.load_manifest(man), 0)


def test_calibration_contour(tmp_path):
    t = np.logspace(-4, -2, 5)
    pr = np.logspace(-3, 0, 4)
    rows_i, rows_j, rows_t, rows_p, rows_n, rows_g = [], [], [], [], [], []
    for i, tk in enumerate(t):
        for j, p_ in enumerate(pr):
            rows_i.append(i); rows_j.append(j); rows_t.append(tk); rows_p.append(p_)
            rows_n.append(1.0 / tk); rows_g.append(math.sqrt(1.0 / (tk * p_)))
    header = ["i", "j", "temperature_k", "p_in_ratio", "n_bar_m", "g0_ratio"]
    _write_csv(tmp_path / "fig9_calibration.csv", header,
               [rows_i, rows_j, rows_t, rows_p, rows_n, rows_g])
    manifest = {"schema_version": 1, "name": "fig9", "contour_of_interest": 10.0,
                "files": {"calibration": {"file": "fig9_calibration.csv",
                                          "columns": header}}}
    man = tmp_path / "fig9_manifest.json"
    man.write_text(json.dumps(manifest))
    panel = spec.PanelSpec(manifest=man, kind="calibration_contour", title="cal")
    written = render.render(spec.FigureSpec("fig9", (panel,), 1, 1), tmp_path / "out")
    assert all(p.exists() for p in written)


def test_main_cli_roundtrip_and_missing_input(tmp_path):
    make_series_manifest(tmp_path, name="fig3a")
    make_series_manifest(tmp_path, name="fig3b")
    rc = render.main([str(tmp_path), "--out", str(tmp_path / "figs")])
    assert rc == 0
    assert (tmp_path / "figs" / "fig3.png").exists()
    assert (tmp_path / "figs" / "fig3.svg").exists()
    assert render.main([str(tmp_path / "nope.json"), "--out", str(tmp_path / "f2")]) == 1


def test_discovery_builds_known_families(tmp_path):
    make_series_manifest(tmp_path, name="fig3a")
    mans = render.discover_manifests([str(tmp_path)])
    specs = render.builtin_figure_specs(mans)
    assert [s.name for s in specs] == ["fig3"]
    assert len(specs[0].panels) == 1
