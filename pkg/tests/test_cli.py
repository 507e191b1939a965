import json
import os

import numpy as np
import pytest

from shilnikov.cli import EXIT_CONFIG, EXIT_DIVERGED, EXIT_OK, fmt, main

from conftest import cardano_roots


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def csv_rows(text):
    lines = [l for l in text.splitlines() if l and not l.startswith("#")]
    header = lines[0].split(",")
    return header, [l.split(",") for l in lines[1:]]


def test_fmt_shortest_roundtrip():
    assert fmt(0.1) == "0.1"
    assert fmt(1.0 / 3.0) == "0.333333333333"
    assert float(fmt(np.pi)) == float(f"{np.pi:.12g}")
    assert fmt(None) == ""
    assert fmt(7) == "7"


def test_equilibria_kinds_and_oracle(capsys):
    code, out, _ = run_cli(capsys, "equilibria", "--b", "0.315")
    assert code == EXIT_OK
    header, rows = csv_rows(out)
    assert len(rows) == 3
    kinds = [r[header.index("kind")] for r in rows]
    assert kinds == ["saddle_focus_1d_stable", "saddle_focus_2d_stable",
                     "saddle_focus_2d_stable"]
    # eigenvalues match the independent closed-form solver
    for r in rows:
        x = float(r[header.index("x")])
        got = np.array([complex(float(r[header.index(f"lam{k}_re")]),
                                float(r[header.index(f"lam{k}_im")]))
                        for k in (1, 2, 3)])
        want = cardano_roots(0.315, 3 * x ** 2 - 1.0)
        assert np.abs(np.sort_complex(got) - np.sort_complex(want)).max() < 1e-9


def test_equilibria_trace_at_b_zero(capsys):
    code, out, _ = run_cli(capsys, "equilibria", "--b", "0")
    header, rows = csv_rows(out)
    for r in rows:
        s = sum(float(r[header.index(f"lam{k}_re")]) for k in (1, 2, 3))
        assert abs(s) < 1e-9


def test_orbit_single_cycle(capsys, tmp_path):
    svg = tmp_path / "orbit.svg"
    code, out, _ = run_cli(capsys, "orbit", "--b", "0.4892",
                           "--svg", str(svg))
    assert code == EXIT_OK
    header, rows = csv_rows(out)
    row = dict(zip(header, rows[0]))
    assert row["outcome"] == "periodic" and row["rotation"] == "1"
    text = svg.read_text()
    assert text.startswith("<svg") and "polyline" in text


def test_orbit_divergence_exit_code(capsys):
    code, out, _ = run_cli(capsys, "orbit", "--b", "0.25")
    assert code == EXIT_DIVERGED
    _, rows = csv_rows(out)
    assert rows[0][1] == "diverged"


def test_orbit_aperiodic_is_success(capsys):
    code, out, _ = run_cli(capsys, "orbit", "--b", "0.3342")
    assert code == EXIT_OK
    _, rows = csv_rows(out)
    assert rows[0][1] == "aperiodic"


def test_config_errors_exit_2(capsys):
    code, _, err = run_cli(capsys, "equilibria", "--b", "1.5")
    assert code == EXIT_CONFIG and "config error" in err
    code, _, err = run_cli(capsys, "orbit", "--b", "0.4", "--seed", "1,2")
    assert code == EXIT_CONFIG
    code, _, err = run_cli(capsys, "scan", "--b-start", "0.4",
                           "--b-end", "0.5", "--step", "0.01")
    assert code == EXIT_CONFIG


def test_scan_csv_contract_and_zero_length(capsys):
    code, out, _ = run_cli(capsys, "scan", "--b-start", "0.5",
                           "--b-end", "0.5", "--step", "0.01")
    assert code == EXIT_OK
    header, rows = csv_rows(out)
    assert header == ["b", "outcome", "rotation", "period", "symmetry",
                      "residual"]
    assert rows == []


def test_scan_rows(capsys):
    code, out, _ = run_cli(capsys, "scan", "--b-start", "0.5",
                           "--b-end", "0.48", "--step", "0.01")
    header, rows = csv_rows(out)
    assert len(rows) == 3
    assert all(r[1] == "periodic" and r[2] == "1" for r in rows)


def test_json_mirrors_csv(capsys):
    code, out_csv, _ = run_cli(capsys, "orbit", "--b", "0.3991")
    code, out_json, _ = run_cli(capsys, "orbit", "--b", "0.3991",
                                "--format", "json")
    header, rows = csv_rows(out_csv)
    payload = json.loads(out_json)
    row = payload["rows"][0]
    assert set(row) == set(header)
    assert row["rotation"] == 2
    assert row["symmetry"] == "pair_member"
    assert payload["rotation_convention"]


def test_determinism_byte_identical(capsys):
    outs = []
    for _ in range(2):
        code, out, _ = run_cli(capsys, "scan", "--b-start", "0.5",
                               "--b-end", "0.49", "--step", "0.01")
        outs.append(out)
    assert outs[0] == outs[1]
    outs = []
    for _ in range(2):
        code, out, _ = run_cli(capsys, "aclass", "--b", "0.4892",
                               "--transient-cut", "50", "--total-time", "100",
                               "--seeds", "2")
        outs.append(out)
    assert outs[0] == outs[1]


def test_cascade_csv_contract(capsys):
    code, out, _ = run_cli(capsys, "cascade", "--character", "13",
                           "--depth", "0")
    assert code == EXIT_OK
    header, rows = csv_rows(out)
    assert header == ["character", "n", "b", "kind", "bracket_width"]
    assert rows[0][0] == "13" and rows[0][1] == "0"
    assert rows[0][3] == "measured"
    assert 0.3333 < float(rows[0][2]) < 0.3334


def test_cascade_accumulation_row_uses_minus_one(capsys):
    code, out, _ = run_cli(capsys, "cascade", "--character", "3",
                           "--depth", "1", "--tol-b", "1e-6")
    header, rows = csv_rows(out)
    assert rows[-1][1] == "-1"
    assert rows[-1][3] == "extrapolated"
    bs = [float(r[2]) for r in rows]
    assert all(x > y for x, y in zip(bs, bs[1:]))


def test_manifold_csv_and_diagnostics(capsys, tmp_path):
    out_path = tmp_path / "curves.csv"
    code, _, _ = run_cli(capsys, "manifold", "--b", "0.315", "--eq", "p2",
                         "--dir", "backward", "--seed-count", "8",
                         "--horizon", "30", "--output", str(out_path))
    assert code == EXIT_OK
    header, rows = csv_rows(out_path.read_text())
    assert header == ["curve_id", "t", "x", "y", "z"]
    ids = {r[0] for r in rows}
    assert len(ids) == 8
    # backward curves exit through the divergence radius: sidecar written
    assert (tmp_path / "curves.csv.diagnostics.txt").exists()


def test_manifold_direction_mismatch_is_config_error(capsys):
    code, _, err = run_cli(capsys, "manifold", "--b", "0.315", "--eq", "p0",
                           "--dir", "backward")
    assert code == EXIT_CONFIG


def test_aclass_bounded_quick(capsys):
    code, out, _ = run_cli(capsys, "aclass", "--b", "0.315",
                           "--transient-cut", "200", "--total-time", "600",
                           "--seeds", "3")
    assert code == EXIT_OK
    header, rows = csv_rows(out)
    assert header == ["x", "y", "z"]
    pts = np.array([[float(v) for v in r] for r in rows])
    assert np.linalg.norm(pts, axis=1).max() < 10.0


def test_feigenbaum_subcommand(capsys):
    code, out, _ = run_cli(capsys, "feigenbaum", "next", "0.3829", "0.3793")
    assert code == EXIT_OK
    assert abs(float(out.strip()) - 0.37853) < 5e-5
    code, out, _ = run_cli(capsys, "feigenbaum", "accum", "0.3829", "0.3793")
    assert abs(float(out.strip()) - 0.37832) < 5e-5
    code, out, _ = run_cli(capsys, "feigenbaum", "delta", "0.4892", "0.3992",
                           "0.3829")
    assert abs(float(out.strip()) - 5.521) < 1e-3
    code, _, err = run_cli(capsys, "feigenbaum", "next", "0.3", "0.4")
    assert code == EXIT_CONFIG


def test_tolerance_env_override_recorded(capsys, monkeypatch):
    monkeypatch.setenv("CASCADE_SCAN_SEED_TOL", "1e-8")
    code, out, _ = run_cli(capsys, "orbit", "--b", "0.4892")
    assert code == EXIT_OK
    assert "CASCADE_SCAN_SEED_TOL override in effect" in out


def test_config_file_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("b=0.3991\nmax-rotation=32\n")
    # file supplies b? b is a required flag, so file covers max_rotation only;
    # explicit flag must win over the file.
    code, out, _ = run_cli(capsys, "orbit", "--b", "0.4892",
                           "--config", str(cfg), "--max-rotation", "16")
    assert code == EXIT_OK
    assert "max_rotation=16" in out
    code, out, _ = run_cli(capsys, "orbit", "--b", "0.4892",
                           "--config", str(cfg))
    assert "max_rotation=32" in out
