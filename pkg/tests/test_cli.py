import json

import pytest

from cuspdrag.cli import fmt, load_config, main

FAST = ["--samples", "5", "--h-min", "1e-6", "--h-max", "1e-3"]


def read(path):
    return path.read_bytes()


def test_sweep_norms_reports_target(tmp_path, capsys):
    out = tmp_path / "n.csv"
    assert main(["sweep-norms", "--alpha", "1", "--out", str(out), "--jobs", "1"]) == 0
    text = capsys.readouterr().out
    assert "l2_grad_w: fitted -0.7497, target -0.7500" in text
    fits = json.loads((tmp_path / "n.fits.json").read_text())
    assert fits["fits"][0]["quantity"] == "l2_grad_w"


def test_csv_header_and_digits(tmp_path):
    out = tmp_path / "n.csv"
    assert main(["sweep-norms", *FAST, "--out", str(out), "--jobs", "1"]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# config: ")
    cfg = json.loads(lines[0][len("# config: "):])
    assert cfg["samples"] == 5
    assert lines[1].split(",")[:2] == ["alpha", "h"]
    assert len(lines) == 2 + 5
    assert fmt(0.1) == "0.10000000000000001"


def test_deterministic_and_independent_of_jobs(tmp_path):
    a, b, c = (tmp_path / f"{k}.csv" for k in "abc")
    base = ["drag-table", *FAST, "--alpha", "0.5,1"]
    assert main([*base, "--out", str(a), "--jobs", "1"]) == 0
    assert main([*base, "--out", str(b), "--jobs", "1"]) == 0
    assert main([*base, "--out", str(c), "--jobs", "2"]) == 0
    assert read(a) == read(b)
    assert read(a) == read(c)


def test_config_replay_and_override(tmp_path):
    first = tmp_path / "first.csv"
    assert main(["sweep-norms", *FAST, "--alpha", "0.5", "--out", str(first), "--jobs", "1"]) == 0
    cfg = load_config(str(first))
    assert cfg["alpha"] == [0.5]
    again = tmp_path / "again.csv"
    assert main(["sweep-norms", "--config", str(first), "--out", str(again)]) == 0
    assert read(first).splitlines()[1:] == read(again).splitlines()[1:]
    over = tmp_path / "over.csv"
    assert main(["sweep-norms", "--config", str(first), "--samples", "4", "--out", str(over)]) == 0
    rows = over.read_text().splitlines()[2:]
    assert len(rows) == 4 and all(r.startswith("0.5,") for r in rows)


def test_ini_config(tmp_path):
    conf = tmp_path / "run.ini"
    conf.write_text("[run]\nalpha = 0.75\nsamples = 3\nh_min = 1e-5\nh_max = 1e-3\n")
    out = tmp_path / "o.csv"
    assert main(["lemma10", "--config", str(conf), "--out", str(out)]) == 0
    rows = out.read_text().splitlines()[2:]
    assert len(rows) == 3 and rows[0].startswith("0.75,")


@pytest.mark.parametrize("args", [
    ["sweep-norms", "--alpha", ""],
    ["sweep-norms", "--alpha", "abc"],
    ["sweep-norms", "--alpha", "-1"],
    ["sweep-norms", "--h-min", "1e-2", "--h-max", "1e-3"],
    ["sweep-norms", "--samples", "2"],
    ["no-such-command"],
    [],
])
def test_usage_errors(args, tmp_path):
    assert main([*args, "--out", str(tmp_path / "x.csv")] if args else args) == 2


def test_bad_config_key(tmp_path):
    conf = tmp_path / "bad.ini"
    conf.write_text("alpha = 1\nbogus = 3\n")
    assert main(["sweep-norms", "--config", str(conf)]) == 2
    assert main(["sweep-norms", "--config", str(tmp_path / "missing.ini")]) == 2


def test_r2_floor_failure_exits_1(tmp_path):
    out = tmp_path / "n.csv"
    assert main(["sweep-norms", *FAST, "--r2-floor", "1.1", "--out", str(out), "--jobs", "1"]) == 1
    assert out.exists()


def test_drag_table_exponent(tmp_path, capsys):
    out = tmp_path / "d.csv"
    assert main(["drag-table", "--alpha", "0.25", "--samples", "9", "--out", str(out),
                 "--jobs", "1"]) == 0
    fits = json.loads((tmp_path / "d.fits.json").read_text())["fits"]
    n = [f for f in fits if f["quantity"] == "n"][0]
    assert n["fitted"] == pytest.approx(-0.6, abs=0.05)
    header = out.read_text().splitlines()[1].split(",")
    assert header == ["alpha", "h", "dirichlet", "pairing", "n", "reynolds", "N"]


def test_sweep_writes_both_tables(tmp_path):
    out = tmp_path / "all"
    assert main(["sweep", *FAST, "--out", str(out), "--jobs", "1"]) == 0
    assert (tmp_path / "all.norms.csv").exists()
    assert (tmp_path / "all.drag.csv").exists()
    assert json.loads((tmp_path / "all.json").read_text())["fits"]


@pytest.mark.parametrize("alpha,outcome", [("0.25", "Collision"),
                                           ("0.75", "NoCollisionWithinHorizon")])
def test_fall_outcome(alpha, outcome, tmp_path):
    out = tmp_path / "f.csv"
    assert main(["fall", "--alpha", alpha, "--out", str(out)]) == 0
    summary = json.loads((tmp_path / "f.summary.json").read_text())
    assert summary["classified"] == outcome
    assert out.read_text().splitlines()[1] == "t,h,hdot,N_of_h,R_model"


def test_fall_power_law_matches_closed_form(tmp_path):
    out = tmp_path / "p.csv"
    summ = tmp_path / "s.json"
    assert main(["fall", "--drag", "power", "--K", "1", "--beta", "0.5", "--h0", "1",
                 "--out", str(out), "--summary", str(summ)]) == 0
    s = json.loads(summ.read_text())
    assert s["contact_time_closed_form"] == pytest.approx(2.0)
    assert s["contact_time"] == pytest.approx(2.0, rel=1e-6)


@pytest.mark.parametrize("where,w", [("solid", [0.0, 1.0]), ("wall", [0.0, 0.0])])
def test_field_probe_boundary(where, w, tmp_path):
    out = tmp_path / "p.json"
    assert main(["field-probe", "--where", where, "--n-points", "5", "--alpha", "0.5",
                 "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    for p in data["points"]:
        assert p["w"] == pytest.approx(w, abs=1e-12)


def test_field_probe_random_passes_fd(tmp_path):
    out = tmp_path / "p.json"
    assert main(["field-probe", "--alpha", "0.25,1", "--h", "1e-2", "--n-points", "20",
                 "--out", str(out)]) == 0
    assert json.loads(out.read_text())["ok"]


def test_field_probe_custom_points(tmp_path):
    out = tmp_path / "p.json"
    assert main(["field-probe", "--where", "custom", "--points", "0.1,0.001",
                 "--out", str(out)]) == 0
    assert len(json.loads(out.read_text())["points"]) == 1


def test_bmo_check(tmp_path):
    out = tmp_path / "b.json"
    assert main(["bmo-check", "--functions", "constant,linear", "--resolutions", "32,64",
                 "--out", str(out), "--jobs", "1"]) == 0
    data = json.loads(out.read_text())
    const = [r for r in data["reports"] if r["function"] == "constant"]
    assert all(r["seminorm_mean"] == 0 and r["interpolation_ratio"] is None for r in const)
    assert len(data["refinement_ratios"]["linear"]) == 1


def test_lemma10_and_plot_script(tmp_path, capsys):
    out = tmp_path / "l.csv"
    plot = tmp_path / "l.gp"
    assert main(["lemma10", "--p", "2", "--q", "3", "--alpha", "0.5", "--samples", "5",
                 "--out", str(out), "--plot-script", str(plot)]) == 0
    assert "regime=" in capsys.readouterr().out
    script = plot.read_text()
    assert str(out) in script
