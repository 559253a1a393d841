import numpy as np
import pytest

from bandgame import Point
from bandgame.cli import (CONCAVITY_HEADER, REGION_HEADER, SWEEP_HEADER,
                          ScenarioFormatError, format_scenario, main,
                          paper_scenario_path, parse_scenario, write_scenario)
from conftest import random_scenario


@pytest.fixture()
def paper_path():
    return str(paper_scenario_path())


def test_paper_scenario_contents(paper):
    assert paper.source_1 == Point(300.0, 300.0)
    assert paper.dest_1 == Point(500.0, 645.0)
    assert paper.source_2 == Point(390.0, 257.0)
    assert paper.dest_2 == Point(590.0, 603.0)
    assert paper.sigma2 == 1e-13
    assert (paper.p1, paper.p2, paper.p_r) == (0.1, 0.1, 0.08)
    assert paper.alpha == 0.8
    assert paper.b == 1e-5
    assert paper.M == 80
    assert paper.omega == 1e6
    assert (paper.pathloss_const, paper.pathloss_exp) == (0.097, 4.0)


def test_parse_applies_defaults(tmp_path, paper):
    text = "\n".join(
        line for line in format_scenario(paper).splitlines()
        if not line.startswith(("pathloss_const", "pathloss_exp")))
    p = tmp_path / "s.cfg"
    p.write_text(text + "\n")
    parsed = parse_scenario(p)
    assert parsed.pathloss_const == 0.097
    assert parsed.pathloss_exp == 4.0


def test_parse_invariant_violation_names_key(tmp_path, paper):
    text = format_scenario(paper).replace("b = 1e-05", "b = -1")
    p = tmp_path / "bad.cfg"
    p.write_text(text)
    with pytest.raises(ScenarioFormatError, match="b"):
        parse_scenario(p)


def test_parse_diagnostics(tmp_path, paper):
    base = format_scenario(paper)
    cases = [
        (base.replace("omega = 1000000.0\n", ""), "omega"),
        (base.replace("p_r = 0.08", "p_r = eight"), "p_r"),
        (base + "wrong_key = 3\n", "wrong_key"),
        (base + "p1 = 0.2\n", "duplicate"),
        (base.replace("source_1 = 300.0, 300.0", "source_1 = 300.0"), "source_1"),
        (base.replace("M = 80", "M = 80.5"), "M"),
        (base + "just some text\n", "key = value"),
    ]
    for text, needle in cases:
        p = tmp_path / "case.cfg"
        p.write_text(text)
        with pytest.raises(ScenarioFormatError, match=needle):
            parse_scenario(p)


def test_scenario_round_trip(tmp_path, paper):
    rng = np.random.default_rng(41)
    scenarios = [paper] + [random_scenario(rng) for _ in range(5)]
    for k, scenario in enumerate(scenarios):
        p = tmp_path / f"rt{k}.cfg"
        write_scenario(scenario, p)
        assert parse_scenario(p) == scenario


def test_golden_headers():
    assert SWEEP_HEADER == (
        "xr,yr,w1_ne,w2_ne,w1_nbs,w2_nbs,u1_ne,u2_ne,u1_nbs,u2_nbs,"
        "gain_bw_u1_pct,gain_bw_u2_pct,gain_bw_total_pct,gain_sw_pct,"
        "lambda1,lambda2,strictly_concave,converged,cg_matched_oracle")
    assert REGION_HEADER == "w1,w2,u1,u2,on_hull,on_pareto"
    assert CONCAVITY_HEADER == "xr,yr,lambda1,lambda2,strictly_concave"


def test_cli_ne_paper(paper_path, capsys):
    rc = main(["ne", "--scenario", paper_path, "--relay", "450,450"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "kind=NE" in out
    w1 = float(out.split("w1 = ")[1].splitlines()[0])
    assert w1 == pytest.approx(148130.46015173438, rel=1e-9)


def test_cli_ne_useless_relay(paper_path, capsys):
    rc = main(["ne", "--scenario", paper_path, "--relay", "1e6,1e6"])
    out = capsys.readouterr().out
    assert rc == 0
    assert float(out.split("w1 = ")[1].splitlines()[0]) == 0.0
    assert float(out.split("w2 = ")[1].splitlines()[0]) == 0.0


def test_cli_nbs_with_oracle(paper_path, capsys):
    rc = main(["nbs", "--scenario", paper_path, "--relay", "450,450", "--oracle"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "kind=NBS" in out
    assert "oracle_match = true" in out


def test_cli_region(paper_path, tmp_path, capsys):
    out_file = tmp_path / "region.csv"
    rc = main(["region", "--scenario", paper_path, "--relay", "450,450",
               "--resolution", "41", "--out", str(out_file)])
    assert rc == 0
    lines = out_file.read_text().splitlines()
    assert lines[0] == REGION_HEADER
    assert len(lines) == 1 + 41 * 41
    hull_rows = [l for l in lines[1:] if l.split(",")[4] == "true"]
    pareto_rows = [l for l in lines[1:] if l.split(",")[5] == "true"]
    assert hull_rows and pareto_rows
    assert len(pareto_rows) <= len(hull_rows)


def test_cli_sweep_corner_grid(paper_path, tmp_path):
    out_file = tmp_path / "sweep.csv"
    rc = main(["sweep", "--scenario", paper_path, "--step", "700",
               "--oracle-resolution", "101", "--out", str(out_file)])
    assert rc == 0
    lines = out_file.read_text().splitlines()
    assert lines[0] == SWEEP_HEADER
    assert len(lines) == 1 + 4  # the four corners of [0, 700]^2
    for line in lines[1:]:
        assert len(line.split(",")) == len(SWEEP_HEADER.split(","))


def test_cli_sweep_deterministic(paper_path, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["sweep", "--scenario", paper_path, "--step", "350",
            "--oracle-resolution", "101"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_cli_output_dir_env(paper_path, tmp_path, monkeypatch):
    monkeypatch.setenv("BANDGAME_OUTPUT_DIR", str(tmp_path / "outputs"))
    rc = main(["concavity-map", "--scenario", paper_path, "--step", "700",
               "--oracle-resolution", "51", "--out", "conc.csv"])
    assert rc == 0
    lines = (tmp_path / "outputs" / "conc.csv").read_text().splitlines()
    assert lines[0] == CONCAVITY_HEADER
    assert len(lines) == 1 + 4


def test_cli_error_exits(paper_path, tmp_path, capsys):
    assert main(["ne", "--scenario", str(tmp_path / "missing.cfg"),
                 "--relay", "450,450"]) == 2
    assert "error" in capsys.readouterr().err
    bad = tmp_path / "bad.cfg"
    bad.write_text("p1 = 0.1\n")
    assert main(["ne", "--scenario", str(bad), "--relay", "450,450"]) == 2
    # relay on top of a node is a degenerate geometry
    assert main(["ne", "--scenario", paper_path, "--relay", "300,300"]) == 2


def test_cli_full_precision_output(paper_path, capsys):
    main(["ne", "--scenario", paper_path, "--relay", "450,450"])
    out = capsys.readouterr().out
    line = [l for l in out.splitlines() if l.startswith("w1 = ")][0]
    mantissa = line.split(" = ")[1]
    assert "e+" in mantissa or "e-" in mantissa
    assert len(mantissa.split("e")[0].split(".")[1]) == 17
