import json
import subprocess
import sys

import pytest

from saq.cli import main
from saq.relation import corpus_path

SUBCOMMANDS = ["validate", "complexity", "avoid", "atlas", "rep", "cover", "plot"]


@pytest.mark.parametrize("cmd", SUBCOMMANDS)
def test_help(cmd, capsys):
    assert main([cmd, "--help"]) == 0
    out = capsys.readouterr().out
    assert out.startswith(f"usage: saq {cmd}")


def test_top_level_usage(capsys):
    assert main([]) == 2
    assert main(["frobnicate"]) == 2


def test_validate_corpus_file(capsys):
    assert main(["validate", "examples/circles.saq"]) == 0
    assert main(["validate", corpus_path("rays"), "--json"]) == 0
    out = capsys.readouterr().out
    assert json.loads(out[out.index("{"):])["ok"] is True


def test_validate_broken_file(tmp_path, capsys):
    f = tmp_path / "broken.saq"
    f.write_text('relation {\n ambient: 1\n vars: x1, y1\n class_eqs: ["y1 - x1^2"]\n domain: { }\n}\n')
    assert main(["validate", str(f), "--samples", "5"]) == 1
    assert "reflexivity" in capsys.readouterr().err


def test_parse_error_exit_2(tmp_path, capsys):
    f = tmp_path / "bad.saq"
    f.write_text('relation { ambient: 2\n class_eqs: ["y1 +"] }')
    assert main(["validate", str(f)]) == 2
    assert main(["validate", str(tmp_path / "missing.saq")]) == 2


def test_rep_missing_point_is_usage_error(capsys):
    assert main(["rep", "examples/circles.saq", "--chart-point", "1,0"]) == 2
    assert "usage" in capsys.readouterr().err


def test_rep_outputs_json_lines(capsys):
    assert main(["rep", "circles", "--point", "3,4", "--chart-point", "1,0", "--all-feet"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    feet = [json.loads(line) for line in lines]
    assert [round(f["distance"], 9) for f in feet] == [4, 6]
    assert main(["rep", "circles", "--point", "3,4", "--chart-point", "1,0"]) == 0
    assert len(capsys.readouterr().out.strip().splitlines()) == 1


def test_complexity_and_avoid(capsys):
    assert main(["complexity", "--set", "{x1^2 + x2^2 - 25 = 0}", "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["complexity"] == 2
    assert main(["avoid", "-n", "2", "-d", "2", "--seed", "4"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert len(data["points"]) == 6 and data["certificate"]["full_column_rank"]


def test_seed_env_override(monkeypatch, capsys):
    monkeypatch.setenv("SAQ_SEED", "4")
    main(["avoid", "-n", "1", "-d", "3"])
    env = capsys.readouterr().out
    monkeypatch.delenv("SAQ_SEED")
    main(["avoid", "-n", "1", "-d", "3", "--seed", "4"])
    assert capsys.readouterr().out == env
    main(["avoid", "-n", "1", "-d", "3"])
    assert capsys.readouterr().out != env


def test_atlas_cover_plot_pipeline(tmp_path, capsys):
    out = tmp_path / "a.json"
    svg = tmp_path / "a.svg"
    assert main(["atlas", "rays", "--samples", "60", "--threads", "1", "-o", str(out)]) == 0
    assert len(json.loads(out.read_text())["charts"]) == 3
    assert main(["cover", "rays", str(out), "--samples", "40", "--threads", "1"]) == 0
    assert main(["plot", str(out), "-o", str(svg)]) == 0
    assert svg.read_text().startswith("<svg")
    assert main(["atlas", "rays", "--samples", "40", "--max-charts", "1", "--threads", "1",
                 "-o", str(tmp_path / "b.json")]) == 1


def test_atlas_region_flag(tmp_path):
    out = tmp_path / "c.json"
    assert main(["atlas", "circles", "--samples", "40", "--region=-10:10",
                 "--where", "{x1^2 + x2^2 >= 1/4}", "--threads", "1", "-o", str(out)]) == 0
    cfg = json.loads(out.read_text())["config"]
    assert cfg["box"] == {"lo": ["-10/1", "-10/1"], "hi": ["10/1", "10/1"]}
    assert main(["atlas", "circles", "--region=3:1"]) == 2


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "saq", "complexity", "--set", "{x1 > 0}"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "complexity" in res.stdout
