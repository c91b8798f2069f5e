import json
import shutil
import subprocess
from pathlib import Path

import pytest

from chromatic_alpha import cli
from chromatic_alpha.validation import SuiteResult

GOLDEN = Path(__file__).parent / "golden"
LINE = str(GOLDEN / "line.txt")


def run(argv, tmp_path, name="out"):
    out = tmp_path / name
    code = cli.main(argv + ["-o", str(out)])
    return code, out.read_text() if out.exists() else None


@pytest.mark.parametrize("argv, golden", [
    (["delaunay", LINE], "line.mosaic.json"),
    (["filtration", LINE], "line.radius.json"),
    (["sixpack", LINE, "--mode", "color:0"], "line.sixpack.json"),
    (["mst-ratio", LINE, "--csv"], "line.mst.csv"),
    (["sixpack", str(GOLDEN / "square.txt"), "--mode", "1..2"], "square.sixpack.json"),
    (["config"], "defaults.cfg"),
])
def test_golden_outputs(argv, golden, tmp_path):
    code, text = run(argv, tmp_path)
    assert code == 0
    assert text == (GOLDEN / golden).read_text()


def test_collinear_ratio(tmp_path):
    code, text = run(["mst-ratio", LINE], tmp_path)
    assert code == 0 and "mst_ratio=1.000000000000" in text


def test_identity_mode_empty_sections(tmp_path):
    code, text = run(["sixpack", LINE, "--mode", "identity"], tmp_path)
    d = json.loads(text)["diagrams"]
    assert code == 0
    for label in ("kernel", "cokernel", "relative"):
        assert [r for r in d[label] if not r["collapsible"]] == []
    assert d["domain"] == d["image"] == d["codomain"]


def test_input_errors(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("d=2 s=0\n0 0\n")
    assert cli.main(["delaunay", str(bad)]) == 2
    assert cli.main(["delaunay", str(tmp_path / "missing.txt")]) == 2
    assert cli.main(["sixpack", LINE, "--mode", "color:5"]) == 2
    assert cli.main(["sixpack", LINE, "--mode", "2..1"]) == 2
    assert cli.main(["sixpack", LINE, "--C", "0"]) == 2
    assert cli.main(["delaunay", LINE, "--scale", "-1"]) == 2
    assert cli.main(["generate", "--generate", "kind=nope"]) == 2
    assert "error" in capsys.readouterr().err


def test_general_position_error(tmp_path, capsys):
    sq = tmp_path / "sq.txt"
    sq.write_text("d=2 s=0\n0 0 0\n1 0 0\n0 1 0\n1 1 0\n")
    assert cli.main(["delaunay", str(sq)]) == 3
    assert "[0, 1, 2, 3]" in capsys.readouterr().err
    assert cli.main(["delaunay", str(sq), "--jitter", "1", "-o", str(tmp_path / "a")]) == 0
    assert cli.main(["delaunay", str(sq), "--allow-degenerate", "-o", str(tmp_path / "b")]) == 0
    assert json.loads((tmp_path / "b").read_text())["degenerate"] is True


def test_validate(tmp_path, monkeypatch):
    code, text = run(["validate", "--suite", "norms", "--trials", "5"], tmp_path)
    assert code == 0 and text.startswith("PASS norms: 5 trials")
    assert cli.main(["validate", "--suite", "bogus"]) == 2
    import chromatic_alpha.validation as V

    monkeypatch.setattr(V, "run_suite", lambda *a: [SuiteResult("gdm", 1, ["trial 0: broken"])])
    code, text = run(["validate", "--suite", "gdm"], tmp_path, "fail")
    assert code == 1 and "FAIL gdm" in text and "trial 0: broken" in text


def test_generate_and_config_file(tmp_path):
    code, text = run(["generate", "--generate", "kind=integer,portion=3"], tmp_path)
    assert code == 0 and text.splitlines()[0] == "d=2 s=1" and len(text.splitlines()) == 10
    cfg = tmp_path / "c.cfg"
    cfg.write_text("generator.kind=hexagonal\ngenerator.portion=3\nmode=1..3\n")
    code, a = run(["mst-ratio", "--config", str(cfg)], tmp_path, "a")
    code2, b = run(["mst-ratio", "--generate", "kind=hexagonal,portion=3"], tmp_path, "b")
    assert code == code2 == 0 and a == b


def test_sixpack_plot_and_threshold(tmp_path, capsys):
    svg = tmp_path / "p.svg"
    code, _ = run(["sixpack", "--generate", "kind=integer,portion=4", "--mode", "1..2", "--plot", str(svg),
                   "--threshold", "0.1"], tmp_path)
    assert code == 0 and svg.read_text().startswith("<svg")
    assert "codomain: points with persistence > 0.1 per dimension [16, 9, 0]" in capsys.readouterr().err


@pytest.mark.skipif(shutil.which("chromatic-alpha") is None, reason="console script not installed")
def test_console_script_deterministic():
    argv = ["chromatic-alpha", "sixpack", LINE, "--mode", "color:1"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b and a
