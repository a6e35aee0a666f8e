import json

import numpy as np
import pytest
from PIL import Image

from gestalt_ph.cli import main
from gestalt_ph.geometry import AttributedCloud
from gestalt_ph.ingest import load_csv, save_csv, save_json
from gestalt_ph.synthetic import circle, column_grid, conflict_grid, olympic_rings, similarity_row, x_crossing


@pytest.fixture
def files(tmp_path):
    save_csv(similarity_row(), tmp_path / "sim.csv")
    save_csv(column_grid(), tmp_path / "cols.csv")
    save_csv(AttributedCloud.from_arrays(circle(12)), tmp_path / "circle.csv")
    save_csv(AttributedCloud.from_arrays(olympic_rings()), tmp_path / "rings.csv")
    save_csv(AttributedCloud.from_arrays(x_crossing()), tmp_path / "x.csv")
    save_json(conflict_grid(), tmp_path / "grid.json")
    return tmp_path


def test_pd_similarity(files, capsys):
    out = files / "pd.csv"
    assert main(["pd", "--input", str(files / "sim.csv"), "--scale", "color=10", "--out-pd", str(out),
                 "--out-svg", str(files / "pd.svg")]) == 0
    assert "dim 0: 7 significant, 3 noise, eps_g=5" in capsys.readouterr().out
    rows = out.read_text().splitlines()
    assert rows[0] == "dim,birth,death,class"
    assert sum(r.endswith("noise") for r in rows) == 3
    assert (files / "pd.svg").read_text().startswith("<svg")


def test_pd_circle(files, capsys):
    out = files / "pd.csv"
    assert main(["pd", "--input", str(files / "circle.csv"), "--out-pd", str(out)]) == 0
    rows = [r for r in out.read_text().splitlines() if r.startswith("1,")]
    assert len(rows) == 1 and rows[0].endswith("significant")


def test_group_columns(files):
    out = files / "g.json"
    assert main(["group", "--input", str(files / "cols.csv"), "--out-json", str(out),
                 "--out-svg", str(files / "g.svg")]) == 0
    doc = json.loads(out.read_text())
    assert doc["kind"] == "grouping" and doc["group_count"] == 4


def test_pragnanz_rings(files):
    out = files / "p.json"
    assert main(["pragnanz", "--input", str(files / "rings.csv"), "--out-json", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["significant_loop_count"] == 5 and len(doc["loops"]) == 5


def test_closure(files):
    out = files / "c.json"
    assert main(["closure", "--input", str(files / "circle.csv"), "--out-json", str(out)]) == 0
    (loop,) = json.loads(out.read_text())["loops"]
    assert sorted(loop["vertices"][:-1]) == list(range(12))


def test_continue_reverses(files):
    a, b = files / "a.json", files / "b.json"
    base = ["continue", "--input", str(files / "x.csv")]
    assert main(base + ["--start=-1,-1", "--end=1,1", "--out-json", str(a)]) == 0
    assert main(base + ["--start=1,1", "--end=-1,-1", "--out-json", str(b)]) == 0
    va, vb = json.loads(a.read_text())["vertices"], json.loads(b.read_text())["vertices"]
    assert va == vb[::-1] and len(va) == 3


def test_continue_dead_end_svg(files):
    svg = files / "dead.svg"
    code = main(["continue", "--input", str(files / "x.csv"), "--start=-5,-5", "--end=5,-5", "--out-svg", str(svg)])
    assert code == 3
    assert "polyline" in svg.read_text()


def test_conflict(files):
    out = files / "k.json"
    assert main(["conflict", "--input", str(files / "grid.json"), "--scale", "shape=3", "--scale", "color=1",
                 "--out-json", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["groups"] == [[0, 1, 2], [3, 4, 5], [6, 7, 8]]
    assert main(["conflict", "--input", str(files / "grid.json")]) == 2


def test_eps_override(files):
    a, b = files / "a.json", files / "b.json"
    base = ["group", "--input", str(files / "cols.csv")]
    assert main(base + ["--out-json", str(a)]) == 0
    assert main(base + ["--eps", "1", "--out-json", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert main(base + ["--eps", "10"]) == 2
    assert main(base + ["--eps", "10", "--force"]) == 0


def test_exit_codes(files, capsys):
    (files / "empty.csv").write_text("")
    assert main(["pd", "--input", str(files / "empty.csv")]) == 2
    assert main(["pd", "--input", str(files / "missing.csv")]) == 2
    assert main(["closure", "--input", str(files / "cols.csv"), "--max-dim", "1"]) == 2
    line = files / "line.csv"
    save_csv(AttributedCloud.from_arrays(np.column_stack([np.arange(5.0), np.zeros(5)])), line)
    assert main(["closure", "--input", str(line)]) == 3
    assert main(["pd", "--input", str(files / "rings.csv"), "--max-dim", "3"]) == 4
    assert main(["pd", "--input", str(files / "circle.csv"), "--max-dim", "3"]) == 0
    assert "dim 2:" in capsys.readouterr().out
    with pytest.raises(SystemExit) as err:
        main(["pd", "--input", str(line), "--scale", "oops"])
    assert err.value.code == 2


def test_preprocess(files, capsys):
    px = np.zeros((30, 40, 3), np.uint8)
    px[:, :20] = (255, 255, 0)
    px[:, 20:] = (0, 0, 255)
    Image.fromarray(px).save(files / "flag.png")
    out = files / "flag.csv"
    assert main(["preprocess", "--input", str(files / "flag.png"), "--stride", "5", "--out", str(out)]) == 0
    cloud = load_csv(out)
    assert cloud.attr_names == ("hue",)
    assert len(set(cloud.attribute_matrix()[:, 0])) == 2

    Image.fromarray(np.full((20, 20, 3), 90, np.uint8)).save(files / "flat.png")
    assert main(["preprocess", "--input", str(files / "flat.png"), "--canny", "--out", str(out)]) == 0
    assert "no edge pixels" in capsys.readouterr().err
    assert out.read_text() == "x,y\n"
    assert main(["preprocess", "--input", str(files / "nope.png"), "--out", str(out)]) == 2


@pytest.mark.parametrize("cmd", [
    ["pd", "--input", "sim.csv", "--scale", "color=10"],
    ["group", "--input", "cols.csv"],
    ["closure", "--input", "circle.csv"],
    ["pragnanz", "--input", "circle.csv"],
    ["conflict", "--input", "grid.json", "--scale", "color=3"],
    ["continue", "--input", "x.csv", "--start", "3", "--end", "7"],
])
def test_byte_identical_outputs(files, cmd):
    outputs = []
    for k in range(2):
        paths = [files / f"o{k}.json", files / f"o{k}.svg", files / f"o{k}.csv"]
        args = [cmd[0], cmd[1], str(files / cmd[2]), *cmd[3:],
                "--out-json", str(paths[0]), "--out-svg", str(paths[1]), "--out-pd", str(paths[2])]
        assert main(args) == 0
        outputs.append([p.read_bytes() if p.exists() else None for p in paths])
    assert outputs[0] == outputs[1]
