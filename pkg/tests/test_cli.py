import csv
import json

import pytest

from sqhex import cli
from sqhex.config import from_dict, load
from sqhex.errors import ValidationError

SH = """
[lattice]
N = 3
Omega = [1, 3, 6]
a_pattern = [1, 0, 1]
[weights]
x = [1.0, 1.0, 1.0]
y = { "2" = 1.0 }
[run]
seed = 3
samples = 200
"""

QUARTIC = """
[lattice]
N = 20
staircase = 2
a_pattern = [0, 1]
[weights]
x = [1.0, 1.0]
y = { "1" = 1.0 }
"""

AZTEC = """
[lattice]
N = 8
segments = [[0.0, 0.25], [0.5, 0.75], [1.0, 1.25], [1.5, 1.75]]
a_pattern = [0, 0]
[weights]
x = [1.0, 1.0]
y = { "1" = 4.0, "2" = 0.25 }
"""


@pytest.fixture
def cfg(tmp_path):
    def write(text, name="c.toml"):
        p = tmp_path / name
        p.write_text(text)
        return p

    return write


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_config_round_trip(cfg):
    c = load(cfg(SH))
    assert c.spec.Omega == (1, 3, 6) and c.spec.I2 == [2] and c.run["seed"] == 3
    q = load(cfg(QUARTIC, "q.toml"))
    assert q.staircase == 2 and q.boundary.intervals == ((0.0, 2.0),)


def test_config_rejects_ambiguous_boundary():
    with pytest.raises(ValidationError):
        from_dict({"lattice": {"N": 3, "Omega": [1, 2, 3], "staircase": 1}})
    with pytest.raises(ValidationError):
        from_dict({"lattice": {"Omega": [1, 2, 3]}})


def test_partition(cfg, tmp_path):
    out = tmp_path / "o"
    assert cli.main(["partition", "--config", str(cfg(SH)), "--out", str(out)]) == 0
    data = json.loads((out / "partition.json").read_text())
    assert data["Z_schur"] == pytest.approx(60) and data["agree"]


def test_partition_mismatch_exits_3(cfg, tmp_path, monkeypatch):
    monkeypatch.setattr(cli, "log_partition_function_kasteleyn", lambda k: 5.0)
    assert cli.main(["partition", "--config", str(cfg(SH)), "--out", str(tmp_path / "o")]) == 3


def test_sample_and_enumerate(cfg, tmp_path):
    out = tmp_path / "o"
    c = str(cfg(SH))
    assert cli.main(["sample", "--config", c, "--out", str(out), "--samples", "50", "--sampler", "kasteleyn"]) == 0
    assert cli.main(["enumerate", "--config", c, "--out", str(out)]) == 0
    assert len(_rows(out / "matchings.csv")) == 51
    assert _rows(out / "chains.csv")[0] == ["sample", "row", "parts"]
    assert len(_rows(out / "enumeration.csv")) == 61
    assert (out / "tiling_0.svg").read_text().lstrip().startswith("<?xml")
    summary = json.loads((out / "sample.json").read_text())
    assert summary["matchings"] == 60 and 0 <= summary["total_variation"] <= 1


def test_sampling_is_reproducible(cfg, tmp_path):
    c = str(cfg(SH))
    for d in ("a", "b"):
        assert cli.main(["sample", "--config", c, "--out", str(tmp_path / d), "--samples", "20", "--seed", "9"]) == 0
    assert (tmp_path / "a" / "chains.csv").read_bytes() == (tmp_path / "b" / "chains.csv").read_bytes()
    assert (tmp_path / "a" / "tiling_0.svg").read_bytes() == (tmp_path / "b" / "tiling_0.svg").read_bytes()


def test_frozen_boundary_outputs(cfg, tmp_path):
    out = tmp_path / "o"
    assert cli.main(["frozen-boundary", "--config", str(cfg(AZTEC)), "--out", str(out)]) == 0
    tang = json.loads((out / "tangency.json").read_text())
    assert tang["bottom_tangencies"] == 11 and tang["rank"] == 12
    assert _rows(out / "frozen_boundary.csv")[0] == ["t", "chi", "kappa"]
    assert _rows(out / "j_graph.csv")[0] == ["t", "J"]
    assert (out / "frozen_boundary.svg").exists()


def test_density_and_height(cfg, tmp_path):
    out = tmp_path / "o"
    c = str(cfg(QUARTIC))
    assert cli.main(["density", "--config", c, "--out", str(out), "--grid", "5x6"]) == 0
    assert cli.main(["limit-height", "--config", c, "--out", str(out), "--grid", "5x6", "--samples", "1"]) == 0
    rows = _rows(out / "density.csv")
    assert rows[0] == ["chi", "kappa", "density"] and len(rows) == 31
    vals = [float(r[2]) for r in rows[1:] if r[2] != "nan"]
    assert vals and all(0 <= v <= 1 for v in vals)
    lln = json.loads((out / "height_lln.json").read_text())
    assert lln["samples"] == 1 and lln["sup_error_mean_field"] >= 0


def test_gue_command(cfg, tmp_path):
    hexa = "[lattice]\nN = 12\nsegments = [[0.0, 0.5], [1.0, 1.5]]\n"
    out = tmp_path / "o"
    assert cli.main(["gue", "--config", str(cfg(hexa)), "--out", str(out), "--samples", "30"]) == 0
    rep = json.loads((out / "gue.json").read_text())
    assert rep["replicas"] == 30
    assert (out / "gue.svg").exists()


@pytest.mark.parametrize(
    "argv",
    [
        ["density", "--grid", "3x10"],
        ["density", "--grid", "banana"],
        ["partition", "--seed", "-1"],
    ],
)
def test_validation_exit_code(cfg, tmp_path, argv):
    assert cli.main(argv[:1] + ["--config", str(cfg(QUARTIC)), "--out", str(tmp_path / "o")] + argv[1:]) == 2


def test_missing_and_broken_config(cfg, tmp_path):
    assert cli.main(["partition", "--config", str(tmp_path / "nope.toml")]) == 2
    assert cli.main(["partition", "--config", str(cfg("[lattice\nN=")), "--out", str(tmp_path / "o")]) == 2
