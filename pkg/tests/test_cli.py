import csv
import json

import pytest

from spheremaps.cli import EXPERIMENTS, Manifest, ManifestError, main
from spheremaps.reports import CSV_COLUMNS

QUICK = {
    "partition": {"k_budget": 200},
    "modulus": {"seed": 1, "n": 20},
    "separation": {},
    "theorem11": {"d": 2, "map": "integral"},
    "theorem12": {},
    "concentration": {"seed": 2, "n": 20, "map": "const-uniform"},
    "roundtrip": {"seed": 3, "n": 20, "ks": [2, 8]},
    "lemma32": {"seed": 4, "trials": 50, "d": 2},
    "divergence": {"ks": [100, 1000]},
}


def write_manifest(tmp_path, name, **fields):
    body = {"experiment": name, "oracle": "l1", "map": "normalize", "d": 1, "eps": 0.5}
    extra = fields.pop("options", {})
    body.update(fields, **extra)
    body.setdefault("out", str(tmp_path / "out" / name))
    path = tmp_path / f"{name}.json"
    path.write_text(json.dumps(body))
    return path, body["out"]


def read_csv(prefix):
    with open(f"{prefix}.summary.csv", newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.mark.parametrize("name", EXPERIMENTS)
def test_every_experiment_runs(tmp_path, name):
    path, out = write_manifest(tmp_path, name, **QUICK[name])
    assert main(["--manifest", str(path)]) == 0
    reports = json.loads(open(f"{out}.report.json").read())
    assert reports and all(r["verdict"] in ("pass", "hypothesis_not_met") for r in reports)
    with open(f"{out}.summary.csv") as fh:
        assert fh.readline().strip() == ",".join(CSV_COLUMNS)
    meta = json.loads(open(f"{out}.meta.json").read())
    for key in ("versions", "seed", "wall_time_s", "tolerances", "a", "growth_elements", "partition"):
        assert key in meta


def test_theorem11_integral_records_k(tmp_path):
    path, out = write_manifest(tmp_path, "theorem11", d=2, map="integral")
    assert main(["--manifest", str(path)]) == 0
    (row,) = read_csv(out)
    assert row["verdict"] == "pass" and row["k"] == "6860"
    assert json.loads(open(f"{out}.meta.json").read())["a"] == 19


def test_divergence_table_column(tmp_path):
    path, out = write_manifest(tmp_path, "divergence", options={"ks": [10**2, 10**4, 10**6], "deltas": [0.01]})
    assert main(["--manifest", str(path)]) == 0
    rows = read_csv(out)
    assert [r["k"] for r in rows] == ["100", "10000", "1000000"]
    assert float(rows[-1]["conclusion"]) >= 0.99


def test_inline_flags(tmp_path):
    out = tmp_path / "inline"
    code = main(["--experiment", "theorem11", "--map", "normalize", "--oracle", "l1", "--d", "1", "--out", str(out)])
    assert code == 0
    assert read_csv(out)[0]["k"] == "20"


def test_inline_flags_override_manifest(tmp_path):
    path, out = write_manifest(tmp_path, "theorem11")
    assert main(["--manifest", str(path), "--d", "2"]) == 0
    assert read_csv(out)[0]["d"] == "2"


def test_failing_verdict_exits_one(tmp_path):
    path, out = write_manifest(tmp_path, "divergence", map="const-uniform", options={"ks": [100]})
    assert main(["--manifest", str(path)]) == 1
    assert read_csv(out)[0]["verdict"] == "fail"


def test_hypothesis_violation_is_reported_not_raised(tmp_path):
    path, out = write_manifest(tmp_path, "separation", map="const-uniform")
    assert main(["--manifest", str(path)]) == 0
    assert read_csv(out)[0]["verdict"] == "hypothesis_not_met"


@pytest.mark.parametrize(
    "fields",
    [
        {"map": "no-such-map"},
        {"oracle": "l0"},
        {"d": 0},
        {"eps": 2.0},
        {"d": "two"},
    ],
)
def test_manifest_errors_exit_two(tmp_path, capsys, fields):
    path, _ = write_manifest(tmp_path, "theorem11", **fields)
    assert main(["--manifest", str(path)]) == 2
    assert "error:" in capsys.readouterr().err


def test_missing_seed_for_sampling_experiment(tmp_path):
    path, _ = write_manifest(tmp_path, "modulus")
    assert main(["--manifest", str(path)]) == 2


def test_unreadable_manifest(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["--manifest", str(bad)]) == 2
    assert main(["--manifest", str(tmp_path / "missing.json")]) == 2
    bad.write_text("[1, 2]")
    assert main(["--manifest", str(bad)]) == 2


def test_manifest_from_dict():
    m = Manifest.from_dict({"experiment": "lemma32", "seed": 1, "output": "x", "trials": 5})
    assert m.out == "x" and m.options == {"trials": 5}
    with pytest.raises(ManifestError):
        Manifest.from_dict({"oracle": "l1"})


@pytest.mark.parametrize("name", ["modulus", "lemma32", "concentration", "divergence"])
def test_repeat_runs_are_byte_identical(tmp_path, monkeypatch, name):
    outs = []
    for i, workers in enumerate(("1", "4")):
        monkeypatch.setenv("SPHEREMAPS_WORKERS", workers)
        path, out = write_manifest(tmp_path, name, out=str(tmp_path / f"run{i}"), **QUICK[name])
        main(["--manifest", str(path)])
        outs.append(open(f"{out}.summary.csv", "rb").read())
    assert outs[0] == outs[1]
