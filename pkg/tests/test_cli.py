import csv
import json
import math

import numpy as np
import pytest

from mldtw.cli import main
from mldtw.core import TimeSeries
from mldtw.datasets import load_series_csv, write_series_csv
from mldtw.heatmap import read_pgm
from mldtw.pipeline import WaypointModelSet, read_training_csv


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    return tmp_path_factory.mktemp("cli")


@pytest.fixture(scope="module")
def synth(workdir):
    path = workdir / "s.csv"
    assert main(["gen-synth", "--count", "12", "--length", "60", "--seed", "7", "--out", str(path)]) == 0
    return path


@pytest.fixture(scope="module")
def model(workdir, synth):
    rows = workdir / "rows.csv"
    assert main(["label", "--in", str(synth), "--out", str(rows), "--prefix", "10", "--threads", "1"]) == 0
    out = workdir / "m.bin"
    args = ["train", "--in", str(rows), "--out-model", str(out), "--prefix", "10"]
    assert main(args + ["--hidden", "16", "--epochs", "15", "--seed", "1"]) == 0
    return out


class TestGenSynth:
    def test_blocks(self, synth):
        c = load_series_csv(synth)
        assert len(c) == 12 and len(c[0]) == 60

    def test_byte_identical(self, synth, workdir):
        again = workdir / "s2.csv"
        main(["gen-synth", "--count", "12", "--length", "60", "--seed", "7", "--out", str(again)])
        assert again.read_bytes() == synth.read_bytes()

    def test_negative_noise(self, capsys, workdir):
        code = main(["gen-synth", "--noise", "-1", "--out", str(workdir / "x.csv")])
        assert code == 2
        assert "--noise" in capsys.readouterr().err

    def test_io_error(self, workdir):
        assert main(["gen-synth", "--count", "2", "--out", str(workdir / "missing" / "x.csv")]) == 1

    def test_spec_size_example(self, workdir):
        out = workdir / "big.csv"
        assert main(["gen-synth", "--count", "100", "--length", "200", "--noise", "0.075", "--seed", "7", "--out", str(out)]) == 0
        assert len(load_series_csv(out)) == 100


class TestLabelTrain:
    def test_three_series_six_rows(self, workdir):
        src = workdir / "three.csv"
        main(["gen-synth", "--count", "3", "--length", "40", "--seed", "2", "--out", str(src)])
        out = workdir / "three_rows.csv"
        assert main(["label", "--in", str(src), "--out", str(out), "--prefix", "8"]) == 0
        rows = read_training_csv(out)
        assert len(rows) == 6
        first = out.read_bytes()
        main(["label", "--in", str(src), "--out", str(out), "--prefix", "8"])
        assert out.read_bytes() == first

    def test_model_loads(self, model):
        ms = WaypointModelSet.load(model)
        assert ms.prefix_a == 10 and len(ms.models) == 5

    def test_history_written(self, model):
        with open(f"{model}.history.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert {r["waypoint"] for r in rows} == {"0", "1", "2", "3", "4"}
        assert all(0 <= float(r["accuracy"]) <= 1 for r in rows)

    def test_hidden_zero(self, workdir):
        assert main(["train", "--in", str(workdir / "rows.csv"), "--out-model", "x", "--hidden", "0"]) == 2

    def test_prefix_mismatch(self, model, workdir):
        args = ["train", "--in", str(workdir / "rows.csv"), "--out-model", str(workdir / "y.bin")]
        assert main(args + ["--prefix", "7"]) == 2

    def test_missing_input(self, workdir):
        assert main(["label", "--in", str(workdir / "nope.csv"), "--out", str(workdir / "o.csv")]) == 1

    def test_corrupt_model(self, workdir, synth):
        bad = workdir / "bad.bin"
        bad.write_bytes(b"MLDTWSET" + b"\0" * 10)
        args = ["compare", "--a", f"{synth}:0", "--b", f"{synth}:1", "--variant", "ml", "--model", str(bad)]
        assert main(args) == 1


class TestCompare:
    @pytest.mark.parametrize("variant", ["full", "band"])
    def test_identical(self, synth, capsys, variant):
        assert main(["compare", "--a", f"{synth}:3", "--b", f"{synth}:3", "--variant", variant]) == 0
        out = capsys.readouterr().out
        assert "distance: 0\n" in out and "error: 0.00%" in out

    def test_ml_needs_model(self, synth):
        assert main(["compare", "--a", str(synth), "--b", str(synth), "--variant", "ml"]) == 2

    def test_ml_with_model(self, synth, model, capsys):
        args = ["compare", "--a", f"{synth}:0", "--b", f"{synth}:1", "--variant", "ml", "--model", str(model)]
        assert main(args) == 0
        assert "ml inference" in capsys.readouterr().out

    def test_heatmap_dimensions(self, workdir):
        a, b = workdir / "a.csv", workdir / "b.csv"
        write_series_csv(a, [TimeSeries(np.sin(np.arange(20.0)))])
        write_series_csv(b, [TimeSeries(np.cos(np.arange(33.0)))])
        for variant in ("full", "band"):
            out = workdir / f"{variant}.pgm"
            assert main(["compare", "--a", str(a), "--b", str(b), "--variant", variant, "--heatmap", str(out)]) == 0
            assert read_pgm(out).shape == (21, 34)

    def test_index_out_of_range(self, synth):
        assert main(["compare", "--a", f"{synth}:99", "--b", str(synth)]) == 2


class TestBench:
    def test_trials_zero(self, synth):
        assert main(["bench", "--corpus", str(synth), "--trials", "0"]) == 2

    def test_ml_needs_model(self, synth):
        assert main(["bench", "--corpus", str(synth), "--trials", "3", "--variants", "full,ml"]) == 2

    def test_bad_variant(self, synth):
        assert main(["bench", "--corpus", str(synth), "--trials", "3", "--variants", "fast"]) == 2

    def test_summary_matches_csv(self, synth, model, workdir, capsys):
        js = workdir / "b.json"
        args = ["bench", "--corpus", str(synth), "--trials", "25", "--model", str(model), "--json", str(js)]
        assert main(args + ["--seed", "3", "--threads", "2"]) == 0
        assert "median error" in capsys.readouterr().out
        summary = json.loads(js.read_text())
        with open(f"{js}.trials.csv") as fh:
            trials = list(csv.DictReader(fh))
        assert len(trials) == summary["trials"] == 25
        assert [int(t["trial"]) for t in trials] == list(range(25))
        kept = [t for t in trials if float(t["exact"]) != 0]
        for v in ("full", "band", "ml"):
            errs = [float(t[f"{v}_error"]) for t in kept]
            assert summary["variants"][v]["median_error"] == pytest.approx(float(np.median(errs)))
            cells = [int(t[f"{v}_cells"]) for t in trials]
            assert summary["variants"][v]["median_cells"] == pytest.approx(float(np.median(cells)))
            assert all(e >= 0 for e in errs)
        assert all(float(t["full_error"]) == 0 for t in trials)
        assert not math.isnan(summary["variants"]["ml"]["median_inference_time"])

    def test_reproducible_apart_from_timing(self, synth, workdir, monkeypatch):
        outs = []
        for k, threads in enumerate(("1", "3")):
            monkeypatch.setenv("MLDTW_THREADS", threads)
            js = workdir / f"r{k}.json"
            args = ["bench", "--corpus", str(synth), "--trials", "15", "--variants", "full,band"]
            assert main(args + ["--seed", "9", "--json", str(js)]) == 0
            with open(f"{js}.trials.csv") as fh:
                rows = list(csv.DictReader(fh))
            outs.append([{k: v for k, v in r.items() if "time" not in k} for r in rows])
        assert outs[0] == outs[1]
