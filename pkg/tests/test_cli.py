from __future__ import annotations

import json

import pytest

from admscreen.cli import main
from admscreen.corpus import SentimentLabel, load_corpus, save_corpus
from admscreen.synthdata import bundled_corpus_path

from conftest import make_document, make_fragment

DATASET = str(bundled_corpus_path())


def run(argv):
    return main(argv)


class TestEval:
    def test_happy_path_json(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        code = run(
            [
                "eval",
                "--dataset",
                DATASET,
                "--fraction",
                "0.3578",
                "--seed",
                "42",
                "--format",
                "json",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        report = json.loads(out.read_text("utf-8"))
        assert report["accuracy"] is not None
        assert {"precision", "recall", "f1"} == set(report["weighted"])
        assert report["metadata"]["seed"] == 42
        assert report["metadata"]["fraction"] == 0.3578

    def test_byte_identical_excluding_timestamp(self, tmp_path):
        outputs = []
        for name in ("a.json", "b.json"):
            out = tmp_path / name
            assert (
                run(
                    [
                        "eval",
                        "--dataset",
                        DATASET,
                        "--seed",
                        "42",
                        "--format",
                        "json",
                        "--out",
                        str(out),
                    ]
                )
                == 0
            )
            data = json.loads(out.read_text("utf-8"))
            data["metadata"].pop("timestamp")
            outputs.append(json.dumps(data, sort_keys=True))
        assert outputs[0] == outputs[1]

    def test_missing_class_maps_to_exit_1(self, tmp_path, capsys):
        dataset = tmp_path / "partial.jsonl"
        frags = [
            make_fragment(f"f{i}", text="ok text", label=SentimentLabel.NEUTRAL, index=i)
            for i in range(4)
        ]
        save_corpus([make_document("d1", raw_text="x")], frags, dataset)
        code = run(["eval", "--dataset", str(dataset), "--seed", "1"])
        assert code == 1
        assert "negative" in capsys.readouterr().err

    def test_bad_fraction_usage_error(self):
        with pytest.raises(SystemExit) as excinfo:
            run(["split", "--dataset", DATASET, "--fraction", "1.5", "--seed", "1"])
        assert excinfo.value.code == 2

    def test_unknown_subcommand_usage_error(self):
        with pytest.raises(SystemExit) as excinfo:
            run(["frobnicate"])
        assert excinfo.value.code == 2


class TestSplit:
    def test_split_to_stdout(self, capsys):
        assert run(["split", "--dataset", DATASET, "--seed", "7"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["seed"] == 7
        assert payload["fraction"] == 0.3578
        assert set(payload["train_ids"]).isdisjoint(payload["test_ids"])
        assert len(payload["train_ids"]) + len(payload["test_ids"]) == 300

    def test_deterministic(self, capsys):
        run(["split", "--dataset", DATASET, "--seed", "7"])
        first = capsys.readouterr().out
        run(["split", "--dataset", DATASET, "--seed", "7"])
        assert capsys.readouterr().out == first


class TestTrainAndScreen:
    def test_train_then_screen(self, tmp_path, capsys):
        model_path = tmp_path / "model.jsonl"
        assert run(["train", "--dataset", DATASET, "--out", str(model_path)]) == 0
        assert model_path.exists()
        out = tmp_path / "screened.jsonl"
        assert (
            run(
                [
                    "screen",
                    "--dataset",
                    DATASET,
                    "--model",
                    str(model_path),
                    "--out",
                    str(out),
                ]
            )
            == 0
        )
        lines = [json.loads(line) for line in out.read_text("utf-8").splitlines()]
        assert len(lines) == 300
        flagged = [line for line in lines if line["flagged"]]
        assert flagged
        assert all(line["prediction"]["label"] == "negative" for line in flagged)


class TestReport:
    def test_rerender_from_json(self, tmp_path, capsys):
        report_path = tmp_path / "r.json"
        run(
            [
                "eval",
                "--dataset",
                DATASET,
                "--seed",
                "42",
                "--format",
                "json",
                "--out",
                str(report_path),
            ]
        )
        assert run(["report", "--run", str(report_path), "--format", "text-table"]) == 0
        out = capsys.readouterr().out
        assert "Confusion matrix" in out

    def test_csv_output(self, tmp_path, capsys):
        report_path = tmp_path / "r.json"
        run(["eval", "--dataset", DATASET, "--seed", "42", "--out", str(report_path)])
        assert run(["report", "--run", str(report_path), "--format", "csv"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "row,label,precision,recall,f1,support"
        assert len(lines) == 6


class TestIngestPrep:
    def test_ingest_social_then_prep(self, tmp_path, capsys):
        export = tmp_path / "export.jsonl"
        posts = [
            {"text": "<p>Agent <b>fraud</b> reported</p>"},
            {"text": "টাকা পাচার হয়েছে। আবার হয়েছে।"},
            {"text": ""},
        ]
        export.write_text(
            "".join(json.dumps(p, ensure_ascii=False) + "\n" for p in posts), "utf-8"
        )
        raw = tmp_path / "raw.jsonl"
        assert (
            run(
                [
                    "ingest",
                    "--source",
                    str(export),
                    "--kind",
                    "social_export",
                    "--out",
                    str(raw),
                ]
            )
            == 0
        )
        docs, frags = load_corpus(raw)
        assert len(docs) == 2
        assert frags == []

        prepped = tmp_path / "prepped.jsonl"
        assert run(["prep", "--in", str(raw), "--out", str(prepped)]) == 0
        docs, frags = load_corpus(prepped)
        assert len(docs) == 2
        assert len(frags) == 3
        assert all(d.cleaned_text for d in docs)

    def test_missing_file_exit_1(self, tmp_path, capsys):
        code = run(
            [
                "ingest",
                "--source",
                str(tmp_path / "nope.jsonl"),
                "--kind",
                "social_export",
                "--out",
                str(tmp_path / "o.jsonl"),
            ]
        )
        assert code == 1

    def test_no_partial_output_on_failure(self, tmp_path):
        dataset = tmp_path / "broken.jsonl"
        dataset.write_text("{not json\n", "utf-8")
        out = tmp_path / "out.json"
        code = run(["eval", "--dataset", str(dataset), "--seed", "1", "--out", str(out)])
        assert code == 1
        assert not out.exists()


class TestDistribution:
    def test_distribution_counts(self, capsys):
        assert run(["distribution", "--dataset", DATASET]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["total"] == 300
        assert payload["counts"]["neutral"] == 180


class TestSynth:
    def test_synth_matches_bundled(self, tmp_path):
        out = tmp_path / "synth.jsonl"
        assert run(["synth", "--out", str(out), "--seed", "42"]) == 0
        assert out.read_bytes() == bundled_corpus_path().read_bytes()
