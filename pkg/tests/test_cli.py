"""End-to-end command behavior and the exit code contract."""

import json

import httpx
import pytest
from click.testing import CliRunner

from phraserank.cli import (
    EXIT_BACKEND,
    EXIT_CONFIG,
    EXIT_DATA,
    EXIT_PARSE,
    cli,
)

GOOD_CONLLU = (
    "1\tDeep\t_\tADJ\t_\t_\t3\tamod\t_\t_\n"
    "2\tlearning\t_\tNOUN\t_\t_\t3\tcompound\t_\t_\n"
    "3\tmodels\t_\tNOUN\t_\t_\t0\troot\t_\t_\n"
)


@pytest.fixture()
def runner():
    return CliRunner()


def write_dataset(path, records):
    with open(path, "w", encoding="utf-8") as f:
        for record in records:
            f.write(json.dumps(record) + "\n")
    return path


@pytest.fixture()
def small_dataset(tmp_path):
    return write_dataset(
        tmp_path / "data.jsonl",
        [
            {
                "id": "d1",
                "conllu": GOOD_CONLLU,
                "gold_keyphrases": ["deep learning models"],
            }
        ],
    )


class TestExtract:
    def test_writes_candidate_file(self, runner, small_dataset, tmp_path):
        out = tmp_path / "candidates.jsonl"
        result = runner.invoke(cli, ["extract", str(small_dataset), "-o", str(out)])
        assert result.exit_code == 0, result.output
        lines = out.read_text(encoding="utf-8").splitlines()
        header = json.loads(lines[0])
        assert header["stem"] is False
        record = json.loads(lines[1])
        assert record["doc_id"] == "d1"
        assert record["candidates"][0]["surface"] == "Deep learning models"

    def test_stem_flag_recorded(self, runner, small_dataset, tmp_path):
        out = tmp_path / "candidates.jsonl"
        result = runner.invoke(cli, ["extract", str(small_dataset), "-o", str(out), "--stem"])
        assert result.exit_code == 0
        header = json.loads(out.read_text(encoding="utf-8").splitlines()[0])
        assert header["stem"] is True

    def test_parse_error_exit_code(self, runner, tmp_path):
        dataset = write_dataset(
            tmp_path / "bad.jsonl",
            [{"id": "d1", "conllu": "1\tword\t_\tNOUN\t_\t_\t9\tdep\t_\t_\n"}],
        )
        out = tmp_path / "candidates.jsonl"
        result = runner.invoke(cli, ["extract", str(dataset), "-o", str(out)])
        assert result.exit_code == EXIT_PARSE
        assert "error:" in result.output

    def test_dataset_error_exit_code(self, runner, tmp_path):
        dataset = tmp_path / "bad.jsonl"
        dataset.write_text("not json\n", encoding="utf-8")
        result = runner.invoke(
            cli, ["extract", str(dataset), "-o", str(tmp_path / "c.jsonl")]
        )
        assert result.exit_code == EXIT_DATA

    def test_missing_dataset_is_usage_error(self, runner, tmp_path):
        result = runner.invoke(
            cli, ["extract", str(tmp_path / "absent.jsonl"), "-o", str(tmp_path / "c.jsonl")]
        )
        assert result.exit_code == EXIT_CONFIG


class TestRank:
    def test_writes_predictions(self, runner, small_dataset, tmp_path):
        out = tmp_path / "predictions.jsonl"
        result = runner.invoke(cli, ["rank", str(small_dataset), "-o", str(out)])
        assert result.exit_code == 0, result.output
        record = json.loads(out.read_text(encoding="utf-8").splitlines()[0])
        assert record["doc_id"] == "d1"
        assert record["keyphrases"][0]["normalized"] == "deep learning models"
        assert isinstance(record["keyphrases"][0]["score"], float)

    def test_reuses_candidate_file(self, runner, small_dataset, tmp_path):
        candidates = tmp_path / "candidates.jsonl"
        predictions = tmp_path / "predictions.jsonl"
        assert runner.invoke(cli, ["extract", str(small_dataset), "-o", str(candidates)]).exit_code == 0
        result = runner.invoke(
            cli,
            ["rank", str(small_dataset), "--candidates", str(candidates), "-o", str(predictions)],
        )
        assert result.exit_code == 0, result.output

    def test_candidate_stem_conflict_is_config_error(self, runner, small_dataset, tmp_path):
        candidates = tmp_path / "candidates.jsonl"
        runner.invoke(cli, ["extract", str(small_dataset), "-o", str(candidates), "--stem"])
        result = runner.invoke(
            cli,
            [
                "rank",
                str(small_dataset),
                "--candidates",
                str(candidates),
                "--no-stem",
                "-o",
                str(tmp_path / "p.jsonl"),
            ],
        )
        assert result.exit_code == EXIT_CONFIG

    def test_candidate_dataset_mismatch_is_data_error(self, runner, small_dataset, tmp_path):
        candidates = tmp_path / "candidates.jsonl"
        candidates.write_text(
            '{"format": "phraserank-candidates", "version": 1, "stem": false}\n'
            '{"doc_id": "other", "candidates": []}\n',
            encoding="utf-8",
        )
        result = runner.invoke(
            cli,
            ["rank", str(small_dataset), "--candidates", str(candidates), "-o", str(tmp_path / "p.jsonl")],
        )
        assert result.exit_code == EXIT_DATA

    def test_http_backend_unreachable_is_backend_error(self, runner, small_dataset, tmp_path):
        config = tmp_path / "phraserank.conf"
        config.write_text("http.retries = 1\n", encoding="utf-8")
        result = runner.invoke(
            cli,
            [
                "rank",
                str(small_dataset),
                "--backend",
                "http",
                "--url",
                "http://127.0.0.1:1",
                "--config",
                str(config),
                "-o",
                str(tmp_path / "p.jsonl"),
            ],
        )
        assert result.exit_code == EXIT_BACKEND

    def test_top_truncates(self, runner, toy_corpus_path, tmp_path):
        out = tmp_path / "predictions.jsonl"
        result = runner.invoke(
            cli, ["rank", str(toy_corpus_path), "-o", str(out), "--top", "2"]
        )
        assert result.exit_code == 0
        for line in out.read_text(encoding="utf-8").splitlines():
            assert len(json.loads(line)["keyphrases"]) <= 2

    def test_invalid_top_rejected(self, runner, small_dataset, tmp_path):
        result = runner.invoke(
            cli, ["rank", str(small_dataset), "-o", str(tmp_path / "p.jsonl"), "--top", "0"]
        )
        assert result.exit_code == EXIT_CONFIG

    def test_workers_do_not_change_output(self, runner, toy_corpus_path, tmp_path):
        single = tmp_path / "single.jsonl"
        multi = tmp_path / "multi.jsonl"
        assert runner.invoke(cli, ["rank", str(toy_corpus_path), "-o", str(single)]).exit_code == 0
        assert (
            runner.invoke(
                cli, ["rank", str(toy_corpus_path), "-o", str(multi), "--workers", "4"]
            ).exit_code
            == 0
        )
        assert single.read_bytes() == multi.read_bytes()


class TestEvaluate:
    def test_reports_scores(self, runner, small_dataset, tmp_path):
        predictions = tmp_path / "predictions.jsonl"
        runner.invoke(cli, ["rank", str(small_dataset), "-o", str(predictions)])
        report_path = tmp_path / "report.json"
        result = runner.invoke(
            cli,
            ["evaluate", str(predictions), str(small_dataset), "-o", str(report_path), "--cutoffs", "1,5"],
        )
        assert result.exit_code == 0, result.output
        assert "cutoff" in result.output
        payload = json.loads(report_path.read_text(encoding="utf-8"))
        assert payload["cutoffs"] == [1, 5]
        assert payload["macro"]["1"]["f1"] == 1.0

    def test_unknown_doc_in_predictions_is_data_error(self, runner, small_dataset, tmp_path):
        predictions = tmp_path / "predictions.jsonl"
        predictions.write_text('{"doc_id": "ghost", "keyphrases": []}\n', encoding="utf-8")
        result = runner.invoke(cli, ["evaluate", str(predictions), str(small_dataset)])
        assert result.exit_code == EXIT_DATA

    def test_bad_cutoffs_flag(self, runner, small_dataset, tmp_path):
        predictions = tmp_path / "predictions.jsonl"
        predictions.write_text('{"doc_id": "d1", "keyphrases": []}\n', encoding="utf-8")
        result = runner.invoke(
            cli, ["evaluate", str(predictions), str(small_dataset), "--cutoffs", "a,b"]
        )
        assert result.exit_code == EXIT_CONFIG


class TestBenchmark:
    def test_full_pipeline(self, runner, toy_corpus_path, tmp_path):
        report_path = tmp_path / "report.json"
        result = runner.invoke(
            cli, ["benchmark", str(toy_corpus_path), "-o", str(report_path)]
        )
        assert result.exit_code == 0, result.output
        payload = json.loads(report_path.read_text(encoding="utf-8"))
        assert payload["num_documents"] == 5
        assert payload["num_scored"] == 5

    def test_stems_by_default(self, runner, toy_corpus_path, tmp_path):
        candidates = tmp_path / "candidates.jsonl"
        result = runner.invoke(
            cli,
            ["benchmark", str(toy_corpus_path), "--candidates", str(candidates)],
        )
        assert result.exit_code == 0
        header = json.loads(candidates.read_text(encoding="utf-8").splitlines()[0])
        assert header["stem"] is True

    def test_no_stem_flag_respected(self, runner, toy_corpus_path, tmp_path):
        candidates = tmp_path / "candidates.jsonl"
        result = runner.invoke(
            cli,
            ["benchmark", str(toy_corpus_path), "--no-stem", "--candidates", str(candidates)],
        )
        assert result.exit_code == 0
        header = json.loads(candidates.read_text(encoding="utf-8").splitlines()[0])
        assert header["stem"] is False

    def test_config_file_applies(self, runner, toy_corpus_path, tmp_path):
        config = tmp_path / "phraserank.conf"
        config.write_text("hash.dim = 16\ncutoffs = 3\n", encoding="utf-8")
        report_path = tmp_path / "report.json"
        result = runner.invoke(
            cli,
            ["benchmark", str(toy_corpus_path), "--config", str(config), "-o", str(report_path)],
        )
        assert result.exit_code == 0, result.output
        payload = json.loads(report_path.read_text(encoding="utf-8"))
        assert payload["cutoffs"] == [3]


class TestEmbedCheck:
    def test_unreachable_service_is_backend_error(self, runner):
        result = runner.invoke(
            cli, ["embed-check", "--url", "http://127.0.0.1:1", "--retries", "1"]
        )
        assert result.exit_code == EXIT_BACKEND

    def test_version_flag(self, runner):
        result = runner.invoke(cli, ["--version"])
        assert result.exit_code == 0
        assert "phraserank" in result.output
