import csv
import io
import json

import pytest

from ccagames.cli import (
    DEFAULT_THRESHOLD,
    DEFAULT_TRIALS_PER_ARM,
    TOY_WARNING,
    build_scheme,
    emit_report,
    main,
    parse_config,
    run_suite,
)
from ccagames.errors import ConfigError
from ccagames.schemes import CsScheme, GmScheme, LeakyScheme
from ccagames.timing import FixedTimeScheme


def run_block(**overrides):
    block = {
        "name": "demo",
        "experiment": "CCA2",
        "scheme": {"id": "gm", "prime_bits": 10, "message_bits": 4},
        "adversary": "random-guess",
        "trials_per_arm": 5,
        "seed": 1,
    }
    block.update(overrides)
    return block


def suite_json(*blocks):
    return json.dumps({"runs": list(blocks)})


class TestParseConfig:
    def test_defaults(self):
        block = run_block()
        del block["trials_per_arm"]
        cfg = parse_config(suite_json(block))
        run = cfg.runs[0]
        assert run.trials_per_arm == DEFAULT_TRIALS_PER_ARM
        assert run.negligible_threshold == DEFAULT_THRESHOLD
        assert run.delay.base == 0

    def test_missing_seed(self):
        block = run_block()
        del block["seed"]
        with pytest.raises(ConfigError, match="seed"):
            parse_config(suite_json(block))

    def test_duplicate_names(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config(suite_json(run_block(), run_block()))

    def test_unknown_scheme_lists_known(self):
        with pytest.raises(ConfigError, match="gm, cs"):
            parse_config(suite_json(run_block(scheme={"id": "rsa"})))

    def test_unknown_adversary_lists_known(self):
        with pytest.raises(ConfigError, match="random-guess"):
            parse_config(suite_json(run_block(adversary="shor")))

    def test_unknown_experiment(self):
        with pytest.raises(ConfigError, match="CCA2-TA"):
            parse_config(suite_json(run_block(experiment="CCA3")))

    def test_invalid_json(self):
        with pytest.raises(ConfigError, match="JSON"):
            parse_config("{nope")

    def test_missing_runs_key(self):
        with pytest.raises(ConfigError, match="runs"):
            parse_config("{}")

    def test_nonpositive_trials(self):
        with pytest.raises(ConfigError, match="trials_per_arm"):
            parse_config(suite_json(run_block(trials_per_arm=0)))

    def test_unknown_delay_field(self):
        with pytest.raises(ConfigError, match="delay"):
            parse_config(suite_json(run_block(delay={"latency": 3})))


class TestBuildScheme:
    def test_plain_gm(self):
        scheme = build_scheme({"id": "gm", "prime_bits": 10, "message_bits": 4}, 0)
        assert isinstance(scheme, GmScheme)

    def test_plain_cs(self):
        scheme = build_scheme({"id": "cs", "group_bits": 10}, 0)
        assert isinstance(scheme, CsScheme)
        assert scheme.group_bits == 10

    def test_leak_wrapper(self):
        scheme = build_scheme(
            {"id": "cs", "group_bits": 10, "leak": {"enc_leak": 7}}, 0
        )
        assert isinstance(scheme, LeakyScheme)
        assert scheme.profile.enc_leak == 7

    def test_fixed_time_composition(self):
        scheme = build_scheme(
            {
                "id": "cs",
                "group_bits": 10,
                "leak": {"enc_leak": 5, "dec_early_abort": True},
                "fixed_time": True,
                "calibration_samples": 32,
            },
            0,
        )
        assert isinstance(scheme, FixedTimeScheme)
        assert isinstance(scheme.base, LeakyScheme)
        assert scheme.cfg.t_ft_encrypt >= 1
        assert scheme.cfg.t_ft_decrypt >= 1


class TestRunSuite:
    def test_empty_suite(self):
        report = run_suite(parse_config(suite_json()))
        assert report.results == []
        assert not report.any_failed

    def test_bad_pairing_is_recorded_not_fatal(self):
        cfg = parse_config(
            suite_json(
                run_block(name="bad", adversary="gm-malleability",
                          scheme={"id": "cs", "group_bits": 10}),
                run_block(name="good"),
            )
        )
        report = run_suite(cfg)
        assert report.any_failed
        assert report.results[0].error.startswith("PairingError")
        assert report.results[1].error is None

    def test_transcripts_written(self, tmp_path):
        cfg = parse_config(suite_json(run_block()))
        run_suite(cfg, out_dir=tmp_path)
        doc = json.loads((tmp_path / "demo.transcript.json").read_text())
        assert len(doc["trials"]) == 10  # 5 per arm, two arms
        assert doc["master_seed"] == 1

    def test_threads_match_serial(self, tmp_path):
        cfg = parse_config(
            suite_json(run_block(name="a"), run_block(name="b", seed=2))
        )
        serial = emit_report(run_suite(cfg, threads=1), format="json")
        threaded = emit_report(run_suite(cfg, threads=4), format="json")
        assert serial == threaded


@pytest.fixture(scope="module")
def report():
    return run_suite(parse_config(suite_json(run_block())))


class TestReports:

    def test_json_round_trips(self, report):
        doc = json.loads(emit_report(report, format="json"))
        assert doc["toy_parameters"] is True
        (row,) = doc["runs"]
        assert row["run"] == "demo"
        assert row["status"] == "ok"
        assert 0.0 <= row["advantage"] <= 1.0

    def test_csv_row_count_and_header(self, report):
        rows = list(csv.DictReader(io.StringIO(emit_report(report, format="csv"))))
        assert len(rows) == 1
        assert rows[0]["run"] == "demo"
        assert rows[0]["verdict"] != ""

    def test_text_carries_toy_warning(self, report):
        text = emit_report(report, format="text")
        assert "demo" in text
        assert TOY_WARNING in text

    def test_reports_are_deterministic(self):
        cfg = parse_config(suite_json(run_block()))
        first = emit_report(run_suite(cfg), format="json")
        second = emit_report(run_suite(cfg), format="json")
        assert first == second

    def test_unknown_format_rejected(self, report):
        with pytest.raises(ConfigError):
            emit_report(report, format="xml")


class TestMain:
    def test_run_exit_zero(self, tmp_path, capsys):
        config = tmp_path / "suite.json"
        config.write_text(suite_json(run_block()))
        assert main(["run", str(config), "--format", "json"]) == 0
        assert json.loads(capsys.readouterr().out)["runs"]

    def test_config_error_exit_one(self, tmp_path, capsys):
        config = tmp_path / "suite.json"
        config.write_text("{}")
        assert main(["run", str(config)]) == 1
        assert "config error" in capsys.readouterr().err

    def test_missing_file_exit_one(self, capsys):
        assert main(["run", "/nonexistent/suite.json"]) == 1
        assert "config error" in capsys.readouterr().err

    def test_failed_run_exit_two(self, tmp_path, capsys):
        config = tmp_path / "suite.json"
        config.write_text(
            suite_json(
                run_block(adversary="gm-malleability",
                          scheme={"id": "cs", "group_bits": 10})
            )
        )
        assert main(["run", str(config)]) == 2
        capsys.readouterr()

    def test_report_written_to_out_dir(self, tmp_path, capsys):
        config = tmp_path / "suite.json"
        config.write_text(suite_json(run_block()))
        out = tmp_path / "out"
        assert main(["run", str(config), "--format", "csv",
                     "--out-dir", str(out)]) == 0
        written = (out / "report.csv").read_text().replace("\r\n", "\n")
        assert written == capsys.readouterr().out.replace("\r\n", "\n")

    def test_list_commands(self, capsys):
        assert main(["list-schemes"]) == 0
        assert "gm" in capsys.readouterr().out
        assert main(["list-adversaries"]) == 0
        assert "timing-distinguisher" in capsys.readouterr().out

    def test_calibrate(self, tmp_path, capsys):
        config = tmp_path / "scheme.json"
        config.write_text(json.dumps({
            "seed": 3,
            "samples": 16,
            "scheme": {"id": "cs", "group_bits": 10,
                       "leak": {"enc_leak": 5, "dec_early_abort": True}},
        }))
        assert main(["calibrate", str(config)]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["t_ft_encrypt"] >= doc["encrypt_cost_max"] > 0
        assert "worst-case" in doc["note"]

    def test_calibrate_bad_config(self, tmp_path, capsys):
        config = tmp_path / "scheme.json"
        config.write_text(json.dumps({"scheme": {"id": "gm"}}))
        assert main(["calibrate", str(config)]) == 1
        assert "config error" in capsys.readouterr().err
