# tests/cli_test/test_cli.py
"""
CLI tests: command processor, option parsing, every command, exit codes.

Covers:
    • CommandResult defaults
    • split_options / _strip_comments / string argv
    • Global options: --format, --units, --out, --threads, --seed
    • entropy, exponent (pa / wiretap / ea / length / lhl), ea, simulate,
      wiretap, verify, moderate, help
    • Error → exit-code mapping (2 validation, 3 capacity, 5 domain, 1 failed verify)
    • Console entry point
"""
import json
import math
import os

import pytest

from api.exceptions import ValidationError
from api.models.reports import CheckReport

from privamp.cli import commands
from privamp.cli.__main__ import main
from privamp.cli.command_processor import CommandProcessor
from privamp.cli.commands import COMMANDS, CommandResult

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")
LOG2 = math.log(2)


def _fixture(name: str) -> str:
    return os.path.join(FIXTURES, name)


@pytest.fixture
def processor():
    return CommandProcessor()


def _run(processor, *argv):
    result = processor.process(list(argv))
    assert result.exit_code == 0, result.message
    return result, json.loads(result.output)


# ═════════════════════════════════════════════════════════════════
#  Parsing
# ═════════════════════════════════════════════════════════════════

class TestParsing:

    def test_command_result_defaults(self):
        r = CommandResult(True, "ok")
        assert r.exit_code == 0
        assert r.output == ""
        assert r.data == {}

    def test_split_options_forms(self):
        options, positional = CommandProcessor.split_options(
            ["simulate", "--u=2", "--v", "1", "--breakdown", "--log-level", "DEBUG"])
        assert positional == ["simulate"]
        assert options == {"u": "2", "v": "1", "breakdown": True, "log_level": "DEBUG"}

    def test_split_options_negative_value(self):
        options, _ = CommandProcessor.split_options(["ea", "--rate", "-0.5"])
        assert options["rate"] == "-0.5"

    def test_split_options_repeated(self):
        with pytest.raises(ValidationError, match="more than once"):
            CommandProcessor.split_options(["--u", "1", "--u", "2"])

    def test_split_options_missing_value(self):
        with pytest.raises(ValidationError, match="needs a value"):
            CommandProcessor.split_options(["simulate", "--u"])

    def test_strip_comments(self):
        assert CommandProcessor._strip_comments("verify --trials 10  # quick") == "verify --trials 10"
        assert CommandProcessor._strip_comments("help '#x'") == "help '#x'"

    def test_string_argv(self, processor):
        result = processor.process("simulate --fixture correlated-bit --u 1 --v 1  # exact")
        assert result.exit_code == 0
        assert json.loads(result.output)["result"]["value"] == pytest.approx(0.5)

    def test_unbalanced_quote(self, processor):
        assert processor.process('help "open').exit_code == 2

    def test_registry(self):
        assert set(COMMANDS) == {"entropy", "exponent", "simulate", "wiretap", "verify",
                                 "moderate", "ea", "help"}


# ═════════════════════════════════════════════════════════════════
#  Processor errors and global options
# ═════════════════════════════════════════════════════════════════

class TestProcessor:

    def test_help(self, processor):
        result = processor.process(["help"])
        assert result.success
        assert result.output.startswith("Usage: privamp")
        assert "correlated-bit" in result.output

    def test_no_command(self, processor):
        result = processor.process([])
        assert not result.success
        assert result.exit_code == 2

    def test_unknown_command(self, processor):
        result = processor.process(["frobnicate"])
        assert result.exit_code == 2
        assert "Unknown command" in result.message

    def test_extra_positional(self, processor):
        assert processor.process(["help", "me"]).exit_code == 2

    def test_unknown_option(self, processor):
        result = processor.process(["simulate", "--fixture", "correlated-bit", "--u", "1", "--v", "1",
                                    "--alpha", "2"])
        assert result.exit_code == 2
        assert "--alpha" in result.message

    @pytest.mark.parametrize("option,value", [("format", "xml"), ("units", "hartleys"),
                                              ("threads", "-1"), ("seed", "abc")])
    def test_bad_global_option(self, processor, option, value):
        result = processor.process(["help", f"--{option}", value])
        assert result.exit_code == 2

    def test_resolve_config(self, processor):
        config = processor.resolve_config({"units": "bits", "seed": "7", "threads": "2",
                                           "format": "csv"})
        assert config.serialization.units.value == "bits"
        assert config.serialization.format == "csv"
        assert config.seed == 7
        assert config.max_workers == 2

    def test_out_writes_file(self, processor, tmp_path):
        out = tmp_path / "result.json"
        result = processor.process(["simulate", "--fixture", "correlated-bit", "--u", "1", "--v", "1",
                                    "--out", str(out)])
        assert result.exit_code == 0
        assert result.output == ""
        assert "Wrote" in result.message
        assert json.loads(out.read_text(encoding="utf-8"))["result"]["value"] == pytest.approx(0.5)

    def test_csv_format(self, processor):
        result = processor.process(["simulate", "--fixture", "correlated-bit", "--u", "1", "--v", "1",
                                    "--format", "csv"])
        header, row = result.output.splitlines()
        columns = header.split(",")
        assert columns[:2] == ["mode", "value"]
        assert row.split(",")[1] == "0.5"

    def test_envelope_provenance(self, processor):
        _, data = _run(processor, "entropy", "--state", _fixture("qubit_state.json"), "--alpha", "2",
                       "--kinds", "down")
        assert data["command"] == "entropy"
        assert data["inputs"]["state"]["source"] == "qubit_state.json"
        assert len(data["inputs"]["state"]["sha256"]) == 64
        assert data["config"]["params"] == {"alpha": "2", "kinds": "down"}
        assert data["config"]["platform"]["seed"] == 0

    def test_state_file_matches_bundled_fixture(self, processor):
        _, from_file = _run(processor, "entropy", "--state", _fixture("qubit_state.json"),
                            "--kinds", "down", "--alpha", "1")
        _, bundled = _run(processor, "entropy", "--fixture", "random-qubit-e",
                          "--kinds", "down", "--alpha", "1")
        assert from_file["inputs"]["state"]["sha256"] == bundled["inputs"]["state"]["sha256"]
        assert from_file["result"] == bundled["result"]


# ═════════════════════════════════════════════════════════════════
#  State loading
# ═════════════════════════════════════════════════════════════════

class TestStateInput:

    def test_invalid_state_file(self, processor):
        result = processor.process(["entropy", "--state", _fixture("not_normalized.json")])
        assert result.exit_code == 2

    def test_missing_state_file(self, processor):
        result = processor.process(["entropy", "--state", _fixture("absent.json")])
        assert result.exit_code == 2
        assert "not found" in result.message

    def test_state_and_fixture_exclusive(self, processor):
        result = processor.process(["entropy", "--state", _fixture("qubit_state.json"),
                                    "--fixture", "uniform-bit"])
        assert result.exit_code == 2

    def test_state_required(self, processor):
        result = processor.process(["entropy"])
        assert result.exit_code == 2
        assert "--fixture" in result.message

    def test_unknown_fixture(self, processor):
        assert processor.process(["entropy", "--fixture", "nope"]).exit_code == 2


# ═════════════════════════════════════════════════════════════════
#  entropy
# ═════════════════════════════════════════════════════════════════

class TestEntropy:

    def test_uniform_bit_in_bits(self, processor):
        result = processor.process(["entropy", "--fixture", "uniform-bit", "--alpha", "0.75,1,2",
                                    "--kinds", "down,star", "--units", "bits"])
        rows = json.loads(result.output)["result"]["rows"]
        assert len(rows) == 6
        for row in rows:
            assert row["entropy"] == pytest.approx(1.0, abs=1e-9)
            assert row["converged"] is True
        assert result.data["result"]["rows"][0]["entropy"] == pytest.approx(LOG2)

    def test_information_column(self, processor):
        _, data = _run(processor, "entropy", "--fixture", "correlated-bit", "--alpha", "1.5",
                       "--kinds", "i_down,i_star")
        for row in data["result"]["rows"]:
            assert row["information"] == pytest.approx(LOG2, rel=1e-6)

    def test_unknown_kind(self, processor):
        result = processor.process(["entropy", "--fixture", "uniform-bit", "--kinds", "min"])
        assert result.exit_code == 2
        assert "min" in result.message

    def test_bad_alpha_list(self, processor):
        result = processor.process(["entropy", "--fixture", "uniform-bit", "--alpha", "one"])
        assert result.exit_code == 2


# ═════════════════════════════════════════════════════════════════
#  exponent / ea
# ═════════════════════════════════════════════════════════════════

class TestExponent:

    def test_pa_converse(self, processor):
        _, data = _run(processor, "exponent", "--fixture", "correlated-bit", "--family", "pa",
                       "--side", "conv", "--rate", repr(LOG2), "--n", "1,4")
        report = data["result"]["reports"][0]
        assert report["exponent"] == pytest.approx(LOG2, rel=1e-9)
        assert report["bounds"]["4"] == pytest.approx(0.75, rel=1e-9)
        assert report["bounds"]["1"] == 0.0

    def test_rates_read_in_display_units(self, processor):
        result = processor.process(["exponent", "--fixture", "correlated-bit", "--family", "pa",
                                    "--side", "conv", "--rate", "1", "--units", "bits"])
        report = json.loads(result.output)["result"]["reports"][0]
        assert report["rate"] == pytest.approx(1.0)
        assert report["exponent"] == pytest.approx(1.0, rel=1e-9)
        assert result.data["result"]["reports"][0]["rate"] == pytest.approx(LOG2)

    def test_csv_rows_per_blocklength(self, processor):
        result = processor.process(["exponent", "--fixture", "uniform-bit", "--family", "pa",
                                    "--side", "ach", "--rate", "0.2,0.3", "--n", "1,2,3",
                                    "--format", "csv"])
        lines = result.output.splitlines()
        assert lines[0].split(",")[-3:] == ["n", "bound", "raw_bound"]
        assert len(lines) == 1 + 6

    def test_length(self, processor):
        _, data = _run(processor, "exponent", "--fixture", "uniform-bit", "--family", "pa",
                       "--side", "length", "--eps", "0.1")
        assert data["result"]["length_lower"] == pytest.approx(LOG2 - 2 * math.log(10), rel=1e-6)

    def test_leftover_hash(self, processor):
        _, data = _run(processor, "exponent", "--fixture", "uniform-bit", "--family", "pa",
                       "--side", "lhl", "--rate", repr(0.5 * LOG2), "--n", "1,8")
        bounds = [row["bound"] for row in data["result"]["rows"]]
        assert bounds == pytest.approx([math.exp(-LOG2 / 4), math.exp(-2 * LOG2)])

    def test_wiretap_secrecy(self, processor):
        _, data = _run(processor, "exponent", "--fixture", "uniform-bit", "--family", "wiretap",
                       "--side", "ach", "--rate", repr(LOG2))
        assert data["result"]["reports"][0]["kind"] == "wt_ach"

    def test_vacuous_rate_still_succeeds(self, processor):
        _, data = _run(processor, "exponent", "--fixture", "uniform-bit", "--family", "pa",
                       "--side", "ach", "--rate", "5")
        assert data["result"]["reports"][0]["vacuous"] is True

    def test_unknown_family_and_side(self, processor):
        base = ["exponent", "--fixture", "uniform-bit", "--rate", "0.1"]
        assert processor.process(base + ["--family", "qkd", "--side", "ach"]).exit_code == 2
        assert processor.process(base + ["--family", "wiretap", "--side", "lhl"]).exit_code == 2

    def test_ea_through_exponent(self, processor):
        _, data = _run(processor, "exponent", "--family", "ea", "--side", "conv", "--f", "0.3",
                       "--V", "2.5", "--prob", "0.1", "--rate", "0.8", "--n", "1000")
        assert data["command"] == "exponent"
        value = data["result"]["reports"][0]["value"]
        assert value == pytest.approx(1 - 40 * math.exp(-20), rel=1e-12)


class TestEA:

    def test_grid_of_rates_and_blocklengths(self, processor):
        result, data = _run(processor, "ea", "--f", "0.3", "--V", "2.5", "--prob", "0.1",
                            "--rate", "0.8,1.0", "--n", "10,1000")
        assert len(data["result"]["reports"]) == 4
        assert "4 bound(s)" in result.message

    def test_output_stays_in_nats(self, processor):
        argv = ["ea", "--f", "0.3", "--V", "2.5", "--prob", "0.1", "--rate", "0.8"]
        _, bits = _run(processor, *argv, "--units", "bits")
        _, nats = _run(processor, *argv)
        assert bits["units"] == "nats"
        assert bits["result"] == nats["result"]
        assert bits["result"]["reports"][0]["params"]["R"] == pytest.approx(0.8)

    def test_window_violation_is_domain_error(self, processor):
        result = processor.process(["ea", "--side", "ach", "--f", "1", "--V", "2.5", "--prob", "0.5",
                                    "--rate", "1"])
        assert result.exit_code == 5

    def test_parameter_validation(self, processor):
        result = processor.process(["ea", "--f", "1", "--V", "1.5", "--prob", "0.5", "--rate", "1.5"])
        assert result.exit_code == 2

    def test_missing_parameter(self, processor):
        result = processor.process(["ea", "--f", "1", "--V", "2.5", "--rate", "1.5"])
        assert result.exit_code == 2
        assert "--prob" in result.message


# ═════════════════════════════════════════════════════════════════
#  simulate
# ═════════════════════════════════════════════════════════════════

class TestSimulate:

    def test_exact(self, processor):
        result, data = _run(processor, "simulate", "--fixture", "product-uniform-2bit",
                            "--u", "2", "--v", "1")
        assert data["result"]["value"] == pytest.approx(0.125, abs=1e-12)
        assert data["result"]["family_size"] == 16
        assert "per_hash" not in data["result"]
        assert result.message.startswith("ε_PA")

    def test_breakdown(self, processor):
        _, data = _run(processor, "simulate", "--fixture", "product-uniform-2bit", "--u", "2",
                       "--v", "1", "--breakdown")
        assert len(data["result"]["per_hash"]) == 16

    def test_blocklength(self, processor):
        _, data = _run(processor, "simulate", "--fixture", "uniform-bit", "--u", "1", "--v", "1",
                       "--n", "2")
        assert data["result"]["value"] == pytest.approx(3 / 16)
        assert data["result"]["u"] == 2

    def test_small_alphabet_padded(self, processor):
        _, data = _run(processor, "simulate", "--fixture", "uniform-bit", "--u", "2", "--v", "1")
        assert 0.0 <= data["result"]["value"] <= 1.0

    def test_monte_carlo_reproducible(self, processor):
        argv = ["simulate", "--fixture", "product-uniform-2bit", "--u", "2", "--v", "1",
                "--mode", "mc", "--trials", "60", "--seed", "11"]
        first = processor.process(argv)
        second = processor.process(argv)
        assert first.output == second.output
        assert json.loads(first.output)["result"]["seed"] == 11

    def test_sandwich(self, processor):
        result, data = _run(processor, "simulate", "--fixture", "correlated-bit", "--u", "1",
                            "--v", "1", "--mode", "sandwich")
        assert data["result"]["exact"] == pytest.approx(0.5)
        assert data["result"]["verdict"] == {"upper": "pass", "lower": "pass"}
        assert "pass" in result.message

    def test_sweep(self, processor):
        _, data = _run(processor, "simulate", "--fixture", "uniform-bit", "--u", "1", "--v", "1",
                       "--mode", "sandwich", "--n", "1,2")
        assert [row["n"] for row in data["result"]["rows"]] == [1, 2]

    def test_exact_takes_one_blocklength(self, processor):
        result = processor.process(["simulate", "--fixture", "uniform-bit", "--u", "1", "--v", "1",
                                    "--n", "1,2"])
        assert result.exit_code == 2

    def test_unknown_mode(self, processor):
        result = processor.process(["simulate", "--fixture", "uniform-bit", "--u", "1", "--v", "1",
                                    "--mode", "fast"])
        assert result.exit_code == 2

    def test_capacity_exit_code(self, processor):
        result = processor.process(["simulate", "--fixture", "random-qubit-e", "--u", "1", "--v", "1",
                                    "--n", "8"])
        assert result.exit_code == 3


# ═════════════════════════════════════════════════════════════════
#  wiretap
# ═════════════════════════════════════════════════════════════════

class TestWiretap:

    def test_bundled_channel(self, processor):
        result, data = _run(processor, "wiretap", "--channel", "leakage-free", "--M", "2", "--L", "2")
        d1 = data["result"]["sandwich"]["d1"]
        assert d1["actual"] == pytest.approx(0.125)
        assert d1["worst_case"] == pytest.approx(0.25)
        assert data["inputs"]["channel"]["source"] == "fixture:leakage-free"
        assert data["result"]["error"]["kind"] == "wt_err"
        assert "pass" in result.message

    def test_kraus_channel(self, processor):
        _, data = _run(processor, "wiretap", "--kraus", _fixture("kraus_dephasing.json"),
                       "--inputs", _fixture("basis_inputs.json"), "--M", "2", "--L", "2")
        provenance = data["inputs"]["channel"]
        assert provenance["source"] == "kraus_dephasing.json"
        assert len(provenance["inputs_sha256"]) == 64
        assert 0.0 <= data["result"]["sandwich"]["d1"]["actual"] <= 1.0

    def test_channel_or_kraus(self, processor):
        assert processor.process(["wiretap", "--M", "2", "--L", "2"]).exit_code == 2
        result = processor.process(["wiretap", "--channel", "leakage-free", "--kraus",
                                    _fixture("kraus_dephasing.json"), "--M", "2", "--L", "2"])
        assert result.exit_code == 2

    def test_kraus_needs_inputs(self, processor):
        result = processor.process(["wiretap", "--kraus", _fixture("kraus_dephasing.json"),
                                    "--M", "2", "--L", "2"])
        assert result.exit_code == 2
        assert "--inputs" in result.message

    def test_sizes_validated(self, processor):
        result = processor.process(["wiretap", "--channel", "leakage-free", "--M", "0", "--L", "2"])
        assert result.exit_code == 2


# ═════════════════════════════════════════════════════════════════
#  verify / moderate
# ═════════════════════════════════════════════════════════════════

class TestVerify:

    def test_selected_checks(self, processor):
        result, data = _run(processor, "verify", "--checks", "helstrom_attainment", "--trials", "20")
        assert [r["name"] for r in data["result"]] == ["helstrom_attainment"]
        assert data["result"][0]["pass"] is True
        assert result.message == "all 1 check(s) passed."

    def test_unknown_check(self, processor):
        assert processor.process(["verify", "--checks", "everything"]).exit_code == 2

    def test_failure_exits_one(self, processor, monkeypatch):
        failing = CheckReport(name="trace_inequality", trials=1, worst_violation=0.5, slack=0.0,
                              seed=0)
        monkeypatch.setattr(commands, "run_battery", lambda *args, **kwargs: [failing])
        result = processor.process(["verify"])
        assert result.exit_code == 1
        assert not result.success
        assert "trace_inequality" in result.message

    def test_csv_joins_failures(self, processor, monkeypatch):
        report = CheckReport(name="x", trials=3, worst_violation=-1.0, slack=0.0, seed=0,
                             failures=["a", "b"])
        monkeypatch.setattr(commands, "run_battery", lambda *args, **kwargs: [report])
        result = processor.process(["verify", "--format", "csv"])
        assert result.exit_code == 1
        assert "a; b" in result.output


class TestModerate:

    def test_pa_converse_table(self, processor):
        _, data = _run(processor, "moderate", "--fixture", "classical-quarter", "--kind", "pa_conv",
                       "--t", "0.3", "--n", "100,10000")
        result = data["result"]
        assert result["kind"] == "pa_conv"
        assert result["limit"] == pytest.approx(2.209, abs=1e-3)
        assert [row["n"] for row in result["rows"]] == [100, 10000]

    def test_entropy_accumulation_table(self, processor):
        _, data = _run(processor, "moderate", "--kind", "ea_conv", "--f", "0.5", "--V", "2.5",
                       "--prob", "0.1", "--t", "0.3", "--n", "10,1000")
        assert data["result"]["limit"] == pytest.approx(1 / (2 * 2.5 ** 2))
        assert data["inputs"] == {}

    @pytest.mark.parametrize("kind,sign", [("pa_conv", 1), ("pa_ach", -1)])
    def test_bits_table_keeps_its_relations(self, processor, kind, sign):
        argv = ["moderate", "--fixture", "classical-quarter", "--kind", kind, "--t", "0.3",
                "--n", "100,10000"]
        _, nats = _run(processor, *argv)
        _, bits = _run(processor, *argv, "--units", "bits")
        table, plain = bits["result"], nats["result"]
        assert bits["units"] == "bits"
        assert table["threshold"] == pytest.approx(plain["threshold"] / LOG2)
        assert table["variance"] == pytest.approx(plain["variance"] / LOG2 ** 2)
        assert table["limit"] == pytest.approx(1 / (2 * table["variance"]))
        for row, nat_row in zip(table["rows"], plain["rows"]):
            assert row["rate"] == pytest.approx(table["threshold"] + sign * row["a_n"])
            assert row["a_n"] == pytest.approx(nat_row["a_n"] / LOG2)
            assert row["bound"] == pytest.approx(nat_row["bound"])
            assert row["normalized_exponent"] == pytest.approx(
                nat_row["normalized_exponent"] * LOG2 ** 2)

    def test_entropy_accumulation_table_stays_in_nats(self, processor):
        argv = ["moderate", "--kind", "ea_conv", "--f", "0.5", "--V", "2.5", "--prob", "0.1",
                "--t", "0.3", "--n", "10,1000"]
        _, nats = _run(processor, *argv)
        _, bits = _run(processor, *argv, "--units", "bits")
        assert bits["units"] == "nats"
        assert bits["result"] == nats["result"]

    def test_unknown_kind(self, processor):
        result = processor.process(["moderate", "--fixture", "classical-quarter", "--kind", "pa_mid",
                                    "--t", "0.3", "--n", "100"])
        assert result.exit_code == 2

    def test_zero_variance_is_domain_error(self, processor):
        result = processor.process(["moderate", "--fixture", "correlated-bit", "--kind", "pa_conv",
                                    "--t", "0.3", "--n", "100"])
        assert result.exit_code == 5

    def test_schedule_validated(self, processor):
        result = processor.process(["moderate", "--fixture", "classical-quarter", "--kind", "pa_conv",
                                    "--t", "0.7", "--n", "100"])
        assert result.exit_code == 2


# ═════════════════════════════════════════════════════════════════
#  Entry point
# ═════════════════════════════════════════════════════════════════

class TestMain:

    def test_help_to_stdout(self, capsys):
        assert main(["help"]) == 0
        assert "Usage: privamp" in capsys.readouterr().out

    def test_error_exit_code(self, capsys):
        assert main(["frobnicate"]) == 2
        assert capsys.readouterr().out == ""

    def test_result_on_stdout(self, capsys):
        assert main(["simulate", "--fixture", "correlated-bit", "--u", "1", "--v", "1",
                     "--log-level", "DEBUG"]) == 0
        assert json.loads(capsys.readouterr().out)["result"]["value"] == pytest.approx(0.5)
