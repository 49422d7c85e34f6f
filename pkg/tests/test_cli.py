import csv
import io
import json
import math
from fractions import Fraction

import pytest

from sievesum.cli import DEFAULT_SEED, main, parse_limit
from sievesum.series import mertens_residual
from sievesum.sieve import primes_up_to


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestParseLimit:
    def test_plain_and_scientific(self):
        assert parse_limit("100") == 100
        assert parse_limit("1e8") == 10**8
        assert parse_limit("2.5e3") == 2500

    def test_rejects_fractional_and_negative(self):
        import argparse

        for bad in ("2.5", "-3", "1e200", "abc"):
            with pytest.raises(argparse.ArgumentTypeError):
                parse_limit(bad)


class TestPrimesCommand:
    def test_csv_limit(self, capsys):
        code, out, _ = run_cli(capsys, "primes", "--limit", "30", "--format", "csv")
        assert code == 0
        rows = [int(r["p"]) for r in parse_csv(out)]
        assert rows == primes_up_to(30)

    def test_scientific_limit_equals_plain(self, capsys):
        _, out_sci, _ = run_cli(capsys, "primes", "--limit", "1e2")
        _, out_plain, _ = run_cli(capsys, "primes", "--limit", "100")
        assert out_sci == out_plain

    def test_count(self, capsys):
        code, out, _ = run_cli(capsys, "primes", "--count", "5", "--format", "json")
        assert code == 0
        assert json.loads(out)["primes"] == [2, 3, 5, 7, 11]

    def test_twin_pairs(self, capsys):
        code, out, _ = run_cli(
            capsys, "primes", "--limit", "20", "--twins", "--format", "json"
        )
        assert code == 0
        assert json.loads(out)["pairs"] == [[3, 5], [5, 7], [11, 13], [17, 19]]

    def test_limit_and_count_conflict(self, capsys):
        code, _, _ = run_cli(capsys, "primes", "--limit", "10", "--count", "3")
        assert code == 2


class TestSeriesCommand:
    def test_prime_terms_csv(self, capsys):
        code, out, _ = run_cli(
            capsys, "series", "--kind", "prime", "--terms", "3", "--format", "csv"
        )
        assert code == 0
        rows = parse_csv(out)
        terms = [Fraction(int(r["T_num"]), int(r["T_den"])) for r in rows]
        assert terms == [Fraction(1, 2), Fraction(1, 6), Fraction(1, 15)]

    def test_twin_terms(self, capsys):
        code, out, _ = run_cli(
            capsys, "series", "--kind", "twin", "--terms", "2", "--format", "json"
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["meta"]["a"] == 2
        terms = [Fraction(r["T"]["num"], r["T"]["den"]) for r in doc["rows"]]
        assert terms == [Fraction(1, 3), Fraction(1, 15)]

    def test_custom_comma_list_telescopes(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "series",
            "--kind",
            "custom",
            "--a",
            "1",
            "--seq",
            "2,3,4,5",
            "--terms",
            "4",
            "--format",
            "json",
        )
        assert code == 0
        last = json.loads(out)["rows"][-1]
        assert Fraction(last["S"]["num"], last["S"]["den"]) == Fraction(4, 5)

    def test_custom_rule_matches_comma_list(self, capsys):
        _, out_rule, _ = run_cli(
            capsys, "series", "--kind", "custom", "--seq", "2:1", "--terms", "4"
        )
        _, out_list, _ = run_cli(
            capsys, "series", "--kind", "custom", "--seq", "2,3,4,5", "--terms", "4"
        )
        assert out_rule == out_list

    def test_csv_json_round_trip_exact(self, capsys):
        args = ("series", "--kind", "prime", "--terms", "6")
        _, out_csv, _ = run_cli(capsys, *args, "--format", "csv")
        _, out_json, _ = run_cli(capsys, *args, "--format", "json")
        doc = json.loads(out_json)
        for csv_row, json_row in zip(parse_csv(out_csv), doc["rows"]):
            for column, key in (("T", "T"), ("S", "S"), ("R", "R")):
                from_csv = Fraction(
                    int(csv_row[f"{column}_num"]), int(csv_row[f"{column}_den"])
                )
                from_json = Fraction(json_row[key]["num"], json_row[key]["den"])
                assert from_csv == from_json

    def test_csv_json_round_trip_float(self, capsys):
        args = ("series", "--kind", "twin", "--terms", "8", "--mode", "float")
        _, out_csv, _ = run_cli(capsys, *args, "--format", "csv")
        _, out_json, _ = run_cli(capsys, *args, "--format", "json")
        doc = json.loads(out_json)
        for csv_row, json_row in zip(parse_csv(out_csv), doc["rows"]):
            for key in ("T", "S", "residual"):
                assert float(csv_row[key]) == json_row[key]

    def test_float_mode_matches_exact(self, capsys):
        _, out_float, _ = run_cli(
            capsys, "series", "--kind", "prime", "--terms", "12", "--mode", "float"
        )
        _, out_exact, _ = run_cli(
            capsys, "series", "--kind", "prime", "--terms", "12"
        )
        float_rows = parse_csv(out_float)
        exact_rows = parse_csv(out_exact)
        for f_row, e_row in zip(float_rows, exact_rows):
            exact_S = Fraction(int(e_row["S_num"]), int(e_row["S_den"]))
            assert float(f_row["S"]) == pytest.approx(float(exact_S), rel=1e-12)

    def test_digits_control_float_rendering(self, capsys):
        _, out, _ = run_cli(
            capsys,
            "series",
            "--kind",
            "prime",
            "--terms",
            "3",
            "--mode",
            "float",
            "--digits",
            "3",
        )
        row = parse_csv(out)[1]
        assert row["T"] == "0.167"

    def test_custom_requires_seq(self, capsys):
        code, _, err = run_cli(capsys, "series", "--kind", "custom", "--terms", "3")
        assert code == 2
        assert "--seq" in err

    def test_sequence_shorter_than_terms(self, capsys):
        code, _, _ = run_cli(
            capsys, "series", "--kind", "custom", "--seq", "2,3", "--terms", "5"
        )
        assert code == 2

    def test_depth_guard_suggests_float_mode(self, capsys):
        code, _, err = run_cli(
            capsys, "series", "--kind", "prime", "--terms", "6000"
        )
        assert code == 2
        assert "--mode float" in err

    def test_output_file(self, capsys, tmp_path):
        target = tmp_path / "rows.csv"
        code, out, _ = run_cli(
            capsys,
            "series",
            "--kind",
            "prime",
            "--terms",
            "2",
            "--output",
            str(target),
        )
        assert code == 0
        assert out == ""
        assert target.read_text().startswith("n,F_n,")


class TestVerifyCommand:
    def test_prime_pass(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "--kind", "prime", "--terms", "500")
        assert code == 0
        doc = json.loads(out)
        assert doc["status"] == "pass"
        assert "totient-primorial" in doc["checks"]

    def test_twin_pass_runs_dominance(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "--kind", "twin", "--terms", "500")
        assert code == 0
        assert "dominance" in json.loads(out)["checks"]

    def test_square_free_and_custom_pass(self, capsys):
        assert run_cli(capsys, "verify", "--kind", "square-free", "--terms", "100")[0] == 0
        assert (
            run_cli(
                capsys, "verify", "--kind", "custom", "--a", "3", "--seq", "4:3",
                "--terms", "50",
            )[0]
            == 0
        )

    @pytest.mark.parametrize("index", [1, 5, 100])
    def test_tamper_never_passes(self, capsys, index):
        code, out, _ = run_cli(
            capsys,
            "verify",
            "--kind",
            "prime",
            "--terms",
            "100",
            "--tamper-index",
            str(index),
        )
        assert code == 1
        doc = json.loads(out)
        assert doc["status"] == "fail"
        assert doc["index"] == index
        assert doc["identity"] in ("residual", "recursion", "totient-primorial")

    def test_tamper_out_of_range_is_usage_error(self, capsys):
        code, _, _ = run_cli(
            capsys, "verify", "--terms", "10", "--tamper-index", "11"
        )
        assert code == 2

    def test_random_suite_prints_seed(self, capsys):
        code, out, err = run_cli(capsys, "verify", "--random", "10")
        assert code == 0
        assert f"seed: {DEFAULT_SEED}" in err
        doc = json.loads(out)
        assert doc["seed"] == DEFAULT_SEED
        assert doc["random_instances"] == 10

    def test_random_suite_custom_seed(self, capsys):
        code, out, err = run_cli(capsys, "verify", "--random", "5", "--seed", "99")
        assert code == 0
        assert "seed: 99" in err


class TestKconstCommand:
    def test_small_limit_rejected(self, capsys):
        code, _, err = run_cli(capsys, "kconst", "--limit", "100")
        assert code == 2
        assert "1e4" in err

    def test_default_method_works_at_minimum_limit(self, capsys):
        code, out, _ = run_cli(capsys, "kconst", "--limit", "1e4")
        assert code == 0
        assert json.loads(out)["method"] == "hl-tail"

    def test_aitken_below_1e6_is_usage_error(self, capsys):
        code, _, err = run_cli(
            capsys, "kconst", "--limit", "1e4", "--method", "aitken"
        )
        assert code == 2
        assert "1e6" in err

    def test_hl_fields(self, capsys):
        code, out, _ = run_cli(
            capsys, "kconst", "--limit", "1e4", "--method", "hl-tail"
        )
        assert code == 0
        doc = json.loads(out)
        for key in (
            "method",
            "limit",
            "partial",
            "tail_correction",
            "k_estimate",
            "error_estimate",
            "c2_used",
        ):
            assert key in doc
        assert doc["method"] == "hl-tail"
        assert doc["k_estimate"] == pytest.approx(
            doc["partial"] * math.exp(doc["tail_correction"]), rel=1e-12
        )


class TestBrunCommand:
    def test_json(self, capsys):
        code, out, _ = run_cli(capsys, "brun", "--limit", "20", "--digits", "12")
        assert code == 0
        doc = json.loads(out)
        assert Fraction(doc["sum"]["num"], doc["sum"]["den"]) == Fraction(
            5603888, 4849845
        )
        assert doc["terms"] == 8
        assert doc["decimal"].startswith("1.155")

    def test_csv_matches_json(self, capsys):
        _, out_csv, _ = run_cli(capsys, "brun", "--limit", "20", "--format", "csv")
        _, out_json, _ = run_cli(capsys, "brun", "--limit", "20", "--format", "json")
        row = parse_csv(out_csv)[0]
        doc = json.loads(out_json)
        assert int(row["sum_num"]) == doc["sum"]["num"]
        assert int(row["sum_den"]) == doc["sum"]["den"]


class TestMertensCommand:
    def test_rows(self, capsys):
        code, out, _ = run_cli(capsys, "mertens", "--terms", "5")
        assert code == 0
        rows = parse_csv(out)
        assert [int(r["p_n"]) for r in rows] == [2, 3, 5, 7, 11]
        expected = mertens_residual(5)
        for row, (_, ratio) in zip(rows, expected):
            assert float(row["ratio"]) == pytest.approx(ratio, rel=1e-12)

    def test_last_row_only(self, capsys):
        code, out, _ = run_cli(
            capsys, "mertens", "--terms", "100", "--last", "--format", "json"
        )
        assert code == 0
        doc = json.loads(out)
        assert len(doc["rows"]) == 1
        assert doc["rows"][0]["n"] == 100
        assert doc["rows"][0]["p_n"] == 541


class TestUsageErrors:
    def test_missing_subcommand(self, capsys):
        assert run_cli(capsys)[0] == 2

    def test_unknown_flag(self, capsys):
        assert run_cli(capsys, "primes", "--limit", "10", "--purple")[0] == 2

    def test_bad_terms(self, capsys):
        assert run_cli(capsys, "series", "--kind", "prime", "--terms", "0")[0] == 2
