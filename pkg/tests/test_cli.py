"""
test_cli.py — Tests for the chatelet-brauer command line.

Covers:
  - classify on the quartic cases and the X_m family
  - generators for X_22, a monic cubic and a surface with trivial Br
  - search-points in table and json-lines form
  - sweep on a reference block (slow)
  - Exit codes for usage, unsupported and validation failures

Run with:
    pytest tests/test_cli.py -v
"""

from __future__ import annotations

import io
import json

import pytest
from sympy import Rational

from chatelet_brauer.cli import main, parse_pairs
from chatelet_brauer.errors import UsageError
from chatelet_brauer.models import InvariantRecord


def run(*argv: str) -> tuple[int, str]:
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


class TestParsePairs:
    def test_pairs(self):
        assert parse_pairs("1,10; 2,15;") == [(1, 10), (2, 15)]

    def test_malformed(self):
        with pytest.raises(UsageError, match="x,y"):
            parse_pairs("1,10;2")


class TestClassify:
    def test_x22(self):
        code, text = run("classify", "--a", "-1", "--c", "-1", "--P", "t^4-22")
        assert code == 0
        assert "Br = Z/4" in text

    def test_m_shorthand(self):
        code, text = run("classify", "--m", "22")
        assert code == 0
        assert "Z/4" in text

    def test_cyclic_quartic_trivial(self):
        code, text = run("classify", "--a", "5", "--c", "1", "--P", "t^4+t^3+t^2+t+1")
        assert code == 0
        assert "Br = 0" in text

    def test_binomial_v4_quartic(self):
        code, text = run("classify", "--a", "-1", "--c", "1", "--P", "t^4+1")
        assert code == 0
        assert "Br = Z/2" in text

    def test_collapsed_sextic_is_unsupported(self):
        code, _ = run("classify", "--a", "-3", "--c", "1", "--P", "t^6+3")
        assert code == 3

    def test_json_lines(self):
        code, text = run("classify", "--m", "22", "--format", "json-lines")
        record = json.loads(text)
        assert code == 0
        assert record["invariants"] == [4]

    def test_malformed_polynomial(self):
        code, _ = run("classify", "--a", "-1", "--c", "1", "--P", "t^^4")
        assert code == 2

    def test_m_with_polynomial_rejected(self):
        code, _ = run("classify", "--m", "22", "--P", "t^4-22")
        assert code == 2

    def test_missing_surface(self):
        code, _ = run("classify")
        assert code == 2

    def test_validation_error_is_usage(self):
        code, _ = run("classify", "--m", "22", "--precision", "3")
        assert code == 2


class TestGenerators:
    def test_x22(self):
        code, text = run("generators", "--m", "22")
        assert code == 0
        assert "(x+√a·y)" in text
        assert "Checks" in text

    def test_monic_cubic(self):
        code, text = run("generators", "--a", "-3", "--c", "1", "--P", "t^3-2")
        assert code == 0
        assert "(x+√a·y)" in text and "(t-e1)" in text

    def test_trivial_brauer_group(self):
        code, text = run("generators", "--a", "5", "--c", "1", "--P", "t^4+t^3+t^2+t+1")
        assert code == 0
        assert "no nontrivial generator" in text


class TestSearchPoints:
    def test_table(self):
        code, text = run("search-points", "--m", "22", "--p", "2", "--bound", "15")
        assert code == 0
        assert "(1,10)" in text and "(2,15)" in text
        assert "(1,1) " not in text

    def test_json_lines(self):
        code, text = run(
            "search-points", "--m", "22", "--p", "2", "--bound", "10", "--format", "json-lines"
        )
        rows = [json.loads(line) for line in text.splitlines()]
        assert code == 0
        assert (1, 10) in {(r["x"], r["y"]) for r in rows}
        assert all(r["p"] == 2 for r in rows)

    def test_empty_bound(self):
        code, text = run("search-points", "--m", "22", "--p", "2", "--bound", "0")
        assert code == 0
        assert "Total : 0" in text

    def test_needs_prime(self):
        code, _ = run("search-points", "--m", "22")
        assert code == 2


class TestSweep:
    def test_unsupported_place(self):
        code, _ = run("sweep", "--m", "22", "--p", "7", "--points", "2,3")
        assert code == 3

    def test_point_without_t(self):
        code, _ = run("sweep", "--m", "22", "--p", "2", "--points", "1,1")
        assert code == 2

    @pytest.mark.slow
    def test_reference_block_table(self):
        code, text = run("sweep", "--m", "22")
        assert code == 0
        assert "surjective onto (1/4)Z/Z" in text

    @pytest.mark.slow
    def test_json_lines_round_trip(self):
        code, text = run(
            "sweep", "--m", "70", "--p", "2", "--points", "1,2;1,6;1,10;1,14",
            "--format", "json-lines", "--seed", "3",
        )
        assert code == 0
        records = [InvariantRecord.from_dict(json.loads(line)) for line in text.splitlines()]
        assert [r.relative for r in records] == [Rational(k, 4) for k in range(4)]
        assert all(r.seed == 3 and r.base == (1, 2) for r in records)
        assert [r.to_json() for r in records] == text.splitlines()

    @pytest.mark.slow
    def test_single_point_inconclusive(self):
        code, text = run("sweep", "--m", "22", "--points", "1,10")
        assert code == 0
        assert "inconclusive" in text
