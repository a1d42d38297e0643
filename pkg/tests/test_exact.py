"""
test_exact.py — Tests for the exact arithmetic substrate.

Covers:
  - Smith normal form: U·M·V = S, divisibility chain, unimodularity
  - Rank-deficient and zero matrices
  - Integer linear solving with kernel, insoluble systems
  - Square classes of rationals
  - Polynomial parsing, formatting, gcd, resultant

Run with:
    pytest tests/test_exact.py -v
"""

from __future__ import annotations

import pytest
from sympy import Rational

from chatelet_brauer.errors import UsageError
from chatelet_brauer.exact import (
    coeffs_low_first,
    determinant,
    format_poly,
    invariant_factors,
    is_rational_square,
    mat_mul,
    mat_vec,
    parse_poly,
    poly_discriminant,
    poly_from_coeffs,
    poly_gcd,
    poly_resultant,
    smith_normal_form,
    solve_linear_over_Z,
    square_class,
)

# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------

MATRICES = [
    [[2, 4, 4], [-6, 6, 12], [10, -4, -16]],
    [[0, 0], [0, 0]],
    [[1, -1, 0, 0], [0, 1, -1, 0], [-1, 0, 1, 0]],
    [[6]],
    [[2, 0], [0, 3]],
    [[4, 6, 0], [6, 9, 0]],
]


@pytest.mark.parametrize("M", MATRICES)
def test_snf_factorisation(M):
    S, U, V = smith_normal_form(M)
    assert mat_mul(mat_mul(U, M), V) == S
    assert abs(determinant(U)) == 1
    assert abs(determinant(V)) == 1
    diag = [S[i][i] for i in range(min(len(S), len(S[0])))]
    for i, row in enumerate(S):
        for j, a in enumerate(row):
            if i != j:
                assert a == 0
    nonzero = [d for d in diag if d]
    assert all(d > 0 for d in nonzero)
    assert diag[: len(nonzero)] == nonzero
    for a, b in zip(nonzero, nonzero[1:]):
        assert b % a == 0


def test_invariant_factors_known_example():
    assert invariant_factors([[2, 4, 4], [-6, 6, 12], [10, -4, -16]]) == [2, 6, 12]


def test_invariant_factors_coprime_diagonal():
    assert invariant_factors([[2, 0], [0, 3]]) == [1, 6]


# ---------------------------------------------------------------------------
# Linear systems over Z
# ---------------------------------------------------------------------------

class TestSolveLinear:
    def test_unique_solution(self):
        A = [[2, 1], [1, 1]]
        x, kernel = solve_linear_over_Z(A, [5, 3])
        assert mat_vec(A, x) == [5, 3]
        assert kernel == []

    def test_kernel_spans_nullspace(self):
        A = [[1, 1, 1]]
        x, kernel = solve_linear_over_Z(A, [4])
        assert mat_vec(A, x) == [4]
        assert len(kernel) == 2
        for k in kernel:
            assert mat_vec(A, k) == [0]

    def test_no_integral_solution(self):
        assert solve_linear_over_Z([[2, 0], [0, 2]], [1, 0]) is None

    def test_inconsistent_system(self):
        assert solve_linear_over_Z([[1, 1], [2, 2]], [1, 3]) is None

    def test_empty_matrix_needs_columns(self):
        with pytest.raises(UsageError, match="column count"):
            solve_linear_over_Z([], [])
        x, kernel = solve_linear_over_Z([], [], cols=2)
        assert x == [0, 0]
        assert len(kernel) == 2

    def test_length_mismatch(self):
        with pytest.raises(UsageError, match="right-hand side"):
            solve_linear_over_Z([[1, 2]], [1, 2])


# ---------------------------------------------------------------------------
# Rationals
# ---------------------------------------------------------------------------

@pytest.mark.parametrize(
    "q,expected",
    [(Rational(-22), -22), (Rational(8), 2), (Rational(3, 4), 3), (Rational(-1, 2), -2)],
)
def test_square_class(q, expected):
    assert square_class(q) == expected


def test_square_class_zero_rejected():
    with pytest.raises(UsageError, match="zero"):
        square_class(0)


def test_is_rational_square():
    assert is_rational_square(Rational(9, 4))
    assert not is_rational_square(Rational(2))
    assert not is_rational_square(Rational(-4))


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------

class TestParsePoly:
    @pytest.mark.parametrize(
        "text,coeffs",
        [
            ("t^4-22", [-22, 0, 0, 0, 1]),
            ("t^4+t^3+t^2+t+1", [1, 1, 1, 1, 1]),
            ("2t^2 + t - 1", [-1, 1, 2]),
            ("-t^3+2*t", [0, 2, 0, -1]),
            ("t^4 - 10t^2 + 1", [1, 0, -10, 0, 1]),
        ],
    )
    def test_parse(self, text, coeffs):
        assert coeffs_low_first(parse_poly(text)) == coeffs

    @pytest.mark.parametrize("text", ["", "t^", "x^2+1", "t**2", "t^2++1"])
    def test_malformed(self, text):
        with pytest.raises(UsageError):
            parse_poly(text)

    def test_zero_rejected(self):
        with pytest.raises(UsageError, match="zero polynomial"):
            parse_poly("t - t")

    def test_format_round_trip(self):
        for text in ["t^4-22", "-t^3+2t", "2t^2+t-1"]:
            assert format_poly(parse_poly(text)) == text


def test_gcd_is_monic():
    f = poly_from_coeffs([-2, 0, 2])  # 2t^2 - 2
    g = poly_from_coeffs([2, 2])  # 2t + 2
    assert coeffs_low_first(poly_gcd(f, g)) == [1, 1]


def test_resultant_and_discriminant():
    f = parse_poly("t^2+1")
    g = parse_poly("t-2")
    assert poly_resultant(f, g) == 5
    assert poly_discriminant(parse_poly("t^2-2")) == 8
