"""
exact.py — Exact arithmetic substrate.

Integer matrices with Smith normal form and Diophantine solving, plus thin
wrappers around sympy polynomials (coefficients listed lowest degree first,
the way the rest of the package stores P(t)).

The Smith form elimination pivots on the entry of least absolute value in the
active block; plain left-to-right elimination blows up on the rank-2n divisor
matrices.
"""

from __future__ import annotations

import re
from typing import Optional, Sequence

from sympy import QQ, Matrix, Poly, Rational, Symbol, integer_nthroot
from sympy.ntheory.factor_ import core

from .errors import UsageError

T = Symbol("t")

IntMatrix = list[list[int]]


# ---------------------------------------------------------------------------
# Integer matrices
# ---------------------------------------------------------------------------


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def zeros(rows: int, cols: int) -> IntMatrix:
    return [[0] * cols for _ in range(rows)]


def mat_mul(A: IntMatrix, B: IntMatrix) -> IntMatrix:
    if not A:
        return []
    inner = len(B)
    if len(A[0]) != inner:
        raise UsageError(f"shape mismatch: {len(A)}x{len(A[0])} times {inner}x?")
    cols = len(B[0]) if B else 0
    out = zeros(len(A), cols)
    for i, row in enumerate(A):
        acc = out[i]
        for k, a in enumerate(row):
            if a:
                bk = B[k]
                for j in range(cols):
                    acc[j] += a * bk[j]
    return out


def mat_vec(A: IntMatrix, v: Sequence[int]) -> list[int]:
    return [sum(a * x for a, x in zip(row, v)) for row in A]


def transpose(A: IntMatrix, cols: Optional[int] = None) -> IntMatrix:
    if not A:
        return [[] for _ in range(cols or 0)]
    return [list(col) for col in zip(*A)]


def determinant(A: IntMatrix) -> int:
    return int(Matrix(A).det()) if A else 1


def unimodular_inverse(U: IntMatrix) -> IntMatrix:
    """Inverse of a unimodular integer matrix (exact)."""
    inv = Matrix(U).inv()
    return [[int(inv[i, j]) for j in range(inv.cols)] for i in range(inv.rows)]


def smith_normal_form(M: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """
    Return (S, U, V) with U·M·V = S, S diagonal with d1 | d2 | ... >= 0 and
    U, V unimodular. Nonzero diagonal entries come first.
    """
    rows = len(M)
    cols = len(M[0]) if rows else 0
    A = [list(map(int, r)) for r in M]
    U = identity(rows)
    V = identity(cols)

    def swap_rows(i: int, j: int) -> None:
        if i != j:
            A[i], A[j] = A[j], A[i]
            U[i], U[j] = U[j], U[i]

    def swap_cols(i: int, j: int) -> None:
        if i != j:
            for row in A:
                row[i], row[j] = row[j], row[i]
            for row in V:
                row[i], row[j] = row[j], row[i]

    def add_row(dst: int, src: int, q: int) -> None:
        a_src, a_dst = A[src], A[dst]
        for j in range(cols):
            a_dst[j] += q * a_src[j]
        u_src, u_dst = U[src], U[dst]
        for j in range(rows):
            u_dst[j] += q * u_src[j]

    def add_col(dst: int, src: int, q: int) -> None:
        for row in A:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]

    for k in range(min(rows, cols)):
        while True:
            best = None
            for i in range(k, rows):
                for j in range(k, cols):
                    a = A[i][j]
                    if a and (best is None or abs(a) < best[0]):
                        best = (abs(a), i, j)
                        if best[0] == 1:
                            break
                if best is not None and best[0] == 1:
                    break
            if best is None:
                return A, U, V
            _, i, j = best
            swap_rows(k, i)
            swap_cols(k, j)
            pivot = A[k][k]
            clean = True
            for i in range(k + 1, rows):
                q = A[i][k] // pivot
                if q:
                    add_row(i, k, -q)
                if A[i][k]:
                    clean = False
            for j in range(k + 1, cols):
                q = A[k][j] // pivot
                if q:
                    add_col(j, k, -q)
                if A[k][j]:
                    clean = False
            if not clean:
                continue
            if abs(pivot) == 1:
                break
            bad = next(
                (i for i in range(k + 1, rows) for j in range(k + 1, cols) if A[i][j] % pivot),
                None,
            )
            if bad is None:
                break
            add_row(k, bad, 1)
        if A[k][k] < 0:
            A[k] = [-a for a in A[k]]
            U[k] = [-u for u in U[k]]
    return A, U, V


def invariant_factors(M: IntMatrix) -> list[int]:
    """Nonzero diagonal of the Smith form."""
    S, _, _ = smith_normal_form(M)
    return [S[i][i] for i in range(min(len(S), len(S[0]) if S else 0)) if S[i][i]]


class LinearSolver:
    """Repeated solves of A·x = b over Z sharing one Smith form of A."""

    def __init__(self, A: IntMatrix, cols: Optional[int] = None) -> None:
        rows = len(A)
        if rows:
            width = len(A[0])
            if any(len(r) != width for r in A):
                raise UsageError("ragged matrix")
            if cols is not None and cols != width:
                raise UsageError(f"declared {cols} columns, matrix has {width}")
            cols = width
        elif cols is None:
            raise UsageError("column count required for an empty matrix")
        self.rows = rows
        self.cols = cols
        if rows:
            self._S, self._U, self._V = smith_normal_form(A)
        else:
            self._S, self._U, self._V = [], [], identity(cols)
        self.rank = sum(1 for i in range(min(rows, cols)) if self._S[i][i])

    @property
    def kernel(self) -> list[list[int]]:
        """Basis of ker A."""
        V = self._V
        return [[V[r][j] for r in range(self.cols)] for j in range(self.rank, self.cols)]

    def solve(self, b: Sequence[int]) -> Optional[list[int]]:
        if len(b) != self.rows:
            raise UsageError(
                f"right-hand side has length {len(b)}, matrix has {self.rows} rows"
            )
        c = mat_vec(self._U, b)
        y = [0] * self.cols
        for i in range(self.rank):
            q, rem = divmod(c[i], self._S[i][i])
            if rem:
                return None
            y[i] = q
        if any(c[i] for i in range(self.rank, self.rows)):
            return None
        return mat_vec(self._V, y)


def solve_linear_over_Z(
    A: IntMatrix, b: Sequence[int], cols: Optional[int] = None
) -> Optional[tuple[list[int], list[list[int]]]]:
    """
    Solve A·x = b over Z.

    Returns (x, kernel_basis) or None when no integral solution exists.
    `cols` is only needed when A has no rows.
    """
    if len(b) != len(A):
        raise UsageError(f"right-hand side has length {len(b)}, matrix has {len(A)} rows")
    solver = LinearSolver(A, cols)
    x = solver.solve(b)
    if x is None:
        return None
    return x, solver.kernel


def kernel_basis(A: IntMatrix, cols: Optional[int] = None) -> list[list[int]]:
    return LinearSolver(A, cols).kernel


# ---------------------------------------------------------------------------
# Rationals
# ---------------------------------------------------------------------------


def to_rational(value) -> Rational:
    try:
        return Rational(value)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"not a rational number: {value!r}") from exc


def is_rational_square(q) -> bool:
    q = Rational(q)
    if q < 0:
        return False
    _, exact_n = integer_nthroot(int(q.p), 2)
    _, exact_d = integer_nthroot(int(q.q), 2)
    return exact_n and exact_d


def square_class(q) -> int:
    """Squarefree integer representing q modulo rational squares."""
    q = Rational(q)
    if q == 0:
        raise UsageError("zero has no square class")
    n = int(q.p) * int(q.q)
    sign = -1 if n < 0 else 1
    return sign * int(core(abs(n), 2))


# ---------------------------------------------------------------------------
# Polynomials (lowest degree first at the API boundary)
# ---------------------------------------------------------------------------


def poly_from_coeffs(coeffs: Sequence, domain=QQ) -> Poly:
    return Poly(list(reversed([Rational(c) for c in coeffs])) or [0], T, domain=domain)


def coeffs_low_first(f: Poly) -> list[Rational]:
    if f.is_zero:
        return []
    return [Rational(c) for c in reversed(f.all_coeffs())]


_TERM = re.compile(r"^(\d+)?\*?(t(?:\^(\d+))?)?$")


def parse_poly(text: str) -> Poly:
    """
    Parse an integer-coefficient polynomial in t, e.g. "t^4-22" or "2t^2 + t - 1".
    """
    s = text.replace(" ", "")
    if not s:
        raise UsageError("empty polynomial")
    if s[0] not in "+-":
        s = "+" + s
    terms = re.findall(r"[+-][^+-]+", s)
    if "".join(terms) != s:
        raise UsageError(f"malformed polynomial: {text!r}")
    degrees: dict[int, int] = {}
    for term in terms:
        sign = -1 if term[0] == "-" else 1
        m = _TERM.match(term[1:])
        if m is None or (m.group(1) is None and m.group(2) is None):
            raise UsageError(f"malformed term {term!r} in {text!r}")
        coeff = int(m.group(1)) if m.group(1) is not None else 1
        if m.group(2) is None:
            deg = 0
        else:
            deg = int(m.group(3)) if m.group(3) is not None else 1
        degrees[deg] = degrees.get(deg, 0) + sign * coeff
    top = max(degrees)
    coeffs = [degrees.get(k, 0) for k in range(top + 1)]
    f = poly_from_coeffs(coeffs)
    if f.is_zero:
        raise UsageError(f"zero polynomial: {text!r}")
    return f


def format_poly(f: Poly) -> str:
    parts = []
    for deg, c in reversed(list(enumerate(coeffs_low_first(f)))):
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if deg == 0:
            body = str(mag)
        else:
            mono = "t" if deg == 1 else f"t^{deg}"
            body = mono if mag == 1 else f"{mag}{mono}"
        parts.append((sign, body))
    if not parts:
        return "0"
    head_sign, head = parts[0]
    out = ("-" if head_sign == "-" else "") + head
    for sign, body in parts[1:]:
        out += f"{sign}{body}"
    return out


def poly_divmod(f: Poly, g: Poly) -> tuple[Poly, Poly]:
    if g.is_zero:
        raise UsageError("division by the zero polynomial")
    return f.div(g)


def poly_gcd(f: Poly, g: Poly) -> Poly:
    """Monic gcd (the zero polynomial when both inputs are zero)."""
    h = f.gcd(g)
    return h.monic() if not h.is_zero else h


def poly_resultant(f: Poly, g: Poly) -> Rational:
    return Rational(f.resultant(g))


def poly_eval(f: Poly, x) -> Rational:
    return Rational(f.eval(Rational(x)))


def poly_discriminant(f: Poly) -> Rational:
    return Rational(f.discriminant())
