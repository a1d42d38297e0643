"""
numfield.py — Global number fields for the explicit surface families.

A NumberField here is a tensor product Q[x_1]/(m_1) ⊗ ... ⊗ Q[x_k]/(m_k) of
monic rational minimal polynomials, certified to be a field by an irreducible
characteristic polynomial of a primitive element. Elements carry a dense
coefficient vector over QQ in the monomial basis (first generator varies fastest).

Automorphisms are determined by generator images and stored as rational
matrices. The splitting fields of the supported families expose their Galois
group as a GroupPresentation together with the action on the roots of P and
on ±√a.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Optional, Sequence, Union

from sympy import QQ, Basic, Matrix, Poly, Rational, ilcm, nextprime, sqrt
from sympy import roots as sympy_roots
from sympy.polys.matrices import DomainMatrix

from .errors import ReduciblePolynomialError, UnsupportedFamilyError, UsageError
from .exact import (
    T,
    coeffs_low_first,
    format_poly,
    is_rational_square,
    poly_from_coeffs,
    square_class,
)
from .gcoh import GroupPresentation

logger = logging.getLogger("chatelet_brauer.numfield")

Scalar = Union[int, Rational, Any]


def _q(x: Scalar):
    """Coerce to a QQ domain element."""
    if isinstance(x, Basic):
        return QQ.from_sympy(x)
    return QQ.convert(x)


# ---------------------------------------------------------------------------
# Fields and elements
# ---------------------------------------------------------------------------


class NumberField:
    """Tensor product of simple extensions of Q, each given by a monic minimal polynomial."""

    def __init__(self, gens: Sequence[tuple[str, Sequence[Scalar]]], name: str = "") -> None:
        if not gens:
            raise UsageError("a number field needs at least one generator")
        self.names = [g for g, _ in gens]
        self.minpolys = [[_q(c) for c in coeffs] for _, coeffs in gens]
        for label, m in zip(self.names, self.minpolys):
            if len(m) < 2 or m[-1] != QQ.one:
                raise UsageError(f"minimal polynomial of {label} must be monic of degree >= 1")
        self.degrees = [len(m) - 1 for m in self.minpolys]
        self.dim = 1
        for d in self.degrees:
            self.dim *= d
        self.name = name or "Q(" + ", ".join(self.names) + ")"
        self.monomials = [self._decode(idx) for idx in range(self.dim)]

    def __repr__(self) -> str:
        return f"NumberField({self.name}, degree {self.dim})"

    def _decode(self, idx: int) -> tuple[int, ...]:
        out = []
        for d in self.degrees:
            out.append(idx % d)
            idx //= d
        return tuple(out)

    @cached_property
    def _reductions(self) -> list[list[list]]:
        """red[k][s] = x_k^s reduced modulo m_k, for 0 <= s <= 2·deg - 2."""
        out = []
        for m, d in zip(self.minpolys, self.degrees):
            powers = []
            cur = [QQ.one] + [QQ.zero] * (d - 1)
            for _ in range(2 * d - 1):
                powers.append(cur)
                top = cur[-1]
                shifted = [QQ.zero] + cur[:-1]
                cur = [shifted[j] - top * m[j] for j in range(d)]
            out.append(powers)
        return out

    @cached_property
    def _structure(self) -> list[list[list[tuple[int, Any]]]]:
        red = self._reductions
        table = []
        for Ea in self.monomials:
            row = []
            for Eb in self.monomials:
                terms = [(0, QQ.one)]
                stride = 1
                for k, d in enumerate(self.degrees):
                    vec = red[k][Ea[k] + Eb[k]]
                    terms = [
                        (i + j * stride, c * v) for i, c in terms for j, v in enumerate(vec) if v
                    ]
                    stride *= d
                row.append(terms)
            table.append(row)
        return table

    # -- element constructors ----------------------------------------------

    def element(self, coeffs: Sequence[Scalar]) -> "NFElt":
        if len(coeffs) != self.dim:
            raise UsageError(f"expected {self.dim} coefficients, got {len(coeffs)}")
        return NFElt(self, tuple(_q(c) for c in coeffs))

    def scalar(self, q: Scalar) -> "NFElt":
        return NFElt(self, (_q(q),) + (QQ.zero,) * (self.dim - 1))

    def zero(self) -> "NFElt":
        return self.scalar(0)

    def one(self) -> "NFElt":
        return self.scalar(1)

    def gen(self, name: str) -> "NFElt":
        if name not in self.names:
            raise UsageError(f"{self.name} has no generator {name!r}")
        k = self.names.index(name)
        stride = 1
        for d in self.degrees[:k]:
            stride *= d
        coeffs = [QQ.zero] * self.dim
        coeffs[stride] = QQ.one
        return NFElt(self, tuple(coeffs))

    # -- arithmetic ----------------------------------------------------------

    def mul(self, x: "NFElt", y: "NFElt") -> "NFElt":
        out = [QQ.zero] * self.dim
        S = self._structure
        for a, ca in enumerate(x.c):
            if not ca:
                continue
            row = S[a]
            for b, cb in enumerate(y.c):
                if not cb:
                    continue
                cab = ca * cb
                for idx, v in row[b]:
                    out[idx] += cab * v
        return NFElt(self, tuple(out))

    def mult_matrix(self, x: "NFElt") -> DomainMatrix:
        cols = [self.mul(x, self._basis(b)).c for b in range(self.dim)]
        rows = [[cols[b][a] for b in range(self.dim)] for a in range(self.dim)]
        return DomainMatrix(rows, (self.dim, self.dim), QQ)

    def _basis(self, b: int) -> "NFElt":
        coeffs = [QQ.zero] * self.dim
        coeffs[b] = QQ.one
        return NFElt(self, tuple(coeffs))

    def inv(self, x: "NFElt") -> "NFElt":
        if x.is_zero():
            raise ZeroDivisionError("inverse of zero in a number field")
        A = self.mult_matrix(x).to_Matrix()
        e = Matrix([1] + [0] * (self.dim - 1))
        sol = A.LUsolve(e)
        return NFElt(self, tuple(_q(sol[i]) for i in range(self.dim)))

    def norm(self, x: "NFElt") -> Rational:
        """Absolute norm N_{K/Q}(x)."""
        return QQ.to_sympy(self.mult_matrix(x).det())

    def charpoly(self, x: "NFElt") -> Poly:
        coeffs = self.mult_matrix(x).charpoly()
        return Poly([QQ.to_sympy(c) for c in coeffs], T, domain=QQ)

    def evaluate_poly(self, f: Poly, x: "NFElt") -> "NFElt":
        acc = self.zero()
        for c in f.all_coeffs():
            acc = acc * x + self.scalar(Rational(c))
        return acc

    def minpoly(self, x: "NFElt") -> Poly:
        _, factors = self.charpoly(x).factor_list()
        for f, _ in factors:
            if self.evaluate_poly(f, x).is_zero():
                return f.monic()
        raise UsageError("characteristic polynomial has no factor vanishing at the element")

    def check_field(self) -> "NFElt":
        """Certify the algebra is a field; returns a primitive element."""
        k = len(self.names)
        for weights in itertools.product(range(1, 4), repeat=k):
            theta = self.zero()
            for w, label in zip(weights, self.names):
                theta = theta + w * self.gen(label)
            if self.charpoly(theta).is_irreducible:
                return theta
        raise UsageError(f"{self.name} is not a field (no irreducible primitive element found)")


class NFElt:
    """An element of a NumberField."""

    __slots__ = ("field", "c")

    def __init__(self, field: NumberField, coeffs: tuple) -> None:
        self.field = field
        self.c = coeffs

    def _coerce(self, other: Any) -> Optional["NFElt"]:
        if isinstance(other, NFElt):
            if other.field is not self.field:
                raise UsageError("elements of different number fields")
            return other
        if isinstance(other, (int, Rational)):
            return self.field.scalar(other)
        return None

    def __add__(self, other: Any) -> "NFElt":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return NFElt(self.field, tuple(a + b for a, b in zip(self.c, o.c)))

    __radd__ = __add__

    def __neg__(self) -> "NFElt":
        return NFElt(self.field, tuple(-a for a in self.c))

    def __sub__(self, other: Any) -> "NFElt":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: Any) -> "NFElt":
        return (-self) + other

    def __mul__(self, other: Any) -> "NFElt":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.field.mul(self, o)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> "NFElt":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * self.field.inv(o)

    def __rtruediv__(self, other: Any) -> "NFElt":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.field.inv(self)

    def __pow__(self, k: int) -> "NFElt":
        base = self if k >= 0 else self.field.inv(self)
        k = abs(k)
        out = self.field.one()
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other: Any) -> bool:
        try:
            o = self._coerce(other)
        except UsageError:
            return False
        if o is None:
            return NotImplemented
        return self.c == o.c

    def __hash__(self) -> int:
        return hash(self.c)

    def __repr__(self) -> str:
        terms = []
        for coeff, E in zip(self.c, self.field.monomials):
            if not coeff:
                continue
            mono = "*".join(
                name if e == 1 else f"{name}^{e}" for name, e in zip(self.field.names, E) if e
            )
            c = QQ.to_sympy(coeff)
            terms.append(f"{c}*{mono}" if mono else f"{c}")
        return " + ".join(terms) or "0"

    def is_zero(self) -> bool:
        return not any(self.c)

    def is_rational(self) -> bool:
        return not any(self.c[1:])

    def rational(self) -> Rational:
        if not self.is_rational():
            raise UsageError(f"{self!r} is not rational")
        return QQ.to_sympy(self.c[0])


# ---------------------------------------------------------------------------
# Automorphisms
# ---------------------------------------------------------------------------


class FieldAut:
    """A field automorphism given by the images of the generators."""

    def __init__(self, field: NumberField, images: dict[str, NFElt], name: str = "") -> None:
        self.field = field
        self.name = name
        self.images = {label: images[label] for label in field.names}
        for k, label in enumerate(field.names):
            m = Poly([QQ.to_sympy(c) for c in reversed(field.minpolys[k])], T, domain=QQ)
            if not field.evaluate_poly(m, self.images[label]).is_zero():
                raise UsageError(
                    f"{name or 'automorphism'}: image of {label} misses its minimal polynomial"
                )
        cols = []
        for E in field.monomials:
            img = field.one()
            for label, e in zip(field.names, E):
                if e:
                    img = img * self.images[label] ** e
            cols.append(img.c)
        self._cols = cols

    def __call__(self, x: NFElt) -> NFElt:
        out = [QQ.zero] * self.field.dim
        for b, cb in enumerate(x.c):
            if cb:
                col = self._cols[b]
                for a in range(self.field.dim):
                    if col[a]:
                        out[a] += cb * col[a]
        return NFElt(self.field, tuple(out))

    def compose(self, other: "FieldAut") -> "FieldAut":
        """self ∘ other."""
        return FieldAut(self.field, {k: self(v) for k, v in other.images.items()})

    def __eq__(self, other: Any) -> bool:
        return isinstance(other, FieldAut) and self._cols == other._cols

    def __hash__(self) -> int:
        return hash(tuple(self._cols))

    def is_identity(self) -> bool:
        return all(v == self.field.gen(k) for k, v in self.images.items())


def group_automorphisms(
    field: NumberField, group: GroupPresentation, gen_images: dict[str, dict[str, NFElt]]
) -> list[FieldAut]:
    """
    Extend generator images to one automorphism per group element.

    Raises UsageError when two words for the same element act differently,
    i.e. the images do not define a homomorphism.
    """
    gens = {label: FieldAut(field, gen_images[label], label) for label, _ in group.generators}
    auts: list[Optional[FieldAut]] = [None] * group.order
    auts[0] = FieldAut(field, {k: field.gen(k) for k in field.names}, "1")
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for label, s in group.generators:
                y = group.mul(x, s)
                candidate = auts[x].compose(gens[label])
                if auts[y] is None:
                    candidate.name = group.labels[y]
                    auts[y] = candidate
                    nxt.append(y)
                elif auts[y] != candidate:
                    raise UsageError(
                        f"{group.name}: generator images disagree at {group.labels[y]}"
                    )
        frontier = nxt
    return auts  # type: ignore[return-value]


# ---------------------------------------------------------------------------
# Splitting fields of the supported families
# ---------------------------------------------------------------------------


@dataclass
class SplittingField:
    """K = k_t(roots of P, √a) with its Galois group."""

    P: Poly
    a: Rational
    K: NumberField
    roots: list[NFElt]
    sqrt_a: NFElt
    group: GroupPresentation
    auts: list[FieldAut]
    family: str
    notes: list[str] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.roots)

    @property
    def leading(self) -> Rational:
        return Rational(self.P.LC())

    @cached_property
    def point_permutations(self) -> list[tuple[int, ...]]:
        """Action on roots 0..n-1, then +√a (n) and -√a (n+1)."""
        points = list(self.roots) + [self.sqrt_a, -self.sqrt_a]
        index = {p: i for i, p in enumerate(points)}
        perms = []
        for aut in self.auts:
            try:
                perms.append(tuple(index[aut(p)] for p in points))
            except KeyError as exc:
                raise UsageError(f"{aut.name} does not permute the roots of P") from exc
        return perms

    def negates_sqrt_a(self, sigma: int) -> bool:
        return self.point_permutations[sigma][self.n] == self.n + 1

    def root_stabilizer(self, j: int = 0) -> list[int]:
        return [s for s, p in enumerate(self.point_permutations) if p[j] == j]

    def ops(self) -> "FieldOps":
        return FieldOps(self)

    def relative_norm(self, subgroup: Sequence[int], x: NFElt) -> NFElt:
        out = self.K.one()
        for s in subgroup:
            out = out * self.auts[s](x)
        return out


@dataclass
class FieldOps:
    """Multiplicative action of the Galois group on K^×."""

    sf: SplittingField

    def act(self, sigma: int, x: NFElt) -> NFElt:
        return self.sf.auts[sigma](x)

    def op(self, x: NFElt, y: NFElt) -> NFElt:
        return x * y

    def inverse(self, x: NFElt) -> NFElt:
        return 1 / x

    def unit(self) -> NFElt:
        return self.sf.K.one()

    def equal(self, x: NFElt, y: NFElt) -> bool:
        return x == y


def _rational_sqrt(q: Rational) -> Rational:
    q = Rational(q)
    if not is_rational_square(q):
        raise UsageError(f"{q} is not a rational square")
    return Rational(sqrt(q))


def _match_sqrt_a(a: Rational, candidates: Sequence[tuple[NFElt, Rational]]) -> Optional[NFElt]:
    """√a as k·x for a candidate x with x² = q and a/q a rational square."""
    for x, q in candidates:
        if square_class(a) == square_class(q):
            return _rational_sqrt(Rational(a) / Rational(q)) * x
    return None


def _quadratic(P: Poly, a: Rational) -> SplittingField:
    A, B, C = (Rational(c) for c in P.all_coeffs())
    disc = B**2 - 4 * A * C
    d = square_class(disc)
    a0 = square_class(a)
    if d == a0:
        raise UnsupportedFamilyError("√a generates the residue field of P; the group is not D2")
    K = NumberField([("w", [-d, 0, 1]), ("s", [-a0, 0, 1])], f"Q(√{d}, √{a0})")
    w, s = K.gen("w"), K.gen("s")
    k = _rational_sqrt(disc / d)
    roots = [(-B + k * w) / (2 * A), (-B - k * w) / (2 * A)]
    group = GroupPresentation.dihedral(2)
    images = {"g": {"w": -w, "s": s}, "h": {"w": w, "s": -s}}
    auts = group_automorphisms(K, group, images)
    return SplittingField(P, a, K, roots, _rational_sqrt(a / a0) * s, group, auts, "quadratic")


def _binomial(P: Poly, a: Rational, n: int) -> SplittingField:
    m = -Rational(P.all_coeffs()[-1]) / Rational(P.LC())
    if n == 4:
        K = NumberField([("i", [1, 0, 1]), ("alpha", [-m, 0, 0, 0, 1])], f"Q(i, {m}^(1/4))")
        i, beta = K.gen("i"), K.gen("alpha")
        roots = [beta, -beta, i * beta, -i * beta]
        images = {"g": {"i": i, "alpha": i * beta}, "h": {"i": -i, "alpha": beta}}
        candidates = [(i, Rational(-1)), (beta**2, m), (i * beta**2, -m)]
    else:
        z_poly = [1, 1, 1] if n == 3 else [1, -1, 1]
        K = NumberField(
            [("z", z_poly), ("beta", [-m] + [0] * (n - 1) + [1])], f"Q(ζ{n}, {m}^(1/{n}))"
        )
        z, beta = K.gen("z"), K.gen("beta")
        roots = [z**j * beta for j in range(n)]
        z_inv = 1 - z if n == 6 else -1 - z
        images = {"g": {"z": z, "beta": z * beta}, "h": {"z": z_inv, "beta": beta}}
        sqrt_m3 = 2 * z + 1 if n == 3 else 2 * z - 1
        candidates = [(sqrt_m3, Rational(-3))]
        if n == 6:
            candidates += [(beta**3, m), (sqrt_m3 * beta**3, -3 * m)]
    try:
        K.check_field()
    except UsageError as exc:
        # P is irreducible here, so the splitting field is smaller than 2n and not dihedral.
        raise UnsupportedFamilyError(
            f"{format_poly(P)} has a splitting field of degree below {2 * n}; "
            f"Q(ζ{n}) meets Q(({m})^(1/{n})), so the dihedral model does not apply"
        ) from exc
    sqrt_a = _match_sqrt_a(a, candidates)
    if sqrt_a is None:
        raise UnsupportedFamilyError(f"√{a} does not lie in the splitting field of t^{n} - {m}")
    group = GroupPresentation.dihedral(n)
    auts = group_automorphisms(K, group, images)
    return SplittingField(P, a, K, roots, sqrt_a, group, auts, "dihedral")


def _biquadratic(P: Poly, a: Rational) -> SplittingField:
    """P = lc·(t^4 + A t^2 + B^2), roots ±√p ± √q with p - q = B and p + q = -A/2."""
    coeffs = coeffs_low_first(P.monic())
    A, B = coeffs[2], _rational_sqrt(coeffs[0])
    p = (-A / 2 + B) / 2
    q = (-A / 2 - B) / 2
    p0, q0 = square_class(p), square_class(q)
    K = NumberField([("u", [-p0, 0, 1]), ("v", [-q0, 0, 1])], f"Q(√{p0}, √{q0})")
    try:
        K.check_field()
    except UsageError as exc:
        raise ReduciblePolynomialError(f"{format_poly(P)} is reducible") from exc
    sp = _rational_sqrt(p / p0) * K.gen("u")
    sq = _rational_sqrt(q / q0) * K.gen("v")
    roots = [sp + sq, sp - sq, -sp + sq, -sp - sq]
    group = GroupPresentation.from_permutations(
        "V4", [("u", (2, 3, 0, 1)), ("v", (1, 0, 3, 2))], relators=("u^2", "v^2", "uvuv")
    )
    u, v = K.gen("u"), K.gen("v")
    images = {"u": {"u": -u, "v": v}, "v": {"u": u, "v": -v}}
    sqrt_a = _match_sqrt_a(a, [(u, Rational(p0)), (v, Rational(q0)), (u * v, Rational(p0 * q0))])
    if sqrt_a is None:
        raise UnsupportedFamilyError(f"√{a} does not lie in Q(√{p0}, √{q0})")
    auts = group_automorphisms(K, group, images)
    return SplittingField(P, a, K, roots, sqrt_a, group, auts, "biquadratic")


def _cyclotomic5(P: Poly, a: Rational) -> SplittingField:
    K = NumberField([("z", [1, 1, 1, 1, 1])], "Q(ζ5)")
    z = K.gen("z")
    roots = [z**j for j in range(1, 5)]
    sqrt_a = _match_sqrt_a(a, [(2 * (z + z**4) + 1, Rational(5))])
    if sqrt_a is None:
        raise UnsupportedFamilyError(f"√{a} does not lie in Q(ζ5)")
    group = GroupPresentation.cyclic(4)
    auts = group_automorphisms(K, group, {"g": {"z": z**2}})
    return SplittingField(P, a, K, roots, sqrt_a, group, auts, "cyclotomic5")


def family_of(P: Poly) -> str:
    """Name of the explicit family P belongs to, or "" when none applies."""
    n = P.degree()
    coeffs = coeffs_low_first(P.monic())
    if n == 2:
        return "quadratic"
    # t^4 + B^2 is biquadratic (V4), not dihedral
    if n == 4 and coeffs[1] == 0 and coeffs[3] == 0 and is_rational_square(coeffs[0]):
        return "biquadratic"
    if n in (3, 4, 6) and all(c == 0 for c in coeffs[1:n]):
        return "dihedral"
    if coeffs == [1, 1, 1, 1, 1]:
        return "cyclotomic5"
    return ""


def build_splitting_field(P: Poly, a) -> SplittingField:
    """
    Construct K with its Galois group for the supported families:

      quadratic      any irreducible quadratic, K = Q(√disc, √a)
      dihedral       c·t^n + d for n = 3, 4, 6, K = Q(ζ_n, m^(1/n))
      biquadratic    t^4 + A t^2 + B^2 with Galois group V4
      cyclotomic5    a multiple of t^4 + t^3 + t^2 + t + 1, K = Q(ζ5)

    Raises ReduciblePolynomialError for reducible input and
    UnsupportedFamilyError when P is outside these families or √a ∉ K.
    """
    a = Rational(a)
    if is_rational_square(a):
        raise UsageError(f"a = {a} is a square; L = k")
    if not P.is_irreducible:
        raise ReduciblePolynomialError(f"{format_poly(P)} is reducible over Q")
    family = family_of(P)
    logger.debug("Building splitting field: P=%s a=%s family=%s", P.as_expr(), a, family or "-")
    if family == "quadratic":
        sf = _quadratic(P, a)
    elif family == "dihedral":
        sf = _binomial(P, a, P.degree())
    elif family == "biquadratic":
        sf = _biquadratic(P, a)
    elif family == "cyclotomic5":
        sf = _cyclotomic5(P, a)
    else:
        raise UnsupportedFamilyError(
            f"no explicit splitting field for {format_poly(P)}; use the quartic classification"
        )
    Pm = P.monic()
    for e in sf.roots:
        if not sf.K.evaluate_poly(Pm, e).is_zero():
            raise UsageError(f"internal: {e!r} is not a root of {P.as_expr()}")
    if sf.sqrt_a * sf.sqrt_a != a:
        raise UsageError("internal: √a does not square to a")
    _ = sf.point_permutations
    logger.info(
        "Splitting field %s, group %s of order %d", sf.K.name, sf.group.name, sf.group.order
    )
    return sf


# ---------------------------------------------------------------------------
# Quartic classification
# ---------------------------------------------------------------------------

BRAUER_TYPE = {1: "0", 2: "Z/2", 4: "Z/4"}


@dataclass
class QuarticCase:
    """Galois type of an irreducible quartic P together with the position of L = Q(√a)."""

    label: str
    galois_group: str
    brauer_order: int
    verified: bool
    discriminant: Rational
    resolvent: Poly
    subfields: dict[str, int] = field(default_factory=dict)

    @property
    def brauer_type(self) -> str:
        return BRAUER_TYPE[self.brauer_order]

    def __str__(self) -> str:
        lines = [
            "=== Quartic Galois case ===",
            f"  Galois group : {self.galois_group}",
            f"  Case         : {self.label}",
            f"  Br X / Br k  : {self.brauer_type}" + ("" if self.verified else "  (unverified)"),
            f"  disc(P)      : {self.discriminant}",
        ]
        for name, cls in self.subfields.items():
            lines.append(f"  Q(√{cls})  {name}")
        return "\n".join(lines)


def _splits_over(delta: Rational, D: Rational) -> bool:
    """x^2 with discriminant delta splits over Q(√D)."""
    return delta == 0 or is_rational_square(delta) or is_rational_square(delta * D)


def quartic_galois_case(P: Poly, a) -> QuarticCase:
    """
    Classify an irreducible quartic by its cubic resolvent and locate L = Q(√a).

    With L inside the splitting field the Brauer quotient is Z/4 for D4 with
    Gal(K/L) cyclic, Z/2 for V4 and for D4 with L outside k_t, and 0 otherwise.
    With L outside the splitting field (always the case for A4) the value is
    Z/2 for abelian groups and 0 otherwise, reported as unverified.
    """
    a = Rational(a)
    if P.degree() != 4:
        raise UsageError(f"quartic classification needs degree 4, got {P.degree()}")
    if not P.is_irreducible:
        raise ReduciblePolynomialError(f"{format_poly(P)} is reducible over Q")
    _, a1, a2, a3, a4 = (Rational(c) for c in P.monic().all_coeffs())
    R = Poly(T**3 - a2 * T**2 + (a1 * a3 - 4 * a4) * T - (a1**2 * a4 - 4 * a2 * a4 + a3**2), T)
    D = Rational(P.monic().discriminant())
    rational_roots = sorted(sympy_roots(R, filter="Q"))

    def delta(r: Rational) -> Rational:
        d = r**2 - 4 * a4
        return d if d != 0 else a1**2 - 4 * (a2 - r)

    if not rational_roots:
        group = "A4" if is_rational_square(D) else "S4"
        subfields = {} if group == "A4" else {"sqrt(disc)": square_class(D)}
    elif len(rational_roots) == 3:
        group = "V4"
        subfields = {f"theta={r}": square_class(delta(r)) for r in rational_roots}
    else:
        r = rational_roots[0]
        cyclic = _splits_over(r**2 - 4 * a4, D) and _splits_over(a1**2 - 4 * (a2 - r), D)
        if cyclic:
            group = "C4"
            subfields = {"sqrt(disc)": square_class(D)}
        else:
            group = "D4"
            da = delta(r)
            subfields = {
                "in k_t": square_class(da),
                "V4 quotient": square_class(D),
                "Z4 quotient": square_class(D * da),
            }

    sa = square_class(a)
    if sa not in subfields.values():
        abelian = group in ("C4", "V4")
        label = "A4" if group == "A4" else "L_not_in_K"
        order, verified = (2 if abelian else 1), False
    elif group == "D4":
        key = next(k for k, v in subfields.items() if v == sa)
        label, order = {
            "in k_t": ("D4_L_in_kt", 1),
            "V4 quotient": ("D4_L_notin_kt_V4quot", 2),
            "Z4 quotient": ("D4_Z4quot", 4),
        }[key]
        verified = True
    else:
        label = {"C4": "Z4", "V4": "V4", "S4": "S4"}[group]
        order, verified = (2 if group == "V4" else 1), True
    logger.info("Quartic %s with a=%s: %s (%s), Br = %s", P.as_expr(), a, group, label,
                BRAUER_TYPE[order])
    return QuarticCase(label, group, order, verified, D, R, subfields)


# Permutations of the roots 0..3 followed by +√a (4) and -√a (5).
_FIX, _SWAP = (4, 5), (5, 4)
_CASE_GENERATORS: dict[str, list[tuple[str, tuple[int, ...]]]] = {
    "Z4": [("g", (1, 2, 3, 0) + _SWAP)],
    "V4": [("u", (1, 0, 3, 2) + _FIX), ("v", (2, 3, 0, 1) + _SWAP)],
    "D4_L_in_kt": [("g", (1, 2, 3, 0) + _SWAP), ("h", (0, 3, 2, 1) + _FIX)],
    "D4_L_notin_kt_V4quot": [("g", (1, 2, 3, 0) + _SWAP), ("h", (0, 3, 2, 1) + _SWAP)],
    "D4_Z4quot": [("g", (1, 2, 3, 0) + _FIX), ("h", (0, 3, 2, 1) + _SWAP)],
    "S4": [("g", (1, 2, 3, 0) + _SWAP), ("h", (1, 0, 2, 3) + _SWAP)],
}
_GROUP_GENERATORS: dict[str, list[tuple[str, tuple[int, ...]]]] = {
    "C4": [("g", (1, 2, 3, 0) + _FIX)],
    "V4": [("u", (1, 0, 3, 2) + _FIX), ("v", (2, 3, 0, 1) + _FIX)],
    "D4": [("g", (1, 2, 3, 0) + _FIX), ("h", (0, 3, 2, 1) + _FIX)],
    "A4": [("g", (1, 2, 0, 3) + _FIX), ("u", (1, 0, 3, 2) + _FIX)],
    "S4": [("g", (1, 2, 3, 0) + _FIX), ("h", (1, 0, 2, 3) + _FIX)],
}


def quartic_case_model(case: QuarticCase) -> GroupPresentation:
    """
    Abstract Galois group of the compositum K·L acting on the roots and ±√a.

    When L lies outside K the group is Gal(K/k) × C2, the extra factor
    negating √a and fixing the roots.
    """
    name, gens = _case_generators(case)
    return GroupPresentation.from_permutations(name, gens)


def _case_generators(case: QuarticCase) -> tuple[str, list[tuple[str, tuple[int, ...]]]]:
    if case.label in _CASE_GENERATORS:
        return case.galois_group, _CASE_GENERATORS[case.label]
    gens = _GROUP_GENERATORS[case.galois_group] + [("s", (0, 1, 2, 3) + _SWAP)]
    return f"{case.galois_group}xC2", gens


def quartic_case_permutations(case: QuarticCase) -> tuple[GroupPresentation, list[tuple]]:
    """The case model together with each element's permutation of the roots and ±√a."""
    name, gens = _case_generators(case)
    group = GroupPresentation.from_permutations(name, gens)
    return group, group_permutations(group, dict(gens))


_FIELD_CACHE: dict[tuple, SplittingField] = {}


def splitting_field_for(spec: Any) -> SplittingField:
    """build_splitting_field(spec.P, spec.a), memoized on spec.key."""
    key = spec.key
    if key not in _FIELD_CACHE:
        _FIELD_CACHE[key] = build_splitting_field(spec.P, spec.a)
    return _FIELD_CACHE[key]


def clear_caches() -> None:
    _FIELD_CACHE.clear()


def group_permutations(group: GroupPresentation, gens: dict[str, Sequence[int]]) -> list[tuple]:
    """Permutation of each element, composing (στ)(x) = σ(τ(x)) along the table."""
    degree = len(next(iter(gens.values())))
    perms: list[Optional[tuple]] = [None] * group.order
    perms[0] = tuple(range(degree))
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for label, s in group.generators:
                y = group.mul(x, s)
                if perms[y] is None:
                    px, ps = perms[x], gens[label]
                    perms[y] = tuple(px[ps[k]] for k in range(degree))
                    nxt.append(y)
        frontier = nxt
    return perms  # type: ignore[return-value]


def dihedral_root_model(n: int) -> tuple[GroupPresentation, list[tuple[int, ...]]]:
    """
    D_n acting on n roots and ±√a with g: e_j -> e_(j+1) fixing √a and
    h: e_j -> e_(-j) negating it. Used when the group is declared rather than
    computed (for instance P = t^n - m over the real subfield of Q(ζ_n)).
    """
    G = GroupPresentation.dihedral(n)
    perms = []
    for x in range(G.order):
        i, j = x % n, x // n
        on_roots = tuple((i + (-1) ** j * k) % n for k in range(n))
        perms.append(on_roots + ((n + 1, n) if j else (n, n + 1)))
    return G, perms


def relative_norm(subgroup: Sequence[FieldAut], x: NFElt) -> NFElt:
    """∏ σ(x) over a subgroup of automorphisms."""
    out = x.field.one()
    for sigma in subgroup:
        out = out * sigma(x)
    return out


# Cycle types of Frobenius (partitions of 4) that each transitive quartic group contains.
_CYCLE_TYPES = {
    "C4": {(1, 1, 1, 1), (2, 2), (4,)},
    "V4": {(1, 1, 1, 1), (2, 2)},
    "D4": {(1, 1, 1, 1), (2, 2), (1, 1, 2), (4,)},
    "A4": {(1, 1, 1, 1), (2, 2), (1, 3)},
    "S4": {(1, 1, 1, 1), (2, 2), (1, 1, 2), (4,), (1, 3)},
}


def factorization_patterns(P: Poly, count: int = 30) -> dict[int, tuple[int, ...]]:
    """Degrees of the irreducible factors of P modulo the first `count` good primes."""
    coeffs = coeffs_low_first(P)
    den = ilcm(*[int(c.q) for c in coeffs]) if len(coeffs) > 1 else int(coeffs[0].q)
    integral = poly_from_coeffs([c * den for c in coeffs])
    bad = abs(int(integral.LC()) * int(Rational(integral.discriminant())))
    out: dict[int, tuple[int, ...]] = {}
    p = 2
    while len(out) < count:
        if bad % p:
            Pp = Poly(integral.as_expr(), T, modulus=p)
            _, factors = Pp.factor_list()
            out[p] = tuple(sorted(f.degree() for f, _ in factors))
        p = nextprime(p)
    return out


def patterns_consistent(case: QuarticCase, P: Poly, count: int = 30) -> bool:
    """Every Frobenius cycle type seen modulo small primes occurs in the classified group."""
    allowed = _CYCLE_TYPES[case.galois_group]
    seen = set(factorization_patterns(P, count).values())
    logger.debug("Frobenius cycle types for %s: %s", P.as_expr(), sorted(seen))
    return seen <= allowed
