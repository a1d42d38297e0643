"""
padic.py — p-adic local fields with capped precision.

Everything the local invariant pipeline needs at one place p:

  ResidueField     F_q = F_p[x]/(f) with f primitive, roots and square roots
  UnramifiedRing   W = Z_p[ζ]/(f̃) modulo p^N with its Frobenius
  LocalField       the completion K_w: (e, f), structure and a uniformizer
  LocalTower       A = W[π]/(E) with E Eisenstein, and the automorphisms
                   a, b, c realising Gal(A/Q_p)
  PadicElt         π^v·u with u a unit known to a tracked relative precision

plus effective Hilbert 90, norm equations in totally ramified cyclic
extensions, Hensel lifting of n-th roots and the local point search.
Precision is counted in p-adic digits N; a result whose difference from its
expected value is not at least N − 2·guard digits deep aborts with
PrecisionError.
"""

from __future__ import annotations

import itertools
import logging
import random
import threading
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Optional, Sequence

from sympy import (
    Poly,
    Rational,
    factorint,
    igcd,
    ilcm,
    isprime,
    legendre_symbol,
    multiplicity,
    n_order,
    symbols,
)
from sympy.polys.domains import GF, QQ, ZZ
from sympy.polys.galoistools import (
    gf_factor,
    gf_gcdex,
    gf_irreducible_p,
    gf_mul,
    gf_pow_mod,
    gf_rem,
    gf_strip,
)
from sympy.polys.matrices import DomainMatrix

from .errors import (
    BoundaryPointError,
    CocycleConditionError,
    Hilbert90Error,
    NormEquationError,
    PrecisionError,
    UnsupportedFamilyError,
    UsageError,
)
from .models import LocalPoint, SurfaceSpec
from .numfield import NFElt, SplittingField, splitting_field_for

logger = logging.getLogger("chatelet_brauer.padic")


def _vp(x: Any, p: int) -> int:
    """v_p of a nonzero integer or rational."""
    q = Rational(x)
    return multiplicity(p, abs(int(q.p))) - multiplicity(p, int(q.q))


# ---------------------------------------------------------------------------
# Precision context
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PadicCtx:
    """A prime with the working precision N and guard digits."""

    p: int
    N: int = 24
    guard: int = 6

    def __post_init__(self) -> None:
        if not isprime(self.p):
            raise UsageError(f"p = {self.p} is not prime")
        if self.guard < 1 or 2 * self.guard > self.N:
            raise UsageError(f"guard must be between 1 and N/2, got {self.guard} for N={self.N}")

    @property
    def modulus(self) -> int:
        return self.p**self.N

    @classmethod
    def from_config(cls, p: int, config: Any) -> "PadicCtx":
        return cls(p, config.precision, config.guard)


# ---------------------------------------------------------------------------
# Residue fields
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def primitive_polynomial(p: int, D: int) -> tuple[int, ...]:
    """First monic primitive polynomial of degree D over F_p in lexicographic order (high-first)."""
    order = p**D - 1
    primes = list(factorint(order))
    for tail in itertools.product(range(p), repeat=D):
        f = [1] + list(tail)
        if f[-1] == 0 and D > 1:
            continue
        if not gf_irreducible_p(f, p, ZZ):
            continue
        if all(gf_pow_mod([1, 0], order // r, f, p, ZZ) != [1] for r in primes):
            return tuple(f)
    raise UsageError(f"no primitive polynomial of degree {D} over F_{p}")


class ResidueField:
    """F_q as F_p[x]/(f); elements are low-first tuples of D residues."""

    def __init__(self, p: int, D: int) -> None:
        self.p, self.D = p, D
        self.q = p**D
        self.modulus = list(primitive_polynomial(p, D))
        self._nonresidue: Optional[tuple[int, ...]] = None

    def _to(self, x: Sequence[int]) -> list[int]:
        return gf_strip([c % self.p for c in reversed(x)])

    def _from(self, f: Sequence[int]) -> tuple[int, ...]:
        low = [int(c) % self.p for c in reversed(f)]
        return tuple(low + [0] * (self.D - len(low)))

    @property
    def one(self) -> tuple[int, ...]:
        return (1,) + (0,) * (self.D - 1)

    @property
    def zero(self) -> tuple[int, ...]:
        return (0,) * self.D

    @property
    def generator(self) -> tuple[int, ...]:
        """The class of x, a generator of F_q^×."""
        return self._from(gf_rem([1, 0], self.modulus, self.p, ZZ))

    def element(self, k: int) -> tuple[int, ...]:
        """The element whose base-p digits are the coordinates of k."""
        out = []
        for _ in range(self.D):
            k, r = divmod(k, self.p)
            out.append(r)
        return tuple(out)

    def is_zero(self, x: Sequence[int]) -> bool:
        return not any(c % self.p for c in x)

    def neg(self, x: Sequence[int]) -> tuple[int, ...]:
        return tuple(-c % self.p for c in x)

    def mul(self, x: Sequence[int], y: Sequence[int]) -> tuple[int, ...]:
        prod = gf_mul(self._to(x), self._to(y), self.p, ZZ)
        return self._from(gf_rem(prod, self.modulus, self.p, ZZ))

    def pow(self, x: Sequence[int], k: int) -> tuple[int, ...]:
        if k < 0:
            x, k = self.inv(x), -k
        return self._from(gf_pow_mod(self._to(x), k, self.modulus, self.p, ZZ))

    def inv(self, x: Sequence[int]) -> tuple[int, ...]:
        if self.is_zero(x):
            raise ZeroDivisionError("inverse of zero in a residue field")
        s, _, h = gf_gcdex(self._to(x), self.modulus, self.p, ZZ)
        if h != [1]:
            raise UsageError("residue field modulus is not irreducible")
        return self._from(s)

    def is_square(self, x: Sequence[int]) -> bool:
        if self.p == 2 or self.is_zero(x):
            return True
        return self.pow(x, (self.q - 1) // 2) == self.one

    def nonresidue(self) -> tuple[int, ...]:
        if self._nonresidue is None:
            k = 2
            while self.is_square(self.element(k)):
                k += 1
            self._nonresidue = self.element(k)
        return self._nonresidue

    def sqrt(self, a: Sequence[int]) -> Optional[tuple[int, ...]]:
        """A square root of a, or None (Tonelli–Shanks)."""
        a = tuple(c % self.p for c in a)
        if self.is_zero(a):
            return self.zero
        if self.p == 2:
            return self.pow(a, self.q // 2)
        if not self.is_square(a):
            return None
        s = multiplicity(2, self.q - 1)
        t = (self.q - 1) >> s
        c = self.pow(self.nonresidue(), t)
        x = self.pow(a, (t + 1) // 2)
        b = self.pow(a, t)
        r = s
        while b != self.one:
            i, b2 = 0, b
            while b2 != self.one:
                b2 = self.mul(b2, b2)
                i += 1
            g = self.pow(c, 2 ** (r - i - 1))
            x = self.mul(x, g)
            c = self.mul(g, g)
            b = self.mul(b, c)
            r = i
        return x

    def nth_root(self, a: Sequence[int], n: int) -> Optional[tuple[int, ...]]:
        """
        Some ω with ω^n = a, or None when a is not an n-th power.

        F_q^× = ⟨x⟩ splits into the part of order M1 built from primes dividing n,
        where a discrete logarithm is found by enumeration, and a complement of
        order M2 on which n is invertible.
        """
        a = tuple(c % self.p for c in a)
        if self.is_zero(a):
            return self.zero
        M = self.q - 1
        M1 = 1
        for ell in factorint(n):
            while M % (M1 * ell) == 0:
                M1 *= ell
        M2 = M // M1
        if M1 > 10**6:
            raise NormEquationError(f"{n}-th roots in F_{self.q}: torsion part too large")
        a2 = self.pow(a, M1 * pow(M1, -1, M2)) if M2 > 1 else self.one
        x2 = self.pow(a2, pow(n, -1, M2)) if M2 > 1 else self.one
        if M1 == 1:
            return x2
        a1 = self.pow(a, M2 * pow(M2, -1, M1))
        z = self.pow(self.generator, M2)
        j, cur = 0, self.one
        while cur != a1:
            cur = self.mul(cur, z)
            j += 1
            if j >= M1:
                return None
        g = igcd(n, M1)
        if j % g:
            return None
        k = (j // g) * pow(n // g, -1, M1 // g) % (M1 // g) if M1 // g > 1 else 0
        root = self.mul(self.pow(z, k), x2)
        return root if self.pow(root, n) == a else None


# ---------------------------------------------------------------------------
# Unramified extensions
# ---------------------------------------------------------------------------

WElt = tuple  # D integers modulo p^N


class UnramifiedRing:
    """
    W = Z_p[ζ]/(f̃) modulo p^N, f̃ the integer lift of a primitive polynomial
    of degree D. Frobenius is the automorphism with φ(ζ) ≡ ζ^p, found by
    Newton iteration on f̃.
    """

    def __init__(self, ctx: PadicCtx, D: int) -> None:
        if D < 1:
            raise UsageError(f"degree of the unramified extension must be >= 1, got {D}")
        self.ctx = ctx
        self.p, self.N, self.D = ctx.p, ctx.N, D
        self.mod = ctx.modulus
        self.residue = ResidueField(ctx.p, D)
        low = list(reversed(self.residue.modulus))
        self.f = [c % self.mod for c in low[:D]]
        self._steps = self.N.bit_length() + 2
        self._tables: dict[int, list[WElt]] = {}
        self.frobenius_zeta = self._frobenius_zeta()

    # -- constructors --------------------------------------------------------

    @property
    def zero(self) -> WElt:
        return (0,) * self.D

    @property
    def one(self) -> WElt:
        return (1,) + (0,) * (self.D - 1)

    @property
    def zeta(self) -> WElt:
        if self.D == 1:
            return (-self.f[0] % self.mod,)
        return (0, 1) + (0,) * (self.D - 2)

    def scalar(self, n: int) -> WElt:
        return (n % self.mod,) + (0,) * (self.D - 1)

    def lift(self, r: Sequence[int]) -> WElt:
        """The residue tuple r read as an element of W."""
        if self.D == 1:
            return (r[0] % self.mod,)
        return tuple(c % self.mod for c in r)

    def reduce(self, x: WElt) -> tuple[int, ...]:
        if self.D == 1:
            return (x[0] % self.p,)
        return tuple(c % self.p for c in x)

    # -- arithmetic ----------------------------------------------------------

    def add(self, x: WElt, y: WElt) -> WElt:
        return tuple((a + b) % self.mod for a, b in zip(x, y))

    def sub(self, x: WElt, y: WElt) -> WElt:
        return tuple((a - b) % self.mod for a, b in zip(x, y))

    def neg(self, x: WElt) -> WElt:
        return tuple(-a % self.mod for a in x)

    def smul(self, n: int, x: WElt) -> WElt:
        return tuple(n * a % self.mod for a in x)

    def mul(self, x: WElt, y: WElt) -> WElt:
        D, mod = self.D, self.mod
        if D == 1:
            return (x[0] * y[0] % mod,)
        prod = [0] * (2 * D - 1)
        for i, a in enumerate(x):
            if a:
                for j, b in enumerate(y):
                    if b:
                        prod[i + j] += a * b
        f = self.f
        for k in range(2 * D - 2, D - 1, -1):
            c = prod[k] % mod
            if c:
                base = k - D
                for j in range(D):
                    prod[base + j] -= c * f[j]
        return tuple(v % mod for v in prod[:D])

    def pow(self, x: WElt, k: int) -> WElt:
        if k < 0:
            x, k = self.inv(x), -k
        out, base = self.one, x
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def val(self, x: WElt) -> int:
        """v_p(x), capped at N."""
        best = self.N
        for c in x:
            c %= self.mod
            if c:
                best = min(best, multiplicity(self.p, c))
        return best

    def is_unit(self, x: WElt) -> bool:
        return not self.residue.is_zero(self.reduce(x))

    def inv(self, x: WElt) -> WElt:
        r = self.reduce(x)
        if self.residue.is_zero(r):
            raise PrecisionError("inverse of a non-unit in the unramified ring")
        y = self.lift(self.residue.inv(r))
        two = self.scalar(2)
        for _ in range(self._steps):
            y = self.mul(y, self.sub(two, self.mul(x, y)))
        return y

    def evaluate(self, poly_low: Sequence[int], x: WElt) -> WElt:
        acc = self.zero
        for c in reversed(poly_low):
            acc = self.add(self.mul(acc, x), self.scalar(c))
        return acc

    def hensel_root(self, poly_low: Sequence[int], r: Sequence[int]) -> WElt:
        """Newton lift of a simple residue root r of an integer polynomial."""
        deriv = [k * c for k, c in enumerate(poly_low)][1:]
        y = self.lift(r)
        for _ in range(self._steps):
            y = self.sub(y, self.mul(self.evaluate(poly_low, y), self.inv(self.evaluate(deriv, y))))
        if self.val(self.evaluate(poly_low, y)) < self.N:
            raise PrecisionError("Hensel lift did not converge; the residue root is not simple")
        return y

    def teichmuller(self, r: Sequence[int]) -> WElt:
        """The (q − 1)-th root of unity with residue r."""
        x = self.lift(r)
        q = self.p**self.D
        for _ in range(self.N):
            x = self.pow(x, q)
        return x

    # -- Frobenius -----------------------------------------------------------

    def _frobenius_zeta(self) -> WElt:
        if self.D == 1:
            return self.zeta
        poly = self.f + [1]
        deriv = [k * c for k, c in enumerate(poly)][1:]
        y = self.pow(self.zeta, self.p)
        for _ in range(self._steps):
            y = self.sub(y, self.mul(self.evaluate(poly, y), self.inv(self.evaluate(deriv, y))))
        if self.val(self.evaluate(poly, y)) < self.N:
            raise PrecisionError("Frobenius lift did not converge")
        return y

    def _table(self, k: int) -> list[WElt]:
        table = self._tables.get(k)
        if table is None:
            z = self.frobenius_zeta
            if k > 1:
                base = self._table(1)
                for _ in range(k - 1):
                    z = self._apply(z, base)
            table = [self.one]
            for _ in range(1, self.D):
                table.append(self.mul(table[-1], z))
            self._tables[k] = table
        return table

    def _apply(self, x: WElt, table: list[WElt]) -> WElt:
        acc = [0] * self.D
        for c, img in zip(x, table):
            if c:
                for j, v in enumerate(img):
                    acc[j] += c * v
        return tuple(v % self.mod for v in acc)

    def frob(self, x: WElt, k: int = 1) -> WElt:
        """φ^k(x)."""
        k %= self.D
        if k == 0 or self.D == 1:
            return x
        return self._apply(x, self._table(k))


def _mod_int(q: Any, p: int, mod: int) -> int:
    """A p-integral rational as an integer modulo mod."""
    q = Rational(q)
    den = int(q.q)
    if den % p == 0:
        raise PrecisionError(f"{q} is not {p}-integral")
    return int(q.p) * pow(den, -1, mod) % mod


# ---------------------------------------------------------------------------
# Completions of the splitting field
# ---------------------------------------------------------------------------


@dataclass
class LocalField:
    """The completion K_w of the splitting field at the place above p."""

    p: int
    e: int
    f: int
    structure: str  # "direct_product" | "semidirect" | "unramified" | "cyclic"
    sf: Optional[SplittingField] = None
    eisenstein: list = field(default_factory=list)  # low-first, monic, Z_(p) coefficients
    pi_global: Optional[NFElt] = None
    basis_inverse: Optional[DomainMatrix] = None

    @property
    def degree(self) -> int:
        return self.e * self.f

    def __str__(self) -> str:
        lines = [
            f"=== Completion at p={self.p} ===",
            f"  e = {self.e}, f = {self.f}",
            f"  structure: {self.structure}",
        ]
        if self.eisenstein:
            E = Poly([Rational(c) for c in reversed(self.eisenstein)], symbols("t"))
            lines.append(f"  Eisenstein polynomial: {E.as_expr()}")
        if self.pi_global is not None:
            lines.append(f"  uniformizer: {self.pi_global}")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# Totally ramified towers
# ---------------------------------------------------------------------------

Vec = list  # e W-elements on 1, π, …, π^(e−1)


class LocalTower:
    """
    A = W[π]/(E): the completion K_w composed with the unramified extension
    of degree D = W.D, together with automorphisms a, b, c.

    `embed` is the embedding ι_e: K → A for the chosen group element e,
    i.e. the base embedding precomposed with σ_e.
    """

    def __init__(self, lf: LocalField, W: UnramifiedRing, embedding: int = 0) -> None:
        self.lf, self.W, self.ctx = lf, W, W.ctx
        self.p, self.e, self.d = lf.p, lf.e, W.D
        self.N, self.guard = W.N, W.ctx.guard
        self.cap = self.e * self.N
        self.check_digits = self.e * (self.N - 2 * self.guard)
        self.embedding = embedding
        mod = W.mod
        self.E = [_mod_int(lf.eisenstein[j], self.p, mod) for j in range(self.e)]
        u0_inv = pow(_mod_int(Rational(lf.eisenstein[0]) / self.p, self.p, mod), -1, mod)
        top = self.E[1:] + [1]
        self.Q = [-c * u0_inv % mod for c in top]
        # η = π^e/p and ε = p/π^e
        self._eta = [
            W.neg(W.scalar(_mod_int(Rational(c) / self.p, self.p, mod)))
            for c in lf.eisenstein[: self.e]
        ]
        self._eps_pows: dict[int, Vec] = {}
        self._steps = self.cap.bit_length() + 1
        self.auts: dict[str, TowerAut] = {}
        self.unit_root: Optional[WElt] = None
        self.levels: dict[tuple, list] = {}
        self.lock = threading.Lock()
        self.pi = PadicElt(self, 1, self._vone(), self.cap)

    def __repr__(self) -> str:
        return f"LocalTower(p={self.p}, e={self.e}, D={self.d}, N={self.N}, {self.lf.structure})"

    # -- raw vectors ---------------------------------------------------------

    def _vzero(self) -> Vec:
        return [self.W.zero] * self.e

    def _vone(self) -> Vec:
        return [self.W.one] + [self.W.zero] * (self.e - 1)

    def _vadd(self, x: Vec, y: Vec) -> Vec:
        return [self.W.add(a, b) for a, b in zip(x, y)]

    def _vwmul(self, c: WElt, x: Vec) -> Vec:
        return [self.W.mul(c, a) for a in x]

    def _vmul_pi(self, x: Vec) -> Vec:
        W = self.W
        top = x[-1]
        out = [W.zero] + list(x[:-1])
        if any(top):
            for j, Ej in enumerate(self.E):
                if Ej:
                    out[j] = W.sub(out[j], W.smul(Ej, top))
        return out

    def _vshift(self, x: Vec, j: int) -> Vec:
        for _ in range(j):
            x = self._vmul_pi(x)
        return x

    def _vdiv_pi(self, x: Vec) -> Vec:
        """x/π for x ≡ 0 mod π."""
        W, p = self.W, self.p
        c0 = tuple(v // p for v in x[0])
        out = list(x[1:]) + [W.zero]
        return [W.add(a, W.smul(q, c0)) for a, q in zip(out, self.Q)]

    def _vmul(self, x: Vec, y: Vec) -> Vec:
        W, e = self.W, self.e
        prod = [W.zero] * (2 * e - 1)
        for i, a in enumerate(x):
            if any(a):
                for j, b in enumerate(y):
                    if any(b):
                        prod[i + j] = W.add(prod[i + j], W.mul(a, b))
        for k in range(2 * e - 2, e - 1, -1):
            c = prod[k]
            if any(c):
                for j, Ej in enumerate(self.E):
                    if Ej:
                        prod[k - e + j] = W.sub(prod[k - e + j], W.smul(Ej, c))
        return prod[:e]

    def _vval(self, x: Vec) -> int:
        return min(self.e * self.W.val(c) + i for i, c in enumerate(x))

    def _vinv(self, u: Vec) -> Vec:
        W = self.W
        two = W.scalar(2)
        y = [W.inv(u[0])] + [W.zero] * (self.e - 1)
        for _ in range(self._steps):
            t = self._vmul(u, y)
            t = [W.sub(two, c) if i == 0 else W.neg(c) for i, c in enumerate(t)]
            y = self._vmul(y, t)
        return y

    def _eps_pow(self, s: int) -> Vec:
        """(p/π^e)^s as a unit vector."""
        out = self._eps_pows.get(s)
        if out is None:
            if s == 0:
                out = self._vone()
            elif s == 1:
                out = self._vinv(self._eta)
            elif s < 0:
                out = self._vmul(self._eps_pow(s + 1), self._eta)
            else:
                out = self._vmul(self._eps_pow(s - 1), self._eps_pow(1))
            self._eps_pows[s] = out
        return out

    def normalize(self, vec: Vec, v0: int, abs_prec: int) -> "PadicElt":
        """The element π^v0·vec known modulo π^abs_prec."""
        room = abs_prec - v0
        k = self._vval(vec)
        if k >= room:
            return self.zero_at(abs_prec)
        s = min(self.W.val(c) for c in vec)
        if s:
            ps = self.p**s
            vec = [tuple(v // ps for v in c) for c in vec]
            vec = self._vmul(vec, self._eps_pow(s))
        for _ in range(k - self.e * s):
            vec = self._vdiv_pi(vec)
        return PadicElt(self, v0 + k, vec, min(room - k, self.cap))

    # -- elements ------------------------------------------------------------

    def zero_at(self, abs_prec: int) -> "PadicElt":
        return PadicElt(self, abs_prec, None, 0)

    def one(self) -> "PadicElt":
        return PadicElt(self, 0, self._vone(), self.cap)

    def scalar(self, q: Any) -> "PadicElt":
        q = Rational(q)
        if q == 0:
            return self.zero_at(self.cap)
        s = _vp(q, self.p)
        unit = _mod_int(q / Rational(self.p) ** s, self.p, self.W.mod)
        vec = self._vwmul(self.W.scalar(unit), self._eps_pow(s))
        return PadicElt(self, self.e * s, vec, self.cap)

    def from_w(self, x: WElt) -> "PadicElt":
        return self.normalize([x] + [self.W.zero] * (self.e - 1), 0, self.cap)

    def from_coords(self, coords: Sequence[Any]) -> "PadicElt":
        """Σ coords[k]·π^k with rational coordinates."""
        s = max((-_vp(c, self.p) for c in coords if c), default=0)
        s = max(s, 0)
        scale = Rational(self.p) ** s
        vec = [self.W.scalar(_mod_int(Rational(c) * scale, self.p, self.W.mod)) for c in coords]
        x = self.normalize(vec, 0, self.cap)
        return x * Rational(1, self.p**s) if s else x

    def random_unit(self, rng: random.Random) -> "PadicElt":
        W = self.W
        vec = [tuple(rng.randrange(self.p) for _ in range(W.D)) for _ in range(self.e)]
        if all(c == 0 for c in vec[0]):
            vec[0] = (1,) + vec[0][1:]
        return PadicElt(self, 0, vec, self.cap)

    def residue(self, x: "PadicElt") -> tuple[int, ...]:
        if x.u is None or x.v != 0:
            raise PrecisionError("residue of a non-unit")
        return self.W.reduce(x.u[0])

    def close(self, x: "PadicElt", y: "PadicElt", digits: Optional[int] = None) -> bool:
        """x ≡ y to `digits` π-adic digits relative to their size."""
        digits = self.check_digits if digits is None else digits
        if x.u is None and y.u is None:
            return True
        ref = y if y.u is not None else x
        diff = x - y
        if diff.u is None and diff.v - ref.v < digits:
            raise PrecisionError(
                f"comparison needs {digits} digits, only {diff.v - ref.v} are known in {self!r}"
            )
        return diff.v - ref.v >= digits

    def norm(self, sigma: "TowerAut", order: int, x: "PadicElt") -> "PadicElt":
        """x·σ(x)·…·σ^(order−1)(x)."""
        out, y = x, x
        for _ in range(order - 1):
            y = sigma(y)
            out = out * y
        return out

    def trace(self, sigma: "TowerAut", order: int, x: "PadicElt") -> "PadicElt":
        out, y = x, x
        for _ in range(order - 1):
            y = sigma(y)
            out = out + y
        return out

    # -- the embedding of K --------------------------------------------------

    def _base_embed(self, y: NFElt) -> "PadicElt":
        lf = self.lf
        coords = [QQ.to_sympy(c) for c in y.c]
        if lf.structure == "direct_product":
            col = DomainMatrix([[QQ(c.p, c.q)] for c in coords], (len(coords), 1), QQ)
            basis = (lf.basis_inverse * col).to_Matrix()
            return self.from_coords(list(basis))
        K = lf.sf.K
        s = max(max((-_vp(c, self.p) for c in coords if c), default=0), 0)
        scale = Rational(self.p) ** s
        W = self.W
        vec = self._vzero()
        for exps, c in zip(K.monomials, coords):
            if c:
                coeff = W.smul(_mod_int(c * scale, self.p, W.mod), W.pow(self.unit_root, exps[0]))
                vec[exps[1]] = W.add(vec[exps[1]], coeff)
        x = self.normalize(vec, 0, self.cap)
        return x * Rational(1, self.p**s) if s else x

    def embed(self, y: NFElt) -> "PadicElt":
        """ι_e(y) = base embedding of σ_e(y)."""
        if self.embedding:
            y = self.lf.sf.auts[self.embedding](y)
        return self._base_embed(y)

    def embed_sqrt_a(self) -> "PadicElt":
        return self.embed(self.lf.sf.sqrt_a)


# ---------------------------------------------------------------------------
# Elements
# ---------------------------------------------------------------------------


class PadicElt:
    """π^v·u in a LocalTower; u is a unit known to `rel` π-adic digits, None for zero."""

    __slots__ = ("T", "v", "u", "rel")

    def __init__(self, T: LocalTower, v: int, u: Optional[Vec], rel: int) -> None:
        self.T, self.v, self.u, self.rel = T, v, u, rel

    def __repr__(self) -> str:
        if self.u is None:
            return f"O(π^{self.v})"
        return f"π^{self.v}·unit(residue={self.T.W.reduce(self.u[0])}, rel={self.rel})"

    def is_zero(self) -> bool:
        return self.u is None

    @property
    def precision(self) -> int:
        """Absolute π-adic precision."""
        return self.v if self.u is None else self.v + self.rel

    @property
    def valuation(self) -> Rational:
        """Valuation normalised by v(p) = 1."""
        if self.u is None:
            raise PrecisionError("valuation of an element indistinguishable from zero")
        return Rational(self.v, self.T.e)

    def _lift(self, other: Any) -> Any:
        if isinstance(other, PadicElt):
            if other.T is not self.T:
                raise UsageError("elements of different local towers")
            return other
        if isinstance(other, (int, Rational)):
            return self.T.scalar(other)
        return NotImplemented

    def __add__(self, other: Any) -> "PadicElt":
        y = self._lift(other)
        if y is NotImplemented:
            return y
        T = self.T
        abs_prec = min(self.precision, y.precision)
        terms = [t for t in (self, y) if t.u is not None and t.v < abs_prec]
        if not terms:
            return T.zero_at(abs_prec)
        if len(terms) == 1 and terms[0].precision == abs_prec:
            return terms[0]
        v0 = min(t.v for t in terms)
        vec = T._vzero()
        for t in terms:
            vec = T._vadd(vec, T._vshift(t.u, t.v - v0))
        return T.normalize(vec, v0, abs_prec)

    __radd__ = __add__

    def __neg__(self) -> "PadicElt":
        if self.u is None:
            return self
        return PadicElt(self.T, self.v, [self.T.W.neg(c) for c in self.u], self.rel)

    def __sub__(self, other: Any) -> "PadicElt":
        y = self._lift(other)
        if y is NotImplemented:
            return y
        return self + (-y)

    def __rsub__(self, other: Any) -> "PadicElt":
        return (-self) + other

    def __mul__(self, other: Any) -> "PadicElt":
        y = self._lift(other)
        if y is NotImplemented:
            return y
        if self.u is None or y.u is None:
            return self.T.zero_at(self.v + y.v)
        return PadicElt(self.T, self.v + y.v, self.T._vmul(self.u, y.u), min(self.rel, y.rel))

    __rmul__ = __mul__

    def inverse(self) -> "PadicElt":
        if self.u is None:
            raise PrecisionError("division by an element indistinguishable from zero")
        return PadicElt(self.T, -self.v, self.T._vinv(self.u), self.rel)

    def __truediv__(self, other: Any) -> "PadicElt":
        y = self._lift(other)
        if y is NotImplemented:
            return y
        return self * y.inverse()

    def __rtruediv__(self, other: Any) -> "PadicElt":
        return self.inverse() * other

    def __pow__(self, k: int) -> "PadicElt":
        if k < 0:
            return self.inverse() ** (-k)
        out, base = self.T.one(), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out


# ---------------------------------------------------------------------------
# Automorphisms
# ---------------------------------------------------------------------------


class TowerAut:
    """The automorphism acting as φ^k on W and sending π to pi_image."""

    def __init__(self, T: LocalTower, name: str, k: int, pi_image: PadicElt) -> None:
        self.T, self.name = T, name
        self.k = k % T.d
        self.pi_image = pi_image
        self._ratio = pi_image / T.pi
        if self._ratio.u is None or self._ratio.v != 0:
            raise PrecisionError(f"{name}: image of π is not a uniformizer")
        self._pows = [T._vshift((self._ratio**i).u, i) for i in range(T.e)]
        self._ratio_pows: dict[int, PadicElt] = {0: T.one()}

    def __repr__(self) -> str:
        return f"TowerAut({self.name}, φ^{self.k})"

    def _ratio_power(self, v: int) -> PadicElt:
        r = self._ratio_pows.get(v)
        if r is None:
            r = self._ratio**v
            self._ratio_pows[v] = r
        return r

    def __call__(self, x: PadicElt) -> PadicElt:
        if x.u is None:
            return x
        T, W = self.T, self.T.W
        img = T._vzero()
        for c, pw in zip(x.u, self._pows):
            if any(c):
                img = T._vadd(img, T._vwmul(W.frob(c, self.k), pw))
        if x.v:
            img = T._vmul(img, self._ratio_power(x.v).u)
        return PadicElt(T, x.v, img, min(x.rel, self._ratio.rel))

    def compose(self, other: "TowerAut") -> "TowerAut":
        """self ∘ other."""
        return TowerAut(self.T, self.name + other.name, self.k + other.k, self(other.pi_image))

    def power(self, j: int) -> "TowerAut":
        out = TowerAut(self.T, "1", 0, self.T.pi)
        for _ in range(j):
            out = self.compose(out)
        out.name = f"{self.name}^{j}"
        return out

    def matches(self, other: "TowerAut") -> bool:
        return self.k == other.k and self.T.close(self.pi_image, other.pi_image)

    def is_identity(self) -> bool:
        return self.k == 0 and self.T.close(self.pi_image, self.T.pi)


# ---------------------------------------------------------------------------
# Hilbert 90
# ---------------------------------------------------------------------------


def hilbert90(
    T: LocalTower,
    sigma: TowerAut,
    order: int,
    lam: PadicElt,
    rng: Optional[random.Random] = None,
    base: Optional[Callable[[PadicElt], PadicElt]] = None,
    attempts: int = 64,
) -> PadicElt:
    """
    u with σ(u)/u = λ for λ of norm 1 in the cyclic group ⟨σ⟩ of `order`.

    Uses the Poincaré series S = Σ_j (∏_{l<j} σ^l(λ))·σ^j(θ), which satisfies
    σ(S) = λ⁻¹·S; θ runs through 1 and then seeded random units, passed through
    `base` when the answer must lie in a subfield. A θ is accepted when S loses
    no more than guard digits.
    """
    if not T.close(T.norm(sigma, order, lam), T.one()):
        raise CocycleConditionError(f"{sigma.name}: λ does not have norm 1")
    if T.close(lam, T.one()):
        return T.one()
    rng = rng or random.Random(0)
    prefix = [T.one()]
    y = lam
    for _ in range(order - 1):
        prefix.append(prefix[-1] * y)
        y = sigma(y)
    limit = T.e * T.guard
    for attempt in range(attempts):
        theta = T.one() if attempt == 0 else T.random_unit(rng)
        if base is not None:
            theta = base(theta)
        S, img = T.zero_at(T.cap), theta
        for coeff in prefix:
            S = S + coeff * img
            img = sigma(img)
        if S.u is not None and S.v <= limit:
            u = S.inverse()
            if not T.close(sigma(u) / u, lam):
                raise Hilbert90Error(f"{sigma.name}: σ(u)/u differs from λ beyond the guard")
            return u
        logger.warning(
            "Hilbert 90 for %s: base element %d degenerate, reseeding", sigma.name, attempt
        )
    raise Hilbert90Error(f"{sigma.name}: no usable base element in {attempts} attempts")


# ---------------------------------------------------------------------------
# Norm equations
# ---------------------------------------------------------------------------


@dataclass
class _Level:
    """Leading behaviour of N(1 + y·π_E^k) − 1 for y in the residue field."""

    k: int
    level: int
    columns: list  # residue coordinates for each basis element of F_q
    additive: bool


def _principal_root(T: LocalTower, rho: PadicElt, n: int) -> PadicElt:
    """The n-th root ≡ 1 of a principal unit, p ∤ n."""
    y = T.one()
    for _ in range(T._steps):
        y = y - (y**n - rho) / (n * y ** (n - 1))
    return y


def _residue_coords(T: LocalTower, x: PadicElt, level: int, pi_F: PadicElt, vF: int) -> list:
    """Residue coordinates of (x − 1)/π_F^level, zero when x − 1 is deeper."""
    diff = x - 1
    if diff.u is None or diff.v > level * vF:
        return [0] * T.d
    return list(T.residue(diff / pi_F**level))


def _level_of(T: LocalTower, diff: PadicElt, vF: int) -> int:
    if diff.v % vF:
        raise PrecisionError("norm defect does not lie in the fixed field")
    return diff.v // vF


def _level_entry(
    T: LocalTower, sigma: TowerAut, order: int, pi_E: PadicElt, pi_F: PadicElt, vF: int, k: int
) -> _Level:
    W = T.W
    pk = pi_E**k
    basis = [T.from_w(W.lift(tuple(int(i == j) for j in range(T.d)))) for i in range(T.d)]
    norms = [T.norm(sigma, order, 1 + b * pk) for b in basis]
    levels = [_level_of(T, x - 1, vF) for x in norms if (x - 1).u is not None]
    level = min(levels) if levels else T.cap
    columns = [_residue_coords(T, x, level, pi_F, vF) for x in norms]
    total = T.norm(sigma, order, 1 + sum(basis[1:], basis[0]) * pk)
    summed = [sum(col[j] for col in columns) % T.p for j in range(T.d)]
    additive = _residue_coords(T, total, level, pi_F, vF) == summed
    return _Level(k, level, columns, additive)


def _solve_mod_p(p: int, columns: list, rhs: list) -> Optional[list[int]]:
    """y over GF(p) with Σ y_j·columns[j] = rhs."""
    K = GF(p)
    rows = len(rhs)
    aug = [[K(col[i]) for col in columns] + [K(rhs[i])] for i in range(rows)]
    M = DomainMatrix(aug, (rows, len(columns) + 1), K)
    reduced, pivots = M.rref()
    if len(columns) in pivots:
        return None
    entries = reduced.to_list()
    y = [0] * len(columns)
    for r, col in enumerate(pivots):
        y[col] = int(entries[r][-1]) % p
    return y


def norm_solve(
    T: LocalTower,
    sigma: TowerAut,
    order: int,
    target: PadicElt,
    uniformizer: Optional[PadicElt] = None,
    label: str = "π",
) -> PadicElt:
    """
    x with N_σ(x) = target, where ⟨σ⟩ of `order` fixes W and the extension
    cut out by σ is totally ramified with uniformizer `uniformizer`.

    The valuation and residue are matched first; the remaining principal unit
    is an n-th power when p ∤ n, and otherwise is pushed up level by level
    using the leading terms of N(1 + y·π_E^k) and linear algebra over F_p.
    """
    if sigma.k:
        raise UsageError(f"norm_solve needs an automorphism fixing W, got {sigma}")
    if target.u is None:
        raise NormEquationError("norm equation with a target indistinguishable from zero")
    pi_E = uniformizer if uniformizer is not None else T.pi
    pi_F = T.norm(sigma, order, pi_E)
    vF = pi_F.v
    if target.v % vF:
        raise NormEquationError(f"valuation {target.valuation} is not a norm valuation")
    x = pi_E ** (target.v // vF)
    rho = target / pi_F ** (target.v // vF)

    omega = T.W.residue.nth_root(T.residue(rho), order)
    if omega is None:
        raise NormEquationError(f"residue of the target is not an {order}-th power")
    w = T.from_w(T.W.lift(omega))
    x = x * w
    rho = rho / w**order

    if order % T.p:
        x = x * _principal_root(T, rho, order)
    else:
        x = x * _wild_norm(T, sigma, order, rho, pi_E, pi_F, vF, label)

    if not T.close(T.norm(sigma, order, x), target):
        raise NormEquationError(f"{sigma.name}: norm of the solution misses the target")
    return x


def _wild_norm(
    T: LocalTower,
    sigma: TowerAut,
    order: int,
    rho: PadicElt,
    pi_E: PadicElt,
    pi_F: PadicElt,
    vF: int,
    label: str,
) -> PadicElt:
    key = (sigma.name, order, label, T.embedding)
    z_total = T.one()
    while True:
        diff = rho - 1
        if diff.u is None or diff.v >= T.check_digits:
            return z_total
        t = _level_of(T, diff, vF)
        with T.lock:
            table = T.levels.setdefault(key, [])
            while len(table) < order * t:
                k = len(table) + 1
                table.append(_level_entry(T, sigma, order, pi_E, pi_F, vF, k))
        usable = [entry for entry in table[: order * t] if entry.level == t and entry.additive]
        rhs = _residue_coords(T, rho, t, pi_F, vF)
        columns = [col for entry in usable for col in entry.columns]
        y = _solve_mod_p(T.p, columns, rhs) if columns else None
        if y is None:
            raise NormEquationError(f"{sigma.name}: cannot clear the norm defect at level {t}")
        z = T.one()
        for idx, entry in enumerate(usable):
            coords = tuple(y[idx * T.d : (idx + 1) * T.d])
            if any(coords):
                z = z * (1 + T.from_w(T.W.lift(coords)) * pi_E**entry.k)
        rho = rho / T.norm(sigma, order, z)
        z_total = z_total * z
        new = rho - 1
        if new.u is not None and new.v <= diff.v:
            raise NormEquationError(f"{sigma.name}: norm defect did not improve at level {t}")


# ---------------------------------------------------------------------------
# Hensel lifting and local points
# ---------------------------------------------------------------------------


def _eval_int(poly_low: Sequence[int], t: int) -> int:
    acc = 0
    for c in reversed(poly_low):
        acc = acc * t + c
    return acc


def hensel_roots(poly_low: Sequence[int], p: int, N: int) -> list[int]:
    """
    Roots in Z_p, modulo p^N, of an integer polynomial.

    Starting residues run modulo p (modulo 32 for p = 2) and are lifted when
    v(f(r)) > 2·v(f'(r)); roots that only separate deeper are not found.
    """
    deriv = [k * c for k, c in enumerate(poly_low)][1:]
    level = 5 if p == 2 else 1
    mod_N = p**N
    found: set[int] = set()
    for r in range(p**level):
        fr, dr = _eval_int(poly_low, r), _eval_int(deriv, r)
        if dr == 0:
            continue
        k = multiplicity(p, abs(dr))
        if k >= level or (fr != 0 and multiplicity(p, abs(fr)) <= 2 * k):
            continue
        M = p ** (N + 2 * k + 1)
        pk = p**k
        t = r
        for _ in range(N.bit_length() + 3):
            fv = _eval_int(poly_low, t)
            if fv % M == 0:
                break
            dv = _eval_int(deriv, t) // pk
            t = (t - (fv // pk) * pow(dv, -1, M)) % M
        if _eval_int(poly_low, t) % mod_N == 0:
            found.add(t % mod_N)
    return sorted(found)


def hensel_nth_roots(c: Any, n: int, p: int, N: int) -> list[int]:
    """All t in Z_p with t^n = c, as least residues modulo p^N."""
    c = Rational(c)
    if c == 0:
        return [0]
    v = _vp(c, p)
    if v < 0 or v % n:
        return []
    mod_N = p**N
    u = _mod_int(c / Rational(p) ** v, p, mod_N)
    roots = hensel_roots([-u] + [0] * (n - 1) + [1], p, N)
    scale = p ** (v // n)
    return sorted({r * scale % mod_N for r in roots})


def hensel_fourth_root(c: Any, p: int, N: int) -> Optional[int]:
    """The least residue of a fourth root of c in Z_p, or None."""
    roots = hensel_nth_roots(c, 4, p, N)
    return roots[0] if roots else None


def _root_order(t: int, p: int) -> tuple[int, int]:
    """Non-square roots first: t/p^v(t) off the squares (p odd) or ≡ 3 mod 4 (p = 2)."""
    u = t // p ** multiplicity(p, t) if t else 1
    if p == 2:
        return (0 if u % 4 == 3 else 1, t)
    return (0 if legendre_symbol(u % p, p) == -1 else 1, t)


def point_from_xy(
    spec: SurfaceSpec, p: int, x: int, y: int, ctx: PadicCtx, root_index: int = 0
) -> Optional[LocalPoint]:
    """
    The point (x, y, t) of c·P(t) = x² − a·y² with t in Z_p, or None.

    Roots are ordered with the non-square ones first, so root_index 0 picks
    the same branch at every point; t ↦ −t negates relative invariants.
    Raises BoundaryPointError when x² − a·y² vanishes to N − guard digits.
    """
    norm = Rational(x) ** 2 - spec.a * Rational(y) ** 2
    if norm == 0 or _vp(norm, p) >= ctx.N - ctx.guard:
        raise BoundaryPointError(f"({x}, {y}) lies on the boundary x² − a·y² = 0 at p={p}")
    coeffs = list(spec.coeffs)
    n = len(coeffs) - 1
    if all(co == 0 for co in coeffs[1:n]):
        value = (norm / spec.c - coeffs[0]) / coeffs[-1]
        roots = hensel_nth_roots(value, n, p, ctx.N)
    else:
        rational = [spec.c * co for co in coeffs]
        rational[0] -= norm
        den = ilcm(*[Rational(co).q for co in rational], 1)
        roots = hensel_roots([int(co * den) for co in rational], p, ctx.N)
    roots = sorted(roots, key=lambda r: _root_order(r, p))
    if root_index >= len(roots):
        return None
    return LocalPoint(p, x, y, roots[root_index], ctx.N, root_index)


def search_points(spec: SurfaceSpec, p: int, bound: int, ctx: PadicCtx) -> list[LocalPoint]:
    """Points with 0 ≤ x, y ≤ bound, (x, y) ≠ (0, 0), that have a t in Z_p."""
    points = []
    for x in range(bound + 1):
        for y in range(bound + 1):
            if x == 0 and y == 0:
                continue
            try:
                pt = point_from_xy(spec, p, x, y, ctx)
            except BoundaryPointError:
                logger.debug("Skipping boundary point (%d, %d) at p=%d", x, y, p)
                continue
            if pt is not None:
                points.append(pt)
    logger.info("Found %d local points at p=%d with bound %d", len(points), p, bound)
    return points


# ---------------------------------------------------------------------------
# Completions
# ---------------------------------------------------------------------------

_LOCAL_CACHE: dict[tuple, LocalField] = {}
_TOWER_CACHE: dict[tuple, LocalTower] = {}
_CACHE_LOCK = threading.Lock()


def newton_single_slope(f: Poly, p: int) -> Optional[int]:
    """
    v_p(f(0)) when the monic f of degree n has a single Newton slope v/n with
    gcd(v, n) = 1, so that f is irreducible over Q_p and totally ramified.
    """
    coeffs = [Rational(c) for c in reversed(f.monic().all_coeffs())]
    deg = len(coeffs) - 1
    if deg < 1 or coeffs[0] == 0:
        return None
    v0 = _vp(coeffs[0], p)
    if v0 <= 0:
        return None
    for k in range(1, deg):
        if coeffs[k] and _vp(coeffs[k], p) * deg < v0 * (deg - k):
            return None
    return v0 if igcd(v0, deg) == 1 else None


def _unramified_at(spec: SurfaceSpec, p: int) -> bool:
    if p == 2:
        return False
    if any(co and _vp(co, p) < 0 for co in spec.coeffs):
        return False
    if _vp(spec.leading, p) or _vp(spec.a, p):
        return False
    disc = Rational(spec.P.discriminant())
    return disc != 0 and _vp(disc, p) == 0


def _factor_degrees(coeffs_low: Sequence[Any], p: int) -> list[int]:
    f = gf_strip([_mod_int(c, p, p) for c in reversed(coeffs_low)])
    _, factors = gf_factor(f, p, ZZ)
    return [len(g) - 1 for g, _ in factors]


def _uniformizer_search(sf: SplittingField, p: int, max_terms: int = 4) -> Optional[tuple]:
    """A uniformizer of a totally ramified K_w from ±1 combinations of basis monomials."""
    K = sf.K
    deg = K.dim
    basis = [K._basis(b) for b in range(deg)]
    for terms in range(1, max_terms + 1):
        for idx in itertools.combinations(range(deg), terms):
            for signs in itertools.product((1, -1), repeat=terms - 1):
                x = basis[idx[0]]
                for s, i in zip(signs, idx[1:]):
                    x = x + s * basis[i]
                v = newton_single_slope(K.charpoly(x), p)
                if v is None:
                    continue
                k = pow(v, -1, deg) if deg > 1 else 1
                j = (k * v - 1) // deg
                pi = x**k / Rational(p) ** j
                E = [Rational(c) for c in reversed(K.charpoly(pi).all_coeffs())]
                return pi, E
    return None


def _basis_inverse(K: Any, pi: NFElt) -> DomainMatrix:
    powers = [K.one()]
    for _ in range(1, K.dim):
        powers.append(powers[-1] * pi)
    rows = [[powers[k].c[a] for k in range(K.dim)] for a in range(K.dim)]
    return DomainMatrix(rows, (K.dim, K.dim), QQ).inv()


def _complete(spec: SurfaceSpec, sf: SplittingField, p: int) -> LocalField:
    if _unramified_at(spec, p):
        degrees = _factor_degrees(spec.coeffs, p) + _factor_degrees([-spec.a, 0, 1], p)
        f = 1
        for deg in degrees:
            f = ilcm(f, deg)
        return LocalField(p, 1, f, "unramified", sf)
    if sf.family == "dihedral":
        n = sf.n
        m = -spec.coeffs[0] / spec.leading
        if _vp(m, p) == 1 and n % p:
            f = n_order(p, n)
            structure = "semidirect" if f == 2 and (p + 1) % n == 0 else "cyclic"
            eisenstein = [-m] + [Rational(0)] * (n - 1) + [Rational(1)]
            pi = sf.K.gen(sf.K.names[1])
            return LocalField(p, n, f, structure, sf, eisenstein, pi)
    found = _uniformizer_search(sf, p)
    if found is None:
        raise UnsupportedFamilyError(
            f"no local model for {sf.K.name} at p={p}: supported places are unramified, "
            "tamely ramified dihedral and totally ramified"
        )
    pi, E = found
    deg = sf.K.dim
    return LocalField(p, deg, 1, "direct_product", sf, E, pi, _basis_inverse(sf.K, pi))


def complete_at(spec: SurfaceSpec, p: int) -> LocalField:
    """The completion of the splitting field of spec at the place above p (memoized)."""
    if not isprime(p):
        raise UsageError(f"p = {p} is not prime")
    key = (spec.key, p)
    lf = _LOCAL_CACHE.get(key)
    if lf is None:
        sf = splitting_field_for(spec)
        lf = _complete(spec, sf, p)
        logger.info(
            "Completion of %s at p=%d: e=%d f=%d (%s)", sf.K.name, p, lf.e, lf.f, lf.structure
        )
        _LOCAL_CACHE[key] = lf
    return lf


def local_degree(spec: SurfaceSpec, p: int) -> tuple[int, int]:
    """(e, f) of the splitting field at p."""
    lf = complete_at(spec, p)
    return lf.e, lf.f


# ---------------------------------------------------------------------------
# Towers
# ---------------------------------------------------------------------------


def _int_minpoly(K: Any, k: int) -> list[int]:
    return [int(QQ.to_sympy(c)) for c in K.minpolys[k]]


def build_tower(lf: LocalField, d: int, ctx: PadicCtx, embedding: int = 0) -> LocalTower:
    """
    A = K_w·Q_{p^D}, D = lcm(d, f), with a, b, c matching g, h under ι_e.

    d = 0 picks e·f. Relators and compatibility with the global action are
    checked before the tower is returned.
    """
    if lf.structure not in ("direct_product", "semidirect"):
        raise UnsupportedFamilyError(
            f"no local tower for a {lf.structure} completion (e={lf.e}, f={lf.f}, d={d})"
        )
    sf = lf.sf
    G = sf.group
    if not 0 <= embedding < G.order:
        raise UsageError(f"embedding must name a group element 0..{G.order - 1}")
    D = ilcm(d or lf.e * lf.f, lf.f)
    W = UnramifiedRing(ctx, D)
    T = LocalTower(lf, W, embedding)
    g, h = G.gen("g"), G.gen("h")
    if lf.structure == "semidirect":
        R = W.residue
        zbar = R.pow(R.generator, (R.q - 1) // sf.n)
        T.unit_root = W.hensel_root(_int_minpoly(sf.K, 0), zbar)
    pi_pre = sf.auts[G.inv(embedding)](lf.pi_global)
    c = TowerAut(T, "c", 0, T.embed(sf.auts[g](pi_pre)))
    b_frob = 1 if lf.structure == "semidirect" else 0
    b = TowerAut(T, "b", b_frob, T.embed(sf.auts[h](pi_pre)))
    T.auts = {"b": b, "c": c}
    if lf.structure == "direct_product":
        T.auts["a"] = TowerAut(T, "a", 1, T.pi)
    _verify_tower(T, sf.n)
    T.auts["cb"] = c.compose(b)
    logger.info("Built %r with embedding %d", T, embedding)
    return T


def _verify_tower(T: LocalTower, n: int) -> None:
    b, c = T.auts["b"], T.auts["c"]
    if "a" in T.auts:
        a = T.auts["a"]
        relators = [
            ("a^D", a.power(T.d)),
            ("b^2", b.power(2)),
            ("c^n", c.power(n)),
            ("(cb)^2", c.compose(b).power(2)),
        ]
        commutes = [
            ("ab = ba", a.compose(b), b.compose(a)),
            ("ac = ca", a.compose(c), c.compose(a)),
        ]
    else:
        relators = [("b^D", b.power(T.d)), ("c^n", c.power(n))]
        commutes = [("bc = c^(n-1)b", b.compose(c), c.power(n - 1).compose(b))]
    for label, aut in relators:
        if not aut.is_identity():
            raise PrecisionError(f"relator {label} fails in {T!r}")
    for label, x, y in commutes:
        if not x.matches(y):
            raise PrecisionError(f"relation {label} fails in {T!r}")
    sf = T.lf.sf
    G = sf.group
    for name in sf.K.names:
        gen = sf.K.gen(name)
        for aut, elt in ((c, G.gen("g")), (b, G.gen("h"))):
            if not T.close(aut(T.embed(gen)), T.embed(sf.auts[elt](gen))):
                raise PrecisionError(f"{aut.name} does not match the global action on {name}")


def tower_for(spec: SurfaceSpec, p: int, d: int, ctx: PadicCtx, embedding: int = 0) -> LocalTower:
    """build_tower for the completion of spec at p, memoized per precision and embedding."""
    key = (spec.key, p, d, ctx.N, ctx.guard, embedding)
    with _CACHE_LOCK:
        T = _TOWER_CACHE.get(key)
        if T is None:
            T = build_tower(complete_at(spec, p), d, ctx, embedding)
            _TOWER_CACHE[key] = T
    return T


def clear_caches() -> None:
    _LOCAL_CACHE.clear()
    _TOWER_CACHE.clear()
    primitive_polynomial.cache_clear()


def unramified_ext(ctx: PadicCtx, d: int) -> UnramifiedRing:
    """The unramified extension of Q_p of degree d with its Frobenius."""
    return UnramifiedRing(ctx, d)
