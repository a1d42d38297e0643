"""
gcoh.py — Finite-group cohomology over integer lattices and unit groups.

Groups are finite presentations with a full multiplication table. Modules are
free Z-lattices with the action of each generator given by an integer matrix
whose k-th row is the image of the k-th basis vector.

Two cochain complexes are available:

  * the efficient complex of the dihedral group D_n = <g, h | g^n = h^2 = ghgh = 1>
    with free ranks 1, 2, 3, 4 (and a computed fifth term for degree 3),
  * the normalized standard (bar) complex for any small group, used as an oracle.

Cohomology classes are extracted with Smith normal form. Degree 1 and degree 2
cocycles move between the two complexes through explicit chain maps; degree 2
also has a multiplicative version for cocycles valued in field units.
"""

from __future__ import annotations

import itertools
import logging
import re
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd
from typing import Any, Callable, Optional, Protocol, Sequence

from .errors import CocycleConditionError, UsageError
from .exact import (
    IntMatrix,
    LinearSolver,
    identity,
    mat_mul,
    mat_vec,
    smith_normal_form,
    transpose,
    unimodular_inverse,
)

logger = logging.getLogger("chatelet_brauer.gcoh")

GroupRingElt = dict[int, int]


# ---------------------------------------------------------------------------
# Groups
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GroupPresentation:
    """A finite group given by generators, relators and a multiplication table."""

    name: str
    labels: tuple[str, ...]
    table: tuple[tuple[int, ...], ...]
    generators: tuple[tuple[str, int], ...]
    relators: tuple[str, ...] = ()
    kind: str = "generic"  # "dihedral" | "cyclic" | "direct" | "semidirect" | "generic"
    n: int = 0
    projection: tuple[int, ...] = ()  # onto dihedral(n), for "direct" and "semidirect"

    identity = 0

    @property
    def order(self) -> int:
        return len(self.labels)

    def gen(self, name: str) -> int:
        for label, idx in self.generators:
            if label == name:
                return idx
        raise UsageError(f"{self.name} has no generator {name!r}")

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    @cached_property
    def _inverses(self) -> tuple[int, ...]:
        inv = [0] * self.order
        for a in range(self.order):
            inv[a] = self.table[a].index(0)
        return tuple(inv)

    def inv(self, a: int) -> int:
        return self._inverses[a]

    def power(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inv(a), -k
        out = 0
        for _ in range(k):
            out = self.table[out][a]
        return out

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != 0:
            x = self.table[x][a]
            k += 1
        return k

    def evaluate(self, word: str) -> int:
        """Evaluate a word such as "ghgh", "g^2h" or "c^-1b"."""
        out = 0
        for name, exp in re.findall(r"([A-Za-z])(?:\^(-?\d+))?", word):
            out = self.table[out][self.power(self.gen(name), int(exp) if exp else 1)]
        return out

    def subgroup(self, gens: Sequence[int]) -> list[int]:
        """Elements of the subgroup generated by `gens`, identity first."""
        seen = [0]
        frontier = [0]
        members = {0}
        while frontier:
            x = frontier.pop()
            for s in gens:
                y = self.table[x][s]
                if y not in members:
                    members.add(y)
                    seen.append(y)
                    frontier.append(y)
        return seen

    def check(self) -> None:
        """Verify identity, inverses, associativity and relators."""
        N = self.order
        for a in range(N):
            if self.table[0][a] != a or self.table[a][0] != a:
                raise UsageError(f"{self.name}: element 0 is not the identity")
            if 0 not in self.table[a]:
                raise UsageError(f"{self.name}: {self.labels[a]} has no inverse")
        for a, b, c in itertools.product(range(N), repeat=3):
            if self.table[self.table[a][b]][c] != self.table[a][self.table[b][c]]:
                raise UsageError(f"{self.name}: multiplication is not associative")
        for word in self.relators:
            if self.evaluate(word) != 0:
                raise UsageError(f"{self.name}: relator {word} does not hold")

    # -- constructors -------------------------------------------------------

    @classmethod
    def _build(
        cls,
        name: str,
        elements: list,
        mul: Callable[[Any, Any], Any],
        generators: list[tuple[str, Any]],
        labels: list[str],
        **kw: Any,
    ) -> "GroupPresentation":
        index = {e: i for i, e in enumerate(elements)}
        table = tuple(tuple(index[mul(a, b)] for b in elements) for a in elements)
        gens = tuple((label, index[e]) for label, e in generators)
        return cls(name=name, labels=tuple(labels), table=table, generators=gens, **kw)

    @classmethod
    def dihedral(cls, n: int) -> "GroupPresentation":
        """D_n of order 2n; element i + n*j is g^i h^j."""
        if n < 2:
            raise UsageError(f"dihedral group needs n >= 2, got {n}")
        elements = [(i, j) for j in range(2) for i in range(n)]

        def mul(x, y):
            (i, j), (k, l) = x, y
            return ((i + (k if j == 0 else -k)) % n, (j + l) % 2)

        labels = [_word(("g", i), ("h", j)) for i, j in elements]
        return cls._build(
            f"D{n}",
            elements,
            mul,
            [("g", (1 % n, 0)), ("h", (0, 1))],
            labels,
            relators=(f"g^{n}", "h^2", "ghgh"),
            kind="dihedral",
            n=n,
        )

    @classmethod
    def cyclic(cls, n: int, generator: str = "g") -> "GroupPresentation":
        if n < 1:
            raise UsageError(f"cyclic group needs n >= 1, got {n}")
        elements = list(range(n))
        labels = [_word((generator, i)) for i in elements]
        return cls._build(
            f"C{n}",
            elements,
            lambda a, b: (a + b) % n,
            [(generator, 1 % n)],
            labels,
            relators=(f"{generator}^{n}",),
            kind="cyclic",
            n=n,
        )

    @classmethod
    def from_permutations(
        cls, name: str, gens: Sequence[tuple[str, Sequence[int]]], relators: Sequence[str] = ()
    ) -> "GroupPresentation":
        """Closure of the given permutations; (στ)(x) = σ(τ(x))."""
        if not gens:
            raise UsageError("at least one generator permutation is required")
        degree = len(gens[0][1])
        ident = tuple(range(degree))
        perms = {label: tuple(p) for label, p in gens}
        elements = [ident]
        words = {ident: ""}
        seen = {ident}
        frontier = [ident]
        while frontier:
            nxt = []
            for x in frontier:
                for label, p in perms.items():
                    y = tuple(p[x[k]] for k in range(degree))
                    if y not in seen:
                        seen.add(y)
                        elements.append(y)
                        words[y] = label + words[x]
                        nxt.append(y)
            frontier = nxt

        def mul(s, t):
            return tuple(s[t[k]] for k in range(degree))

        labels = [words[e] or "1" for e in elements]
        return cls._build(
            name, elements, mul, list(perms.items()), labels, relators=tuple(relators)
        )

    @classmethod
    def dihedral_times_cyclic(cls, n: int, d: int) -> "GroupPresentation":
        """Z/d x D_n generated by a (central, order d), c (order n), b (order 2)."""
        elements = [(k, i, j) for j in range(2) for i in range(n) for k in range(d)]

        def mul(x, y):
            (k, i, j), (k2, i2, j2) = x, y
            return ((k + k2) % d, (i + (i2 if j == 0 else -i2)) % n, (j + j2) % 2)

        labels = [_word(("a", k), ("c", i), ("b", j)) for k, i, j in elements]
        projection = tuple(i + n * j for _, i, j in elements)
        return cls._build(
            f"C{d}xD{n}",
            elements,
            mul,
            [("a", (1 % d, 0, 0)), ("c", (0, 1 % n, 0)), ("b", (0, 0, 1))],
            labels,
            relators=(f"a^{d}", "b^2", f"c^{n}", "cbcb", "aca^-1c^-1", "aba^-1b^-1"),
            kind="direct",
            n=n,
            projection=projection,
        )

    @classmethod
    def dihedral_semidirect(cls, n: int, d: int) -> "GroupPresentation":
        """Z/n x| Z/d with b c b^-1 = c^-1; c has order n, b order d (d even)."""
        if d % 2:
            raise UsageError(f"semidirect tower needs even d, got {d}")
        elements = [(i, j) for j in range(d) for i in range(n)]

        def mul(x, y):
            (i, j), (i2, j2) = x, y
            return ((i + (i2 if j % 2 == 0 else -i2)) % n, (j + j2) % d)

        labels = [_word(("c", i), ("b", j)) for i, j in elements]
        projection = tuple(i + n * (j % 2) for i, j in elements)
        return cls._build(
            f"C{n}:C{d}",
            elements,
            mul,
            [("c", (1 % n, 0)), ("b", (0, 1 % d))],
            labels,
            relators=(f"c^{n}", f"b^{d}", "bcb^-1c"),
            kind="semidirect",
            n=n,
            projection=projection,
        )


def _word(*parts: tuple[str, int]) -> str:
    out = "".join(s if e == 1 else f"{s}^{e}" for s, e in parts if e)
    return out or "1"


# ---------------------------------------------------------------------------
# Group ring
# ---------------------------------------------------------------------------


def norm_element(G: GroupPresentation, x: int) -> GroupRingElt:
    """N_x = 1 + x + ... + x^(ord x - 1)."""
    out: GroupRingElt = {}
    y = 0
    for _ in range(G.element_order(x)):
        out[y] = out.get(y, 0) + 1
        y = G.mul(y, x)
    return out


def delta_element(G: GroupPresentation, x: int) -> GroupRingElt:
    """Δ_x = 1 - x."""
    if x == 0:
        return {}
    return {0: 1, x: -1}


def ring_mul(G: GroupPresentation, x: GroupRingElt, y: GroupRingElt) -> GroupRingElt:
    out: GroupRingElt = {}
    for a, ca in x.items():
        for b, cb in y.items():
            ab = G.mul(a, b)
            out[ab] = out.get(ab, 0) + ca * cb
    return {k: v for k, v in out.items() if v}


def ring_add(x: GroupRingElt, y: GroupRingElt, sign: int = 1) -> GroupRingElt:
    out = dict(x)
    for k, v in y.items():
        out[k] = out.get(k, 0) + sign * v
    return {k: v for k, v in out.items() if v}


def ring_neg(x: GroupRingElt) -> GroupRingElt:
    return {k: -v for k, v in x.items()}


# ---------------------------------------------------------------------------
# Modules
# ---------------------------------------------------------------------------


@dataclass
class GIntModule:
    """
    A free Z-module with a G-action. `action[s]` is the matrix of generator s
    in row convention: row k is the image of basis vector k.
    """

    group: GroupPresentation
    rank: int
    action: dict[str, IntMatrix]
    basis_labels: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        for label, _ in self.group.generators:
            if label not in self.action:
                raise UsageError(f"no action given for generator {label!r}")
            M = self.action[label]
            if len(M) != self.rank or any(len(row) != self.rank for row in M):
                raise UsageError(f"action of {label!r} is not {self.rank}x{self.rank}")
        if not self.basis_labels:
            self.basis_labels = [f"e{k + 1}" for k in range(self.rank)]
        _ = self._matrices

    @classmethod
    def trivial(cls, group: GroupPresentation, rank: int = 1) -> "GIntModule":
        return cls(group, rank, {label: identity(rank) for label, _ in group.generators})

    @classmethod
    def permutation(
        cls,
        group: GroupPresentation,
        images: dict[str, Sequence[int]],
        labels: Optional[list[str]] = None,
    ) -> "GIntModule":
        """Permutation lattice: generator s sends basis vector k to images[s][k]."""
        rank = len(next(iter(images.values())))
        action = {}
        for s, perm in images.items():
            action[s] = [[int(perm[k] == j) for j in range(rank)] for k in range(rank)]
        return cls(group, rank, action, list(labels or []))

    @cached_property
    def _matrices(self) -> list[IntMatrix]:
        G = self.group
        gens = [(idx, transpose(self.action[label])) for label, idx in G.generators]
        mats: list[Optional[IntMatrix]] = [None] * G.order
        mats[0] = identity(self.rank)
        frontier = [0]
        while frontier:
            x = frontier.pop()
            for s, Ts in gens:
                y = G.mul(s, x)
                Ty = mat_mul(Ts, mats[x]) if self.rank else []
                if mats[y] is None:
                    mats[y] = Ty
                    frontier.append(y)
                elif mats[y] != Ty:
                    raise UsageError(
                        f"action matrices do not satisfy the relations of {G.name} "
                        f"(conflict at {G.labels[y]})"
                    )
        if any(m is None for m in mats):
            raise UsageError(f"generators do not reach every element of {G.name}")
        return mats  # type: ignore[return-value]

    def matrix(self, sigma: int) -> IntMatrix:
        """Column-convention matrix: σ(v) = matrix(σ)·v."""
        return self._matrices[sigma]

    def act(self, sigma: int, v: Sequence[int]) -> list[int]:
        return mat_vec(self._matrices[sigma], v)

    def ring_matrix(self, elt: GroupRingElt) -> IntMatrix:
        out = [[0] * self.rank for _ in range(self.rank)]
        for sigma, c in elt.items():
            T = self._matrices[sigma]
            for i in range(self.rank):
                row, Ti = out[i], T[i]
                for j in range(self.rank):
                    row[j] += c * Ti[j]
        return out

    def apply(self, elt: GroupRingElt, v: Sequence[int]) -> list[int]:
        return mat_vec(self.ring_matrix(elt), v)


# ---------------------------------------------------------------------------
# Cocycle containers
# ---------------------------------------------------------------------------


@dataclass
class EffCocycle:
    """Cochain on the efficient complex: one module value per free generator."""

    degree: int
    components: list[list[int]]

    def __add__(self, other: "EffCocycle") -> "EffCocycle":
        return EffCocycle(
            self.degree,
            [[a + b for a, b in zip(u, v)] for u, v in zip(self.components, other.components)],
        )

    def scale(self, k: int) -> "EffCocycle":
        return EffCocycle(self.degree, [[k * a for a in u] for u in self.components])

    def flat(self) -> list[int]:
        return [a for u in self.components for a in u]

    def is_zero(self) -> bool:
        return not any(self.flat())


@dataclass
class StdCocycle:
    """Inhomogeneous cochain: a value for every tuple of group elements."""

    degree: int
    table: dict[tuple[int, ...], Any]


# ---------------------------------------------------------------------------
# Efficient dihedral complex
# ---------------------------------------------------------------------------

RingMatrix = list[list[GroupRingElt]]


def eff_differentials(n: int) -> tuple[GroupPresentation, list[RingMatrix]]:
    """
    Differentials d1, d2, d3 of the efficient free resolution of Z over D_n.

    Matrices are indexed [target][source]: d(e_j) = Σ_k D[k][j]·e_k.
    """
    if n < 2:
        raise UsageError(f"efficient complex needs n >= 2, got {n}")
    G = GroupPresentation.dihedral(n)
    g, h = G.gen("g"), G.gen("h")
    gh = G.mul(g, h)
    Ng, Nh, Ngh = norm_element(G, g), norm_element(G, h), norm_element(G, gh)
    Dg, Dh, Dgh = delta_element(G, g), delta_element(G, h), delta_element(G, gh)
    d1 = [[Dg, Dh]]
    d2 = [
        [Ng, {}, Ngh],
        [{}, Nh, ring_neg(Ngh)],
    ]
    d3 = [
        [Dg, {}, {}, Nh],
        [{}, Dh, {}, ring_neg(Ng)],
        [{}, {}, Dgh, ring_neg(Ng)],
    ]
    return G, [d1, d2, d3]


def compose(G: GroupPresentation, outer: RingMatrix, inner: RingMatrix) -> RingMatrix:
    """Matrix of outer∘inner for left-module maps in [target][source] indexing."""
    rows = len(outer)
    mid = len(inner)
    cols = len(inner[0]) if inner else 0
    out: RingMatrix = [[{} for _ in range(cols)] for _ in range(rows)]
    for l in range(rows):
        for j in range(cols):
            acc: GroupRingElt = {}
            for k in range(mid):
                acc = ring_add(acc, ring_mul(G, inner[k][j], outer[l][k]))
            out[l][j] = acc
    return out


def _z_matrix(G: GroupPresentation, D: RingMatrix) -> IntMatrix:
    """Z-matrix of a Z[G]-map; coordinates (k, τ) ↦ k·|G| + τ."""
    N = G.order
    rows, cols = len(D), len(D[0])
    out = [[0] * (cols * N) for _ in range(rows * N)]
    for k in range(rows):
        for j in range(cols):
            for x, c in D[k][j].items():
                for sigma in range(N):
                    tau = G.mul(sigma, x)
                    out[k * N + tau][j * N + sigma] += c
    return out


_TAIL_CACHE: dict[int, RingMatrix] = {}


def _resolution_tail(n: int) -> RingMatrix:
    """A Z[G]-map d4 onto ker d3 (generators: a Z-basis of the kernel)."""
    if n in _TAIL_CACHE:
        return _TAIL_CACHE[n]
    G, (_, _, d3) = eff_differentials(n)
    N = G.order
    basis = LinearSolver(_z_matrix(G, d3)).kernel
    d4: RingMatrix = [[{} for _ in basis] for _ in range(4)]
    for col, w in enumerate(basis):
        for k in range(4):
            d4[k][col] = {tau: w[k * N + tau] for tau in range(N) if w[k * N + tau]}
    logger.debug("efficient complex tail for D%d: %d generators", n, len(basis))
    _TAIL_CACHE[n] = d4
    return d4


def clear_caches() -> None:
    _TAIL_CACHE.clear()


def _cochain_matrix(M: GIntModule, D: RingMatrix) -> IntMatrix:
    """δ: M^(#targets of D) → M^(#sources of D), (δφ)_j = Σ_k D[k][j]·φ_k."""
    r = M.rank
    rows_src = len(D)
    cols_src = len(D[0]) if D else 0
    out = [[0] * (rows_src * r) for _ in range(cols_src * r)]
    for j in range(cols_src):
        for k in range(rows_src):
            if not D[k][j]:
                continue
            block = M.ring_matrix(D[k][j])
            for a in range(r):
                row = out[j * r + a]
                for b in range(r):
                    row[k * r + b] += block[a][b]
    return out


def eff_coboundary(M: GIntModule, c: EffCocycle) -> EffCocycle:
    """Apply the efficient-complex coboundary to a cochain of degree c.degree."""
    n = M.group.n
    _, ds = eff_differentials(n)
    ds = ds + [_resolution_tail(n)]
    D = ds[c.degree]
    v = mat_vec(_cochain_matrix(M, D), c.flat())
    r = M.rank
    return EffCocycle(c.degree + 1, [v[j * r:(j + 1) * r] for j in range(len(D[0]))])


def is_eff_cocycle(M: GIntModule, c: EffCocycle) -> bool:
    return eff_coboundary(M, c).is_zero()


# ---------------------------------------------------------------------------
# Cohomology groups
# ---------------------------------------------------------------------------


@dataclass
class CohomologyGroup:
    """H^i ≅ ⊕ Z/d_k with generating cocycles; a free summand has d_k = 0."""

    degree: int
    invariants: list[int]
    generators: list[list[int]]
    complex: str  # "efficient" | "standard"
    _cycles: LinearSolver = field(repr=False)
    _boundaries: LinearSolver = field(repr=False)
    _U: IntMatrix = field(repr=False)
    _keep: list[int] = field(repr=False)

    @property
    def order(self) -> int:
        """Group order, 0 when infinite."""
        out = 1
        for d in self.invariants:
            out *= d
        return out

    def is_trivial(self) -> bool:
        return not self.invariants

    def class_of(self, cochain: Sequence[int]) -> tuple[int, ...]:
        """Coordinates of a cocycle's class with respect to `generators`."""
        x = self._cycles.solve(list(cochain))
        if x is None:
            raise CocycleConditionError(f"degree-{self.degree} cochain is not a cocycle")
        y = mat_vec(self._U, x) if self._U else []
        return tuple(y[k] % d if d else y[k] for k, d in zip(self._keep, self.invariants))

    def class_order(self, cochain: Sequence[int]) -> int:
        """Order of the class of a cocycle, 0 when it has infinite order."""
        out = 1
        for coord, d in zip(self.class_of(cochain), self.invariants):
            if d == 0:
                if coord:
                    return 0
                continue
            k = d // gcd(coord, d)
            out = out * k // gcd(out, k)
        return out

    def is_coboundary(self, cochain: Sequence[int]) -> bool:
        return self._boundaries.solve(list(cochain)) is not None

    def coboundary_preimage(self, cochain: Sequence[int]) -> Optional[list[int]]:
        """A flat degree-(i−1) cochain whose coboundary is `cochain`, or None."""
        return self._boundaries.solve(list(cochain))


def _homology(
    degree: int, name: str, outgoing: IntMatrix, incoming: IntMatrix, dim: int, in_dim: int
) -> CohomologyGroup:
    cycles = LinearSolver(outgoing, cols=dim).kernel
    k = len(cycles)
    Z = [[cycles[c][r] for c in range(k)] for r in range(dim)]
    zsolver = LinearSolver(Z, cols=k)
    coords = []
    for j in range(in_dim):
        x = zsolver.solve([incoming[r][j] for r in range(dim)])
        if x is None:
            raise CocycleConditionError(f"degree-{degree} coboundaries are not cocycles")
        coords.append(x)
    C = [[coords[j][i] for j in range(in_dim)] for i in range(k)]
    if k:
        S, U, _ = smith_normal_form(C)
        diag = [S[i][i] if i < in_dim else 0 for i in range(k)]
        U_inv = unimodular_inverse(U)
    else:
        U, diag, U_inv = [], [], []
    keep = [i for i in range(k) if diag[i] != 1]
    generators = [mat_vec(Z, [U_inv[r][i] for r in range(k)]) for i in keep]
    return CohomologyGroup(
        degree=degree,
        invariants=[diag[i] for i in keep],
        generators=generators,
        complex=name,
        _cycles=zsolver,
        _boundaries=LinearSolver(incoming, cols=in_dim),
        _U=U,
        _keep=keep,
    )


def cohomology_eff(M: GIntModule, i: int) -> CohomologyGroup:
    """H^i(D_n, M) for i in {1, 2, 3} from the efficient complex."""
    G = M.group
    if G.kind != "dihedral":
        raise UsageError(
            f"efficient complex needs a dihedral group, got {G.name}; use cohomology_std"
        )
    if i not in (1, 2, 3):
        raise UsageError(f"degree must be 1, 2 or 3, got {i}")
    _, ds = eff_differentials(G.n)
    ds = ds + [_resolution_tail(G.n)]
    dim = len(ds[i - 1][0]) * M.rank
    in_dim = len(ds[i - 1]) * M.rank
    outgoing = _cochain_matrix(M, ds[i])
    incoming = _cochain_matrix(M, ds[i - 1])
    out = _homology(i, "efficient", outgoing, incoming, dim, in_dim)
    logger.debug("H^%d(%s, rank %d) = %s", i, G.name, M.rank, out.invariants)
    return out


# ---------------------------------------------------------------------------
# Normalized standard complex
# ---------------------------------------------------------------------------


def _std_tuples(G: GroupPresentation, r: int) -> list[tuple[int, ...]]:
    return list(itertools.product(range(1, G.order), repeat=r))


def std_coboundary_matrix(M: GIntModule, r: int) -> IntMatrix:
    """δ^r: C^r → C^(r+1) on normalized inhomogeneous cochains."""
    G, rank = M.group, M.rank
    src = {t: k for k, t in enumerate(_std_tuples(G, r))}
    tgt = _std_tuples(G, r + 1)
    out = [[0] * (len(src) * rank) for _ in range(len(tgt) * rank)]
    for row, t in enumerate(tgt):
        base = row * rank
        T = M.matrix(t[0])
        col = src[t[1:]] * rank
        for a in range(rank):
            for b in range(rank):
                out[base + a][col + b] += T[a][b]
        for i in range(r):
            merged = t[:i] + (G.mul(t[i], t[i + 1]),) + t[i + 2:]
            if 0 in merged:
                continue
            col = src[merged] * rank
            sign = -1 if i % 2 == 0 else 1
            for a in range(rank):
                out[base + a][col + a] += sign
        col = src[t[:r]] * rank
        sign = -1 if r % 2 == 0 else 1
        for a in range(rank):
            out[base + a][col + a] += sign
    return out


def cohomology_std(M: GIntModule, i: int, max_unknowns: int = 100_000) -> CohomologyGroup:
    """H^i(G, M) by brute force over normalized standard cochains."""
    G = M.group
    if i not in (1, 2, 3):
        raise UsageError(f"degree must be 1, 2 or 3, got {i}")
    size = (G.order - 1) ** (i + 1) * M.rank
    if size > max_unknowns:
        raise UsageError(
            f"standard complex too large for {G.name} in degree {i}: {size} > {max_unknowns}"
        )
    dim = (G.order - 1) ** i * M.rank
    in_dim = (G.order - 1) ** (i - 1) * M.rank
    out = _homology(
        i, "standard", std_coboundary_matrix(M, i), std_coboundary_matrix(M, i - 1), dim, in_dim
    )
    logger.debug("H^%d(%s, rank %d) via bar complex = %s", i, G.name, M.rank, out.invariants)
    return out


def std_vector(M: GIntModule, c: StdCocycle) -> list[int]:
    """Flatten a normalized standard cochain."""
    for key, value in c.table.items():
        if 0 in key and any(value):
            raise CocycleConditionError(f"cochain is not normalized at {key}")
    out: list[int] = []
    for t in _std_tuples(M.group, c.degree):
        out.extend(c.table.get(t, [0] * M.rank))
    return out


def std_from_vector(M: GIntModule, degree: int, vec: Sequence[int]) -> StdCocycle:
    r = M.rank
    table: dict[tuple[int, ...], Any] = {}
    tuples = _std_tuples(M.group, degree)
    for k, t in enumerate(tuples):
        table[t] = list(vec[k * r:(k + 1) * r])
    for t in itertools.product(range(M.group.order), repeat=degree):
        if 0 in t:
            table[t] = [0] * r
    return StdCocycle(degree, table)


# ---------------------------------------------------------------------------
# Comparison maps in degree 1
# ---------------------------------------------------------------------------


def sigma1(G: GroupPresentation, x: int) -> tuple[GroupRingElt, GroupRingElt]:
    """Image of the bar generator [x] in the efficient complex (coefficients of e1, e2)."""
    n = G.n
    i, j = x % n, x // n
    e1: GroupRingElt = {e: -1 for e in range(i)}
    e2: GroupRingElt = {i: -1} if j else {}
    return e1, e2


def eff_to_std_deg1(M: GIntModule, c: EffCocycle) -> StdCocycle:
    v1, v2 = c.components
    table = {}
    for x in range(M.group.order):
        e1, e2 = sigma1(M.group, x)
        table[(x,)] = [a + b for a, b in zip(M.apply(e1, v1), M.apply(e2, v2))]
    return StdCocycle(1, table)


def std_to_eff_deg1(M: GIntModule, f: StdCocycle) -> EffCocycle:
    G = M.group
    g, h = G.gen("g"), G.gen("h")
    return EffCocycle(1, [[-a for a in f.table[(g,)]], [-a for a in f.table[(h,)]]])


# ---------------------------------------------------------------------------
# Degree 2: efficient triples to standard cocycles
# ---------------------------------------------------------------------------


class ActionOps(Protocol):
    """A G-module written multiplicatively: field units, or lattices via ModuleOps."""

    def act(self, sigma: int, x: Any) -> Any: ...

    def op(self, x: Any, y: Any) -> Any: ...

    def inverse(self, x: Any) -> Any: ...

    def unit(self) -> Any: ...

    def equal(self, x: Any, y: Any) -> bool: ...


@dataclass
class ModuleOps:
    """ActionOps for a GIntModule (group law is addition)."""

    module: GIntModule

    def act(self, sigma: int, x: Sequence[int]) -> list[int]:
        return self.module.act(sigma, x)

    def op(self, x: Sequence[int], y: Sequence[int]) -> list[int]:
        return [a + b for a, b in zip(x, y)]

    def inverse(self, x: Sequence[int]) -> list[int]:
        return [-a for a in x]

    def unit(self) -> list[int]:
        return [0] * self.module.rank

    def equal(self, x: Sequence[int], y: Sequence[int]) -> bool:
        return list(x) == list(y)


def orbit_product(G: GroupPresentation, ops: ActionOps, x: Any, sigma: int) -> Any:
    """N_σ(x) = ∏_k σ^k(x)."""
    out = ops.unit()
    y = 0
    for _ in range(G.element_order(sigma)):
        out = ops.op(out, ops.act(y, x))
        y = G.mul(y, sigma)
    return out


def check_triple(G: GroupPresentation, ops: ActionOps, r: Any, s: Any, t: Any) -> None:
    """Efficient degree-2 cocycle conditions; names the failing relation."""
    g, h = G.gen("g"), G.gen("h")
    gh = G.mul(g, h)
    if not ops.equal(ops.act(g, r), r):
        raise CocycleConditionError("r is not fixed by g")
    if not ops.equal(ops.act(h, s), s):
        raise CocycleConditionError("s is not fixed by h")
    if not ops.equal(ops.act(gh, t), t):
        raise CocycleConditionError("t is not fixed by gh")
    if not ops.equal(orbit_product(G, ops, r, h), orbit_product(G, ops, ops.op(s, t), g)):
        raise CocycleConditionError("N_h(r) = N_g(s·t) fails")


def eff_to_std_deg2(
    G: GroupPresentation, ops: ActionOps, triple: Sequence[Any], check: bool = True
) -> StdCocycle:
    """
    Standard 2-cocycle of an efficient triple (r, s, t):

      f(g^i,   g^i' h^j') = r^-1 if i + i' >= n, else 1
      f(g^i h, g^i' h^j') = r^[i' > i] / (g^(i-i')(s)^j' · ∏_{e=1..i'} g^(i-e)(t·g(s)))
    """
    if G.kind != "dihedral":
        raise UsageError(f"efficient triples need a dihedral group, got {G.name}")
    r, s, t = triple
    if check:
        check_triple(G, ops, r, s, t)
    n = G.n
    g = G.gen("g")
    t_gs = ops.op(t, ops.act(g, s))
    s_shift = [ops.act(e, s) for e in range(n)]
    tgs_shift = [ops.act(e, t_gs) for e in range(n)]
    r_inv = ops.inverse(r)
    table: dict[tuple[int, ...], Any] = {}
    for x in range(G.order):
        i, j = x % n, x // n
        for y in range(G.order):
            i2, j2 = y % n, y // n
            if j == 0:
                table[(x, y)] = r_inv if i + i2 >= n else ops.unit()
                continue
            den = s_shift[(i - i2) % n] if j2 else ops.unit()
            for e in range(1, i2 + 1):
                den = ops.op(den, tgs_shift[(i - e) % n])
            num = r if i2 > i else ops.unit()
            table[(x, y)] = ops.op(num, ops.inverse(den))
    return StdCocycle(2, table)


def eff_to_std_deg2_units(
    G: GroupPresentation, ops: ActionOps, r: Any, s: Any, t: Any, check: bool = True
) -> StdCocycle:
    return eff_to_std_deg2(G, ops, (r, s, t), check=check)


def cocycle_identity_failure(
    G: GroupPresentation, ops: ActionOps, f: StdCocycle
) -> Optional[tuple[int, int, int]]:
    """First (σ, τ, ρ) violating σ(f(τ,ρ))·f(σ,τρ) = f(στ,ρ)·f(σ,τ), or None."""
    T = f.table
    for a, b, c in itertools.product(range(G.order), repeat=3):
        lhs = ops.op(ops.act(a, T[(b, c)]), T[(a, G.mul(b, c))])
        rhs = ops.op(T[(G.mul(a, b), c)], T[(a, b)])
        if not ops.equal(lhs, rhs):
            return a, b, c
    return None


def coboundary_deg1(G: GroupPresentation, ops: ActionOps, psi: StdCocycle) -> StdCocycle:
    """(∂ψ)(σ, τ) = σ(ψ(τ))·ψ(σ)/ψ(στ)."""
    P = psi.table
    table = {}
    for a in range(G.order):
        for b in range(G.order):
            val = ops.op(ops.act(a, P[(b,)]), P[(a,)])
            table[(a, b)] = ops.op(val, ops.inverse(P[(G.mul(a, b),)]))
    return StdCocycle(2, table)


def coboundary_triple(
    G: GroupPresentation, ops: ActionOps, r1: Any, s1: Any
) -> tuple[Any, Any, Any]:
    """(N_g r', N_h s', N_gh(r'/s')): the efficient coboundary of (r', s')."""
    g, h = G.gen("g"), G.gen("h")
    gh = G.mul(g, h)
    return (
        orbit_product(G, ops, r1, g),
        orbit_product(G, ops, s1, h),
        orbit_product(G, ops, ops.op(r1, ops.inverse(s1)), gh),
    )


def coboundary_witness_deg1_units(
    G: GroupPresentation,
    ops: ActionOps,
    r1: Any,
    s1: Any,
    target: Optional[Sequence[Any]] = None,
) -> StdCocycle:
    """
    ψ(g^i h^j) = ∏_{e<i} g^e(r')^-1 · g^i(s')^-j, whose coboundary is the
    standard cocycle of (N_g r', N_h s', N_gh(r'/s')).
    """
    if target is not None:
        got = coboundary_triple(G, ops, r1, s1)
        for name, a, b in zip("rst", got, target):
            if not ops.equal(a, b):
                raise CocycleConditionError(f"witness does not reproduce the {name}-component")
    n = G.n
    table = {}
    for x in range(G.order):
        i, j = x % n, x // n
        val = ops.unit()
        for e in range(i):
            val = ops.op(val, ops.act(e, r1))
        val = ops.inverse(val)
        if j:
            val = ops.op(val, ops.inverse(ops.act(i, s1)))
        table[(x,)] = val
    return StdCocycle(1, table)


# ---------------------------------------------------------------------------
# Connecting map H^1(G, Pic) → H^2(G, R)
# ---------------------------------------------------------------------------


def lift_cochain(q: IntMatrix, c: EffCocycle, rank: int) -> list[list[int]]:
    """Preimages of the components of c under the surjection q."""
    solver = LinearSolver(q, cols=rank)
    out = []
    for k, v in enumerate(c.components):
        x = solver.solve(v)
        if x is None:
            raise UsageError(f"component {k + 1} is not in the image of the quotient map")
        out.append(x)
    return out


def connecting_deg1_to_deg2(
    div: GIntModule, q: IntMatrix, c: EffCocycle, lift: Optional[Sequence[Sequence[int]]] = None
) -> EffCocycle:
    """
    δ(c) for 0 → R → Div → Pic → 0 with q: Div → Pic (column convention).
    The result is written in Div coordinates; every component lies in R.
    """
    if c.degree != 1:
        raise UsageError(f"connecting map expects a degree-1 cocycle, got degree {c.degree}")
    if lift is None:
        lift = lift_cochain(q, c, div.rank)
    for k, (D, v) in enumerate(zip(lift, c.components)):
        if mat_vec(q, D) != list(v):
            raise CocycleConditionError(f"lift component {k + 1} does not map to the cocycle")
    out = eff_coboundary(div, EffCocycle(1, [list(D) for D in lift]))
    for k, comp in enumerate(out.components):
        if any(mat_vec(q, comp)):
            raise CocycleConditionError(f"component {k + 1} of the connecting image is not in R")
    return out
