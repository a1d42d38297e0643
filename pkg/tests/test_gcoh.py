"""
test_gcoh.py — Tests for finite-group cohomology.

Covers:
  - Group constructors: dihedral, cyclic, permutation closure, towers
  - Efficient complex: d∘d = 0 for n = 2..8
  - H^i(D_n, Z) closed-form tables for n = 2..6, i = 1..3
  - The rank-3 D4 lattice with H^1 ≅ Z/4 generated by ((1,1,1),(0,1,0))
  - Efficient vs standard complex on fixtures and seeded random lattices
  - Degree-1 chain maps in both directions
  - Degree-2 triple formula: cocycle identity and coboundary witness
  - Triple precondition failures name the relation

Run with:
    pytest tests/test_gcoh.py -v
"""

from __future__ import annotations

import random

import pytest

from chatelet_brauer.errors import CocycleConditionError, UsageError
from chatelet_brauer.exact import mat_mul, unimodular_inverse
from chatelet_brauer.gcoh import (
    EffCocycle,
    GIntModule,
    GroupPresentation,
    ModuleOps,
    coboundary_deg1,
    coboundary_triple,
    coboundary_witness_deg1_units,
    cocycle_identity_failure,
    cohomology_eff,
    cohomology_std,
    compose,
    eff_differentials,
    eff_to_std_deg1,
    eff_to_std_deg2,
    is_eff_cocycle,
    sigma1,
    std_to_eff_deg1,
    std_vector,
)

# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------

PIC_D4_ROWS = {
    "g": [[0, 0, 1], [-1, -1, -1], [0, 1, 0]],
    "h": [[-1, 0, 0], [0, -1, 0], [1, 1, 1]],
}


@pytest.fixture
def d4() -> GroupPresentation:
    return GroupPresentation.dihedral(4)


@pytest.fixture
def pic_d4(d4) -> GIntModule:
    return GIntModule(d4, 3, PIC_D4_ROWS)


def regular_module(G: GroupPresentation) -> GIntModule:
    images = {label: [G.mul(idx, k) for k in range(G.order)] for label, idx in G.generators}
    return GIntModule.permutation(G, images)


def sign_module(G: GroupPresentation) -> GIntModule:
    return GIntModule(G, 1, {"g": [[1]], "h": [[-1]]})


def coset_module(G: GroupPresentation) -> GIntModule:
    """Z[D_n / <h>]: g rotates n points, h reflects them."""
    n = G.n
    return GIntModule.permutation(
        G, {"g": [(k + 1) % n for k in range(n)], "h": [(-k) % n for k in range(n)]}
    )


def random_unimodular(rng: random.Random, size: int) -> list[list[int]]:
    P = [[int(i == j) for j in range(size)] for i in range(size)]
    for _ in range(3 * size):
        i, j = rng.sample(range(size), 2) if size > 1 else (0, 0)
        if i == j:
            continue
        k = rng.choice([-2, -1, 1, 2])
        P[i] = [a + k * b for a, b in zip(P[i], P[j])]
    return P


def conjugate(M: GIntModule, P: list[list[int]]) -> GIntModule:
    P_inv = unimodular_inverse(P)
    action = {s: mat_mul(mat_mul(P, A), P_inv) for s, A in M.action.items()}
    return GIntModule(M.group, M.rank, action)


def direct_sum(A: GIntModule, B: GIntModule) -> GIntModule:
    r = A.rank + B.rank
    action = {}
    for s in A.action:
        M = [[0] * r for _ in range(r)]
        for i in range(A.rank):
            M[i][: A.rank] = A.action[s][i]
        for i in range(B.rank):
            M[A.rank + i][A.rank:] = B.action[s][i]
        action[s] = M
    return GIntModule(A.group, r, action)


# ---------------------------------------------------------------------------
# Groups
# ---------------------------------------------------------------------------


class TestGroups:
    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_dihedral_is_a_group(self, n):
        G = GroupPresentation.dihedral(n)
        G.check()
        assert G.order == 2 * n
        assert G.element_order(G.gen("g")) == n
        assert G.element_order(G.gen("h")) == 2

    def test_dihedral_labels(self, d4):
        assert d4.labels[0] == "1"
        assert d4.labels[d4.evaluate("g^2h")] == "g^2h"
        assert d4.evaluate("hg") == d4.evaluate("g^3h")

    def test_small_n_rejected(self):
        with pytest.raises(UsageError, match="n >= 2"):
            GroupPresentation.dihedral(1)

    def test_permutation_closure_s3(self):
        G = GroupPresentation.from_permutations("S3", [("a", (1, 2, 0)), ("b", (1, 0, 2))])
        G.check()
        assert G.order == 6

    def test_direct_tower(self):
        G = GroupPresentation.dihedral_times_cyclic(4, 8)
        assert G.order == 64
        G.check()
        D = GroupPresentation.dihedral(4)
        for x in range(G.order):
            for y in range(G.order):
                assert G.projection[G.mul(x, y)] == D.mul(G.projection[x], G.projection[y])

    def test_semidirect_tower(self):
        G = GroupPresentation.dihedral_semidirect(4, 4)
        G.check()
        b, c = G.gen("b"), G.gen("c")
        assert G.mul(b, c) == G.mul(G.inv(c), b)
        assert G.projection[b] == 4  # h in D4

    def test_semidirect_needs_even_d(self):
        with pytest.raises(UsageError, match="even d"):
            GroupPresentation.dihedral_semidirect(4, 3)


# ---------------------------------------------------------------------------
# Efficient complex
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("n", range(2, 9))
def test_efficient_complex_squares_to_zero(n):
    G, (d1, d2, d3) = eff_differentials(n)
    for outer, inner in [(d1, d2), (d2, d3)]:
        for row in compose(G, outer, inner):
            assert all(entry == {} for entry in row)


def test_efficient_norm_sizes():
    G, (_, d2, _) = eff_differentials(4)
    assert sum(d2[0][0].values()) == 4  # N_g
    assert sum(d2[1][1].values()) == 2  # N_h


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_integral_cohomology_tables(n):
    Z = GIntModule.trivial(GroupPresentation.dihedral(n))
    h1, h2, h3 = (cohomology_eff(Z, i).invariants for i in (1, 2, 3))
    assert h1 == []
    if n % 2:
        assert h2 == [2]
        assert h3 == []
    else:
        assert h2 == [2, 2]
        assert h3 == [2]


def test_non_dihedral_directed_to_standard():
    Z = GIntModule.trivial(GroupPresentation.cyclic(4))
    with pytest.raises(UsageError, match="cohomology_std"):
        cohomology_eff(Z, 1)


def test_inconsistent_action_rejected():
    d3 = GroupPresentation.dihedral(3)
    with pytest.raises(UsageError, match="relations"):
        GIntModule(d3, 1, {"g": [[-1]], "h": [[1]]})


# ---------------------------------------------------------------------------
# The rank-3 Picard lattice of D4
# ---------------------------------------------------------------------------


class TestPicD4:
    def test_h1_is_z4(self, pic_d4):
        assert cohomology_eff(pic_d4, 1).invariants == [4]

    def test_printed_pair_generates(self, pic_d4):
        H = cohomology_eff(pic_d4, 1)
        c = EffCocycle(1, [[1, 1, 1], [0, 1, 0]])
        assert is_eff_cocycle(pic_d4, c)
        (k,) = H.class_of(c.flat())
        assert k in (1, 3)
        diff = [a - k * b for a, b in zip(c.flat(), H.generators[0])]
        assert H.is_coboundary(diff)

    def test_standard_complex_agrees(self, pic_d4):
        for i in (1, 2):
            assert cohomology_std(pic_d4, i).invariants == cohomology_eff(pic_d4, i).invariants

    def test_degree_one_round_trip(self, pic_d4):
        H = cohomology_eff(pic_d4, 1)
        Hs = cohomology_std(pic_d4, 1)
        c = EffCocycle(1, [[1, 1, 1], [0, 1, 0]])
        f = eff_to_std_deg1(pic_d4, c)
        assert Hs.class_order(std_vector(pic_d4, f)) == 4
        back = std_to_eff_deg1(pic_d4, f)
        assert back.components == c.components
        assert H.class_order(back.flat()) == 4


def test_sigma1_on_generators(d4):
    assert sigma1(d4, d4.gen("g")) == ({0: -1}, {})
    assert sigma1(d4, d4.gen("h")) == ({}, {0: -1})
    assert sigma1(d4, 0) == ({}, {})


# ---------------------------------------------------------------------------
# Efficient vs standard on assorted lattices
# ---------------------------------------------------------------------------


def _fixture_modules():
    out = []
    for n in (2, 3):
        G = GroupPresentation.dihedral(n)
        out += [GIntModule.trivial(G), sign_module(G), coset_module(G)]
    return out


@pytest.mark.parametrize("M", _fixture_modules(), ids=lambda M: f"{M.group.name}-r{M.rank}")
def test_eff_matches_std_on_fixtures(M):
    for i in (1, 2):
        assert cohomology_eff(M, i).invariants == cohomology_std(M, i).invariants


@pytest.mark.parametrize("seed", range(20))
def test_eff_matches_std_on_random_lattices(seed):
    rng = random.Random(seed)
    G = GroupPresentation.dihedral(rng.choice([2, 3]))
    pieces = [GIntModule.trivial(G), sign_module(G), coset_module(G)]
    M = rng.choice(pieces)
    if M.rank < 3:
        M = direct_sum(M, rng.choice(pieces[:2]))
    M = conjugate(M, random_unimodular(rng, M.rank))
    assert M.rank <= 4
    for i in (1, 2):
        assert cohomology_eff(M, i).invariants == cohomology_std(M, i).invariants


# ---------------------------------------------------------------------------
# Degree 2
# ---------------------------------------------------------------------------


class TestDegreeTwo:
    @pytest.mark.parametrize("n", [3, 4])
    def test_h2_generators_survive_conversion(self, n):
        G = GroupPresentation.dihedral(n)
        Z = GIntModule.trivial(G)
        H = cohomology_eff(Z, 2)
        Hs = cohomology_std(Z, 2)
        ops = ModuleOps(Z)
        for gen in H.generators:
            triple = [[gen[0]], [gen[1]], [gen[2]]]
            f = eff_to_std_deg2(G, ops, triple)
            assert cocycle_identity_failure(G, ops, f) is None
            assert Hs.class_order(std_vector(Z, f)) == H.class_order(gen)

    def test_rotation_carry_at_n(self):
        G = GroupPresentation.dihedral(4)
        ops = ModuleOps(GIntModule.trivial(G))
        f = eff_to_std_deg2(G, ops, [[2], [1], [0]])
        assert f.table[(1, 3)] == ops.inverse([2])
        assert f.table[(2, 2)] == ops.inverse([2])
        assert f.table[(1, 2)] == ops.unit()
        assert cocycle_identity_failure(G, ops, f) is None

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_coboundary_witness(self, n):
        G = GroupPresentation.dihedral(n)
        M = regular_module(G)
        ops = ModuleOps(M)
        rng = random.Random(n)
        r1 = [rng.randint(-3, 3) for _ in range(M.rank)]
        s1 = [rng.randint(-3, 3) for _ in range(M.rank)]
        triple = coboundary_triple(G, ops, r1, s1)
        f = eff_to_std_deg2(G, ops, triple)
        assert cocycle_identity_failure(G, ops, f) is None
        psi = coboundary_witness_deg1_units(G, ops, r1, s1, target=triple)
        assert coboundary_deg1(G, ops, psi).table == f.table

    def test_witness_of_zero(self, d4):
        M = regular_module(d4)
        ops = ModuleOps(M)
        zero = ops.unit()
        psi = coboundary_witness_deg1_units(d4, ops, zero, zero)
        assert all(v == zero for v in psi.table.values())
        f = eff_to_std_deg2(d4, ops, (zero, zero, zero))
        assert all(v == zero for v in f.table.values())

    def test_witness_value_at_h(self, d4):
        M = regular_module(d4)
        ops = ModuleOps(M)
        s1 = [0, 1, 0, 0, 0, 0, 0, 0]
        psi = coboundary_witness_deg1_units(d4, ops, ops.unit(), s1)
        assert psi.table[(d4.gen("h"),)] == ops.inverse(s1)

    def test_carry_term(self, d4):
        Z = GIntModule.trivial(d4)
        ops = ModuleOps(Z)
        f = eff_to_std_deg2(d4, ops, ([2], [0], [1]))
        g = d4.gen("g")
        assert f.table[(d4.power(g, 3), g)] == [-2]
        assert f.table[(d4.power(g, 2), g)] == [0]

    def test_norm_relation_failure(self, d4):
        ops = ModuleOps(GIntModule.trivial(d4))
        with pytest.raises(CocycleConditionError, match="N_h"):
            eff_to_std_deg2(d4, ops, ([1], [0], [0]))

    def test_fixedness_failure(self, d4):
        M = regular_module(d4)
        ops = ModuleOps(M)
        r = [0, 1, 0, 0, 0, 0, 0, 0]
        with pytest.raises(CocycleConditionError, match="fixed by g"):
            eff_to_std_deg2(d4, ops, (r, ops.unit(), ops.unit()))
