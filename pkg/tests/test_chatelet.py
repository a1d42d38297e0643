"""
test_chatelet.py — Tests for surface-level assembly.

Covers:
  - Galois lattices Div, Pic, R for explicit, declared and modelled actions
  - Br X / Br_0 X over the quartic case table and the dihedral family t^n − m
  - Catalogued unit triples and the divisor-matching search
  - Class order of the trivial class
  - Hilbert symbols and the splitting certificate for K^<gh>
  - Local degree test for H^3
  - Z_2-solubility and the candidate list for x² + y² + t⁴ = m
  - Rejection of reducible P

Run with:
    pytest tests/test_chatelet.py -v
"""

from __future__ import annotations

import pytest
from sympy import Rational

from chatelet_brauer.chatelet import (
    brauer_quotient,
    build_modules,
    check_splitting,
    divisor_matching_search,
    explicit_generator,
    family_spec,
    h3_trivial_at,
    hilbert_symbol,
    lift_cocycle,
    sums_of_squares_and_fourth_power,
    unit_ops,
    verify_class_order,
    x_m_candidates,
    x_m_locally_soluble_at_2,
)
from chatelet_brauer.errors import ReduciblePolynomialError, UnsupportedFamilyError, UsageError
from chatelet_brauer.gcoh import EffCocycle, check_triple, cohomology_eff, orbit_product
from chatelet_brauer.models import SurfaceSpec

# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------


@pytest.fixture
def cube_root_two() -> SurfaceSpec:
    return SurfaceSpec.from_text(-3, 1, "t^3-2", label="t^3-2")


@pytest.fixture
def declared_quintic() -> SurfaceSpec:
    return SurfaceSpec.from_text(-1, 1, "t^5-7", base="declared-dihedral")


# ---------------------------------------------------------------------------
# Galois lattices
# ---------------------------------------------------------------------------


class TestBuildModules:
    def test_x22_ranks(self, x22: SurfaceSpec):
        mods = build_modules(x22)
        assert mods.source == "field"
        assert mods.group.order == 8
        assert (mods.div.rank, mods.pic.rank, mods.R.rank) == (8, 3, 5)

    def test_quadratic_pic_rank_one(self):
        spec = SurfaceSpec.from_text(3, 1, "t^2-2")
        mods = build_modules(spec)
        assert mods.pic.rank == 1
        assert brauer_quotient(spec).type == "Z/2"

    def test_declared_quintic_div_acyclic(self, declared_quintic: SurfaceSpec):
        mods = build_modules(declared_quintic)
        assert mods.source == "declared"
        assert mods.div.rank == 10
        assert cohomology_eff(mods.div, 1).is_trivial()

    def test_quartic_without_field_uses_model(self):
        spec = SurfaceSpec.from_text(-283, 1, "t^4-t-1")
        assert build_modules(spec).source == "model"

    def test_memoized(self, x22: SurfaceSpec):
        assert build_modules(x22) is build_modules(family_spec(22))

    def test_r_relations_map_to_zero_in_pic(self, x22: SurfaceSpec):
        mods = build_modules(x22)
        for v in mods.relations:
            image = [sum(row[k] * v[k] for k in range(len(v))) for row in mods.quotient]
            assert image == [0] * mods.pic.rank


# ---------------------------------------------------------------------------
# Br X / Br_0 X
# ---------------------------------------------------------------------------


class TestBrauerQuotient:
    def test_x22_is_z4(self, x22: SurfaceSpec):
        bq = brauer_quotient(x22)
        assert bq.type == "Z/4"
        assert bq.method == "efficient"
        assert len(bq.generators) == 1

    def test_biquadratic_is_z2(self):
        bq = brauer_quotient(SurfaceSpec.from_text(2, 1, "t^4-10*t^2+1"))
        assert bq.type == "Z/2"
        assert bq.method == "standard"

    def test_s4_quartic_is_trivial(self):
        bq = brauer_quotient(SurfaceSpec.from_text(-283, 1, "t^4-t-1"))
        assert bq.type == "0"
        assert bq.method == "classification"
        assert bq.generators == []

    @pytest.mark.parametrize(
        "a, P, expected",
        [
            (-3, "t^3-2", "Z/3"),
            (-1, "t^4-22", "Z/4"),
            (-3, "t^6-2", "Z/6"),
        ],
    )
    def test_dihedral_family(self, a, P, expected):
        assert brauer_quotient(SurfaceSpec.from_text(a, 1, P)).type == expected

    @pytest.mark.parametrize("P", ["t^4+1", "t^4+9"])
    def test_binomial_v4_quartic(self, P):
        bq = brauer_quotient(SurfaceSpec.from_text(-1, 1, P))
        assert bq.type == "Z/2"
        assert bq.case.label == "V4"

    def test_collapsed_sextic_is_unsupported(self):
        with pytest.raises(UnsupportedFamilyError):
            brauer_quotient(SurfaceSpec.from_text(-3, 1, "t^6+3"))

    def test_declared_quintic_is_z5(self, declared_quintic: SurfaceSpec):
        assert brauer_quotient(declared_quintic).type == "Z/5"

    def test_reducible_rejected(self):
        spec = SurfaceSpec.from_text(-1, 1, "t^4-1")
        with pytest.raises(ReduciblePolynomialError, match="quaternion"):
            brauer_quotient(spec)

    def test_reducible_is_usage_error(self):
        with pytest.raises(UsageError):
            build_modules(SurfaceSpec.from_text(2, 1, "t^2-1"))


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------


class TestExplicitGenerator:
    def test_x22_catalogued(self, x22: SurfaceSpec):
        cls = explicit_generator(x22)
        assert cls.provenance == "catalogued"
        assert cls.order_in_quotient == 4
        assert [u.divisor() for u in cls.unit_triple] == [
            list(v) for v in cls.divisor_triple.components
        ]

    def test_x22_norm_identity(self, x22: SurfaceSpec):
        cls = explicit_generator(x22)
        mods = build_modules(x22)
        ops = unit_ops(x22)
        G = mods.group
        g, h = G.gen("g"), G.gen("h")
        r, s, t = cls.unit_triple
        check_triple(G, ops, r, s, t)
        assert ops.equal(orbit_product(G, ops, r, h), orbit_product(G, ops, ops.op(s, t), g))

    def test_x22_triple_shape(self, x22: SurfaceSpec):
        r, s, t = explicit_generator(x22).unit_triple
        assert r.u1 == 1 and not any(r.roots)
        assert s.roots == (1, 0, 0, 0) and s.u1 == 0
        assert t.is_constant()
        assert r.const == -44

    def test_monic_cubic(self, cube_root_two: SurfaceSpec):
        cls = explicit_generator(cube_root_two)
        r, s, t = cls.unit_triple
        assert cls.order_in_quotient == 3
        assert (r.u1, s.roots, t.is_constant()) == (1, (1, 0, 0), True)
        assert r.const == 1 and s.const == 1

    def test_non_dihedral_group_rejected(self):
        spec = SurfaceSpec.from_text(-283, 1, "t^4-t-1")
        with pytest.raises(UnsupportedFamilyError, match="dihedral"):
            explicit_generator(spec)

    def test_zero_cocycle_lifts_to_trivial_triple(self, x22: SurfaceSpec):
        mods = build_modules(x22)
        zero = EffCocycle(1, [[0] * mods.pic.rank, [0] * mods.pic.rank])
        cls = lift_cocycle(x22, zero)
        assert cls.provenance == "trivial"
        assert all(u.is_constant() and u.const == 1 for u in cls.unit_triple)


class TestDivisorMatchingSearch:
    def test_zero_target(self, x22: SurfaceSpec):
        zero = EffCocycle(2, [[0] * 8 for _ in range(3)])
        found = divisor_matching_search(x22, zero)
        assert found is not None
        assert all(u.is_constant() and u.const == 1 for u in found)

    def test_recovers_x22_divisors(self, x22: SurfaceSpec):
        target = explicit_generator(x22).divisor_triple
        found = divisor_matching_search(x22, target)
        assert found is not None
        assert [u.divisor() for u in found] == [list(v) for v in target.components]

    def test_monic_cubic_within_exponent_bound_one(self, cube_root_two: SurfaceSpec):
        target = explicit_generator(cube_root_two).divisor_triple
        found = divisor_matching_search(cube_root_two, target, exponent_bound=1)
        assert found is not None
        assert found[0].u1 == 1

    def test_exponents_over_bound(self, x22: SurfaceSpec):
        target = explicit_generator(x22).divisor_triple
        scaled = EffCocycle(2, [[3 * k for k in v] for v in target.components])
        assert divisor_matching_search(x22, scaled, exponent_bound=2) is None


class TestClassOrder:
    def test_trivial_class(self, x22: SurfaceSpec):
        mods = build_modules(x22)
        zero = EffCocycle(1, [[0] * mods.pic.rank, [0] * mods.pic.rank])
        report = verify_class_order(x22, lift_cocycle(x22, zero))
        assert report.cocycle_order == 1
        assert report.quotient_order == 1


# ---------------------------------------------------------------------------
# Global checks
# ---------------------------------------------------------------------------


class TestHilbertSymbol:
    @pytest.mark.parametrize(
        "a, b, p, expected",
        [
            (-1, -1, 0, -1),
            (-1, -1, 2, -1),
            (-1, -1, 3, 1),
            (2, 3, 3, -1),
            (2, 3, 2, -1),
            (2, 3, 0, 1),
            (-1, 22, 11, -1),
            (5, 5, 5, 1),
        ],
    )
    def test_values(self, a, b, p, expected):
        assert hilbert_symbol(a, b, p) == expected

    def test_rational_arguments(self):
        assert hilbert_symbol(Rational(-1, 4), Rational(-9, 25), 2) == -1

    def test_zero_rejected(self):
        with pytest.raises(UsageError, match="zero"):
            hilbert_symbol(0, 3, 3)


class TestCheckSplitting:
    @pytest.mark.parametrize("m", [22, 43, 67, 70, 78, 93])
    def test_x_m_certified(self, m: int):
        cert = check_splitting(family_spec(m))
        assert cert is not None
        assert cert.fixed_field.degree() == 4
        assert 0 in cert.ramified

    def test_real_fixed_field_inconclusive(self):
        spec = SurfaceSpec.from_text(-1, -1, "t^4+22")
        assert check_splitting(spec) is None

    def test_already_split(self, cube_root_two: SurfaceSpec):
        cert = check_splitting(cube_root_two)
        assert cert is not None
        assert cert.ramified == []

    def test_certificate_text(self, x22: SurfaceSpec):
        text = str(check_splitting(x22))
        assert "=== Splitting certificate ===" in text
        assert "totally imaginary" in text


class TestH3TrivialAt:
    def test_x22_at_two(self, x22: SurfaceSpec):
        assert h3_trivial_at(x22, 2)

    def test_x22_at_five(self, x22: SurfaceSpec):
        assert not h3_trivial_at(x22, 5)


# ---------------------------------------------------------------------------
# x² + y² + t⁴ = m
# ---------------------------------------------------------------------------


class TestFamily:
    @pytest.mark.parametrize(
        "m, expected",
        [(1, True), (7, False), (12, False), (22, True), (28, False), (15, False), (48, True)],
    )
    def test_sums_of_squares_and_fourth_power(self, m: int, expected: bool):
        assert sums_of_squares_and_fourth_power(m) is expected

    def test_nonpositive_rejected(self):
        with pytest.raises(UsageError, match="positive"):
            sums_of_squares_and_fourth_power(0)

    @pytest.mark.parametrize("m, expected", [(22, True), (12, False), (16, False), (7, False)])
    def test_soluble_at_two(self, m: int, expected: bool):
        assert x_m_locally_soluble_at_2(m) is expected

    def test_candidates_prefix(self):
        assert x_m_candidates(180)[:7] == [22, 43, 67, 70, 78, 93, 177]

    def test_family_spec(self, x22: SurfaceSpec):
        spec = family_spec(22)
        assert spec.label == "X_22"
        assert spec.key == x22.key
        assert "t^4-22" in str(spec)
