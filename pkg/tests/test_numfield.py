"""
test_numfield.py — Tests for global number fields and quartic classification.

Covers:
  - Arithmetic in tensor-product fields: products, inverses, norms, minimal polynomials
  - Field certification rejects algebras with zero divisors
  - Automorphisms from generator images, homomorphism check
  - Splitting fields of every explicit family and their root permutations
  - Family rejection: reducible P, square a, √a outside K
  - Quartic Galois cases by cubic resolvent, including A4 and L outside K
  - Abstract permutation models

Run with:
    pytest tests/test_numfield.py -v
"""

from __future__ import annotations

import pytest

from chatelet_brauer.errors import (
    ReduciblePolynomialError,
    UnsupportedFamilyError,
    UsageError,
)
from chatelet_brauer.exact import coeffs_low_first, parse_poly
from chatelet_brauer.gcoh import GroupPresentation
from chatelet_brauer.numfield import (
    FieldAut,
    NumberField,
    build_splitting_field,
    dihedral_root_model,
    factorization_patterns,
    family_of,
    group_automorphisms,
    group_permutations,
    patterns_consistent,
    quartic_case_model,
    quartic_galois_case,
    relative_norm,
)

# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------


@pytest.fixture
def gaussian() -> NumberField:
    return NumberField([("i", [1, 0, 1])])


@pytest.fixture
def biquad() -> NumberField:
    return NumberField([("u", [-2, 0, 1]), ("v", [-3, 0, 1])])


# ---------------------------------------------------------------------------
# Arithmetic
# ---------------------------------------------------------------------------


class TestArithmetic:
    def test_gaussian_units(self, gaussian):
        i = gaussian.gen("i")
        assert i * i == -1
        assert i**4 == 1
        assert i**-1 == -i

    def test_inverse_and_norm(self, gaussian):
        i = gaussian.gen("i")
        x = 1 + i
        assert x * (1 / x) == 1
        assert 1 / x == (1 - i) / 2
        assert gaussian.norm(x) == 2

    def test_minpoly_of_primitive_element(self, biquad):
        theta = biquad.gen("u") + biquad.gen("v")
        assert coeffs_low_first(biquad.minpoly(theta)) == [1, 0, -10, 0, 1]
        assert biquad.minpoly(biquad.gen("u") * biquad.gen("v")).degree() == 2

    def test_rational_elements(self, biquad):
        u = biquad.gen("u")
        assert (u * u).is_rational()
        assert (u * u).rational() == 2
        with pytest.raises(UsageError, match="not rational"):
            u.rational()

    def test_zero_has_no_inverse(self, gaussian):
        with pytest.raises(ZeroDivisionError):
            gaussian.zero() ** -1

    def test_check_field_accepts_field(self, biquad):
        theta = biquad.check_field()
        assert biquad.charpoly(theta).is_irreducible

    def test_check_field_rejects_product_algebra(self):
        split = NumberField([("u", [-2, 0, 1]), ("v", [-8, 0, 1])])
        with pytest.raises(UsageError, match="not a field"):
            split.check_field()

    def test_non_monic_minpoly_rejected(self):
        with pytest.raises(UsageError, match="monic"):
            NumberField([("x", [1, 0, 2])])


# ---------------------------------------------------------------------------
# Automorphisms
# ---------------------------------------------------------------------------


class TestAutomorphisms:
    def test_conjugation(self, gaussian):
        i = gaussian.gen("i")
        conj = FieldAut(gaussian, {"i": -i})
        assert conj(3 + 2 * i) == 3 - 2 * i
        assert conj.compose(conj).is_identity()

    def test_invalid_image(self, gaussian):
        with pytest.raises(UsageError, match="minimal polynomial"):
            FieldAut(gaussian, {"i": gaussian.one()})

    def test_group_extension(self, biquad):
        u, v = biquad.gen("u"), biquad.gen("v")
        G = GroupPresentation.dihedral(2)
        auts = group_automorphisms(biquad, G, {"g": {"u": -u, "v": v}, "h": {"u": u, "v": -v}})
        gh = G.evaluate("gh")
        assert auts[gh](u * v) == u * v
        assert auts[gh](u + v) == -u - v

    def test_non_homomorphism_detected(self, gaussian):
        i = gaussian.gen("i")
        with pytest.raises(UsageError, match="disagree"):
            group_automorphisms(gaussian, GroupPresentation.cyclic(3), {"g": {"i": -i}})


# ---------------------------------------------------------------------------
# Splitting fields
# ---------------------------------------------------------------------------


class TestSplittingFields:
    @pytest.mark.parametrize(
        "text,family",
        [
            ("t^2-2", "quadratic"),
            ("t^4-22", "dihedral"),
            ("2t^3+5", "dihedral"),
            ("t^4-10t^2+1", "biquadratic"),
            ("t^4+t^3+t^2+t+1", "cyclotomic5"),
            ("t^4-t-1", ""),
            ("t^4+1", "biquadratic"),
            ("t^4+9", "biquadratic"),
            ("t^6+3", "dihedral"),
        ],
    )
    def test_family_of(self, text, family):
        assert family_of(parse_poly(text)) == family

    def test_x_m_field(self):
        sf = build_splitting_field(parse_poly("t^4-22"), -1)
        assert sf.K.dim == 8
        assert sf.group.name == "D4"
        g, h = sf.group.gen("g"), sf.group.gen("h")
        assert sf.point_permutations[g] == (2, 3, 1, 0, 4, 5)
        assert sf.point_permutations[h] == (0, 1, 3, 2, 5, 4)
        assert sf.sqrt_a == sf.K.gen("i")
        assert sf.root_stabilizer(0) == [0, h]

    def test_quartic_binomial_with_real_sqrt_a(self):
        sf = build_splitting_field(parse_poly("t^4-22"), 22)
        g = sf.group.gen("g")
        assert sf.sqrt_a * sf.sqrt_a == 22
        assert sf.negates_sqrt_a(g)
        assert not sf.negates_sqrt_a(sf.group.gen("h"))

    def test_pure_cubic(self):
        sf = build_splitting_field(parse_poly("t^3-2"), -3)
        assert sf.group.order == 6
        for e in sf.roots:
            assert e**3 == 2
        g = sf.group.gen("g")
        assert not sf.negates_sqrt_a(g)
        assert sf.negates_sqrt_a(sf.group.gen("h"))
        rotations = sf.group.subgroup([g])
        assert sf.relative_norm(rotations, sf.roots[0]) == 2

    def test_pure_sextic(self):
        sf = build_splitting_field(parse_poly("t^6-2"), -3)
        assert sf.K.dim == 12
        assert len(set(sf.point_permutations)) == 12

    def test_leading_coefficient_kept(self):
        sf = build_splitting_field(parse_poly("2t^3+5"), -3)
        for e in sf.roots:
            assert 2 * e**3 + 5 == 0
        assert sf.leading == 2

    def test_quadratic(self):
        sf = build_splitting_field(parse_poly("t^2-2"), -1)
        g, h = sf.group.gen("g"), sf.group.gen("h")
        assert sf.point_permutations[g] == (1, 0, 2, 3)
        assert sf.point_permutations[h] == (0, 1, 3, 2)

    def test_biquadratic(self):
        sf = build_splitting_field(parse_poly("t^4-10t^2+1"), 2)
        assert sf.group.order == 4
        assert sf.sqrt_a == sf.K.gen("v")

    def test_cyclotomic(self):
        sf = build_splitting_field(parse_poly("t^4+t^3+t^2+t+1"), 5)
        g = sf.group.gen("g")
        assert sf.point_permutations[g] == (1, 3, 0, 2, 5, 4)
        assert not sf.negates_sqrt_a(sf.group.power(g, 2))

    def test_reducible_rejected(self):
        with pytest.raises(ReduciblePolynomialError):
            build_splitting_field(parse_poly("t^2-1"), -1)

    def test_square_a_rejected(self):
        with pytest.raises(UsageError, match="square"):
            build_splitting_field(parse_poly("t^2-2"), 4)

    @pytest.mark.parametrize("text", ["t^4+1", "t^4+9"])
    def test_binomial_with_square_constant_is_v4(self, text):
        sf = build_splitting_field(parse_poly(text), -1)
        assert sf.family == "biquadratic"
        assert sf.group.order == 4
        assert sf.sqrt_a * sf.sqrt_a == -1

    def test_collapsed_sextic_is_unsupported_not_reducible(self):
        with pytest.raises(UnsupportedFamilyError, match="degree below 12") as info:
            build_splitting_field(parse_poly("t^6+3"), -3)
        assert not isinstance(info.value, ReduciblePolynomialError)
        assert "- -" not in str(info.value)

    def test_sqrt_a_outside_field(self):
        with pytest.raises(UnsupportedFamilyError):
            build_splitting_field(parse_poly("t^4-22"), 3)

    def test_unsupported_shape(self):
        with pytest.raises(UnsupportedFamilyError, match="quartic classification"):
            build_splitting_field(parse_poly("t^4-t-1"), -283)

    def test_residue_field_equals_l(self):
        with pytest.raises(UnsupportedFamilyError):
            build_splitting_field(parse_poly("t^2+1"), -1)


# ---------------------------------------------------------------------------
# Quartic classification
# ---------------------------------------------------------------------------

QUARTIC_CASES = [
    ("t^4+t^3+t^2+t+1", 5, "C4", "Z4", "0"),
    ("t^4-10t^2+1", 2, "V4", "V4", "Z/2"),
    ("t^4-22", 22, "D4", "D4_L_in_kt", "0"),
    ("t^4-22", -22, "D4", "D4_L_notin_kt_V4quot", "Z/2"),
    ("t^4-22", -1, "D4", "D4_Z4quot", "Z/4"),
    ("t^4-t-1", -283, "S4", "S4", "0"),
]


class TestQuarticCases:
    @pytest.mark.parametrize("text,a,group,label,brauer", QUARTIC_CASES)
    def test_classification(self, text, a, group, label, brauer):
        case = quartic_galois_case(parse_poly(text), a)
        assert case.galois_group == group
        assert case.label == label
        assert case.brauer_type == brauer
        assert case.verified

    def test_a4_is_unverified(self):
        case = quartic_galois_case(parse_poly("t^4+8t+12"), -1)
        assert case.galois_group == "A4"
        assert case.label == "A4"
        assert case.brauer_type == "0"
        assert not case.verified

    @pytest.mark.parametrize(
        "text,a,brauer", [("t^4-22", 2, "0"), ("t^4-10t^2+1", 5, "Z/2")]
    )
    def test_l_outside_k(self, text, a, brauer):
        case = quartic_galois_case(parse_poly(text), a)
        assert case.label == "L_not_in_K"
        assert case.brauer_type == brauer
        assert not case.verified

    def test_subfields_of_x22(self):
        case = quartic_galois_case(parse_poly("t^4-22"), -1)
        assert case.subfields == {"in k_t": 22, "V4 quotient": -22, "Z4 quotient": -1}
        assert "Z/4" in str(case)

    def test_degree_checked(self):
        with pytest.raises(UsageError, match="degree 4"):
            quartic_galois_case(parse_poly("t^3-2"), -3)

    def test_reducible(self):
        with pytest.raises(ReduciblePolynomialError):
            quartic_galois_case(parse_poly("t^4-4"), -1)


# ---------------------------------------------------------------------------
# Permutation models
# ---------------------------------------------------------------------------


class TestModels:
    @pytest.mark.parametrize(
        "text,a,order",
        [
            ("t^4+t^3+t^2+t+1", 5, 4),
            ("t^4-22", -1, 8),
            ("t^4-t-1", -283, 24),
            ("t^4+8t+12", -1, 24),
            ("t^4-22", 2, 16),
        ],
    )
    def test_model_orders(self, text, a, order):
        assert quartic_case_model(quartic_galois_case(parse_poly(text), a)).order == order

    def test_model_matches_explicit_field(self):
        """The Z4-quotient model acts on roots and √a like the X_m splitting field."""
        model = quartic_case_model(quartic_galois_case(parse_poly("t^4-22"), -1))
        sf = build_splitting_field(parse_poly("t^4-22"), -1)
        fixing = sum(1 for s in range(sf.group.order) if not sf.negates_sqrt_a(s))
        gens = {"g": (1, 2, 3, 0, 4, 5), "h": (0, 3, 2, 1, 5, 4)}
        perms = group_permutations(model, gens)
        assert sum(1 for p in perms if p[4] == 4) == fixing == 4

    def test_dihedral_root_model(self):
        G, perms = dihedral_root_model(5)
        assert perms[G.gen("g")] == (1, 2, 3, 4, 0, 5, 6)
        assert perms[G.gen("h")] == (0, 4, 3, 2, 1, 6, 5)
        for x in range(G.order):
            for y in range(G.order):
                px, py = perms[x], perms[y]
                assert perms[G.mul(x, y)] == tuple(px[py[k]] for k in range(7))


# ---------------------------------------------------------------------------
# Norms and Frobenius cross-check
# ---------------------------------------------------------------------------


class TestNorms:
    def test_trivial_subgroup(self, gaussian):
        i = gaussian.gen("i")
        ident = FieldAut(gaussian, {"i": i})
        assert relative_norm([ident], 2 + i) == 2 + i

    def test_gaussian_norm_of_i(self, gaussian):
        i = gaussian.gen("i")
        conj = FieldAut(gaussian, {"i": -i})
        ident = FieldAut(gaussian, {"i": i})
        assert relative_norm([ident, conj], i) == 1

    def test_rotation_norm_of_fourth_root(self):
        sf = build_splitting_field(parse_poly("t^4-22"), -1)
        rotations = [sf.auts[s] for s in sf.group.subgroup([sf.group.gen("g")])]
        assert relative_norm(rotations, sf.K.gen("alpha")) == -22

    def test_norm_is_invariant(self):
        sf = build_splitting_field(parse_poly("t^3-2"), -3)
        h_group = [sf.auts[s] for s in sf.group.subgroup([sf.group.gen("h")])]
        x = sf.roots[1] + sf.sqrt_a
        n = relative_norm(h_group, x)
        for sigma in h_group:
            assert sigma(n) == n


@pytest.mark.parametrize("text,a,_group,_label,_brauer", QUARTIC_CASES)
def test_frobenius_patterns_agree(text, a, _group, _label, _brauer):
    P = parse_poly(text)
    assert patterns_consistent(quartic_galois_case(P, a), P)


def test_frobenius_patterns_rule_out_smaller_group():
    P = parse_poly("t^4-t-1")
    seen = set(factorization_patterns(P).values())
    assert (1, 3) in seen or (4,) in seen
