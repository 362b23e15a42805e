"""Hermitian descriptors, reductions and exhaustive searches."""

from itertools import combinations_with_replacement, permutations

import pytest

from hermlab.brauer import parse_brauer, trivial_class
from hermlab.errors import InvalidExtensionError, UnsupportedShapeError
from hermlab.fields import CDVField, FiniteField, parse_class, sqcl_group
from hermlab.hermitian import (
    HermFormDesc,
    InvolutionDesc,
    UKind,
    canonical_involution,
    herm_is_isotropic,
    jacobson_quadratic,
    morita_reduce,
    normalize_type,
    sym_dimension,
    transfer_quadratic,
    u_search,
    unitary_involution,
)
from hermlab.quadform import u_quadratic

F5 = FiniteField(5)
K1 = CDVField(F5)
K2 = CDVField(K1)


def pc(k, s):
    return parse_class(k, s)


@pytest.mark.parametrize("kind,eps,expected", [
    ("orthogonal", 1, UKind.PLUS),
    ("symplectic", -1, UKind.PLUS),
    ("orthogonal", -1, UKind.MINUS),
    ("symplectic", 1, UKind.MINUS),
])
def test_first_kind_type_table(kind, eps, expected):
    assert normalize_type(InvolutionDesc(kind), eps) == expected


def test_unitary_type_ignores_sign():
    inv = unitary_involution(pc(K1, "u"))
    assert normalize_type(inv, 1) == UKind.ZERO
    assert normalize_type(inv, -1) == UKind.ZERO


def test_unitary_involution_needs_nontrivial_class():
    with pytest.raises(InvalidExtensionError):
        unitary_involution(pc(K1, "1"))
    with pytest.raises(InvalidExtensionError):
        InvolutionDesc("unitary")


@pytest.mark.parametrize("d,kind,eps,expected", [
    (2, "orthogonal", 1, 3),
    (2, "unitary", 1, 4),
    (2, "orthogonal", -1, 1),
    (2, "symplectic", 1, 1),
    (4, "orthogonal", 1, 10),
    (4, "symplectic", -1, 10),
])
def test_symmetric_element_dimensions(d, kind, eps, expected):
    assert sym_dimension(d, kind, eps) == expected


def test_morita_reduction():
    split = parse_brauer(K1, "(1,pi)")
    reduced, kind = morita_reduce(2, split, UKind.PLUS)
    assert not reduced.symbols and kind == UKind.PLUS
    B = parse_brauer(K1, "(u,pi)")
    assert morita_reduce(1, B, UKind.MINUS)[0] == B
    padded = parse_brauer(K1, "(u,pi);(1,1)")
    assert morita_reduce(3, padded, UKind.ZERO)[0].symbols == B.symbols


def test_trace_reduction_examples():
    B = parse_brauer(K1, "(u,pi)")
    h1 = HermFormDesc(B, canonical_involution(), 1, (pc(K1, "1"),))
    assert str(jacobson_quadratic(h1)) == "<1,u,pi,u*pi>"
    assert not herm_is_isotropic(h1)
    for c in sqcl_group(K1):
        h2 = HermFormDesc(B, canonical_involution(), 1, (pc(K1, "1"), c))
        assert herm_is_isotropic(h2)  # eight quadratic variables over a u=4 tower


def test_trace_reduction_height_two():
    B = parse_brauer(K2, "(u,p)")
    h = HermFormDesc(B, canonical_involution(), 1, (pc(K2, "1"), pc(K2, "t")))
    assert not herm_is_isotropic(h)


def test_transfer_examples():
    lam = pc(K1, "u")
    h1 = HermFormDesc(trivial_class(K1), unitary_involution(lam), 1, (pc(K1, "1"),))
    assert not herm_is_isotropic(h1)
    h2 = HermFormDesc(trivial_class(K1), unitary_involution(lam), 1,
                      (pc(K1, "1"), pc(K1, "pi")))
    assert str(transfer_quadratic(h2)) == "<1,u,pi,u*pi>"
    assert not herm_is_isotropic(h2)
    h3 = HermFormDesc(trivial_class(K1), unitary_involution(lam), 1,
                      tuple(pc(K1, "1") for _ in range(3)))
    assert herm_is_isotropic(h3)


def test_unsupported_shapes_refused():
    B = parse_brauer(K1, "(u,pi)")
    skew = HermFormDesc(B, canonical_involution(), -1, (pc(K1, "1"),))
    assert skew.shape == "unsupported"
    with pytest.raises(UnsupportedShapeError):
        herm_is_isotropic(skew)
    split_shape_a = HermFormDesc(parse_brauer(K1, "(1,pi)"), canonical_involution(),
                                 1, (pc(K1, "1"),))
    with pytest.raises(UnsupportedShapeError):
        herm_is_isotropic(split_shape_a)
    with pytest.raises(UnsupportedShapeError):
        u_search(B, canonical_involution(), -1, K1)


def test_rank_zero_forms_are_anisotropic():
    B = parse_brauer(K1, "(u,pi)")
    assert not herm_is_isotropic(HermFormDesc(B, canonical_involution(), 1, ()))


def test_rank_one_forms_over_division_algebras_anisotropic():
    B = parse_brauer(K1, "(u,pi)")
    for c in sqcl_group(K1):
        assert not herm_is_isotropic(HermFormDesc(B, canonical_involution(), 1, (c,)))
    lam = pc(K2, "t")
    for c in sqcl_group(K2):
        h = HermFormDesc(trivial_class(K2), unitary_involution(lam), 1, (c,))
        assert not herm_is_isotropic(h)


def test_isotropy_invariant_under_permutation_and_scaling():
    B = parse_brauer(K2, "(u,t)")
    classes = sqcl_group(K2)
    for entries in combinations_with_replacement(classes[:4], 3):
        h = HermFormDesc(B, canonical_involution(), 1, entries)
        verdict = herm_is_isotropic(h)
        for perm in permutations(entries):
            assert herm_is_isotropic(
                HermFormDesc(B, canonical_involution(), 1, perm)) == verdict
        for c in classes:
            scaled = tuple(c * e for e in entries)
            assert herm_is_isotropic(
                HermFormDesc(B, canonical_involution(), 1, scaled)) == verdict


def test_search_values():
    assert u_search(parse_brauer(K1, "(u,pi)"), canonical_involution(), 1, K1) == 1
    assert u_search(parse_brauer(K2, "(u,p)"), canonical_involution(), 1, K2) == 2
    assert u_search(parse_brauer(K2, "(u,t)"), canonical_involution(), 1, K2) == 2
    assert u_search(trivial_class(K1), unitary_involution(pc(K1, "u")), 1, K1) == 2


def test_transfer_search_halves_the_quadratic_value():
    cases = [
        (K1, "u"), (K1, "pi"), (K1, "u*pi"),
        (K2, "u"), (K2, "t"), (K2, "p*t"),
        (CDVField(FiniteField(3)), "u"),
    ]
    for k, lam in cases:
        inv = unitary_involution(parse_class(k, lam))
        assert u_search(trivial_class(k), inv, 1, k) == u_quadratic(k) // 2
