"""Isotropy deciders and the quadratic u-invariant search."""

from itertools import combinations_with_replacement, permutations, product

import pytest

from hermlab.errors import UnsupportedFieldError
from hermlab.fields import (
    CDVField,
    FiniteField,
    GlobalFunctionField,
    minus_one,
    parse_class,
    sqcl_group,
    symbolic,
)
from hermlab.quadform import (
    QuadForm,
    albert_form,
    norm_form,
    qf_is_isotropic,
    qf_is_isotropic_oracle,
    qf_isotropy_path,
    u_quadratic,
)

F3 = FiniteField(3)
F5 = FiniteField(5)
K1 = CDVField(F5)
K2 = CDVField(K1)


def form(k, text):
    return QuadForm(k, tuple(parse_class(k, tok) for tok in text.split(",")))


def test_hyperbolic_plane_isotropic_everywhere():
    for k in (F3, F5, K1, K2):
        assert qf_is_isotropic(QuadForm(k, (parse_class(k, "1"), minus_one(k))))


def test_finite_base_cases():
    assert not qf_is_isotropic(form(F5, "1,u"))   # -u stays a nonsquare mod 5
    assert qf_is_isotropic(form(F3, "1,u"))       # -u = 1 mod 3
    assert qf_is_isotropic(form(F5, "1,1,1"))
    assert not qf_is_isotropic(form(F5, "u"))
    assert not qf_is_isotropic(QuadForm(F5, ()))


def test_norm_form_of_division_symbol_anisotropic():
    q = form(K1, "1,u,pi,u*pi")
    assert not qf_is_isotropic(q)
    assert not qf_is_isotropic_oracle(q)


def test_oracle_examples():
    assert qf_is_isotropic_oracle(QuadForm(K1, (parse_class(K1, "1"), minus_one(K1))))
    assert qf_is_isotropic_oracle(form(K1, "1,1,1,1,1"))
    assert not qf_is_isotropic_oracle(form(K1, "1,u"))


def test_oracle_restricted_to_height_one():
    with pytest.raises(UnsupportedFieldError):
        qf_is_isotropic_oracle(form(K2, "1,u"))
    with pytest.raises(UnsupportedFieldError):
        qf_is_isotropic_oracle(form(F5, "1,u"))


@pytest.mark.parametrize("p", [3, 5, 7])
def test_oracle_equivalence_all_small_forms(p):
    k = CDVField(FiniteField(p))
    classes = sqcl_group(k)
    for dim in range(1, 5):
        for entries in product(classes, repeat=dim):
            q = QuadForm(k, entries)
            assert qf_is_isotropic(q) == qf_is_isotropic_oracle(q), str(q)


def test_finite_base_agreement_with_vector_search():
    for p in (3, 5):
        k = FiniteField(p)
        reps = {0: 1, 1: _nonresidue(p)}
        for dim in range(1, 5):
            for entries in product(sqcl_group(k), repeat=dim):
                coeffs = [reps[c.data] for c in entries]
                expected = _vector_search(coeffs, p)
                assert qf_is_isotropic(QuadForm(k, entries)) == expected


def _nonresidue(p):
    return next(n for n in range(2, p) if pow(n, (p - 1) // 2, p) == p - 1)


def _vector_search(coeffs, p):
    for vec in product(range(p), repeat=len(coeffs)):
        if any(vec) and sum(c * x * x for c, x in zip(coeffs, vec)) % p == 0:
            return True
    return False


def test_permutation_and_scaling_invariance():
    classes = sqcl_group(K2)
    for entries in combinations_with_replacement(classes[:5], 3):
        q = QuadForm(K2, entries)
        verdict = qf_is_isotropic(q)
        for perm in permutations(entries):
            assert qf_is_isotropic(QuadForm(K2, perm)) == verdict
        for c in classes:
            assert qf_is_isotropic(q.scaled(c)) == verdict


def test_subform_monotonicity():
    classes = sqcl_group(K1)
    for entries in combinations_with_replacement(classes, 2):
        q = QuadForm(K1, entries)
        if qf_is_isotropic(q):
            for c in classes:
                assert qf_is_isotropic(QuadForm(K1, entries + (c,)))


def test_u_values_and_doubling():
    assert u_quadratic(F5) == 2
    assert u_quadratic(K1) == 4
    assert u_quadratic(K2) == 8
    for base in (FiniteField(3), FiniteField(7)):
        k = base
        for _ in range(2):
            k_up = CDVField(k)
            assert u_quadratic(k_up) == 2 * u_quadratic(k)
            k = k_up


def test_dim_five_forms_all_isotropic_height_one():
    classes = sqcl_group(K1)
    for entries in combinations_with_replacement(classes, 5):
        assert qf_is_isotropic(QuadForm(K1, entries))


def test_gff_base_refused():
    k = CDVField(GlobalFunctionField(9))
    v = symbolic(GlobalFunctionField(9), "v")
    with pytest.raises(UnsupportedFieldError):
        qf_is_isotropic(QuadForm(k, (parse_class(k, "v"),)))
    with pytest.raises(UnsupportedFieldError):
        u_quadratic(k)


def test_norm_form_resolves_minus_one():
    k3 = CDVField(F3)
    q = norm_form(parse_class(k3, "u"), parse_class(k3, "pi"), k3)
    assert str(q) == "<1,1,u*pi,u*pi>"
    assert not qf_is_isotropic(q)
    q5 = norm_form(parse_class(K1, "1"), parse_class(K1, "pi"), K1)
    assert qf_is_isotropic(q5)  # split symbol


def test_albert_form_shapes():
    s = (parse_class(K2, "u"), parse_class(K2, "p"))
    q = albert_form(s, s, K2)
    assert q.dim == 6
    assert qf_is_isotropic(q)  # equal symbols never give a six-dimensional kernel
    one_ = parse_class(K2, "1")
    q2 = albert_form((one_, one_), (one_, one_), K2)
    assert qf_is_isotropic(q2)


def test_isotropy_path_logs_splits():
    verdict, path = qf_isotropy_path(form(K2, "1,u,t,u*t"))
    assert not verdict
    assert path[0]["field"] == "CDV(CDV(F5))"
    assert "unit_part" in path[0]
    assert any(step.get("reason") for step in path)
