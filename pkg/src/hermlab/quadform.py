"""Diagonal quadratic forms over tower fields.

Isotropy is decided by residue recursion: over a valued layer the form
splits into a unit part and a uniformizer-twisted part, and it is
isotropic exactly when one of the residue parts is.  Over the height-one
tower a second, fully independent decider checks the same question from
concrete rational representatives through classical dimension /
discriminant / Hasse-symbol criteria, so the two paths can be compared
form by form.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement

from .errors import EngineError, FieldMismatchError, UnsupportedFieldError
from .fields import (
    CDVField,
    FieldDesc,
    FiniteField,
    SquareClass,
    class_to_str,
    field_to_str,
    is_finite_based,
    minus_one,
    one,
    smallest_nonresidue,
    sqcl_group,
)


@dataclass(frozen=True)
class QuadForm:
    """Diagonal form with square-class entries; entries are never zero."""

    field: FieldDesc
    entries: tuple

    def __post_init__(self):
        for a in self.entries:
            if a.field != self.field:
                raise FieldMismatchError("form entry over the wrong field")

    @property
    def dim(self) -> int:
        return len(self.entries)

    def scaled(self, c: SquareClass) -> "QuadForm":
        return QuadForm(self.field, tuple(c * a for a in self.entries))

    def __str__(self) -> str:
        return "<" + ",".join(class_to_str(a) for a in self.entries) + ">"


def make_form(k: FieldDesc, entries) -> QuadForm:
    return QuadForm(k, tuple(entries))


def qf_is_isotropic(q: QuadForm) -> bool:
    isotropic, _ = qf_isotropy_path(q)
    return isotropic


def qf_isotropy_path(q: QuadForm):
    """Decide isotropy and log every residue split on the way down."""
    if not is_finite_based(q.field):
        raise UnsupportedFieldError("isotropy is undecidable over a "
                                    "global-function-field base")
    path = []
    return _isotropic_rec(q, path), path


def _isotropic_rec(q: QuadForm, path: list) -> bool:
    k = q.field
    if q.dim == 0:
        path.append({"field": field_to_str(k), "form": str(q),
                     "isotropic": False, "reason": "empty form"})
        return False
    if isinstance(k, FiniteField):
        return _finite_base_case(q, path)
    unit_part, odd_part = _springer_split(q)
    path.append({"field": field_to_str(k), "form": str(q),
                 "unit_part": str(unit_part), "twisted_part": str(odd_part)})
    return _isotropic_rec(unit_part, path) or _isotropic_rec(odd_part, path)


def _springer_split(q: QuadForm):
    k: CDVField = q.field
    units, odd = [], []
    for a in q.entries:
        unit, vpar = a.decompose()
        (odd if vpar else units).append(unit)
    return QuadForm(k.residue, tuple(units)), QuadForm(k.residue, tuple(odd))


def _finite_base_case(q: QuadForm, path: list) -> bool:
    k: FiniteField = q.field
    if q.dim >= 3:
        verdict, reason = True, "three or more variables over a finite field"
    elif q.dim == 2:
        a, b = q.entries
        verdict = (minus_one(k) * a * b).is_one
        reason = "binary form, -ab square" if verdict else "binary form, -ab nonsquare"
    else:
        verdict, reason = False, "at most one variable"
    path.append({"field": field_to_str(k), "form": str(q),
                 "isotropic": verdict, "reason": reason})
    return verdict


# ---------------------------------------------------------------------------
# independent decider over the height-one tower

def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ValueError("legendre symbol of a multiple of p")
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def _split_valuation(x: Fraction, p: int):
    """x = p**v * unit; returns (v, unit numerator * unit denominator mod p)."""
    num, den = x.numerator, x.denominator
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v, num * pow(den, p - 2, p) % p


def hilbert_symbol(a: Fraction, b: Fraction, p: int) -> int:
    """Hilbert symbol over the p-adic rationals, p odd."""
    if a == 0 or b == 0:
        raise ValueError("hilbert symbol needs nonzero arguments")
    alpha, s = _split_valuation(Fraction(a), p)
    beta, t = _split_valuation(Fraction(b), p)
    result = 1
    if (alpha * beta) % 2 and (p - 1) // 2 % 2:
        result = -result
    if beta % 2:
        result *= legendre(s, p)
    if alpha % 2:
        result *= legendre(t, p)
    return result


def is_square_rational(x: Fraction, p: int) -> bool:
    v, u = _split_valuation(Fraction(x), p)
    return v % 2 == 0 and legendre(u, p) == 1


def rational_lift(a: SquareClass) -> Fraction:
    """Concrete rational representative of a class over the height-one tower."""
    k = a.field
    if not (isinstance(k, CDVField) and isinstance(k.residue, FiniteField)
            and k.residue.e == 1):
        raise UnsupportedFieldError("rational lifts exist over the height-one tower only")
    p = k.residue.p
    unit, vpar = a.data
    value = Fraction(smallest_nonresidue(p) if unit.data else 1)
    if vpar:
        value *= p
    return value


def qf_is_isotropic_oracle(q: QuadForm) -> bool:
    """Classical criterion from dimension, discriminant and Hasse symbol.

    Shares no code with the residue recursion: entries are lifted to
    actual rationals and all invariants are computed with Legendre
    symbols.
    """
    k = q.field
    if not (isinstance(k, CDVField) and isinstance(k.residue, FiniteField)
            and k.residue.e == 1):
        raise UnsupportedFieldError("the invariant decider runs over the "
                                    "height-one tower only")
    p = k.residue.p
    coeffs = [rational_lift(a) for a in q.entries]
    n = len(coeffs)
    if n <= 1:
        return False
    d = Fraction(1)
    for c in coeffs:
        d *= c
    eps = 1
    for i in range(n):
        for j in range(i + 1, n):
            eps *= hilbert_symbol(coeffs[i], coeffs[j], p)
    if n == 2:
        return is_square_rational(-d, p)
    if n == 3:
        return eps == hilbert_symbol(Fraction(-1), -d, p)
    if n == 4:
        return (not is_square_rational(d, p)) or eps == hilbert_symbol(Fraction(-1), Fraction(-1), p)
    return True


# ---------------------------------------------------------------------------
# u-invariant by exhaustive search

def u_quadratic(k: FieldDesc) -> int:
    """Largest dimension of an anisotropic diagonal form, by enumeration.

    Entry tuples range over unordered selections of square classes;
    reordering entries never changes isotropy.  The search stops at the
    first dimension where every form is isotropic, and a hard cap of
    twice the class count guards against runaway recursion bugs.
    """
    if not is_finite_based(k):
        raise UnsupportedFieldError("u search needs a finite-based tower")
    classes = sqcl_group(k)
    cap = 2 * len(classes)
    dim = 1
    while True:
        found_anisotropic = False
        for entries in combinations_with_replacement(classes, dim):
            if not qf_is_isotropic(QuadForm(k, entries)):
                found_anisotropic = True
                break
        if not found_anisotropic:
            return dim - 1
        if dim > cap:
            raise EngineError(f"anisotropic forms persist past the cap {cap} "
                              f"over {field_to_str(k)}")
        dim += 1


def norm_form(a: SquareClass, b: SquareClass, k: FieldDesc) -> QuadForm:
    """The four-dimensional form <1, -a, -b, ab> with -1 folded into classes."""
    if a.field != k or b.field != k:
        raise FieldMismatchError("symbol slots over the wrong field")
    m1 = minus_one(k)
    return QuadForm(k, (one(k), m1 * a, m1 * b, a * b))


def albert_form(s1, s2, k: FieldDesc) -> QuadForm:
    """Six-dimensional form <a1, b1, -a1b1, -a2, -b2, a2b2> of a symbol pair."""
    (a1, b1), (a2, b2) = s1, s2
    for c in (a1, b1, a2, b2):
        if c.field != k:
            raise FieldMismatchError("symbol slots over the wrong field")
    m1 = minus_one(k)
    return QuadForm(k, (a1, b1, m1 * a1 * b1, m1 * a2, m1 * b2, a2 * b2))
