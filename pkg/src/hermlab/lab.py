"""Concrete exact arithmetic for checking the constructions on real elements.

Everything here computes with honest numbers: rationals with their
p-valuation, quaternions with explicit coordinates, and truncated series
with tracked precision.  The symbolic engine's claims about involutions,
parameters and residue decompositions are re-derived on elements and
compared, never assumed.

The quaternion presentation is (a, b)/Q_p with i*i = a, j*j = b and
ij = -ji, where a is a nonsquare unit and b has odd valuation; for that
presentation the integral elements are exactly those with p-integral
coordinates, and the residue ring is the quadratic extension of the prime
field generated by the image of i.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction

from .errors import EngineError, PrecisionError, UnsupportedShapeError
from .fields import CDVField, FiniteField, class_of_rational, smallest_nonresidue
from .quadform import QuadForm, qf_is_isotropic, qf_is_isotropic_oracle


def vp(x: Fraction, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("zero has no valuation")
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def residue_rational(x: Fraction, p: int) -> int:
    """Image mod p of a p-integral rational."""
    x = Fraction(x)
    if x != 0 and vp(x, p) < 0:
        raise ValueError(f"{x} is not p-integral at {p}")
    num = x.numerator % p
    den = x.denominator % p
    return num * pow(den, p - 2, p) % p


@dataclass(frozen=True)
class PadicRational:
    """A rational carried together with its reference prime."""

    value: Fraction
    p: int

    def valuation(self) -> int:
        return vp(self.value, self.p)

    def residue(self) -> int:
        return residue_rational(self.value, self.p)

    def __add__(self, other):
        return PadicRational(self.value + other.value, self._same(other))

    def __sub__(self, other):
        return PadicRational(self.value - other.value, self._same(other))

    def __mul__(self, other):
        return PadicRational(self.value * other.value, self._same(other))

    def __truediv__(self, other):
        return PadicRational(self.value / other.value, self._same(other))

    def _same(self, other) -> int:
        if other.p != self.p:
            raise ValueError("mixed primes")
        return self.p


@dataclass(frozen=True)
class LabAlgebra:
    """Quaternion presentation (a, b) over the p-adic rationals."""

    a: Fraction
    b: Fraction
    p: int

    def __post_init__(self):
        if self.p == 2:
            raise ValueError("odd primes only")

    def tower(self) -> CDVField:
        return CDVField(FiniteField(self.p))

    def is_division(self) -> bool:
        k = self.tower()
        entries = (Fraction(1), -self.a, -self.b, self.a * self.b)
        form = QuadForm(k, tuple(class_of_rational(k, c) for c in entries))
        return not qf_is_isotropic(form)


def standard_algebra(p: int) -> LabAlgebra:
    """(u, p) with u the least positive nonresidue mod p."""
    return LabAlgebra(Fraction(smallest_nonresidue(p)), Fraction(p), p)


@dataclass(frozen=True)
class QuaternionElt:
    """x0 + x1*i + x2*j + x3*ij with exact rational coordinates."""

    alg: LabAlgebra
    coords: tuple  # four Fractions

    def __post_init__(self):
        if len(self.coords) != 4:
            raise ValueError("four coordinates required")

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def __add__(self, other):
        self._check(other)
        return QuaternionElt(self.alg, tuple(x + y for x, y in
                                             zip(self.coords, other.coords)))

    def __sub__(self, other):
        self._check(other)
        return QuaternionElt(self.alg, tuple(x - y for x, y in
                                             zip(self.coords, other.coords)))

    def __neg__(self):
        return QuaternionElt(self.alg, tuple(-x for x in self.coords))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(other))
        self._check(other)
        a, b = self.alg.a, self.alg.b
        x0, x1, x2, x3 = self.coords
        y0, y1, y2, y3 = other.coords
        return QuaternionElt(self.alg, (
            x0 * y0 + a * x1 * y1 + b * x2 * y2 - a * b * x3 * y3,
            x0 * y1 + x1 * y0 - b * x2 * y3 + b * x3 * y2,
            x0 * y2 + x2 * y0 + a * x1 * y3 - a * x3 * y1,
            x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1,
        ))

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(other))
        return NotImplemented

    def scale(self, c: Fraction):
        return QuaternionElt(self.alg, tuple(c * x for x in self.coords))

    def conj(self):
        """Canonical involution: negates the pure part."""
        x0, x1, x2, x3 = self.coords
        return QuaternionElt(self.alg, (x0, -x1, -x2, -x3))

    def trd(self) -> Fraction:
        return 2 * self.coords[0]

    def nrd(self) -> Fraction:
        a, b = self.alg.a, self.alg.b
        x0, x1, x2, x3 = self.coords
        return x0 * x0 - a * x1 * x1 - b * x2 * x2 + a * b * x3 * x3

    def inverse(self):
        n = self.nrd()
        if n == 0:
            raise ZeroDivisionError("not invertible: reduced norm vanishes")
        return self.conj().scale(Fraction(1) / n)

    def __pow__(self, m: int):
        if m < 0:
            return self.inverse() ** (-m)
        result = scalar(self.alg, 1)
        base = self
        while m:
            if m & 1:
                result = result * base
            base = base * base
            m >>= 1
        return result

    def is_integral(self) -> bool:
        return all(c.denominator % self.alg.p != 0 for c in self.coords)

    def _check(self, other):
        if other.alg != self.alg:
            raise ValueError("mixed quaternion algebras")

    def __str__(self):
        names = ("", "i", "j", "ij")
        parts = [f"{c}{n}" if n else f"{c}" for c, n in zip(self.coords, names) if c != 0]
        return " + ".join(parts) if parts else "0"


def scalar(alg: LabAlgebra, c) -> QuaternionElt:
    return QuaternionElt(alg, (Fraction(c), Fraction(0), Fraction(0), Fraction(0)))


def basis_i(alg: LabAlgebra) -> QuaternionElt:
    return QuaternionElt(alg, (Fraction(0), Fraction(1), Fraction(0), Fraction(0)))


def basis_j(alg: LabAlgebra) -> QuaternionElt:
    return QuaternionElt(alg, (Fraction(0), Fraction(0), Fraction(1), Fraction(0)))


def basis_ij(alg: LabAlgebra) -> QuaternionElt:
    return QuaternionElt(alg, (Fraction(0), Fraction(0), Fraction(0), Fraction(1)))


def w_value(x: QuaternionElt) -> Fraction:
    """Half the valuation of the reduced norm; half-integers allowed."""
    if x.is_zero:
        raise ValueError("zero has no value")
    return Fraction(vp(x.nrd(), x.alg.p), 2)


def residue_elt(x: QuaternionElt, allow_positive: bool = False):
    """Residue pair (c0, c1) standing for c0 + c1*sqrt(u) over the prime field.

    Needs p-integral coordinates; the j and ij parts fall into the maximal
    ideal.  By default the element must be a unit; pass allow_positive to
    reduce elements of positive value to (0, 0).
    """
    if not x.is_integral():
        raise ValueError("non-integral coordinates")
    if not x.is_zero:
        w = w_value(x)
        if w < 0 or (w != 0 and not allow_positive):
            raise ValueError(f"value {w} is not zero")
    p = x.alg.p
    return (residue_rational(x.coords[0], p), residue_rational(x.coords[1], p))


# ---------------------------------------------------------------------------
# residue field arithmetic (pairs over the prime field)

def fp2_mul(x, y, p: int, u: int):
    a, b = x
    c, d = y
    return ((a * c + u * b * d) % p, (a * d + b * c) % p)


def fp2_pow(x, m: int, p: int, u: int):
    result = (1, 0)
    base = x
    while m:
        if m & 1:
            result = fp2_mul(result, base, p, u)
        base = fp2_mul(base, base, p, u)
        m >>= 1
    return result


def fp2_is_square(x, p: int, u: int) -> bool:
    if x == (0, 0):
        return True
    return fp2_pow(x, (p * p - 1) // 2, p, u) == (1, 0)


# ---------------------------------------------------------------------------
# involutions and parameters

@dataclass(frozen=True)
class Involution:
    """Either the canonical involution or its twist by conjugation with i."""

    alg: LabAlgebra
    name: str  # "gamma" | "int(i)*gamma"

    def __call__(self, x: QuaternionElt) -> QuaternionElt:
        if self.name == "gamma":
            return x.conj()
        i = basis_i(self.alg)
        return i * x.conj() * i.inverse()


def gamma_involution(alg: LabAlgebra) -> Involution:
    return Involution(alg, "gamma")


def choose_sigma(alg: LabAlgebra) -> Involution:
    """The orthogonal involution conjugating the canonical one by i.

    Verified on the spot: it squares to the identity, negates i, fixes j
    and ij, and its residue moves sqrt(u), so the residue involution is
    of the second kind while alpha = i has unit square u.
    """
    if not alg.is_division():
        raise UnsupportedShapeError("the presentation is split; no residue "
                                    "division algebra to work in")
    sigma = Involution(alg, "int(i)*gamma")
    i, j, ij = basis_i(alg), basis_j(alg), basis_ij(alg)
    if sigma(i) != -i or sigma(j) != j or sigma(ij) != ij:
        raise EngineError("involution table broke")
    for x in (i, j, ij, i + j, scalar(alg, 3) + ij):
        if sigma(sigma(x)) != x:
            raise EngineError("involution does not square to the identity")
    if residue_elt(sigma(i) * i.inverse()) != (alg.p - 1, 0):
        raise EngineError("residue involution is not of the second kind")
    return sigma


def alpha_element(alg: LabAlgebra) -> QuaternionElt:
    """alpha = i: skew under both supported involutions, with unit square."""
    return basis_i(alg)


@dataclass(frozen=True)
class PidResult:
    pid: QuaternionElt
    eps_prime: int
    case: int
    checks: dict


def choose_pid(alg: LabAlgebra, sigma: Involution, t: QuaternionElt) -> PidResult:
    """Build the symmetrized parameter from t and verify its properties.

    Case 1 (residue of sigma(t)/t is 1): pid = t + sigma(t), fixed by
    sigma.  Case 2 (otherwise): pid = alpha*t - sigma(alpha*t), negated
    by sigma.  In both cases the value of t is preserved and conjugation
    by pid composed with sigma fixes the residue of alpha.
    """
    if not alg.is_division():
        raise UnsupportedShapeError("split presentation")
    if t.is_zero:
        raise ValueError("zero is not a parameter")
    wt = w_value(t)
    if wt.denominator != 2:
        raise ValueError(f"parameter must have half-odd value, got {wt}")

    ratio = sigma(t) * t.inverse()
    alpha = alpha_element(alg)
    checks = {}
    if residue_elt(ratio) == (1, 0):
        case = 1
        pid = t + sigma(t)
        eps_prime = 1
        checks["case1_residue_is_two"] = residue_elt(pid * t.inverse()) == (2 % alg.p, 0)
    else:
        case = 2
        at = alpha * t
        pid = at - sigma(at)
        eps_prime = -1
        chain = (pid * alpha * pid.inverse() + alpha) * (pid * t.inverse())
        checks["case2_chain_vanishes"] = residue_elt(chain, allow_positive=True) == (0, 0)
        checks["case2_ratio_nonzero"] = residue_elt(pid * t.inverse()) != (0, 0)

    checks["sign"] = sigma(pid) == pid.scale(Fraction(eps_prime))
    checks["value_preserved"] = w_value(pid) == wt
    fixed = pid * sigma(alpha) * pid.inverse()
    checks["residue_fixes_alpha"] = residue_elt(fixed) == residue_elt(alpha, allow_positive=True)

    if not all(checks.values()):
        failed = [k for k, v in checks.items() if not v]
        raise EngineError(f"parameter checks failed: {failed}")
    return PidResult(pid, eps_prime, case, checks)


def symmetrize(x: QuaternionElt, sigma: Involution, eps: int) -> QuaternionElt:
    """(x + eps*sigma(x))/2: the canonical entry repair before decomposing."""
    return (x + sigma(x).scale(Fraction(eps))).scale(Fraction(1, 2))


# ---------------------------------------------------------------------------
# concrete residue decomposition

@dataclass(frozen=True)
class ResidueForm:
    """Diagonal form over the residue quadratic extension."""

    p: int
    u: int
    entries: tuple           # residue pairs
    involution: str          # "conjugation" | "identity"
    eps: int

    @property
    def rank(self) -> int:
        return len(self.entries)

    def is_isotropic(self) -> bool:
        if self.involution == "conjugation":
            # norms are surjective onto the prime field
            return self.rank >= 2
        if self.eps == 1:
            if self.rank >= 3:
                return True
            if self.rank == 2:
                c1, c2 = self.entries
                minus_prod = fp2_mul((self.p - 1, 0), fp2_mul(c1, c2, self.p, self.u),
                                     self.p, self.u)
                return fp2_is_square(minus_prod, self.p, self.u)
            return False
        if self.entries:
            raise EngineError("skew entries over the identity residue involution")
        return False


@dataclass(frozen=True)
class LarmourResult:
    h1: ResidueForm
    h2: ResidueForm

    @property
    def isotropic(self) -> bool:
        return self.h1.is_isotropic() or self.h2.is_isotropic()


def _involution_kind(sigma, alg: LabAlgebra) -> str:
    i = basis_i(alg)
    moved = residue_elt(sigma(i) * i.inverse())
    return "conjugation" if moved == (alg.p - 1, 0) else "identity"


def larmour_decompose(entries, sigma: Involution, pid: QuaternionElt,
                      eps: int = 1) -> LarmourResult:
    """Split a diagonal form into two residue forms along the parameter.

    Entries of integer value are rescaled by powers of the parameter into
    units and reduced under sigma; entries of half-odd value first shed
    one parameter factor and land in the twisted part, whose involution
    is conjugation by the parameter composed with sigma and whose sign
    picks up the parameter's sign.  Rescaling by sigma(x) * d * x never
    changes the form, so the verdict "isotropic iff one residue part is"
    can be compared against an independent reduction.
    """
    alg = pid.alg
    eps_prime = 1 if sigma(pid) == pid else -1
    double_pid_value = 2 * w_value(pid)
    if double_pid_value.denominator != 1 or int(double_pid_value) % 2 == 0:
        raise ValueError("the twisting element must have half-odd value")
    r = int(double_pid_value)

    def sigma_twisted(y):
        return pid * sigma(y) * pid.inverse()

    def rescaler(shift: int) -> QuaternionElt:
        """An element x with 2*w(x) = shift, mixing pid and prime powers."""
        if shift % 2 == 0:
            return scalar(alg, Fraction(alg.p) ** (shift // 2))
        return pid.scale(Fraction(alg.p) ** ((shift - r) // 2))

    h1_entries, h2_entries = [], []
    for d in entries:
        if d.is_zero:
            raise ValueError("zero diagonal entry")
        if sigma(d) != d.scale(Fraction(eps)):
            raise ValueError("entry is not eps-symmetric under sigma")
        wd = w_value(d)
        if wd.denominator == 1:
            x = rescaler(-int(wd))
            unit = sigma(x) * d * x
            if w_value(unit) != 0:
                raise EngineError("rescaling missed the unit range")
            h1_entries.append(residue_elt(unit))
        else:
            e = d * pid.inverse()
            we = w_value(e)
            if we.denominator != 1:
                raise EngineError("parameter stripping left a half-odd value")
            x = rescaler(-int(we))
            unit = sigma_twisted(x) * e * x
            if w_value(unit) != 0:
                raise EngineError("rescaling missed the unit range")
            if sigma_twisted(unit) != unit.scale(Fraction(eps * eps_prime)):
                raise EngineError("twisted entry has the wrong symmetry")
            h2_entries.append(residue_elt(unit))

    u = int(alg.a) % alg.p
    kind1 = _involution_kind(sigma, alg)
    kind2 = _involution_kind(sigma_twisted, alg)
    h1 = ResidueForm(alg.p, u, tuple(h1_entries), kind1, eps)
    h2 = ResidueForm(alg.p, u, tuple(h2_entries), kind2, eps * eps_prime)
    return LarmourResult(h1, h2)


def jacobson_verdict(scalars, alg: LabAlgebra) -> bool:
    """Isotropy of a scalar-entry form over the canonical involution,
    through the norm-form tensor reduction and the symbolic decider."""
    k = alg.tower()
    norm_entries = (Fraction(1), -alg.a, -alg.b, alg.a * alg.b)
    classes = tuple(class_of_rational(k, Fraction(c) * n)
                    for c in scalars for n in norm_entries)
    verdict = qf_is_isotropic(QuadForm(k, classes))
    oracle = qf_is_isotropic_oracle(QuadForm(k, classes))
    if verdict != oracle:
        raise EngineError("the two quadratic deciders disagree")
    return verdict


# ---------------------------------------------------------------------------
# truncated series with tracked precision

def default_precision() -> int:
    value = os.environ.get("HERMLAB_PRECISION", "8")
    try:
        n = int(value)
    except ValueError:
        raise PrecisionError(f"bad HERMLAB_PRECISION value {value!r}") from None
    if n < 1:
        raise PrecisionError("precision must be positive")
    return n


@dataclass(frozen=True)
class LaurentSeries:
    """Finitely many exact coefficients, known modulo t**prec.

    Arithmetic keeps the weakest precision of its operands; inversion
    needs a known nonzero leading coefficient and division inherits the
    corresponding loss.
    """

    coeffs: tuple   # starting at exponent shift; no leading/trailing zeros
    shift: int
    prec: int       # coefficients at exponents < prec are known

    @staticmethod
    def make(coeffs, shift: int, prec: int) -> "LaurentSeries":
        items = [Fraction(c) for c in coeffs]
        items = items[:max(0, prec - shift)]
        while items and items[0] == 0:
            items.pop(0)
            shift += 1
        while items and items[-1] == 0:
            items.pop()
        if not items:
            return LaurentSeries((), prec, prec)
        return LaurentSeries(tuple(items), shift, prec)

    @staticmethod
    def constant(c, prec: int = None) -> "LaurentSeries":
        return LaurentSeries.make([Fraction(c)], 0, prec or default_precision())

    @staticmethod
    def t_power(m: int = 1, prec: int = None) -> "LaurentSeries":
        return LaurentSeries.make([Fraction(1)], m, prec or default_precision())

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, m: int) -> Fraction:
        if m >= self.prec:
            raise PrecisionError(f"coefficient at t^{m} is beyond precision {self.prec}")
        if not self.coeffs or m < self.shift or m >= self.shift + len(self.coeffs):
            return Fraction(0)
        return self.coeffs[m - self.shift]

    def valuation(self) -> int:
        if not self.coeffs:
            raise PrecisionError("no known nonzero coefficient")
        return self.shift

    def residue(self) -> Fraction:
        if self.coeffs and self.shift < 0:
            raise ValueError("negative valuation has no residue")
        return self.coefficient(0)

    def __add__(self, other: "LaurentSeries") -> "LaurentSeries":
        prec = min(self.prec, other.prec)
        lo = min([self.shift] if self.coeffs else [prec],
                 [other.shift] if other.coeffs else [prec])[0] if True else 0
        lo = min(self.shift if self.coeffs else prec,
                 other.shift if other.coeffs else prec)
        items = [self.coefficient(m) + other.coefficient(m)
                 for m in range(lo, prec)]
        return LaurentSeries.make(items, lo, prec)

    def __neg__(self) -> "LaurentSeries":
        return LaurentSeries(tuple(-c for c in self.coeffs), self.shift, self.prec)

    def __sub__(self, other: "LaurentSeries") -> "LaurentSeries":
        return self + (-other)

    def __mul__(self, other: "LaurentSeries") -> "LaurentSeries":
        if self.is_zero or other.is_zero:
            prec = min(self.prec, other.prec)
            return LaurentSeries((), prec, prec)
        prec = min(self.shift + other.prec, other.shift + self.prec)
        lo = self.shift + other.shift
        out = [Fraction(0)] * (prec - lo)
        for m1, c1 in enumerate(self.coeffs):
            for m2, c2 in enumerate(other.coeffs):
                m = lo + m1 + m2
                if m < prec:
                    out[m - lo] += c1 * c2
        return LaurentSeries.make(out, lo, prec)

    def inverse(self) -> "LaurentSeries":
        v = self.valuation()
        lead = self.coeffs[0]
        rel = self.prec - v
        # 1/(lead * t^v * (1 + r)) with r of positive relative valuation
        inv = [Fraction(0)] * rel
        inv[0] = Fraction(1) / lead
        for m in range(1, rel):
            acc = Fraction(0)
            for j in range(1, m + 1):
                acc += self.coefficient(v + j) * inv[m - j]
            inv[m] = -acc / lead
        return LaurentSeries.make(inv, -v, self.prec - 2 * v)

    def __truediv__(self, other: "LaurentSeries") -> "LaurentSeries":
        return self * other.inverse()

    def sqrt(self) -> "LaurentSeries":
        """Square root of a series of even valuation whose leading
        coefficient is a rational square (Newton iteration)."""
        v = self.valuation()
        if v % 2:
            raise ValueError("odd valuation; not a square")
        lead = self.coeffs[0]
        root = _fraction_sqrt(lead)
        if root is None:
            raise ValueError(f"leading coefficient {lead} is not a rational square")
        guess = LaurentSeries.make([root], v // 2, self.prec - v // 2)
        half = LaurentSeries.constant(Fraction(1, 2), self.prec)
        for _ in range(self.prec + 2):
            nxt = half * (guess + self / guess)
            if nxt == guess:
                break
            guess = nxt
        return guess

    def agrees_with(self, other: "LaurentSeries") -> bool:
        """Equality on the overlap of the known ranges."""
        prec = min(self.prec, other.prec)
        lo = min(self.shift if self.coeffs else prec,
                 other.shift if other.coeffs else prec)
        return all(self.coefficient(m) == other.coefficient(m)
                   for m in range(lo, prec))

    def __str__(self):
        if not self.coeffs:
            return f"O(t^{self.prec})"
        terms = [f"{c}*t^{self.shift + m}" for m, c in enumerate(self.coeffs) if c != 0]
        return " + ".join(terms) + f" + O(t^{self.prec})"


def _fraction_sqrt(x: Fraction):
    if x < 0:
        return None
    num = _int_sqrt(x.numerator)
    den = _int_sqrt(x.denominator)
    if num is None or den is None:
        return None
    return Fraction(num, den)


def _int_sqrt(n: int):
    r = int(n ** 0.5)
    for candidate in (r - 1, r, r + 1):
        if candidate >= 0 and candidate * candidate == n:
            return candidate
    return None


def with_higher_precision(fn, start: int = None, max_doublings: int = 4):
    """Run fn(prec), doubling the precision on precision loss."""
    prec = start or default_precision()
    for _ in range(max_doublings):
        try:
            return fn(prec)
        except PrecisionError:
            prec *= 2
    return fn(prec)
