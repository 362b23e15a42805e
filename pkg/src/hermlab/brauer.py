"""Period-two Brauer classes as lists of quaternion symbols.

Over a valued layer every symbol separates into an unramified residue
symbol and a character of the residue field: with slots a = s*pi^i and
b = t*pi^j the character contribution is s^j * t^i * (-1)^(i*j) and the
residue symbol is (s, t).  Triviality is decided recursively from that
data; the norm-form test gives a second route for single symbols and the
two must agree everywhere.

Division testing covers classes with at most two symbols.  Symbol lists
are representations, not canonical forms, and every predicate here is
representation-independent.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import (
    EngineError,
    FieldMismatchError,
    InvalidExtensionError,
    NeedsAssertionError,
    NotDivisionError,
    UnsupportedClassError,
    UnsupportedFieldError,
)
from .fields import (
    CDVField,
    FieldDesc,
    FiniteField,
    GlobalFunctionField,
    SquareClass,
    TransitionMap,
    class_to_str,
    is_finite_based,
    minus_one,
    one,
    parse_class,
    quadratic_extension,
    sqcl_group,
    transport,
)
from .quadform import albert_form, norm_form, qf_is_isotropic


@dataclass(frozen=True)
class BrauerClass:
    field: FieldDesc
    symbols: tuple  # pairs (a, b) of square classes; empty list = trivial class

    def __post_init__(self):
        for a, b in self.symbols:
            if a.field != self.field or b.field != self.field:
                raise FieldMismatchError("symbol slot over the wrong field")

    @property
    def effective_symbols(self) -> tuple:
        """Symbols with both slots nontrivial; the rest are split."""
        return tuple((a, b) for a, b in self.symbols
                     if not a.is_one and not b.is_one)

    def combined_with(self, other: "BrauerClass") -> "BrauerClass":
        """Class product; with two-torsion this is also the difference."""
        if other.field != self.field:
            raise FieldMismatchError("cannot combine classes over different fields")
        return BrauerClass(self.field, self.symbols + other.symbols)

    def __str__(self) -> str:
        if not self.symbols:
            return "1"
        return ";".join(f"({class_to_str(a)},{class_to_str(b)})"
                        for a, b in self.symbols)


def trivial_class(k: FieldDesc) -> BrauerClass:
    return BrauerClass(k, ())


def symbol_class(k: FieldDesc, *symbols) -> BrauerClass:
    return BrauerClass(k, tuple(symbols))


def parse_brauer(k: FieldDesc, text: str) -> BrauerClass:
    """Parse the symbol-list grammar "(u,pi);(v,t)". "1" is the trivial class."""
    s = text.strip().replace(" ", "")
    if s in ("", "1"):
        return trivial_class(k)
    symbols = []
    for part in s.split(";"):
        if not (part.startswith("(") and part.endswith(")")):
            raise UnsupportedClassError(f"malformed symbol {part!r}")
        inner = part[1:-1].split(",")
        if len(inner) != 2:
            raise UnsupportedClassError(f"symbol needs two slots: {part!r}")
        symbols.append((parse_class(k, inner[0]), parse_class(k, inner[1])))
    return BrauerClass(k, tuple(symbols))


@dataclass(frozen=True)
class RamificationData:
    character: SquareClass       # residue class; trivial = unramified
    residue_class: BrauerClass   # unramified part, over the residue field


def bc_ramification(B: BrauerClass) -> RamificationData:
    """Split a class over a valued layer into residue symbols and character."""
    k = B.field
    if not isinstance(k, CDVField):
        raise UnsupportedFieldError("ramification data needs a valued layer")
    res = k.residue
    character = one(res)
    residue_symbols = []
    m1 = minus_one(res)
    for a, b in B.symbols:
        (s, i) = a.decompose()
        (t, j) = b.decompose()
        contrib = one(res)
        if j:
            contrib = contrib * s
        if i:
            contrib = contrib * t
        if i and j:
            contrib = contrib * m1
        character = character * contrib
        if not s.is_one and not t.is_one:
            residue_symbols.append((s, t))
    return RamificationData(character, BrauerClass(res, tuple(residue_symbols)))


def bc_is_trivial(B: BrauerClass) -> bool:
    """Recursive residue test: trivial iff the character is trivial and the
    residue class is.  The Brauer two-torsion of a finite field vanishes."""
    k = B.field
    if isinstance(k, FiniteField):
        return True
    if isinstance(k, GlobalFunctionField):
        if not B.effective_symbols:
            return True
        raise UnsupportedFieldError("triviality over a global-function-field "
                                    "base is not computable")
    ram = bc_ramification(B)
    return ram.character.is_one and bc_is_trivial(ram.residue_class)


class DivisionKind(str, Enum):
    SPLIT = "split"
    QUATERNION = "quaternion"
    BIQUATERNION = "biquaternion"


def bc_is_division(B: BrauerClass) -> DivisionKind:
    """Index of a class with at most two symbols, by norm and Albert forms."""
    if not is_finite_based(B.field):
        raise UnsupportedFieldError("division testing needs a finite-based tower; "
                                    "supply an assertion instead")
    syms = B.effective_symbols
    if len(syms) > 2:
        raise UnsupportedClassError(f"{len(syms)} symbols; only classes with at "
                                    "most two are supported")
    if not syms:
        return DivisionKind.SPLIT
    if len(syms) == 1:
        a, b = syms[0]
        if qf_is_isotropic(norm_form(a, b, B.field)):
            return DivisionKind.SPLIT
        return DivisionKind.QUATERNION
    if not qf_is_isotropic(albert_form(syms[0], syms[1], B.field)):
        return DivisionKind.BIQUATERNION
    if bc_is_trivial(B):
        return DivisionKind.SPLIT
    return DivisionKind.QUATERNION


def bc_single_symbol_rep(B: BrauerClass):
    """A symbol (a, b) equivalent to a quaternion-index class, found by
    searching square-class pairs in canonical order."""
    if bc_is_division(B) != DivisionKind.QUATERNION:
        raise UnsupportedClassError("single-symbol representatives exist for "
                                    "quaternion-index classes only")
    syms = B.effective_symbols
    if len(syms) == 1:
        return syms[0]
    classes = sqcl_group(B.field)
    for a in classes:
        for b in classes:
            candidate = BrauerClass(B.field, B.symbols + ((a, b),))
            if bc_is_trivial(candidate):
                return (a, b)
    raise EngineError("no symbol representative found for a quaternion class")


def bc_base_change(B: BrauerClass, m: TransitionMap) -> BrauerClass:
    if m.source != B.field:
        raise FieldMismatchError("class does not live over the map's source")
    return BrauerClass(m.target,
                       tuple((transport(m, a), transport(m, b))
                             for a, b in B.symbols))


# ---------------------------------------------------------------------------
# the three unitary ramification cases

class UnitaryCase(Enum):
    CASE1 = 1  # extension and extended algebra both unramified
    CASE2 = 2  # extended algebra ramified
    CASE3 = 3  # extension ramified

    def __str__(self) -> str:
        return f"Case{self.value}"


@dataclass(frozen=True)
class UnitaryCaseResult:
    case: UnitaryCase
    extension: object            # FieldDesc of k(sqrt(lam)), None over GFF residues
    extension_map: object        # TransitionMap, None over GFF residues
    extended_class: object       # class over the extension, None over GFF residues
    character: SquareClass       # character of the class over the base
    residue_unramified: BrauerClass  # unramified residue part over the residue field
    lam_residue: SquareClass     # unit part of the extension class
    fixed_field_classes: tuple   # residue classes cutting out the three fixed
                                 # fields in the ramified-algebra case; the
                                 # middle one is exposed but consumed by no rule


def classify_unitary_case(B: BrauerClass, lam: SquareClass,
                          assume_division: bool = False) -> UnitaryCaseResult:
    """Sort the unitary setup over a valued layer into its three cases and
    verify the division precondition on the extended algebra.

    A ramified extension never leaves a ramified algebra behind: that
    combination is checked to be absent rather than assumed.
    """
    k = B.field
    if not isinstance(k, CDVField):
        raise UnsupportedFieldError("case classification needs a valued layer")
    if lam.field != k:
        raise FieldMismatchError("extension class over the wrong field")
    if lam.is_one:
        raise InvalidExtensionError("the trivial class defines no quadratic extension")

    ram = bc_ramification(B)
    lam_unit, lam_vpar = lam.decompose()
    finite = is_finite_based(k)

    # A ramified extension reuses the residue field, so its base change is
    # computable even when the residue classes are symbolic.
    ext = ext_map = B_K = None
    if finite or lam_vpar:
        ext, ext_map = quadratic_extension(k, lam)
        B_K = bc_base_change(B, ext_map)
    if finite:
        _check_division_matches(B, B_K)
    elif not assume_division:
        raise NeedsAssertionError("division of the extended algebra over a "
                                  "global-function-field residue must be asserted")

    if lam_vpar:
        case = UnitaryCase.CASE3
        if not bc_ramification(B_K).character.is_one:
            raise EngineError("a ramified extension left the algebra ramified")
    else:
        extended_ramified = not (ram.character.is_one or ram.character == lam_unit)
        case = UnitaryCase.CASE2 if extended_ramified else UnitaryCase.CASE1

    chi = ram.character
    fixed = (chi, lam_unit, chi * lam_unit) if case is UnitaryCase.CASE2 else ()
    return UnitaryCaseResult(case, ext, ext_map, B_K, chi,
                             ram.residue_class, lam_unit, fixed)


def _check_division_matches(B: BrauerClass, B_K: BrauerClass) -> None:
    """The extended algebra must keep the index of the original class."""
    before = bc_is_division(B)
    after = bc_is_division(B_K)
    if before == DivisionKind.SPLIT:
        return  # field case: the extension itself is the algebra
    if after != before:
        witness = None
        syms = B_K.symbols
        if len(syms) == 1:
            witness = norm_form(syms[0][0], syms[0][1], B_K.field)
        elif len(syms) == 2:
            witness = albert_form(syms[0], syms[1], B_K.field)
        raise NotDivisionError(
            f"the algebra does not stay division over the extension "
            f"({before.value} became {after.value})", witness)
