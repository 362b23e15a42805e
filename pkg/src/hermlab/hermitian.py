"""Hermitian form descriptors and their quadratic reductions.

Two diagonal shapes have concrete deciders: forms over a division
quaternion with its canonical involution and scalar entries, which reduce
through the trace construction to the entries tensored with the norm
form; and forms over a quadratic field extension with the conjugation
involution, which transfer to the entries tensored with <1, -lam>.  Both
reductions preserve isotropy, so exhaustive searches over square-class
entry tuples compute the corresponding u-invariants exactly.

Skew diagonal entries over a quaternion algebra are pure quaternions and
cannot be encoded by base-field square classes; those shapes are refused
rather than guessed at.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import combinations_with_replacement

from .brauer import BrauerClass, DivisionKind, bc_is_division, bc_single_symbol_rep
from .errors import (
    EngineError,
    FieldMismatchError,
    InvalidExtensionError,
    UnsupportedShapeError,
)
from .fields import FieldDesc, SquareClass, minus_one, sqcl_group
from .quadform import QuadForm, norm_form, qf_is_isotropic


class UKind(str, Enum):
    PLUS = "plus"
    MINUS = "minus"
    ZERO = "zero"


@dataclass(frozen=True)
class InvolutionDesc:
    """kind is "orthogonal", "symplectic" or "unitary"; unitary carries the
    class lam defining the fixed quadratic extension."""

    kind: str
    lam: SquareClass = None

    def __post_init__(self):
        if self.kind not in ("orthogonal", "symplectic", "unitary"):
            raise UnsupportedShapeError(f"unknown involution kind {self.kind!r}")
        if self.kind == "unitary":
            if self.lam is None:
                raise InvalidExtensionError("a unitary involution needs the extension class")
            if self.lam.is_one:
                raise InvalidExtensionError("the trivial class defines no quadratic extension")
        elif self.lam is not None:
            raise UnsupportedShapeError("only unitary involutions carry an extension class")


def normalize_type(inv: InvolutionDesc, eps: int) -> UKind:
    """Collapse (involution kind, sign) to the three u-invariant types."""
    if eps not in (1, -1):
        raise UnsupportedShapeError(f"sign must be +1 or -1, got {eps}")
    if inv.kind == "unitary":
        return UKind.ZERO
    if inv.kind == "orthogonal":
        return UKind.PLUS if eps == 1 else UKind.MINUS
    return UKind.MINUS if eps == 1 else UKind.PLUS


def sym_dimension(d: int, kind: str, eps: int = 1) -> int:
    """Dimension of the eps-symmetric elements of a degree-d algebra."""
    if d < 1:
        raise ValueError("degree must be >= 1")
    if kind == "orthogonal":
        return d * (d + eps) // 2
    if kind == "symplectic":
        return d * (d - eps) // 2
    if kind == "unitary":
        return d * d
    raise UnsupportedShapeError(f"unknown involution kind {kind!r}")


def morita_reduce(m: int, B: BrauerClass, ukind: UKind):
    """u-invariants of the m-by-m matrix algebra equal those of the
    underlying division algebra; return its class representative."""
    if m < 1:
        raise ValueError("matrix size must be >= 1")
    kind = bc_is_division(B)
    if kind == DivisionKind.SPLIT:
        return BrauerClass(B.field, ()), ukind
    if kind == DivisionKind.QUATERNION:
        syms = B.effective_symbols
        if len(syms) == 1:
            return BrauerClass(B.field, syms), ukind
        return BrauerClass(B.field, (bc_single_symbol_rep(B),)), ukind
    return BrauerClass(B.field, B.effective_symbols), ukind


@dataclass(frozen=True)
class HermFormDesc:
    """Diagonal descriptor with entries in the base field.

    Shape (a): division quaternion algebra, canonical involution, sign +1.
    Shape (b): trivial algebra with a unitary involution over k(sqrt(lam)).
    """

    algebra: BrauerClass
    involution: InvolutionDesc
    eps: int
    entries: tuple

    def __post_init__(self):
        k = self.algebra.field
        for c in self.entries:
            if c.field != k:
                raise FieldMismatchError("form entry over the wrong field")
        if self.involution.kind == "unitary" and self.involution.lam.field != k:
            raise FieldMismatchError("extension class over the wrong field")

    @property
    def rank(self) -> int:
        return len(self.entries)

    @property
    def shape(self) -> str:
        if (self.involution.kind == "symplectic" and self.eps == 1
                and bc_is_division(self.algebra) == DivisionKind.QUATERNION):
            return "a"
        if (self.involution.kind == "unitary"
                and bc_is_division(self.algebra) == DivisionKind.SPLIT
                and not self.algebra.effective_symbols):
            return "b"
        return "unsupported"


def jacobson_quadratic(h: HermFormDesc) -> QuadForm:
    """Shape (a) reduction: entries tensored with the norm form."""
    if h.shape != "a":
        raise UnsupportedShapeError("the trace reduction needs a division "
                                    "quaternion with its canonical involution "
                                    "and sign +1")
    k = h.algebra.field
    a, b = h.algebra.effective_symbols[0]
    nf = norm_form(a, b, k)
    return QuadForm(k, tuple(c * n for c in h.entries for n in nf.entries))


def transfer_quadratic(h: HermFormDesc) -> QuadForm:
    """Shape (b) reduction: entries tensored with <1, -lam>."""
    if h.shape != "b":
        raise UnsupportedShapeError("the transfer needs the trivial algebra "
                                    "with a unitary involution")
    k = h.algebra.field
    lam = h.involution.lam
    m1 = minus_one(k)
    pieces = []
    for c in h.entries:
        pieces.append(c)
        pieces.append(m1 * lam * c)
    return QuadForm(k, tuple(pieces))


def herm_is_isotropic(h: HermFormDesc) -> bool:
    if h.rank == 0:
        return False
    shape = h.shape
    if shape == "a":
        return qf_is_isotropic(jacobson_quadratic(h))
    if shape == "b":
        return qf_is_isotropic(transfer_quadratic(h))
    raise UnsupportedShapeError("no concrete decider for this form shape")


def reduced_quadratic(h: HermFormDesc) -> QuadForm:
    return jacobson_quadratic(h) if h.shape == "a" else transfer_quadratic(h)


def u_search(B: BrauerClass, inv: InvolutionDesc, eps: int, k: FieldDesc) -> int:
    """Largest rank of an anisotropic form of a supported shape, found by
    enumerating entry tuples over the square classes of the base field.

    Entries range over k*/k*^2, which is coarser than isometry but exact
    for suprema; permutation invariance lets the enumeration run over
    unordered selections.
    """
    if B.field != k:
        raise FieldMismatchError("algebra class over the wrong field")
    probe = HermFormDesc(B, inv, eps, ())
    if probe.shape == "unsupported":
        raise UnsupportedShapeError("u search covers the two reducible shapes only")
    classes = sqcl_group(k)
    cap = 2 * len(classes)
    rank = 1
    while True:
        found = False
        for entries in combinations_with_replacement(classes, rank):
            if not herm_is_isotropic(HermFormDesc(B, inv, eps, entries)):
                found = True
                break
        if not found:
            return rank - 1
        if rank > cap:
            raise EngineError(f"anisotropic forms persist past the cap {cap}")
        rank += 1


def canonical_involution() -> InvolutionDesc:
    return InvolutionDesc("symplectic")


def unitary_involution(lam: SquareClass) -> InvolutionDesc:
    return InvolutionDesc("unitary", lam)
