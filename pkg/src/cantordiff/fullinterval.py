"""Closed-form decision of C_alpha - lam*C_beta = [-lam, 1].

For middle pairs with thickness product below 1 and slopes p = gamma^n0,
q = gamma^m0, the slopes filling the hull are exactly the invariant set

    Lambda = union over n in [-m0+1, n0] of gamma^n * J,
    J = [ q(p-2)/(gamma*p), q/(p(q-2)) ] = [ (1-2a)/(gamma*b), a/(1-2b) ],

which the piecewise map T (x -> p*x on the left piece, x/q on the right)
permutes.  J is nonempty exactly when 1/gamma <= tau*tau'; an irrational
log ratio leaves no full slope at all.  Thickness product >= 1 instead gives
the closed slope interval [s1, s0] = [(p-2)/p, q/(q-2)].
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional, Union

from .cantor import CantorPair, MiddleCantor, exact_power_base, thickness_product
from .errors import PreconditionError
from .intervals import Interval, IntervalSet
from .renorm import full_interval_via_thickness, thickness_interval
from .scalars import Scalar

ONE = Scalar.rational(1)


@dataclass(frozen=True)
class RationalRatio:
    """Declared relation p = gamma^n0, q = gamma^m0 (verified exactly)."""

    n0: int
    m0: int
    gamma: Scalar


IRRATIONAL = "irrational"
RatioDeclaration = Union[RationalRatio, Literal["irrational"]]


@dataclass(frozen=True)
class FullIntervalAnalysis:
    s1: Scalar
    s0: Scalar
    I: Interval  # open middle gap (endpoints recorded, interior understood)
    J: Optional[Interval]  # None when empty
    gamma: Optional[Scalar]
    n0: Optional[int]
    m0: Optional[int]
    Lambda: IntervalSet

    @property
    def p(self) -> Scalar:
        return self.gamma**self.n0

    @property
    def q(self) -> Scalar:
        return self.gamma**self.m0


@dataclass(frozen=True)
class FullVerdict:
    full: bool
    case: str
    detail: str


def _slopes(pair: CantorPair) -> tuple[Scalar, Scalar]:
    if not pair.both_middle:
        raise PreconditionError("full-interval analysis expects middle pairs")
    return pair.first.p, pair.second.p


def resolve_ratio(
    pair: CantorPair, declared: Optional[RatioDeclaration]
) -> RatioDeclaration:
    """Verify a declared ratio exactly, or auto-detect a common power base.

    Irrationality is never inferred; it must be declared by the caller.
    """
    p, q = _slopes(pair)
    if declared == IRRATIONAL:
        return IRRATIONAL
    if isinstance(declared, RationalRatio):
        if declared.gamma ** declared.n0 != p or declared.gamma ** declared.m0 != q:
            raise PreconditionError(
                f"declared ratio fails exact verification: gamma^{declared.n0} != p "
                f"or gamma^{declared.m0} != q"
            )
        return declared
    base = exact_power_base(pair)
    if base is None:
        raise PreconditionError(
            "no common power base found; declare the ratio explicitly"
        )
    c, n0, m0 = base
    return RationalRatio(n0, m0, c)


def analyze(
    pair: CantorPair, declared: Optional[RatioDeclaration] = None
) -> FullIntervalAnalysis:
    """Exact Lambda for a middle pair with thickness product strictly below 1."""
    p, q = _slopes(pair)
    if not thickness_product(pair) < ONE:
        raise PreconditionError(
            "thickness product >= 1: use the thickness route instead"
        )
    two = Scalar.rational(2)
    s1 = (p - two) / p
    s0 = q / (q - two)
    gap = Interval(q / (p * (q - two)), q * (p - two) / p)
    ratio = resolve_ratio(pair, declared)
    if ratio == IRRATIONAL:
        return FullIntervalAnalysis(s1, s0, gap, None, None, None, None, IntervalSet())
    gamma, n0, m0 = ratio.gamma, ratio.n0, ratio.m0
    j_lo = q * (p - two) / (gamma * p)
    j_hi = q / (p * (q - two))
    if j_lo > j_hi:
        return FullIntervalAnalysis(
            s1, s0, gap, None, gamma, n0, m0, IntervalSet()
        )
    J = Interval(j_lo, j_hi)
    parts = [J.scale(gamma**n) for n in range(-m0 + 1, n0 + 1)]
    return FullIntervalAnalysis(s1, s0, gap, J, gamma, n0, m0, IntervalSet(parts))


def is_full(
    pair: CantorPair, lam: Scalar, declared: Optional[RatioDeclaration] = None
) -> FullVerdict:
    """Decide C_alpha - lam*C_beta = hull, with the governing case cited.

    lam < 0 reduces through C_alpha - lam*C_beta = (C_alpha - |lam|*C_beta)
    + |lam| (symmetry of the middle second factor), so the verdict at |lam|
    transfers.
    """
    if lam.sign() == 0:
        raise PreconditionError("lam must be nonzero")
    if lam.sign() < 0:
        inner = is_full(pair, -lam, declared)
        return FullVerdict(
            inner.full, f"negative-slope via sum shift; {inner.case}", inner.detail
        )
    if thickness_product(pair) >= ONE:
        full = full_interval_via_thickness(pair, lam)
        band = thickness_interval(pair)
        return FullVerdict(
            full,
            "thickness",
            f"tau*tau' >= 1, full slope interval [{band.lo}, {band.hi}]",
        )
    analysis = analyze(pair, declared)
    if analysis.Lambda.is_empty:
        reason = (
            "irrational log ratio leaves Lambda empty"
            if analysis.gamma is None
            else "1/gamma > tau*tau' so J is empty"
        )
        return FullVerdict(False, "lambda-set", reason)
    full = analysis.Lambda.contains(lam)
    return FullVerdict(full, "lambda-set", f"Lambda = {analysis.Lambda}")


def t_map(analysis: FullIntervalAnalysis, x: Scalar) -> Scalar:
    """The piecewise slope map: p*x left of the gap, x/q right of it.

    With thickness product below 1 the two domain pieces are disjoint; the
    gap interior and everything outside [s1, s0] are errors.
    """
    p, q = analysis.p, analysis.q
    if analysis.s1 <= x <= analysis.I.lo:
        return p * x
    if analysis.I.hi <= x <= analysis.s0:
        return x / q
    raise PreconditionError(f"{x} is outside both domain pieces of the slope map")


def t_map_preimage(analysis: FullIntervalAnalysis, x: Scalar) -> Scalar:
    """The inverse piecewise map S: q*x on the left piece, x/p on the right."""
    p, q = analysis.p, analysis.q
    two = Scalar.rational(2)
    if analysis.s1 <= x <= (q - two).inverse():
        return q * x
    if p - two <= x <= analysis.s0:
        return x / p
    raise PreconditionError(f"{x} is outside both domain pieces of the inverse map")


def sum_full(pair: CantorPair, declared: Optional[RatioDeclaration] = None) -> bool:
    """Decide C_alpha + C_beta = [0, 2] by the integer-exponent window test.

    Equivalent to 1 in Lambda: some n in [-m0+1, n0] has gamma^-n in J, an
    exact comparison of field powers.
    """
    analysis = analyze(pair, declared)
    if analysis.J is None:
        return False
    gamma, n0, m0 = analysis.gamma, analysis.n0, analysis.m0
    for n in range(-m0 + 1, n0 + 1):
        power = gamma ** (-n)
        if analysis.J.lo <= power <= analysis.J.hi:
            return True
    return False
