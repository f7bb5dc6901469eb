"""Middle and homogeneous affine Cantor sets with their exact Markov data.

A middle set C_alpha keeps two end branches of ratio alpha from [0, 1]; the
homogeneous form allows any number of branches with one expansion slope and
exact offsets.  Everything downstream (renormalization operators, difference
IFS, thickness and dimension diagnostics) reads the data assembled here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import MixedFieldError, PreconditionError, UndecidableError
from .intervals import Interval, IntervalSet
from .numerics import ln_enclosure, outward_floats, refine_until_decisive
from .scalars import FieldSpec, Scalar

DEFAULT_POWER_SEARCH_LIMIT = 64
DEFAULT_PRECISION_CAP_BITS = 512


@dataclass(frozen=True)
class HomogeneousCantor:
    """Affine Cantor set with common expansion p and branch maps p*x + e_i.

    The branch intervals psi_i^{-1}(hull) must be pairwise disjoint, ordered,
    and lie inside the hull with its endpoints in the set (the first branch
    starts at the hull minimum, the last ends at the hull maximum).
    """

    expansion: Scalar
    offsets: tuple[Scalar, ...]
    hull: Interval

    def __post_init__(self):
        p = self.expansion
        if p <= Scalar.rational(1):
            raise PreconditionError("expansion must exceed 1")
        if len(self.offsets) < 2:
            raise PreconditionError("need at least two branches")
        branches = [self.branch_interval(i) for i in range(len(self.offsets))]
        for left, right in zip(branches, branches[1:]):
            if left.hi >= right.lo:
                raise PreconditionError(
                    f"branch intervals must be disjoint and ordered: {left}, {right}"
                )
        if branches[0].lo != self.hull.lo or branches[-1].hi != self.hull.hi:
            raise PreconditionError("hull endpoints must belong to the set")

    @property
    def branch_count(self) -> int:
        return len(self.offsets)

    def branch_interval(self, i: int) -> Interval:
        """psi_i^{-1}(hull) for the expanding branch psi_i(x) = p*x + e_i."""
        p, e = self.expansion, self.offsets[i]
        return Interval((self.hull.lo - e) / p, (self.hull.hi - e) / p)

    def level_initial_points(self, n: int) -> list[Scalar]:
        """Left endpoints of the level-n construction intervals, sorted."""
        if n < 0:
            raise PreconditionError("depth must be nonnegative")
        pts = [self.hull.lo]
        p = self.expansion
        for _ in range(n):
            pts = [(c - e) / p for c in pts for e in self.offsets]
        pts.sort()
        return pts

    def level_intervals(self, n: int, max_count: int = 1 << 20) -> IntervalSet:
        if self.branch_count**n > max_count:
            raise PreconditionError(f"depth budget exceeded at n={n}")
        length = self.hull.length / self.expansion**n
        return IntervalSet(
            Interval(c, c + length) for c in self.level_initial_points(n)
        )

    def field(self) -> FieldSpec | None:
        for x in (self.expansion, self.hull.lo, self.hull.hi, *self.offsets):
            if x.field is not None:
                return x.field
        return None


@dataclass(frozen=True)
class MiddleCantor:
    """Middle Cantor set C_alpha: branches [0, alpha] and [1-alpha, 1] of [0, 1]."""

    alpha: Scalar

    def __post_init__(self):
        if not (Scalar.rational(0) < self.alpha < Scalar.rational(Fraction(1, 2))):
            raise PreconditionError(f"alpha = {self.alpha} must lie in (0, 1/2)")

    @property
    def p(self) -> Scalar:
        """The expansion slope 1/alpha."""
        return self.alpha.inverse()

    def as_homogeneous(self) -> HomogeneousCantor:
        one = Scalar.rational(1)
        return HomogeneousCantor(
            expansion=self.p,
            offsets=(Scalar.rational(0), one - self.p),
            hull=Interval(Scalar.rational(0), one),
        )

    def level_initial_points(self, n: int) -> list[Scalar]:
        return self.as_homogeneous().level_initial_points(n)

    def level_intervals(self, n: int, max_count: int = 1 << 20) -> IntervalSet:
        return self.as_homogeneous().level_intervals(n, max_count)

    def field(self) -> FieldSpec | None:
        return self.alpha.field


CantorSet = HomogeneousCantor | MiddleCantor


def as_homogeneous(s: CantorSet) -> HomogeneousCantor:
    return s.as_homogeneous() if isinstance(s, MiddleCantor) else s


@dataclass(frozen=True)
class CantorPair:
    """An ordered pair of Cantor sets sharing one quadratic field (or Q)."""

    first: CantorSet
    second: CantorSet

    def __post_init__(self):
        f1, f2 = self.first.field(), self.second.field()
        if f1 is not None and f2 is not None and f1 != f2:
            raise MixedFieldError("pair members live in distinct fields")

    @property
    def both_middle(self) -> bool:
        return isinstance(self.first, MiddleCantor) and isinstance(
            self.second, MiddleCantor
        )

    def field(self) -> FieldSpec | None:
        return self.first.field() or self.second.field()


def middle_pair(alpha: Scalar, beta: Scalar) -> CantorPair:
    return CantorPair(MiddleCantor(alpha), MiddleCantor(beta))


# -- diagnostics ----------------------------------------------------------------


def thickness(s: MiddleCantor) -> Scalar:
    """Newhouse thickness alpha / (1 - 2 alpha), exact."""
    one = Scalar.rational(1)
    return s.alpha / (one - 2 * s.alpha)


def thickness_two_branch(s: HomogeneousCantor) -> Scalar:
    """min(bridge) / gap for a two-branch homogeneous set."""
    if s.branch_count != 2:
        raise PreconditionError("thickness implemented for two-branch sets only")
    left, right = s.branch_interval(0), s.branch_interval(1)
    bridge = min(left.length, right.length)
    gap = right.lo - left.hi
    return bridge / gap


def thickness_product(pair: CantorPair) -> Scalar:
    a = as_homogeneous(pair.first)
    b = as_homogeneous(pair.second)
    return thickness_two_branch(a) * thickness_two_branch(b)


def hausdorff_dim(s: MiddleCantor, prec_bits: int = 120) -> tuple[float, float]:
    """Validated enclosure of HD(C_alpha) = log 2 / log(1/alpha)."""
    lo, hi = _hd_rational_enclosure(s, prec_bits)
    return outward_floats(lo, hi)


def _hd_rational_enclosure(s: MiddleCantor, prec_bits: int):
    alo, ahi = s.alpha.rational_enclosure(prec_bits)
    two = Fraction(2)
    llo, lhi = ln_enclosure(two, prec_bits)
    # log(1/alpha) = -log(alpha); alpha in (0, 1/2) so this is > ln 2 > 0.
    dlo = -ln_enclosure(ahi, prec_bits)[1]
    dhi = -ln_enclosure(alo, prec_bits)[0]
    return llo / dhi, lhi / dlo


def hd_sum_exceeds_one(pair: CantorPair, max_bits: int = DEFAULT_PRECISION_CAP_BITS) -> bool:
    """Decide HD(C_alpha) + HD(C_beta) > 1.

    When both slopes are exact powers of one base c the comparison reduces to
    the exact test 2^(m0+n0) > c^(m0*n0) in the field; otherwise validated
    enclosures are refined up to the precision cap.
    """
    if not pair.both_middle:
        raise PreconditionError("dimension-sum test expects middle sets")
    base = exact_power_base(pair)
    if base is not None:
        c, n0, m0 = base
        lhs = Scalar.rational(2) ** (m0 + n0)
        rhs = c ** (m0 * n0)
        return lhs > rhs
    a: MiddleCantor = pair.first
    b: MiddleCantor = pair.second

    def enclosure(bits):
        alo, ahi = _hd_rational_enclosure(a, bits)
        blo, bhi = _hd_rational_enclosure(b, bits)
        return alo + blo, ahi + bhi

    return refine_until_decisive(enclosure, Fraction(1), max_bits) > 0


def in_omega(pair: CantorPair, max_bits: int = DEFAULT_PRECISION_CAP_BITS) -> bool:
    """Dimension sum strictly above 1 and thickness product strictly below 1."""
    if not pair.both_middle:
        raise PreconditionError("the Omega test expects middle sets")
    one = Scalar.rational(1)
    if not thickness_product(pair) < one:
        return False
    return hd_sum_exceeds_one(pair, max_bits)


# -- log-ratio lattice ------------------------------------------------------------


def log_ratio(
    pair: CantorPair, limit: int = DEFAULT_POWER_SEARCH_LIMIT
) -> Optional[tuple[int, int]]:
    """Reduced (n0, m0) with p^m0 = q^n0 exactly, or None when none is found.

    None means unknown within the search bound; it never asserts that the
    ratio of logarithms is irrational.
    """
    p = as_homogeneous(pair.first).expansion
    q = as_homogeneous(pair.second).expansion
    return slope_log_ratio(p, q, limit)


def slope_log_ratio(
    p: Scalar, q: Scalar, limit: int = DEFAULT_POWER_SEARCH_LIMIT
) -> Optional[tuple[int, int]]:
    if p == q:
        return (1, 1)
    p_pows = [Scalar.rational(1)]
    q_pows = [Scalar.rational(1)]
    for _ in range(limit):
        p_pows.append(p_pows[-1] * p)
        q_pows.append(q_pows[-1] * q)
    seen = {}
    for m0 in range(1, limit + 1):
        seen[p_pows[m0]] = m0
    for n0 in range(1, limit + 1):
        m0 = seen.get(q_pows[n0])
        if m0 is not None and math.gcd(m0, n0) == 1:
            return (n0, m0)
    return None


def _int_nth_root(x: int, n: int) -> int:
    """Exact floor of x**(1/n) by binary search on the bit length."""
    if x < 2:
        return x
    hi = 1 << (x.bit_length() // n + 1)
    lo = 0
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if mid**n <= x:
            lo = mid
        else:
            hi = mid
    return lo


def _rational_nth_root(x: Fraction, n: int) -> Optional[Fraction]:
    if x <= 0:
        return None
    rn = _int_nth_root(x.numerator, n)
    rd = _int_nth_root(x.denominator, n)
    if rn**n == x.numerator and rd**n == x.denominator:
        return Fraction(rn, rd)
    return None


def exact_power_base(
    pair: CantorPair, limit: int = DEFAULT_POWER_SEARCH_LIMIT
) -> Optional[tuple[Scalar, int, int]]:
    """Find (c, n0, m0) with p = c^n0 and q = c^m0 exactly.

    For rational slopes with a rational log ratio the base always exists and
    is rational; for quadratic-field slopes only powers of the field generator
    are recognized.
    """
    p = as_homogeneous(pair.first).expansion
    q = as_homogeneous(pair.second).expansion
    ratio = slope_log_ratio(p, q, limit)
    if ratio is None:
        return None
    n0, m0 = ratio
    fld = p.field or q.field
    if fld is not None:
        g = fld.generator()
        kp = _power_exponent(g, p, limit)
        kq = _power_exponent(g, q, limit)
        if kp is not None and kq is not None:
            d = math.gcd(kp, kq)
            base = g**d
            if base**n0 == p and base**m0 == q and (kp // d, kq // d) == (n0, m0):
                return (base, n0, m0)
        return None
    c = _rational_nth_root(p.as_fraction(), n0)
    if c is None:
        return None
    cs = Scalar(c)
    if cs**n0 == p and cs**m0 == q:
        return (cs, n0, m0)
    return None


def _power_exponent(base: Scalar, x: Scalar, limit: int) -> Optional[int]:
    acc = Scalar.rational(1)
    for k in range(1, limit + 1):
        acc = acc * base
        if acc == x:
            return k
    return None
