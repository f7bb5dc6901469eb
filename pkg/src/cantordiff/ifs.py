"""Synthesis and analysis of the contraction system whose attractor is K - lam*K'.

Construction route: run m0 refinement steps of K and n0 of K' (where the
slopes satisfy p^m0 = q^n0), project each product rectangle along lines of
slope cot(theta) = lam, and keep one affine contraction per distinct
projection.  The resulting system S has uniform ratio p^-m0 and satisfies

    K - lam*K'  =  intersection over n of the depth-n images of the hull.

For the middle-third set C this gives C - C = [-1, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .cantor import (
    CantorPair,
    HomogeneousCantor,
    MiddleCantor,
    as_homogeneous,
    slope_log_ratio,
)
from .errors import BudgetExceededError, PreconditionError
from .intervals import Interval, IntervalSet
from .scalars import FieldSpec, Scalar

DEFAULT_CLASS_BUDGET = 2_000_000


@dataclass(frozen=True)
class LineMap:
    """Contraction t -> ratio*t + offset with 0 < ratio < 1."""

    ratio: Scalar
    offset: Scalar

    def __call__(self, t: Scalar) -> Scalar:
        return self.ratio * t + self.offset

    def apply_interval(self, iv: Interval) -> Interval:
        return Interval(self(iv.lo), self(iv.hi))

    def expanding_offset(self) -> Scalar:
        """Offset a of the expanding return form T(t) = t/ratio + a."""
        return -self.offset / self.ratio


@dataclass(frozen=True)
class IFSProvenance:
    pair: CantorPair
    lam: Scalar
    n0: int
    m0: int


class LineIFS:
    """Deduplicated uniform-ratio contraction system with its exact hull."""

    __slots__ = ("maps", "hull", "provenance")

    def __init__(self, maps: Iterable[LineMap], hull: Interval, provenance=None):
        unique = {}
        for m in maps:
            unique.setdefault(m.offset, m)
        ordered = sorted(unique.values(), key=lambda m: m.offset)
        if not ordered:
            raise PreconditionError("empty map list")
        ratio = ordered[0].ratio
        if any(m.ratio != ratio for m in ordered):
            raise PreconditionError("maps must share one contraction ratio")
        for m in ordered:
            if not hull.contains_interval(m.apply_interval(hull)):
                raise PreconditionError(f"map {m} does not send the hull into itself")
        self.maps: tuple[LineMap, ...] = tuple(ordered)
        self.hull = hull
        self.provenance = provenance

    @property
    def ratio(self) -> Scalar:
        return self.maps[0].ratio

    @property
    def offsets(self) -> tuple[Scalar, ...]:
        return tuple(m.offset for m in self.maps)

    def expanding_offsets_desc(self) -> list[Scalar]:
        """Offsets of the expanding forms, largest first (presentation order)."""
        return sorted((m.expanding_offset() for m in self.maps), reverse=True)

    def field(self) -> FieldSpec | None:
        for x in (self.ratio, self.hull.lo, self.hull.hi, *self.offsets):
            if x.field is not None:
                return x.field
        return None

    def __len__(self) -> int:
        return len(self.maps)

    def __repr__(self) -> str:
        return f"LineIFS({len(self.maps)} maps, ratio={self.ratio}, hull={self.hull})"


@dataclass(frozen=True)
class CoverageReport:
    depth: int
    covered: bool
    gaps: IntervalSet
    class_count: Optional[int]


# -- construction -----------------------------------------------------------------


def difference_hull(K: HomogeneousCantor, Kp: HomogeneousCantor, lam: Scalar) -> Interval:
    if lam.sign() > 0:
        return Interval(K.hull.lo - lam * Kp.hull.hi, K.hull.hi - lam * Kp.hull.lo)
    return Interval(K.hull.lo - lam * Kp.hull.lo, K.hull.hi - lam * Kp.hull.hi)


def generate_ifs_homogeneous(
    K: HomogeneousCantor, Kp: HomogeneousCantor, lam: Scalar, search_limit: int = 64
) -> LineIFS:
    """Difference system for homogeneous sets with commensurable slopes."""
    if lam.sign() == 0:
        raise PreconditionError("lam must be nonzero")
    ratio_pair = slope_log_ratio(K.expansion, Kp.expansion, search_limit)
    if ratio_pair is None:
        raise PreconditionError(
            "slopes admit no rational log relation within the search bound"
        )
    n0, m0 = ratio_pair
    rho = (K.expansion ** m0).inverse()
    cs = K.level_initial_points(m0)
    ds = Kp.level_initial_points(n0)
    hull = difference_hull(K, Kp, lam)
    base = rho * (K.hull.lo - lam * Kp.hull.lo)
    maps = [
        LineMap(rho, c - lam * d - base) for c in cs for d in ds
    ]
    return LineIFS(maps, hull, IFSProvenance(CantorPair(K, Kp), lam, n0, m0))


def generate_ifs(pair: CantorPair, lam: Scalar, search_limit: int = 64) -> LineIFS:
    """Difference system for a pair with rational log ratio of slopes."""
    ifs = generate_ifs_homogeneous(
        as_homogeneous(pair.first), as_homogeneous(pair.second), lam, search_limit
    )
    prov = IFSProvenance(pair, lam, ifs.provenance.n0, ifs.provenance.m0)
    return LineIFS(ifs.maps, ifs.hull, prov)


# -- exact lattice enumeration -------------------------------------------------

# Depth-n composed offsets are b_w = b_{i1} + rho*b_{i2} + ... + rho^(n-1)*b_{in}.
# With R = 1/rho and U_d = R^(d-1) * k * b_w (k clearing the offsets' common
# denominator) the recursion is U_{d+1} = R*U_d + k*b_i.  When R and the field
# reduction are integral this runs on plain integer pairs; dedup on scaled
# values equals dedup on the exact offsets.  Representation change only:
# values stay exact.


class _Lattice:
    def __init__(self, ifs: LineIFS):
        fld = ifs.field()
        self.field = fld
        inv = ifs.ratio.inverse()
        self.inv = inv
        k = 1
        for x in ifs.offsets:
            k = math.lcm(k, x.u.denominator, x.v.denominator)
        self.k = k
        self.a = self.b = None
        if fld is not None and fld.a.denominator == 1 and fld.b.denominator == 1:
            self.a, self.b = int(fld.a), int(fld.b)
        self.r_int: tuple[int, int] | None = None
        if inv.u.denominator == 1 and inv.v.denominator == 1:
            self.r_int = (int(inv.u), int(inv.v))

    def usable(self) -> bool:
        if self.r_int is None:
            return False
        return self.field is None or (self.a is not None and self.b is not None)

    def encode_offsets(self, offsets) -> list[tuple[int, int]]:
        return [(int(x.u * self.k), int(x.v * self.k)) for x in offsets]

    def step(self, xs: set[tuple[int, int]], basis) -> set[tuple[int, int]]:
        ru, rv = self.r_int
        a = self.a if self.a is not None else 0
        b = self.b if self.b is not None else 0
        out = set()
        for (u, v) in xs:
            c = v * rv
            mu = u * ru + b * c
            mv = u * rv + v * ru + a * c
            for (B0, B1) in basis:
                out.add((mu + B0, mv + B1))
        return out

def _enumerate_lattice(ifs: LineIFS, n: int, class_budget: int):
    """Returns (lattice, raw_set) where raw_set holds exact scaled offsets."""
    if n < 1:
        raise PreconditionError("depth must be >= 1")
    lattice = _Lattice(ifs)
    if lattice.usable():
        basis = lattice.encode_offsets(ifs.offsets)
        cur: set[tuple[int, int]] = {(0, 0)}
        for _ in range(n):
            cur = lattice.step(cur, basis)
            if len(cur) > class_budget:
                raise BudgetExceededError(
                    f"class budget {class_budget} exceeded", partial=len(cur)
                )
        return lattice, cur
    gen: set[Scalar] = {Scalar.rational(0)}
    for _ in range(n):
        gen = {b + ifs.ratio * x for x in gen for b in ifs.offsets}
        if len(gen) > class_budget:
            raise BudgetExceededError(
                f"class budget {class_budget} exceeded", partial=len(gen)
            )
    return None, gen


def depth_offsets(
    ifs: LineIFS, n: int, class_budget: int = DEFAULT_CLASS_BUDGET
) -> list[Scalar]:
    """Distinct composed offsets at depth n, exact dedup, unsorted."""
    lattice, raw = _enumerate_lattice(ifs, n, class_budget)
    if lattice is None:
        return list(raw)
    # Undo the scaling once for the whole batch: offset = (U/k) * rho^(n-1).
    rho_pow = ifs.ratio ** (n - 1)
    k = Fraction(lattice.k)
    fld = lattice.field
    out = []
    for (u, v) in raw:
        value = Scalar(Fraction(u) / k, Fraction(v) / k, fld if v else None)
        out.append(value * rho_pow)
    return out


def depth_class_count(
    ifs: LineIFS, n: int, class_budget: int = DEFAULT_CLASS_BUDGET
) -> int:
    """Distinct depth-n class count; never materializes exact offsets."""
    _lattice, raw = _enumerate_lattice(ifs, n, class_budget)
    return len(raw)


def coverage_at_depth(
    ifs: LineIFS, n: int, class_budget: int = DEFAULT_CLASS_BUDGET
) -> CoverageReport:
    """Exact union of all depth-n word images of the hull and its gaps.

    When the depth-1 images already cover the hull the cover persists at
    every depth (applying the maps to a full hull reproduces the full hull),
    so deep reports can skip enumeration; class_count is then None whenever
    the class budget would be exceeded.
    """
    if n < 1:
        raise PreconditionError("depth must be >= 1")
    depth1 = _union_at_depth(ifs, [m.offset for m in ifs.maps], 1)
    tiles = depth1 == IntervalSet([ifs.hull])
    count: Optional[int] = None
    if tiles:
        try:
            count = depth_class_count(ifs, n, class_budget)
        except BudgetExceededError:
            count = None
        return CoverageReport(n, True, IntervalSet(), count)
    try:
        offsets = depth_offsets(ifs, n, class_budget)
    except BudgetExceededError as exc:
        raise BudgetExceededError(
            f"coverage at depth {n}: {exc}", partial=None
        ) from exc
    union = _union_at_depth(ifs, offsets, n)
    gaps = union.complement_within(ifs.hull)
    return CoverageReport(n, gaps.is_empty, gaps, len(offsets))


def _union_at_depth(ifs: LineIFS, offsets, n: int) -> IntervalSet:
    scale = ifs.ratio**n
    lo = scale * ifs.hull.lo
    hi = scale * ifs.hull.hi
    return IntervalSet(Interval(lo + b, hi + b) for b in offsets)


def union_at_depth(ifs: LineIFS, n: int, class_budget: int = DEFAULT_CLASS_BUDGET) -> IntervalSet:
    return _union_at_depth(ifs, depth_offsets(ifs, n, class_budget), n)


# -- membership ---------------------------------------------------------------------


@dataclass(frozen=True)
class MembershipVerdict:
    kind: str  # "in" | "out" | "unknown"
    depth: int
    witness: tuple[int, ...] | None = None
    nodes: int = 0

    @property
    def decided(self) -> bool:
        return self.kind != "unknown"


def attractor_membership(
    ifs: LineIFS, t: Scalar, budget: int = 20_000
) -> MembershipVerdict:
    """Semi-decide t in the attractor by the expanding backward orbit.

    t belongs iff some infinite expanding orbit t -> (t - offset)/ratio stays
    in the hull.  A cycle among visited values certifies membership; full
    escape of every branch certifies non-membership; otherwise Unknown at the
    node budget.  All value comparisons are exact.
    """
    if not ifs.hull.contains(t):
        return MembershipVerdict("out", 0)
    inv = ifs.ratio.inverse()
    maps = ifs.maps
    hull = ifs.hull

    WHITE, GRAY, BLACK = 0, 1, 2
    color: dict[Scalar, int] = {}
    depth_of: dict[Scalar, int] = {}
    parent: dict[Scalar, tuple[Scalar, int] | None] = {t: None}
    stack: list[tuple[Scalar, int]] = [(t, 0)]
    color[t] = WHITE
    depth_of[t] = 0
    nodes = 0
    max_depth = 0

    while stack:
        value, child_idx = stack[-1]
        if child_idx == 0:
            color[value] = GRAY
        if child_idx >= len(maps):
            color[value] = BLACK
            stack.pop()
            continue
        stack[-1] = (value, child_idx + 1)
        child = inv * (value - maps[child_idx].offset)
        if not hull.contains(child):
            max_depth = max(max_depth, depth_of[value] + 1)
            continue
        state = color.get(child, WHITE)
        if state == GRAY:
            word = [child_idx]
            cur = value
            while cur != child:
                prev = parent[cur]
                word.append(prev[1])
                cur = prev[0]
            return MembershipVerdict(
                "in", depth_of[value] + 1, tuple(reversed(word)), nodes
            )
        if state == BLACK:
            continue
        nodes += 1
        if nodes > budget:
            return MembershipVerdict("unknown", depth_of[value] + 1, None, nodes)
        color[child] = WHITE
        depth_of[child] = depth_of[value] + 1
        parent[child] = (value, child_idx)
        max_depth = max(max_depth, depth_of[child])
        stack.append((child, 0))

    return MembershipVerdict("out", max_depth, None, nodes)


# -- corollary machinery ---------------------------------------------------------


@dataclass(frozen=True)
class MeasureVerdict:
    kind: str  # "measure_zero" | "inconclusive"
    class_count: int
    threshold: Scalar  # p^m0: count below it certifies dimension < 1
    lam: Scalar


def alignment_lambda(pair: CantorPair) -> Scalar:
    """The slope q(p-1)/(p(q-1)) that aligns corner projections."""
    p = as_homogeneous(pair.first).expansion
    q = as_homogeneous(pair.second).expansion
    one = Scalar.rational(1)
    return (q * (p - one)) / (p * (q - one))


def measure_zero_by_count(pair: CantorPair, search_limit: int = 64) -> MeasureVerdict:
    """Counting certificate at the alignment slope.

    At lam = q(p-1)/(p(q-1)) distinct depth-1 squares project onto identical
    intervals; when the deduplicated map count stays below p^m0 the similarity
    dimension is below 1 and the difference set has zero Lebesgue measure.
    """
    lam = alignment_lambda(pair)
    ifs = generate_ifs(pair, lam, search_limit)
    p = as_homogeneous(pair.first).expansion
    threshold = p ** ifs.provenance.m0
    count = len(ifs.maps)
    kind = "measure_zero" if Scalar.rational(count) < threshold else "inconclusive"
    return MeasureVerdict(kind, count, threshold, lam)


def scaled_lambda_pair(
    pair: CantorPair, lam: Scalar, i: int, j: int, search_limit: int = 64
) -> tuple[LineIFS, LineIFS]:
    """Systems at lam and at (p^i / q^j) * lam; their dimensions agree."""
    p = as_homogeneous(pair.first).expansion
    q = as_homogeneous(pair.second).expansion
    lam2 = lam * p**i / q**j
    return (
        generate_ifs(pair, lam, search_limit),
        generate_ifs(pair, lam2, search_limit),
    )


def sum_as_difference(pair: CantorPair, lam: Scalar, search_limit: int = 64) -> LineIFS:
    """System whose attractor is C_alpha + lam*C_beta = (C_alpha - lam*C_beta) + lam.

    Uses the symmetry 1 - C_beta = C_beta of middle sets; each difference map
    is conjugated by the translation so the new attractor is the shifted one.
    """
    if not isinstance(pair.second, MiddleCantor):
        raise PreconditionError("sum conversion needs a middle second factor")
    base = generate_ifs(pair, lam, search_limit)
    shift = lam
    one = Scalar.rational(1)
    maps = [
        LineMap(m.ratio, m.offset + shift * (one - m.ratio)) for m in base.maps
    ]
    hull = base.hull.translate(shift)
    return LineIFS(maps, hull, base.provenance)
