"""Renormalization operators on R* x R: orbit membership, escape, recurrence.

The plane carries one expanding operator per branch of K, acting as
(s, t) -> (p*s, p*t + e_i), and one per branch of K', acting as
(s, t) -> (s/q_j, t - (f_j/q_j)*s).  A point t belongs to K - s*K' exactly
when some operator orbit from (s, t) stays in a compact subset of R* x R.
The two families commute as plane maps, so orbit searches may fix a
normalized interleaving without losing any orbit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .cantor import (
    CantorPair,
    HomogeneousCantor,
    as_homogeneous,
    log_ratio,
    thickness_product,
)
from .errors import InternalInvariantError, PreconditionError
from .intervals import Interval
from .scalars import Scalar

ZERO = Scalar.rational(0)
ONE = Scalar.rational(1)


@dataclass(frozen=True)
class PlanePoint:
    s: Scalar
    t: Scalar

    def __post_init__(self):
        if self.s.sign() == 0:
            raise PreconditionError("s must stay nonzero")


@dataclass(frozen=True)
class PlaneOp:
    """Affine self-map (s, t) -> (s_scale*s, t_scale*t + st_coeff*s + t_offset).

    kind "T" encodes an expanding branch of K (s_scale = t_scale = p,
    st_coeff = 0, t_offset = e_i); kind "Tp" a branch of K'
    (s_scale = 1/q_j, t_scale = 1, st_coeff = -f_j/q_j, t_offset = 0).
    """

    s_scale: Scalar
    t_scale: Scalar
    st_coeff: Scalar
    t_offset: Scalar
    kind: str = ""
    index: int = 0

    def __call__(self, pt: PlanePoint) -> PlanePoint:
        return PlanePoint(
            self.s_scale * pt.s,
            self.t_scale * pt.t + self.st_coeff * pt.s + self.t_offset,
        )

    @property
    def name(self) -> str:
        return f"{self.kind}{self.index}"


def make_operators(pair: CantorPair) -> list[PlaneOp]:
    """One T-form per branch of K, one Tp-form per branch of K'."""
    K = as_homogeneous(pair.first)
    Kp = as_homogeneous(pair.second)
    p = K.expansion
    q = Kp.expansion
    ops = [
        PlaneOp(p, p, ZERO, e, "T", i) for i, e in enumerate(K.offsets)
    ]
    qinv = q.inverse()
    ops.extend(
        PlaneOp(qinv, ONE, -f * qinv, ZERO, "Tp", j)
        for j, f in enumerate(Kp.offsets)
    )
    return ops


def apply_word(ops: Iterable[PlaneOp], pt: PlanePoint) -> PlanePoint:
    """Exact composition, first operator applied first."""
    for op in ops:
        pt = op(pt)
    return pt


def difference_hull_at(K: HomogeneousCantor, Kp: HomogeneousCantor, s: Scalar) -> Interval:
    if s.sign() > 0:
        return Interval(K.hull.lo - s * Kp.hull.hi, K.hull.hi - s * Kp.hull.lo)
    return Interval(K.hull.lo - s * Kp.hull.lo, K.hull.hi - s * Kp.hull.hi)


@dataclass(frozen=True)
class OrbitVerdict:
    kind: str  # "in" | "out" | "unknown"
    depth: int
    witness: tuple[str, ...] | None = None
    nodes: int = 0

    @property
    def decided(self) -> bool:
        return self.kind != "unknown"


def membership(
    t: Scalar,
    s: Scalar,
    pair: CantorPair,
    budget: int = 20_000,
    region: Optional["RecurrentRegion"] = None,
) -> OrbitVerdict:
    """Semi-decide t in K - s*K' by normalized operator-orbit search.

    A state whose t-coordinate leaves the difference hull at its s value has
    no bounded continuation and is pruned; a state revisited along its own
    orbit yields a bounded periodic orbit (In); landing in a verified
    recurrent region also certifies In.  Budget exhaustion returns Unknown.

    Each step expands exactly one operator family, chosen so the exponent of
    the net s-multiplier stays inside a fixed window; the families commute,
    so this normalization is complete for both In and Out.
    """
    if s.sign() == 0:
        raise PreconditionError("s must be nonzero")
    if budget < 1:
        raise PreconditionError("budget must be >= 1")
    K = as_homogeneous(pair.first)
    Kp = as_homogeneous(pair.second)
    ratio = log_ratio(pair)
    t_ops = [op for op in make_operators(pair) if op.kind == "T"]
    tp_ops = [op for op in make_operators(pair) if op.kind == "Tp"]

    if ratio is not None:
        n0, m0 = ratio
        e_cap = m0 - 1  # T allowed while e <= m0-1 keeps e in [0, n0+m0-1]
    else:
        n0 = m0 = 0
        e_cap = None

    def escaped(pt: PlanePoint) -> bool:
        return not difference_hull_at(K, Kp, pt.s).contains(pt.t)

    def in_region(pt: PlanePoint) -> bool:
        return region is not None and region.contains(pt)

    start = PlanePoint(s, t)
    if escaped(start):
        return OrbitVerdict("out", 0)
    if in_region(start):
        return OrbitVerdict("in", 0, ("recurrent-region",))

    WHITE, GRAY, BLACK = 0, 1, 2
    color: dict[tuple[Scalar, Scalar], int] = {}
    parent: dict[tuple[Scalar, Scalar], tuple | None] = {}
    depth_of: dict[tuple[Scalar, Scalar], int] = {}
    exp_of: dict[tuple[Scalar, Scalar], int] = {}

    key0 = (start.s, start.t)
    color[key0] = WHITE
    parent[key0] = None
    depth_of[key0] = 0
    exp_of[key0] = 0
    stack: list[tuple[tuple[Scalar, Scalar], int]] = [(key0, 0)]
    nodes = 0
    max_depth = 0

    def family_for(e: int, s_val: Scalar) -> tuple[list[PlaneOp], int]:
        if e_cap is not None:
            return (t_ops, n0) if e <= e_cap else (tp_ops, -m0)
        # Unknown log ratio: keep |s| inside (|s0|/q, |s0|*p] instead.
        return (t_ops, 0) if abs(s_val) <= abs(s) else (tp_ops, 0)

    while stack:
        key, child_idx = stack[-1]
        fam, e_delta = family_for(exp_of[key], key[0])
        if child_idx == 0:
            color[key] = GRAY
        if child_idx >= len(fam):
            color[key] = BLACK
            stack.pop()
            continue
        stack[-1] = (key, child_idx + 1)
        op = fam[child_idx]
        nxt = op(PlanePoint(*key))
        nkey = (nxt.s, nxt.t)
        if escaped(nxt):
            max_depth = max(max_depth, depth_of[key] + 1)
            continue
        if in_region(nxt):
            word = _unwind(parent, key) + (op.name, "recurrent-region")
            return OrbitVerdict("in", depth_of[key] + 1, word, nodes)
        state = color.get(nkey, WHITE)
        if state == GRAY:
            word = _unwind(parent, key, stop=nkey) + (op.name,)
            return OrbitVerdict("in", depth_of[key] + 1, word, nodes)
        if state == BLACK:
            continue
        nodes += 1
        if nodes > budget:
            return OrbitVerdict("unknown", depth_of[key] + 1, None, nodes)
        color[nkey] = WHITE
        parent[nkey] = (key, op.name)
        depth_of[nkey] = depth_of[key] + 1
        exp_of[nkey] = exp_of[key] + e_delta
        max_depth = max(max_depth, depth_of[nkey])
        stack.append((nkey, 0))

    return OrbitVerdict("out", max_depth, None, nodes)


def _unwind(parent, key, stop=None) -> tuple[str, ...]:
    names: list[str] = []
    cur = key
    while parent[cur] is not None and cur != stop:
        prev, name = parent[cur]
        names.append(name)
        cur = prev
    return tuple(reversed(names))


# -- recurrent sets -----------------------------------------------------------------


@dataclass(frozen=True)
class RecurrentRegion:
    """Compact set returned to its interior by the three-case operator rules.

    R = { (s, t) : s_min <= s <= s_max, -b*s + delta <= t <= a - delta } with
    s_max = (1-eps)*s0 and s_min = s_max / (max p * max q), where s0 is the
    first coordinate of the crossing of t = -(b/q0)*s and t = (f1/q1)*s + a.
    """

    s_min: Scalar
    s_max: Scalar
    a: Scalar
    b: Scalar
    eps: Scalar
    delta: Scalar
    s0: Scalar

    def lower_boundary(self, s: Scalar) -> Scalar:
        return -self.b * s + self.delta

    def upper_boundary(self) -> Scalar:
        return self.a - self.delta

    def contains(self, pt: PlanePoint) -> bool:
        return (
            self.s_min <= pt.s <= self.s_max
            and self.lower_boundary(pt.s) <= pt.t <= self.upper_boundary()
        )

    def contains_interior(self, pt: PlanePoint) -> bool:
        return (
            self.s_min < pt.s < self.s_max
            and self.lower_boundary(pt.s) < pt.t < self.upper_boundary()
        )


def _two_branch(K: HomogeneousCantor) -> HomogeneousCantor:
    if K.branch_count != 2:
        raise PreconditionError("recurrent sets implemented for two branches")
    if K.hull.lo.sign() != 0:
        raise PreconditionError("normalize hulls to [0, a] first")
    return K


def recurrence_inequality_holds(
    K: HomogeneousCantor, Kp: HomogeneousCantor, eps: Scalar, delta: Scalar
) -> bool:
    """The displayed product inequality guaranteeing the three-case return."""
    p = K.expansion
    q = Kp.expansion
    a = K.hull.hi
    b = Kp.hull.hi
    e1 = K.offsets[1]
    f1 = Kp.offsets[1]
    # Homogeneous slopes: both branches of each set share one length, so the
    # bridge minima reduce to a/p and b/q.
    lhs1 = (a / p) / (-e1 / p - a / p + delta / p)
    lhs2 = (b / q) / (-f1 / q - b / q)
    return lhs1 * lhs2 > (ONE - eps).inverse()


def build_recurrent_set(pair: CantorPair) -> RecurrentRegion:
    """Assemble R for a pair with thickness product strictly above 1.

    eps and delta come from an exact shrinking search; delta is kept below
    a*eps/2 (stronger than the stated delta < a*eps) so the case-1 transfer
    provably lands back in the t-band.
    """
    if not thickness_product(pair) > ONE:
        raise PreconditionError("thickness product must exceed 1 strictly")
    K = _two_branch(as_homogeneous(pair.first))
    Kp = _two_branch(as_homogeneous(pair.second))
    q = Kp.expansion
    a = K.hull.hi
    b = Kp.hull.hi
    f1 = Kp.offsets[1]
    # s0 = -q0*q1*a / (q0*f1 + q1*b) with q0 = q1 = q.
    s0 = -(q * q * a) / (q * f1 + q * b)
    eps = Scalar.rational(Fraction(1, 4))
    for _ in range(64):
        delta = a * eps / 4
        if recurrence_inequality_holds(K, Kp, eps, delta):
            p = K.expansion
            s_max = (ONE - eps) * s0
            s_min = s_max / (p * q)
            return RecurrentRegion(s_min, s_max, a, b, eps, delta, s0)
        eps = eps / 2
    raise InternalInvariantError(
        "no eps, delta satisfied the recurrence inequality despite thickness > 1"
    )


@dataclass(frozen=True)
class RecurrenceReport:
    grid: int
    points: int
    max_steps: int
    failures: tuple[PlanePoint, ...]

    @property
    def ok(self) -> bool:
        return not self.failures


class _ReturnDriver:
    """Case-A/B/C operator selection with the operators built once."""

    def __init__(self, region: RecurrentRegion, pair: CantorPair):
        self.region = region
        K = _two_branch(as_homogeneous(pair.first))
        Kp = _two_branch(as_homogeneous(pair.second))
        self.p = K.expansion
        self.q = Kp.expansion
        self.a = K.hull.hi
        self.e = K.offsets
        self.f = Kp.offsets
        self.qinv = self.q.inverse()
        self.case_a_floor = region.s_max / self.p
        self.case_b_ceiling = self.a / self.p

    def step(self, pt: PlanePoint) -> PlanePoint:
        r = self.region
        s, t = pt.s, pt.t
        if r.contains(pt):
            if s > self.case_a_floor:
                # Case A: drop s with a Tp-form, keeping t inside the band.
                s2 = s * self.qinv
                if t >= r.lower_boundary(s2):
                    return PlanePoint(s2, t - self.f[0] * self.qinv * s)
                return PlanePoint(s2, t - self.f[1] * self.qinv * s)
            if t < self.case_b_ceiling:  # case B
                return PlanePoint(self.p * s, self.p * t + self.e[0])
            return PlanePoint(self.p * s, self.p * t + self.e[1])  # case C
        # Pull-down phase after a case-B overshoot: t in [a - delta, a).
        if not (r.upper_boundary() <= t < self.a):
            raise InternalInvariantError(f"point {pt} left the controlled corridor")
        if self.p * s <= r.s_max:
            return PlanePoint(self.p * s, self.p * t + self.e[1])
        return PlanePoint(s * self.qinv, t - self.f[0] * self.qinv * s)

    def drive(self, pt: PlanePoint, step_cap: int) -> int:
        current = pt
        for steps in range(step_cap + 1):
            if self.region.contains_interior(current):
                return steps
            current = self.step(current)
        raise InternalInvariantError(
            f"no return to the interior from {pt} in {step_cap} steps"
        )


def return_to_interior(
    pt: PlanePoint, region: RecurrentRegion, pair: CantorPair, step_cap: int = 500
) -> int:
    """Steps taken until the orbit enters the open region; raises on failure."""
    return _ReturnDriver(region, pair).drive(pt, step_cap)


def verify_recurrence(
    region: RecurrentRegion, pair: CantorPair, grid: int = 200, step_cap: int = 500
) -> RecurrenceReport:
    """Drive every grid point of R back into the interior; collect failures."""
    if grid < 2:
        raise PreconditionError("grid resolution must be at least 2")
    driver = _ReturnDriver(region, pair)
    max_steps = 0
    failures: list[PlanePoint] = []
    span_s = region.s_max - region.s_min
    denom = Scalar.rational(grid - 1)
    for i in range(grid):
        s = region.s_min + span_s * Scalar.rational(i) / denom
        t_lo = region.lower_boundary(s)
        span_t = region.upper_boundary() - t_lo
        for j in range(grid):
            t = t_lo + span_t * Scalar.rational(j) / denom
            pt = PlanePoint(s, t)
            try:
                max_steps = max(max_steps, driver.drive(pt, step_cap))
            except InternalInvariantError:
                failures.append(pt)
    return RecurrenceReport(grid, grid * grid, max_steps, tuple(failures))


# -- the thickness route to full intervals ---------------------------------------


def thickness_interval(pair: CantorPair) -> Interval:
    """[s1, s0]: the slope interval on which K - lam*K' fills its hull."""
    K = _two_branch(as_homogeneous(pair.first))
    Kp = _two_branch(as_homogeneous(pair.second))
    p = K.expansion
    q = Kp.expansion
    a = K.hull.hi
    b = Kp.hull.hi
    e1 = K.offsets[1]
    f1 = Kp.offsets[1]
    s1 = (-e1 / p - a / p) / b
    s0 = a / (-f1 / q - b / q)
    return Interval(s1, s0)


def full_interval_via_thickness(pair: CantorPair, lam: Scalar) -> bool:
    """True iff s1 <= lam <= s0; requires thickness product >= 1 exactly."""
    if not thickness_product(pair) >= ONE:
        raise PreconditionError("thickness route requires tau * tau' >= 1")
    return thickness_interval(pair).contains(lam)
