"""Regular linking of depth-1 projections and interval certificates for f(K)-g(K').

The linking condition asks, over a slope range (m1, m2): (i) the union of the
open depth-1 images stays connected at every slope, and (ii) any two images
that ever meet share one common point across the whole range.  Image
endpoints are affine in the slope, so both conditions reduce to finitely many
exact comparisons at endpoint-line crossings and cell midpoints.

A certificate then places a product square around an exact base point
(x0, y0) deep enough that the derivative-ratio cone stays inside the linked
range; the projection along the level curves of f(x) - g(y) inherits the
overlap structure, which pins an interval inside f(C_alpha) - g(C_beta).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Literal, Optional

from .cantor import CantorPair, MiddleCantor, as_homogeneous
from .errors import PreconditionError
from .ifs import LineIFS, generate_ifs
from .intervals import Interval
from .numerics import FrPair, cos_enclosure, sin_enclosure, sqrt_enclosure
from .scalars import Scalar

ONE = Scalar.rational(1)
ZERO = Scalar.rational(0)


# -- the function catalog -----------------------------------------------------------

FnTag = Literal["affine", "square", "neg_square", "sqrt", "sin", "cos", "neg_cos"]


@dataclass(frozen=True)
class SmoothFn:
    """Catalog function with hand-written derivative enclosures.

    Enclosures take a rational bracket of the argument and a precision and
    return a rational bracket of the value; monotonic_on records the domain
    on which the evaluation rules are valid.
    """

    tag: FnTag
    a: Fraction = Fraction(1)
    b: Fraction = Fraction(0)

    @property
    def name(self) -> str:
        if self.tag == "affine":
            return f"affine({self.a},{self.b})"
        return self.tag

    def value(self, x: FrPair, bits: int = 120) -> FrPair:
        lo, hi = x
        if self.tag == "affine":
            vals = sorted((self.a * lo + self.b, self.a * hi + self.b))
            return vals[0], vals[1]
        if self.tag == "square":
            return _square_enclosure(lo, hi)
        if self.tag == "neg_square":
            a, b = _square_enclosure(lo, hi)
            return -b, -a
        if self.tag == "sqrt":
            return sqrt_enclosure(lo, bits)[0], sqrt_enclosure(hi, bits)[1]
        if self.tag == "sin":  # increasing on [0, 2] is false; valid on [0, pi/2]
            return sin_enclosure(lo, bits)[0], sin_enclosure(hi, bits)[1]
        if self.tag == "cos":  # decreasing on [0, 2]
            return cos_enclosure(hi, bits)[0], cos_enclosure(lo, bits)[1]
        if self.tag == "neg_cos":
            a, b = cos_enclosure(hi, bits)[0], cos_enclosure(lo, bits)[1]
            return -b, -a
        raise PreconditionError(f"unknown catalog tag {self.tag}")

    def derivative(self, x: FrPair, bits: int = 120) -> FrPair:
        lo, hi = x
        if self.tag == "affine":
            return self.a, self.a
        if self.tag == "square":
            return 2 * lo, 2 * hi
        if self.tag == "neg_square":
            return -2 * hi, -2 * lo
        if self.tag == "sqrt":
            if lo <= 0:
                raise PreconditionError("sqrt derivative needs x > 0")
            return (
                1 / (2 * sqrt_enclosure(hi, bits)[1]),
                1 / (2 * sqrt_enclosure(lo, bits)[0]),
            )
        if self.tag == "sin":  # derivative cos, decreasing on [0, 2]
            return cos_enclosure(hi, bits)[0], cos_enclosure(lo, bits)[1]
        if self.tag == "cos":  # derivative -sin
            a, b = sin_enclosure(lo, bits)[0], sin_enclosure(hi, bits)[1]
            return -b, -a
        if self.tag == "neg_cos":  # derivative sin, increasing on [0, pi/2]
            return sin_enclosure(lo, bits)[0], sin_enclosure(hi, bits)[1]
        raise PreconditionError(f"unknown catalog tag {self.tag}")

    @property
    def monotonic_on(self) -> tuple[Fraction, Fraction]:
        if self.tag in ("sin", "cos", "neg_cos"):
            return (Fraction(0), Fraction(3, 2))  # inside [0, pi/2]
        if self.tag == "sqrt":
            return (Fraction(0), Fraction(10**6))
        return (Fraction(-(10**6)), Fraction(10**6))

    def approx(self, x: float) -> float:
        import math

        if self.tag == "affine":
            return float(self.a) * x + float(self.b)
        if self.tag == "square":
            return x * x
        if self.tag == "neg_square":
            return -x * x
        if self.tag == "sqrt":
            return math.sqrt(x)
        if self.tag == "sin":
            return math.sin(x)
        if self.tag == "cos":
            return math.cos(x)
        if self.tag == "neg_cos":
            return -math.cos(x)
        raise PreconditionError(f"unknown catalog tag {self.tag}")


def _square_enclosure(lo: Fraction, hi: Fraction) -> FrPair:
    cands = (lo * lo, hi * hi)
    if lo <= 0 <= hi:
        return Fraction(0), max(cands)
    return min(cands), max(cands)


CATALOG: dict[str, SmoothFn] = {
    "square": SmoothFn("square"),
    "neg_square": SmoothFn("neg_square"),
    "sqrt": SmoothFn("sqrt"),
    "sin": SmoothFn("sin"),
    "cos": SmoothFn("cos"),
    "neg_cos": SmoothFn("neg_cos"),
    "identity": SmoothFn("affine", Fraction(1), Fraction(0)),
}


# -- exact Cantor points from digit sequences -----------------------------------


def cantor_point(
    s: MiddleCantor, preperiod: tuple[int, ...], period: tuple[int, ...]
) -> Scalar:
    """Exact value of the eventually periodic digit expansion in C_alpha.

    Digits pick the left (0) or right (1) branch; the value is
    (1 - alpha) * sum(digit_k * alpha^k) with the tail summed in closed form.
    """
    if not period:
        raise PreconditionError("period must be nonempty (use (0,) for a tail of zeros)")
    if any(d not in (0, 1) for d in (*preperiod, *period)):
        raise PreconditionError("digits must be 0 or 1")
    alpha = s.alpha
    head = ZERO
    power = ONE
    for d in preperiod:
        if d:
            head = head + power
        power = power * alpha
    block = ZERO
    block_power = power
    for d in period:
        if d:
            block = block + block_power
        block_power = block_power * alpha
    tail = block / (ONE - alpha ** len(period))
    return (ONE - alpha) * (head + tail)


# -- regular linking ----------------------------------------------------------------


@dataclass(frozen=True)
class LinkRange:
    m1: Scalar
    m2: Scalar

    def __post_init__(self):
        if not self.m1 < self.m2:
            raise PreconditionError("need m1 < m2")
        if self.m1.sign() <= 0 <= self.m2.sign() and not (
            self.m1.sign() > 0 or self.m2.sign() < 0
        ):
            raise PreconditionError("the slope range must exclude 0")


@dataclass(frozen=True)
class _AffineLine:
    """c0 + c1 * lam, exact in lam."""

    c0: Scalar
    c1: Scalar

    def at(self, lam: Scalar) -> Scalar:
        return self.c0 + self.c1 * lam


@dataclass(frozen=True)
class LinkReport:
    linked: bool
    crossings: tuple[Scalar, ...]
    failure: Optional[str]


def _image_lines(pair: CantorPair, positive: bool) -> list[tuple[_AffineLine, _AffineLine]]:
    """(left, right) endpoint lines of the open depth-1 images, affine in lam.

    The open domain is the interior of the difference hull; for lam > 0 that
    is (-lam*B', ... ) computed from the member hulls, for lam < 0 the other
    corner pairing.  Duplicate offset lines are kept; dedup happens per slope.
    """
    K = as_homogeneous(pair.first)
    Kp = as_homogeneous(pair.second)
    from .cantor import slope_log_ratio

    ratio = slope_log_ratio(K.expansion, Kp.expansion)
    if ratio is None:
        raise PreconditionError("regular linking needs a rational slope relation")
    n0, m0 = ratio
    rho = (K.expansion**m0).inverse()
    cs = K.level_initial_points(m0)
    ds = Kp.level_initial_points(n0)
    A, B = K.hull.lo, K.hull.hi
    Ap, Bp = Kp.hull.lo, Kp.hull.hi
    if positive:
        h_lo = _AffineLine(A, -Bp)  # hull = [A - lam*B', B - lam*A']
        h_hi = _AffineLine(B, -Ap)
    else:
        h_lo = _AffineLine(A, -Ap)
        h_hi = _AffineLine(B, -Bp)
    lines = []
    for c in cs:
        for d in ds:
            # image = rho*hull + offset, offset = c - lam*d - rho*(A - lam*A')
            off = _AffineLine(c - rho * A, -d + rho * Ap)
            left = _AffineLine(off.c0 + rho * h_lo.c0, off.c1 + rho * h_lo.c1)
            right = _AffineLine(off.c0 + rho * h_hi.c0, off.c1 + rho * h_hi.c1)
            lines.append((left, right))
    return lines


def _line_crossings(lines: list[_AffineLine], rng: LinkRange) -> list[Scalar]:
    out = []
    for i in range(len(lines)):
        for j in range(i + 1, len(lines)):
            d1 = lines[i].c1 - lines[j].c1
            d0 = lines[j].c0 - lines[i].c0
            if d1.sign() == 0:
                continue
            lam = d0 / d1
            if rng.m1 < lam < rng.m2:
                out.append(lam)
    return sorted(set(out))


def _connected_at(lines, lam: Scalar) -> bool:
    intervals = sorted(
        {(left.at(lam), right.at(lam)) for left, right in lines},
        key=lambda ab: ab[0],
    )
    reach = None
    for a, b in intervals:
        if a >= b:
            continue
        if reach is None:
            reach = b
        elif a < reach:
            reach = max(reach, b)
        else:
            return False  # gap or mere touching between open intervals
    return True


def regularly_linked(pair: CantorPair, rng: LinkRange) -> LinkReport:
    """Decide the two linking conditions exactly over the open range.

    Connectivity is piecewise constant between endpoint-line crossings, so it
    is evaluated at every interior crossing and at every cell midpoint (the
    range endpoints act as limits only; failure exactly on the boundary of
    the closed range does not disqualify the open range).  Pairwise overlap
    windows have affine endpoints, so the persistent-common-point condition
    is the endpoint intersection test.
    """
    if rng.m1.sign() < 0 < rng.m2.sign():
        raise PreconditionError("the slope range must not straddle 0")
    positive = rng.m1.sign() > 0
    lines = _image_lines(pair, positive)
    flat = [l for pair_ in lines for l in pair_]
    crossings = _line_crossings(flat, rng)
    # Sample set: interior crossings plus midpoints of the subdivision cells.
    cells = [rng.m1, *crossings, rng.m2]
    samples = list(crossings)
    two = Scalar.rational(2)
    for a, b in zip(cells, cells[1:]):
        samples.append((a + b) / two)
    for lam in samples:
        if not _connected_at(lines, lam):
            return LinkReport(False, tuple(crossings), f"union disconnected at lam={lam}")

    # Condition (ii): for each pair of images, either never overlapping on the
    # range or sharing one point for every slope in it.
    m1, m2 = rng.m1, rng.m2
    for i in range(len(lines)):
        li, ri = lines[i]
        for j in range(i + 1, len(lines)):
            lj, rj = lines[j]
            if (
                li.c0 == lj.c0
                and li.c1 == lj.c1
                and ri.c0 == rj.c0
                and ri.c1 == rj.c1
            ):
                continue  # identical image lines: the same map
            overlaps_somewhere = _overlap_possible(li, ri, lj, rj, rng, samples)
            if not overlaps_somewhere:
                continue
            left_star = max(li.at(m1), lj.at(m1), li.at(m2), lj.at(m2))
            right_star = min(ri.at(m1), rj.at(m1), ri.at(m2), rj.at(m2))
            if not left_star < right_star:
                return LinkReport(
                    False,
                    tuple(crossings),
                    f"images {i} and {j} overlap without a persistent common point",
                )
    return LinkReport(True, tuple(crossings), None)


def _overlap_possible(li, ri, lj, rj, rng: LinkRange, samples) -> bool:
    for lam in (rng.m1, *samples, rng.m2):
        lo = max(li.at(lam), lj.at(lam))
        hi = min(ri.at(lam), rj.at(lam))
        if lo < hi:
            return True
    return False


# -- certificates ------------------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    f: SmoothFn
    g: SmoothFn
    base_x: Scalar
    base_y: Scalar
    x_digits: tuple[int, ...]
    y_digits: tuple[int, ...]
    depth: int
    rng: LinkRange
    ratio_bounds: tuple[Fraction, Fraction]  # g'(y)/f'(x) over the square
    square_x: Interval
    square_y: Interval

    @property
    def verdict(self) -> str:
        return "interval-certified"


def _digits_of_point(s: MiddleCantor, preperiod, period, depth: int) -> tuple[int, ...]:
    digits = list(preperiod)
    while len(digits) < depth:
        digits.extend(period)
    return tuple(digits[:depth])


def _cylinder(s: MiddleCantor, digits: tuple[int, ...]) -> Interval:
    left = ZERO
    power = ONE
    alpha = s.alpha
    for d in digits:
        if d:
            left = left + (ONE - alpha) * power
        power = power * alpha
    return Interval(left, left + power)


def interval_certificate(
    f: SmoothFn,
    g: SmoothFn,
    pair: CantorPair,
    base: tuple[tuple[tuple[int, ...], tuple[int, ...]], tuple[tuple[int, ...], tuple[int, ...]]],
    rng: LinkRange,
    max_depth: int = 60,
    bits: int = 120,
    check_linked: bool = True,
) -> Certificate:
    """Certify an interval inside f(C_alpha) - g(C_beta).

    base gives the two exact points as digit sequences ((pre, per), (pre, per)).
    The derivative ratio g'(y0)/f'(x0) must sit strictly inside the linked
    range; the construction square around the base then grows in depth until
    the ratio bounds hold uniformly over it.
    """
    if not (isinstance(pair.first, MiddleCantor) and isinstance(pair.second, MiddleCantor)):
        raise PreconditionError("certificates expect middle pairs")
    if check_linked:
        report = regularly_linked(pair, rng)
        if not report.linked:
            raise PreconditionError(f"range not regularly linked: {report.failure}")
    (x_pre, x_per), (y_pre, y_per) = base
    x0 = cantor_point(pair.first, x_pre, x_per)
    y0 = cantor_point(pair.second, y_pre, y_per)

    x0_enc = x0.rational_enclosure(bits)
    y0_enc = y0.rational_enclosure(bits)
    f_at_base = f.derivative(x0_enc, bits)
    if f_at_base[0] <= 0 <= f_at_base[1]:
        raise PreconditionError("f'(x0) must be bounded away from zero")
    ratio0 = _interval_div(g.derivative(y0_enc, bits), f_at_base)
    m1 = rng.m1.rational_enclosure(bits)
    m2 = rng.m2.rational_enclosure(bits)
    if not (m1[1] < ratio0[0] and ratio0[1] < m2[0]):
        raise PreconditionError(
            f"derivative ratio {ratio0} is not strictly inside the range"
        )

    for depth in range(1, max_depth + 1):
        xd = _digits_of_point(pair.first, x_pre, x_per, depth)
        yd = _digits_of_point(pair.second, y_pre, y_per, depth)
        cx = _cylinder(pair.first, xd)
        cy = _cylinder(pair.second, yd)
        fx = f.derivative(_iv_enc(cx, bits), bits)
        if fx[0] <= 0 <= fx[1]:
            continue
        ratio = _interval_div(g.derivative(_iv_enc(cy, bits), bits), fx)
        if m1[1] < ratio[0] and ratio[1] < m2[0]:
            return Certificate(
                f, g, x0, y0, xd, yd, depth, rng, ratio, cx, cy
            )
    raise PreconditionError(f"no subsquare satisfied the ratio bounds by depth {max_depth}")


def _iv_enc(iv: Interval, bits: int) -> FrPair:
    return iv.lo.rational_enclosure(bits)[0], iv.hi.rational_enclosure(bits)[1]


def _interval_div(num: FrPair, den: FrPair) -> FrPair:
    if den[0] <= 0 <= den[1]:
        raise PreconditionError("division by an interval containing zero")
    cands = (num[0] / den[0], num[0] / den[1], num[1] / den[0], num[1] / den[1])
    return min(cands), max(cands)


def certificate_smoke_gap(
    cert: Certificate,
    pair: CantorPair,
    sample_depth: int = 10,
    max_pairs: int = 20_000,
) -> tuple[float, float]:
    """(largest value gap, guaranteed modulus) over deep sample points in the square.

    A density check, not a proof: the certified interval mechanism should
    leave no gap beyond a few widths of the depth-10 subsquares.
    """
    xs = _level_points_within(pair.first, cert.x_digits, sample_depth)
    ys = _level_points_within(pair.second, cert.y_digits, sample_depth)
    stride = max(1, (len(xs) * len(ys)) // max_pairs)
    values = []
    k = 0
    for x in xs:
        for y in ys:
            if k % stride == 0:
                values.append(cert.f.approx(float(x)) - cert.g.approx(float(y)))
            k += 1
    values.sort()
    biggest = max(
        (b - a for a, b in zip(values, values[1:])), default=float("inf")
    )
    fx = cert.f.derivative(_iv_enc(cert.square_x, 80))
    gy = cert.g.derivative(_iv_enc(cert.square_y, 80))
    mf = max(abs(fx[0]), abs(fx[1]))
    mg = max(abs(gy[0]), abs(gy[1]))
    ax = float(pair.first.alpha.float_enclosure()[1])
    ay = float(pair.second.alpha.float_enclosure()[1])
    modulus = 4.0 * (float(mf) * ax**sample_depth + float(mg) * ay**sample_depth)
    return biggest, modulus


def _level_points_within(s: MiddleCantor, digits: tuple[int, ...], depth: int):
    """Endpoints of the level-`depth` intervals inside the digit cylinder."""
    base = _cylinder(s, digits)
    alpha = s.alpha
    pts = [base.lo]
    length = base.length
    for _ in range(depth - len(digits)):
        shift = length * (ONE - alpha)
        pts = [p for q in pts for p in (q, q + shift)]
        length = length * alpha
    return sorted({*pts, *[p + length for p in pts]})


# -- weak stable range ----------------------------------------------------------


@dataclass(frozen=True)
class WeakStableRange:
    m: Scalar  # linked verified on (1/m, m)
    fails_at: Optional[Scalar]  # smallest probed m where linking failed


def weak_stable_range(
    pair: CantorPair, resolution: Fraction = Fraction(1, 1 << 16), cap: int = 1024
) -> Optional[WeakStableRange]:
    """Near-maximal m > 1 with full depth-1 union at slope 1 and linking on (1/m, m).

    None when the union of open images at slope 1 misses part of the open
    hull.  Linking is monotone under range shrinking, but the symmetric-range
    supremum need not sit at an endpoint-line crossing (the persistence
    boundary couples the values at 1/m and m), so the supremum is bracketed
    by exact-verification bisection down to the requested resolution; the
    returned m is verified, fails_at is a verified failure.
    """
    one = ONE
    lines = _image_lines(pair, positive=True)
    if not _covers_open_hull(pair, lines, one):
        return None

    def linked(m: Scalar) -> bool:
        return regularly_linked(pair, LinkRange(m.inverse(), m)).linked

    lo = one + Scalar.rational(Fraction(1, 1024))
    if not linked(lo):
        return None
    hi: Optional[Scalar] = None
    probe = Scalar.rational(2)
    while hi is None and probe <= Scalar.rational(cap):
        if linked(probe):
            lo = probe
            probe = probe * 2
        else:
            hi = probe
    if hi is None:
        return WeakStableRange(lo, None)
    res = Scalar.rational(resolution)
    two = Scalar.rational(2)
    while hi - lo > res:
        mid = (lo + hi) / two
        if linked(mid):
            lo = mid
        else:
            hi = mid
    return WeakStableRange(lo, hi)


def _covers_open_hull(pair: CantorPair, lines, lam: Scalar) -> bool:
    if not _connected_at(lines, lam):
        return False
    intervals = [(l.at(lam), r.at(lam)) for l, r in lines]
    lo = min(a for a, _ in intervals)
    hi = max(b for _, b in intervals)
    hull = generate_ifs(pair, lam).hull
    return lo == hull.lo and hi == hull.hi
