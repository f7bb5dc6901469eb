"""Validated rational enclosures for the few transcendental quantities we report.

Every function returns a pair of Fractions (lo, hi) that provably brackets the
exact value; callers that must decide a comparison refine the precision until
the enclosure is decisive or a cap is hit.  Nothing here ever feeds a decision
that the exact scalar layer could make on its own.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .errors import UndecidableError

FrPair = tuple[Fraction, Fraction]


def sqrt_enclosure(x: Fraction, prec_bits: int = 120) -> FrPair:
    """Rational bracket of sqrt(x) for x >= 0, width about 2**-prec_bits."""
    if x < 0:
        raise ValueError("sqrt of negative value")
    if x == 0:
        return Fraction(0), Fraction(0)
    scale = 1 << prec_bits
    t = x.numerator * scale * scale
    lo_int = math.isqrt(t // x.denominator)
    lo = Fraction(lo_int, scale)
    hi = Fraction(lo_int + 2, scale)
    # Belt and braces: the bracket must survive exact squaring.
    while lo * lo > x:
        lo -= Fraction(1, scale)
    while hi * hi < x:
        hi += Fraction(1, scale)
    return lo, hi


@lru_cache(maxsize=None)
def _ln2_enclosure(prec_bits: int) -> FrPair:
    # ln 2 = 2 atanh(1/3)
    return _atanh_enclosure(Fraction(1, 3), prec_bits)


def _atanh_enclosure(z: Fraction, prec_bits: int) -> FrPair:
    """Bracket of 2*atanh(z) for 0 <= z < 1 via the odd power series."""
    if not 0 <= z < 1:
        raise ValueError("atanh argument out of range")
    if z == 0:
        return Fraction(0), Fraction(0)
    eps = Fraction(1, 1 << prec_bits)
    total = Fraction(0)
    term = z
    z2 = z * z
    k = 1
    # Tail after the k-th odd power is bounded by term*z2/(1-z2) (geometric).
    while True:
        total += term / k
        tail = (term * z2) / (1 - z2)
        if tail < eps:
            break
        term *= z2
        k += 2
    lo = 2 * total
    hi = 2 * (total + tail)
    return lo, hi


def ln_enclosure(x: Fraction, prec_bits: int = 120) -> FrPair:
    """Rational bracket of ln(x) for x > 0."""
    if x <= 0:
        raise ValueError("ln of non-positive value")
    if x < 1:
        lo, hi = ln_enclosure(1 / x, prec_bits)
        return -hi, -lo
    # Reduce to m in [1, 2): x = 2**k * m.
    k = 0
    m = x
    while m >= 2:
        m /= 2
        k += 1
    z = (m - 1) / (m + 1)
    slo, shi = _atanh_enclosure(z, prec_bits)
    l2lo, l2hi = _ln2_enclosure(prec_bits)
    return k * l2lo + slo, k * l2hi + shi


def log_ratio_enclosure(num: FrPair, den: FrPair, prec_bits: int = 120) -> FrPair:
    """Bracket of ln(num)/ln(den) given positive brackets with den > 1."""
    nlo, nhi = ln_enclosure(num[0], prec_bits)[0], ln_enclosure(num[1], prec_bits)[1]
    dlo, dhi = ln_enclosure(den[0], prec_bits)[0], ln_enclosure(den[1], prec_bits)[1]
    if dlo <= 0:
        raise ValueError("denominator must exceed 1")
    if nlo >= 0:
        return nlo / dhi, nhi / dlo
    if nhi <= 0:
        return nlo / dlo, nhi / dhi
    return nlo / dlo, nhi / dlo


def _sin_series(x: Fraction, prec_bits: int) -> FrPair:
    # Alternating Taylor series; valid with first-omitted-term bound once the
    # terms decrease, which holds for |x| <= 2 from the first term on.
    eps = Fraction(1, 1 << prec_bits)
    term = x
    total = Fraction(0)
    k = 1
    sign = 1
    while True:
        total += sign * term
        nxt = term * x * x / ((k + 1) * (k + 2))
        if nxt < eps:
            break
        term = nxt
        k += 2
        sign = -sign
    return total - nxt, total + nxt


def sin_enclosure(x: Fraction, prec_bits: int = 120) -> FrPair:
    if x < 0:
        lo, hi = sin_enclosure(-x, prec_bits)
        return -hi, -lo
    if x > 2:
        raise ValueError("sin enclosure only supports |x| <= 2")
    return _sin_series(x, prec_bits)


def cos_enclosure(x: Fraction, prec_bits: int = 120) -> FrPair:
    if x < 0:
        x = -x
    if x > 2:
        raise ValueError("cos enclosure only supports |x| <= 2")
    eps = Fraction(1, 1 << prec_bits)
    term = Fraction(1)
    total = Fraction(0)
    k = 0
    sign = 1
    while True:
        total += sign * term
        nxt = term * x * x / ((k + 1) * (k + 2))
        if nxt < eps:
            break
        term = nxt
        k += 2
        sign = -sign
    return total - nxt, total + nxt


def outward_floats(lo: Fraction, hi: Fraction) -> tuple[float, float]:
    """Round a rational bracket outward to machine floats."""
    flo = float(lo)
    if Fraction(flo) > lo:
        flo = math.nextafter(flo, -math.inf)
    fhi = float(hi)
    if Fraction(fhi) < hi:
        fhi = math.nextafter(fhi, math.inf)
    return flo, fhi


def refine_until_decisive(make_enclosure, against: Fraction, max_bits: int = 512):
    """Return the sign of (value - against), refining until the bracket excludes it.

    ``make_enclosure(bits)`` must produce a valid bracket of the value at the
    requested precision.  Raises UndecidableError at the precision cap; exact
    equality cannot be certified this way and callers must handle it upstream.
    """
    bits = 64
    while bits <= max_bits:
        lo, hi = make_enclosure(bits)
        if lo > against:
            return 1
        if hi < against:
            return -1
        bits *= 2
    raise UndecidableError(
        f"enclosure still straddles {against} at {max_bits} bits"
    )
