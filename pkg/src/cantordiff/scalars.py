"""Exact arithmetic over Q and real quadratic fields Q(g), g^2 = a*g + b.

Every quantity the package computes with (set parameters, map offsets,
interval endpoints, region boundaries) is a :class:`Scalar`: either a plain
rational or a pair u + v*g living in a declared :class:`FieldSpec`.  All
comparisons are decided algebraically; floating point appears only in the
reporting enclosures.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

from .errors import MixedFieldError, ParseError
from .numerics import outward_floats, sqrt_enclosure

RatLike = Union[int, Fraction]


def _is_perfect_square(x: Fraction) -> bool:
    if x < 0:
        return False
    rn = math.isqrt(x.numerator)
    rd = math.isqrt(x.denominator)
    return rn * rn == x.numerator and rd * rd == x.denominator


@dataclass(frozen=True)
class FieldSpec:
    """The quadratic field Q(g) with g^2 = a*g + b and g the larger real root.

    Valid specs have positive non-square discriminant a^2 + 4b (a square would
    make g rational; use plain rationals instead) and larger root g > 1.
    Degree >= 3 extensions are out of scope.
    """

    a: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        d = self.discriminant
        if d <= 0:
            raise ParseError(f"discriminant a^2+4b = {d} must be positive")
        if _is_perfect_square(d):
            raise ParseError(
                f"discriminant {d} is a perfect square; the root is rational "
                "and the field degenerates — use plain rationals"
            )
        if self.root_cmp_rational(Fraction(1)) <= 0:
            raise ParseError("the larger root must exceed 1")

    @property
    def discriminant(self) -> Fraction:
        return self.a * self.a + 4 * self.b

    def root_cmp_rational(self, r: Fraction) -> int:
        """Exact sign of (g - r) where g = (a + sqrt(a^2+4b)) / 2."""
        t = 2 * r - self.a  # g > r  <=>  sqrt(D) > t
        if t < 0:
            return 1
        d = self.discriminant
        tt = t * t
        if d > tt:
            return 1
        if d < tt:
            return -1
        return 0

    def root_enclosure(self, prec_bits: int = 120) -> tuple[Fraction, Fraction]:
        slo, shi = sqrt_enclosure(self.discriminant, prec_bits)
        return (self.a + slo) / 2, (self.a + shi) / 2

    def is_pisot(self) -> bool:
        """True when g > 1 and the conjugate a - g has absolute value < 1.

        Requires integer a, b so that g is an algebraic integer.
        """
        if self.a.denominator != 1 or self.b.denominator != 1:
            return False
        # |a - g| < 1  <=>  a - 1 < g < a + 1; g > a/2 always, so only the
        # upper side needs checking along with g > 1.
        return (
            self.root_cmp_rational(Fraction(1)) > 0
            and self.root_cmp_rational(self.a - 1) > 0
            and self.root_cmp_rational(self.a + 1) < 0
        )

    def generator(self) -> "Scalar":
        return Scalar(Fraction(0), Fraction(1), self)

    def declaration(self) -> str:
        a, b = self.a, self.b
        if a == 1:
            head = "g"
        elif a == -1:
            head = "-g"
        else:
            head = f"{a}g"
        tail = f"+{b}" if b >= 0 else f"{b}"
        return f"g^2={head}{tail}"

    def __repr__(self) -> str:
        return f"FieldSpec({self.declaration()!r})"


GOLDEN = FieldSpec(Fraction(1), Fraction(1))


@dataclass(frozen=True)
class Scalar:
    """Immutable exact number u + v*g (v = 0 and field None for rationals)."""

    u: Fraction
    v: Fraction = Fraction(0)
    field: FieldSpec | None = None

    def __post_init__(self):
        object.__setattr__(self, "u", Fraction(self.u))
        object.__setattr__(self, "v", Fraction(self.v))
        if self.v != 0 and self.field is None:
            raise MixedFieldError("irrational part requires a FieldSpec")
        if self.v == 0 and self.field is not None:
            # Normalize rational-valued scalars so equality and hashing are
            # field-independent.
            object.__setattr__(self, "field", None)

    # -- construction helpers ------------------------------------------------

    @staticmethod
    def rational(x: RatLike) -> "Scalar":
        return Scalar(Fraction(x))

    @property
    def is_rational(self) -> bool:
        return self.v == 0

    def as_fraction(self) -> Fraction:
        if not self.is_rational:
            raise ValueError(f"{self} is not rational")
        return self.u

    # -- field plumbing ------------------------------------------------------

    def _join(self, other: "Scalar") -> FieldSpec | None:
        if self.field is None:
            return other.field
        if other.field is None or other.field == self.field:
            return self.field
        raise MixedFieldError(
            f"cannot combine scalars from {self.field} and {other.field}"
        )

    def _lift(self, x) -> "Scalar":
        if isinstance(x, Scalar):
            return x
        if isinstance(x, (int, Fraction)):
            return Scalar(Fraction(x))
        return NotImplemented

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return Scalar(self.u + other.u, self.v + other.v, self._join(other))

    __radd__ = __add__

    def __neg__(self):
        return Scalar(-self.u, -self.v, self.field)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        field = self._join(other)
        cross = self.v * other.v
        if cross == 0:
            return Scalar(
                self.u * other.u, self.u * other.v + self.v * other.u, field
            )
        # (u1 + v1 g)(u2 + v2 g) with g^2 = a g + b
        return Scalar(
            self.u * other.u + field.b * cross,
            self.u * other.v + self.v * other.u + field.a * cross,
            field,
        )

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if self.sign() == 0:
            raise ZeroDivisionError("scalar division by zero")
        if self.is_rational:
            return Scalar(1 / self.u)
        # Multiply by the conjugate u + v(a - g); the norm u(u + a v) - b v^2
        # is rational and nonzero for nonzero elements.
        a, b = self.field.a, self.field.b
        norm = self.u * (self.u + a * self.v) - b * self.v * self.v
        return Scalar((self.u + a * self.v) / norm, -self.v / norm, self.field)

    def __truediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = Scalar.rational(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- exact comparison ----------------------------------------------------

    def sign(self) -> int:
        """Exact sign, never via floating approximation."""
        if self.v == 0:
            return (self.u > 0) - (self.u < 0)
        if self.v > 0:
            if self.u >= 0:
                return 1
            return self.field.root_cmp_rational(-self.u / self.v)
        return -(-self).sign()

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        if self.field is not None and other.field is not None:
            if self.field != other.field:
                return False
        return self.u == other.u and self.v == other.v

    def __hash__(self):
        if self.v == 0:
            return hash(self.u)
        return hash((self.u, self.v))

    def _cmp(self, other) -> int:
        other = self._lift(other)
        if other is NotImplemented:
            raise TypeError(f"cannot compare Scalar with {type(other)}")
        if self.v == other.v:
            # Equal irrational parts (same field by the combination rules):
            # the sign is carried by the rational parts alone.
            if self.field == other.field or self.v == 0:
                return (self.u > other.u) - (self.u < other.u)
        return (self - other).sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __bool__(self):
        return self.sign() != 0

    # -- reporting enclosures --------------------------------------------------

    def rational_enclosure(self, prec_bits: int = 120) -> tuple[Fraction, Fraction]:
        if self.v == 0:
            return self.u, self.u
        glo, ghi = self.field.root_enclosure(prec_bits)
        if self.v > 0:
            return self.u + self.v * glo, self.u + self.v * ghi
        return self.u + self.v * ghi, self.u + self.v * glo

    def float_enclosure(self, prec_bits: int = 120) -> tuple[float, float]:
        """Validated (lo, hi) floats; for reporting only, never for decisions."""
        return outward_floats(*self.rational_enclosure(prec_bits))

    def __float__(self):
        lo, hi = self.float_enclosure()
        return (lo + hi) / 2

    # -- text form -------------------------------------------------------------

    def __str__(self) -> str:
        return format_scalar(self)

    def __repr__(self) -> str:
        return f"Scalar({format_scalar(self)!r})"


ZERO = Scalar.rational(0)
ONE = Scalar.rational(1)


def common_denominator(xs: Iterable[Scalar]) -> int:
    """Smallest k such that k*x has integer components for every x."""
    xs = list(xs)
    if not xs:
        raise ValueError("empty scalar list")
    k = 1
    for x in xs:
        k = math.lcm(k, x.u.denominator, x.v.denominator)
    return k


# -- parsing / formatting ------------------------------------------------------

_TERM_RE = re.compile(r"([+-]?)(\d+(?:/\d+)?)?(g)?", re.ASCII)
_FIELD_RE = re.compile(
    r"^g\^2=(?P<ag>[+-]?(?:\d+(?:/\d+)?)?g)?(?P<b>[+-]?\d+(?:/\d+)?)?$", re.ASCII
)


def parse_scalar(text: str, field: FieldSpec | None = None) -> Scalar:
    """Parse exact scalar text like ``3/7``, ``2+3g``, ``-g``, ``2-2g+2g``.

    The ``g`` symbol refers to the generator of ``field``; using it without a
    field declaration is an error.  Parsing is exact and round-trips through
    :func:`format_scalar`.
    """
    s = text.replace(" ", "")
    if not s:
        raise ParseError("empty scalar text")
    u = Fraction(0)
    v = Fraction(0)
    pos = 0
    first = True
    while pos < len(s):
        m = _TERM_RE.match(s, pos)
        if not m or m.end() == pos:
            raise ParseError(f"bad scalar syntax at {s[pos:]!r} in {text!r}")
        sign_s, coef_s, g_s = m.groups()
        if not first and not sign_s:
            raise ParseError(f"missing sign between terms in {text!r}")
        if coef_s is None and g_s is None:
            raise ParseError(f"dangling sign in {text!r}")
        try:
            coef = Fraction(coef_s) if coef_s else Fraction(1)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad coefficient {coef_s!r} in {text!r}") from exc
        if sign_s == "-":
            coef = -coef
        if g_s:
            v += coef
        else:
            u += coef
        pos = m.end()
        first = False
    if v != 0 and field is None:
        raise ParseError(f"{text!r} uses g but no field was declared")
    if v == 0:
        return Scalar(u)
    return Scalar(u, v, field)


def format_scalar(x: Scalar) -> str:
    if x.v == 0:
        return str(x.u)
    if x.v == 1:
        g_part = "g"
    elif x.v == -1:
        g_part = "-g"
    else:
        g_part = f"{x.v}g"
    if x.u == 0:
        return g_part
    if x.v > 0:
        return f"{x.u}+{g_part}"
    return f"{x.u}{g_part}"


def parse_field(text: str) -> FieldSpec:
    """Parse a declaration like ``g^2=g+1`` or ``g^2=2g-1/2``."""
    s = text.replace(" ", "")
    m = _FIELD_RE.match(s)
    if not m or (m.group("ag") is None and m.group("b") is None):
        raise ParseError(f"bad field declaration {text!r}")
    a = Fraction(0)
    b = Fraction(0)
    ag = m.group("ag")
    if ag is not None:
        coef = ag[:-1]
        if coef in ("", "+"):
            a = Fraction(1)
        elif coef == "-":
            a = Fraction(-1)
        else:
            a = Fraction(coef)
    bs = m.group("b")
    if bs is not None:
        b = Fraction(bs)
    return FieldSpec(a, b)
