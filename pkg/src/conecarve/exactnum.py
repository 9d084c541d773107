"""Exact arithmetic on Pythagorean triples and rational angles.

Rationals are plain :class:`fractions.Fraction` values (always in lowest
terms).  Irrational quantities such as ``arcsec(s)`` or ``pi`` are enclosed by
:class:`DirectedInterval`, whose endpoints are exact dyadic rationals produced
by mpmath's outward-rounding interval context.
"""

from __future__ import annotations

import functools
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, TypeVar

from mpmath import iv

from .errors import Indecisive, PrecisionExhausted, PreconditionError

DEFAULT_PRECISION_BITS = 128
MAX_PRECISION_BITS = 8192
PRECISION_ENV = "CONECARVE_PRECISION_BITS"

T = TypeVar("T")


def default_precision() -> int:
    raw = os.environ.get(PRECISION_ENV)
    if not raw:
        return DEFAULT_PRECISION_BITS
    try:
        bits = int(raw)
    except ValueError as exc:
        raise PreconditionError(f"{PRECISION_ENV} must be an integer, got {raw!r}") from exc
    if bits < 32:
        raise PreconditionError(f"{PRECISION_ENV} must be at least 32, got {bits}")
    return bits


PADDED_FUNCTIONS = ("atan2", "tan", "cot", "sin", "cos", "log", "exp")
PAD_ULPS_LOG2 = 8


@functools.lru_cache(maxsize=None)
def ivctx(precision_bits: int):
    """Private mpmath interval context fixed at ``precision_bits``.

    mpmath's interval transcendentals are not strictly outward rounded (its
    atan2 misses arctan(120/119) at 128 bits by a fraction of an ulp), so
    their results, and the constants pi and ln2, are widened by 2**8 ulps
    relative.  Arithmetic and sqrt are left alone.  Contexts are never
    mutated after creation, so sharing them across threads is safe.
    """
    ctx = type(iv)()
    ctx.prec = precision_bits
    for name in PADDED_FUNCTIONS:
        setattr(ctx, name, _padded(ctx, getattr(ctx, name)))
    ctx.pi = widen(ctx, ctx.mpf(ctx.pi))
    ctx.ln2 = widen(ctx, ctx.mpf(ctx.ln2))
    return ctx


def widen(ctx, x):
    """``x`` plus a relative radius 2**-(prec - 8) and an absolute one 2**-(2 prec)."""
    rel = ctx.mpf(2) ** (PAD_ULPS_LOG2 - ctx.prec)
    tiny = ctx.mpf(2) ** (-2 * ctx.prec)
    return x + ctx.mpf([-1, 1]) * (ctx.absmax(x) * rel + tiny)


def _padded(ctx, fn):
    @functools.wraps(fn)
    def call(*args, **kwargs):
        return widen(ctx, fn(*args, **kwargs))

    return call


def _mpf_tuple_to_fraction(raw) -> Fraction:
    sign, man, exp, _bc = raw
    if not man:
        if exp != 0:  # mpmath encodes inf/nan as zero mantissa with special exponent
            raise ArithmeticError("interval endpoint is not finite")
        return Fraction(0)
    value = Fraction(int(man)) * (Fraction(2) ** exp)
    return -value if sign else value


def iv_from_fraction(ctx, q: Fraction):
    return ctx.mpf(q.numerator) / ctx.mpf(q.denominator)


def retry_with_precision(fn: Callable[[int], T], precision_bits: int | None = None) -> T:
    """Call ``fn(bits)`` with doubling precision until it stops raising Indecisive."""
    bits = precision_bits or default_precision()
    while True:
        try:
            return fn(bits)
        except Indecisive:
            if bits >= MAX_PRECISION_BITS:
                raise PrecisionExhausted(
                    f"comparison still undecided at {bits} bits"
                ) from None
            bits *= 2


@dataclass(frozen=True)
class DirectedInterval:
    """Closed interval ``[lo, hi]`` guaranteed to contain an exact real value."""

    lo: Fraction
    hi: Fraction
    precision_bits: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def from_iv(cls, value, precision_bits: int) -> "DirectedInterval":
        lo_raw, hi_raw = value._mpi_
        return cls(_mpf_tuple_to_fraction(lo_raw), _mpf_tuple_to_fraction(hi_raw), precision_bits)

    @classmethod
    def exact(cls, q: Fraction, precision_bits: int = DEFAULT_PRECISION_BITS) -> "DirectedInterval":
        q = Fraction(q)
        return cls(q, q, precision_bits)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        return self.lo <= Fraction(x) <= self.hi

    def to_iv(self):
        ctx = ivctx(self.precision_bits)
        return ctx.mpf([iv_from_fraction(ctx, self.lo).a, iv_from_fraction(ctx, self.hi).b])

    def __float__(self) -> float:
        return float(self.mid)

    def __repr__(self) -> str:
        return f"DirectedInterval([{float(self.lo)!r}, {float(self.hi)!r}], bits={self.precision_bits})"


def ceil_of(x: DirectedInterval) -> int:
    """Exact ceiling of the enclosed value, or Indecisive if the interval straddles it."""
    lo, hi = math.ceil(x.lo), math.ceil(x.hi)
    if lo != hi:
        raise Indecisive(f"ceiling undecided on {x!r}")
    return lo


def floor_of(x: DirectedInterval) -> int:
    lo, hi = math.floor(x.lo), math.floor(x.hi)
    if lo != hi:
        raise Indecisive(f"floor undecided on {x!r}")
    return lo


# ---------------------------------------------------------------- triples


@dataclass(frozen=True)
class PythagoreanTriple:
    """Primitive integer triple with ``a**2 + b**2 == c**2``.

    Non-primitive input is divided through by the common gcd.
    """

    a: int
    b: int
    c: int

    def __post_init__(self):
        a, b, c = self.a, self.b, self.c
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in (a, b, c)):
            raise PreconditionError(f"triple entries must be integers, got {(a, b, c)!r}")
        if min(a, b, c) < 1:
            raise PreconditionError(f"triple entries must be positive, got {(a, b, c)}")
        if a * a + b * b != c * c:
            raise PreconditionError(f"{(a, b, c)} is not Pythagorean: {a}^2+{b}^2 != {c}^2")
        g = math.gcd(a, b, c)
        if g > 1:
            object.__setattr__(self, "a", a // g)
            object.__setattr__(self, "b", b // g)
            object.__setattr__(self, "c", c // g)

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.a, self.b, self.c)

    @property
    def sec(self) -> Fraction:
        """Secant of the angle whose sine is a/c."""
        return Fraction(self.c, self.b)

    def __iter__(self):
        return iter(self.as_tuple())


def triple_from_mn(m: int, n: int) -> PythagoreanTriple:
    """Euclid's parametrisation ``(m^2 - n^2, 2mn, m^2 + n^2)``, reduced."""
    if not (isinstance(m, int) and isinstance(n, int)) or n < 1 or m <= n:
        raise PreconditionError(f"need integers m > n >= 1, got m={m}, n={n}")
    return PythagoreanTriple(m * m - n * n, 2 * m * n, m * m + n * n)


# ---------------------------------------------------------------- angles


@dataclass(frozen=True)
class RationalAngle:
    """Angle in (0, pi/2] known through its rational sine and cosine."""

    sin: Fraction
    cos: Fraction

    def __post_init__(self):
        s, c = Fraction(self.sin), Fraction(self.cos)
        object.__setattr__(self, "sin", s)
        object.__setattr__(self, "cos", c)
        if s * s + c * c != 1:
            raise PreconditionError(f"sin^2 + cos^2 != 1 for ({s}, {c})")
        if not (0 < s <= 1 and 0 <= c < 1):
            raise PreconditionError(f"angle with sin={s}, cos={c} is outside (0, pi/2]")

    @property
    def is_right(self) -> bool:
        return self.cos == 0

    @property
    def sec(self) -> Fraction:
        if self.is_right:
            raise ZeroDivisionError("secant of the right angle is undefined")
        return 1 / self.cos

    @property
    def tan(self) -> Fraction:
        if self.is_right:
            raise ZeroDivisionError("tangent of the right angle is undefined")
        return self.sin / self.cos

    def doubled(self) -> "RationalAngle | None":
        """The angle 2*theta when it stays within (0, pi/2], else None."""
        c2 = self.cos * self.cos - self.sin * self.sin
        if c2 < 0:
            return None
        return RationalAngle(2 * self.sin * self.cos, c2)

    def enclose(self, precision_bits: int | None = None) -> DirectedInterval:
        bits = precision_bits or default_precision()
        ctx = ivctx(bits)
        if self.is_right:
            return DirectedInterval.from_iv(ctx.pi / 2, bits)
        val = ctx.atan2(iv_from_fraction(ctx, self.sin), iv_from_fraction(ctx, self.cos))
        return DirectedInterval.from_iv(val, bits)

    def __le__(self, other: "RationalAngle") -> bool:
        return self.sin <= other.sin

    def __lt__(self, other: "RationalAngle") -> bool:
        return self.sin < other.sin


RIGHT_ANGLE = RationalAngle(Fraction(1), Fraction(0))


def angle_of(t: PythagoreanTriple, leg: str = "a") -> RationalAngle:
    """Angle of ``t`` whose sine is the chosen leg over the hypotenuse."""
    if leg == "a":
        return RationalAngle(Fraction(t.a, t.c), Fraction(t.b, t.c))
    if leg == "b":
        return RationalAngle(Fraction(t.b, t.c), Fraction(t.a, t.c))
    raise PreconditionError(f"leg must be 'a' or 'b', got {leg!r}")


def half_angle_geq(theta: RationalAngle, phi: RationalAngle) -> bool:
    """Exact test of ``theta >= phi / 2``.

    Uses ``tan(phi/2) = (1 - cos phi) / sin phi``; for the right angle the
    test is ``tan(theta) >= 1``.
    """
    if theta.is_right:
        return True
    if phi.is_right:
        return theta.sin >= theta.cos
    return theta.sin * phi.sin >= (1 - phi.cos) * theta.cos


def enclose_arcsec(s, precision_bits: int | None = None) -> DirectedInterval:
    s = Fraction(s)
    if s <= 1:
        raise PreconditionError(f"arcsec needs s > 1, got {s}")
    bits = precision_bits or default_precision()
    ctx = ivctx(bits)
    p, q = s.numerator, s.denominator
    val = ctx.atan2(ctx.sqrt(ctx.mpf(p * p - q * q)), ctx.mpf(q))
    return DirectedInterval.from_iv(val, bits)


def arcsec_iv(ctx, s: Fraction):
    """Interval arcsec of a rational inside an existing context (s > 1)."""
    p, q = s.numerator, s.denominator
    return ctx.atan2(ctx.sqrt(ctx.mpf(p * p - q * q)), ctx.mpf(q))


def isqrt_fraction_floor(q: Fraction) -> int:
    """floor(sqrt(q)) for a nonnegative rational."""
    if q < 0:
        raise PreconditionError("square root of a negative number")
    # floor(sqrt(p/d)) = floor(sqrt(p*d) / d) = isqrt(p*d) // d
    return math.isqrt(q.numerator * q.denominator) // q.denominator
