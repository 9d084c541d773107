"""Stage counts, accuracy splits and coefficient bounds.

Everything that can be decided with integers is decided with integers;
only quantities involving pi, arcsec or logarithms go through interval
enclosures, with precision doubling when a ceiling or floor is undecided.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, NamedTuple

from .errors import Indecisive, PrecisionExhausted, PreconditionError
from .exactnum import (
    MAX_PRECISION_BITS,
    DirectedInterval,
    arcsec_iv,
    ceil_of,
    default_precision,
    iv_from_fraction,
    ivctx,
    retry_with_precision,
)

QUARTER = Fraction(1, 4)
MIN_C = 169


def _as_positive_fraction(value, name: str) -> Fraction:
    q = Fraction(value)
    if q <= 0:
        raise PreconditionError(f"{name} must be positive, got {q}")
    return q


def ceil_log2_tower(n_minus_one: int) -> int:
    """K = ceil(log2(N - 1)) for N >= 3, computed on integers."""
    if n_minus_one < 2:
        raise PreconditionError(f"need N >= 3, got N = {n_minus_one + 1}")
    return (n_minus_one - 1).bit_length()


@dataclass(frozen=True)
class SizingReport:
    nu: int
    delta: Fraction
    kappa_interval: DirectedInterval | None = None
    coefficient_bound: Fraction | None = None
    flags: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.nu < 1:
            raise ValueError("nu must be positive")
        if self.coefficient_bound is not None and self.coefficient_bound < MIN_C:
            raise ValueError("coefficient bound below 169")


# ----------------------------------------------------------- nu_delta


def _log2_stage_ratio(delta: Fraction, bits: int) -> DirectedInterval:
    """Enclosure of log2(pi / (2 arcsec(1 + delta)))."""
    ctx = ivctx(bits)
    ratio = ctx.pi / (2 * arcsec_iv(ctx, 1 + delta))
    return DirectedInterval.from_iv(ctx.log(ratio) / ctx.ln2, bits)


def certified_ceil(
    enclose: Callable[[int], DirectedInterval], precision_bits: int | None = None
) -> tuple[int, bool]:
    """Ceiling of an enclosed real with precision doubling.

    Returns ``(value, bumped)``.  If the enclosure still straddles an integer
    at the largest precision, the value sits on (or within rounding of) an
    integer breakpoint; the upper ceiling is returned and ``bumped`` is True.
    """
    bits = precision_bits or default_precision()
    while True:
        x = enclose(bits)
        try:
            return ceil_of(x), False
        except Indecisive:
            if bits >= MAX_PRECISION_BITS:
                return math.ceil(x.hi), True
            bits *= 2


def nu_delta_report(delta, precision_bits: int | None = None) -> SizingReport:
    delta = _as_positive_fraction(delta, "delta")
    nu, bumped = certified_ceil(lambda b: _log2_stage_ratio(delta, b), precision_bits)
    flags = ("integral-log-breakpoint: nu incremented",) if bumped else ()
    return SizingReport(nu=max(nu, 1), delta=delta, flags=flags)


def nu_delta(delta, precision_bits: int | None = None) -> int:
    """Minimal stage count of the irrational rotation scheme for accuracy 1 + delta."""
    return nu_delta_report(delta, precision_bits).nu


def kappa_delta(delta, nu: int, precision_bits: int | None = None) -> DirectedInterval:
    """Enclosure of the largest admissible angle-growth factor kappa.

    Raises PreconditionError when the enclosure cannot be separated from 1.
    """
    delta = _as_positive_fraction(delta, "delta")
    if nu < 1:
        raise PreconditionError(f"nu must be positive, got {nu}")

    def compute(bits: int) -> DirectedInterval:
        ctx = ivctx(bits)
        base = 2 * arcsec_iv(ctx, 1 + delta) / ctx.pi
        k = DirectedInterval.from_iv(2 * ctx.exp(ctx.log(base) / nu), bits)
        if k.hi <= 1:
            raise PreconditionError(f"kappa <= 1 for delta={delta}, nu={nu}: nu is too small")
        if k.lo <= 1:
            raise Indecisive("kappa not separated from 1")
        return k

    try:
        return retry_with_precision(compute, precision_bits)
    except PrecisionExhausted as exc:
        raise PreconditionError(
            f"kappa <= 1 possible for delta={delta}, nu={nu} (integral log breakpoint)"
        ) from exc


# ------------------------------------------------------- closed form sizes


class HatNu(NamedTuple):
    nu: int
    raw: int
    clamped: bool


def hat_nu_report(delta) -> HatNu:
    """ceil(log2(-6 + 2 sqrt(1 + 2/delta))) decided exactly, clamped to >= 2.

    2**k >= -6 + 2 sqrt(1 + 2/delta)  <=>  (2**k + 6)**2 >= 4 (1 + 2/delta),
    since both sides are positive.
    """
    delta = Fraction(delta)
    if not (0 < delta < QUARTER):
        raise PreconditionError(f"delta must lie in (0, 1/4), got {delta}")
    rhs = 4 * (1 + 2 / delta)

    def fits(k: int) -> bool:
        return (Fraction(2) ** k + 6) ** 2 >= rhs

    k = 0
    if fits(0):
        while fits(k - 1):
            k -= 1
    else:
        while not fits(k):
            k += 1
    return HatNu(nu=max(k, 2), raw=k, clamped=k < 2)


def hat_nu_delta(delta) -> int:
    return hat_nu_report(delta).nu


def delta_epsilon(epsilon, N: int, precision_bits: int | None = None) -> Fraction:
    """Rational lower approximation of (1 + epsilon)**(1/K) - 1, K = ceil(log2(N-1)).

    The result d always satisfies (1 + d)**K <= 1 + epsilon exactly.
    """
    epsilon = _as_positive_fraction(epsilon, "epsilon")
    if N < 3:
        raise PreconditionError(f"need N >= 3, got {N}")
    K = ceil_log2_tower(N - 1)
    target = 1 + epsilon
    if K == 1:
        return epsilon
    p_root, q_root = _int_root(target.numerator, K), _int_root(target.denominator, K)
    if p_root ** K == target.numerator and q_root ** K == target.denominator:
        return Fraction(p_root, q_root) - 1
    bits = precision_bits or default_precision()
    ctx = ivctx(bits)
    root = DirectedInterval.from_iv(ctx.exp(ctx.log(iv_from_fraction(ctx, target)) / K), bits)
    d = root.lo - 1
    step = Fraction(1, 2 ** bits)
    while (1 + d) ** K > target:
        d -= step
    return d


def _int_root(x: int, k: int) -> int:
    """floor(x ** (1/k)) for a nonnegative integer."""
    if x < 2:
        return x
    r = 1 << ((x.bit_length() + k - 1) // k)
    while True:
        nxt = ((k - 1) * r + x // r ** (k - 1)) // k
        if nxt >= r:
            break
        r = nxt
    while r ** k > x:
        r -= 1
    while (r + 1) ** k <= x:
        r += 1
    return r


class CoefficientBound(NamedTuple):
    bound: Fraction
    exact: int
    hat_nu: int
    h: int


def coeff_bound_L3(delta) -> CoefficientBound:
    """4/delta and the exact largest closed-form coefficient 2h^2 - 2h + 1."""
    hn = hat_nu_report(delta)
    h = 2 ** (hn.nu - 2) + 2
    return CoefficientBound(bound=4 / Fraction(delta), exact=2 * h * h - 2 * h + 1, hat_nu=hn.nu, h=h)


def ln2_lower(precision_bits: int | None = None) -> Fraction:
    bits = precision_bits or default_precision()
    return DirectedInterval.from_iv(ivctx(bits).ln2, bits).lo


def coeff_bound_LN(epsilon, N: int, precision_bits: int | None = None) -> Fraction:
    """4 ceil(log2(N-1)) / (ln2 * epsilon) with ln2 replaced by a rational lower bound."""
    epsilon = Fraction(epsilon)
    if not (0 < epsilon < 1):
        raise PreconditionError(f"epsilon must lie in (0, 1), got {epsilon}")
    K = ceil_log2_tower(N - 1)
    return 4 * K / (ln2_lower(precision_bits) * epsilon)


# ---------------------------------------------------- coefficient-capped


def check_h(C: int) -> int:
    """floor((1 + sqrt(2C - 1)) / 2) via an exact integer square root."""
    return (1 + math.isqrt(2 * C - 1)) // 2


def check_nu_C(C: int) -> int:
    """Stage count 2 + floor(log2(h - 2)) of the reverse closed form."""
    if not isinstance(C, int) or C < MIN_C:
        raise PreconditionError(f"C must be an integer >= {MIN_C}, got {C!r}")
    return 2 + (check_h(C) - 2).bit_length() - 1
