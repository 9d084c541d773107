"""Angle schedules built from Pythagorean triples.

Four constructors are provided:

``optimized``
    greedy minimum-hypotenuse search per stage, for a target accuracy delta;
``closedform``
    the explicit type-(ii) family ``h_j = 2**(j-2) + 2``;
``reverse``
    the closed form run backwards from a coefficient cap C;
``improved``
    backward greedy doubling of the final angle under a coefficient cap.

Every schedule is certified with exact rational tests before it is returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Literal

from .errors import CertificationError, Indecisive, PreconditionError, SizeGuardError, WindowInfeasible
from .exactnum import (
    RIGHT_ANGLE,
    DirectedInterval,
    PythagoreanTriple,
    RationalAngle,
    angle_of,
    default_precision,
    half_angle_geq,
    iv_from_fraction,
    ivctx,
    retry_with_precision,
)
from .sizing import MIN_C, check_h, check_nu_C, hat_nu_delta, kappa_delta, nu_delta

Construction = Literal["optimized", "closedform", "reverse", "improved"]
CONSTRUCTIONS: tuple[str, ...] = ("optimized", "closedform", "reverse", "improved")

KAPPA_SAFETY = Fraction(1) - Fraction(1, 10**6)
DEFAULT_N_CAP = 1_000_000
DEFAULT_C_CAP = 10**12

Classification = Literal["accept", "below", "above"]


@dataclass(frozen=True)
class Certificate:
    half_angle_ok: bool
    sec_final: Fraction
    bound: Fraction | None
    max_c: int
    cap: int | None
    failures: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.failures


@dataclass(frozen=True)
class AngleSchedule:
    """Ordered triples ``(a_j, b_j, c_j)``; stage j rotates by arcsec(c_j / b_j)."""

    triples: tuple[PythagoreanTriple, ...]
    construction: str
    delta: Fraction | None = None
    C: int | None = None
    kappa_used: Fraction | None = None
    notes: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if not self.triples:
            raise PreconditionError("a schedule needs at least one triple")
        if self.construction not in CONSTRUCTIONS:
            raise PreconditionError(f"unknown construction {self.construction!r}")
        object.__setattr__(self, "triples", tuple(self.triples))

    @property
    def nu(self) -> int:
        return len(self.triples)

    @property
    def angles(self) -> list[RationalAngle]:
        return [angle_of(t, "a") for t in self.triples]

    @property
    def sec_final(self) -> Fraction:
        return self.triples[-1].sec

    @property
    def max_coefficient(self) -> int:
        return max(t.c for t in self.triples)

    def truncated(self, nu: int) -> "AngleSchedule":
        return AngleSchedule(self.triples[:nu], self.construction, self.delta, self.C, self.kappa_used)

    def certificate(self, delta=None, C: int | None = None) -> Certificate:
        """Exact re-check of the half-angle chain, final accuracy and coefficient cap."""
        delta = self.delta if delta is None else Fraction(delta)
        C = self.C if C is None else C
        failures = []
        prev = RIGHT_ANGLE
        half_ok = True
        for j, theta in enumerate(self.angles, start=1):
            if not half_angle_geq(theta, prev):
                half_ok = False
                failures.append(f"stage {j}: angle below half of stage {j - 1}")
            prev = theta
        bound = None if delta is None else 1 + delta
        if bound is not None and self.sec_final > bound:
            failures.append(f"final secant {self.sec_final} exceeds {bound}")
        if C is not None and self.max_coefficient > C:
            failures.append(f"largest coefficient {self.max_coefficient} exceeds cap {C}")
        return Certificate(half_ok, self.sec_final, bound, self.max_coefficient, C, tuple(failures))

    def require_certified(self) -> "AngleSchedule":
        cert = self.certificate()
        if not cert.ok:
            raise CertificationError("; ".join(cert.failures))
        return self


# ------------------------------------------------------ window searches


def _lattice_search(
    ratio_lo: Fraction,
    ratio_hi: Fraction,
    classify: Callable[[int, int], Classification],
    best_bound: int | None = None,
    n_cap: int = DEFAULT_N_CAP,
) -> tuple[int, int]:
    """Minimise m^2 + n^2 over n >= 1, m > n with m/n inside a window.

    ``ratio_lo``/``ratio_hi`` must bracket the window from outside; the exact
    membership decision is delegated to ``classify``.  Ties keep the smaller n.
    Only candidates with objective strictly below ``best_bound`` are sought.
    """
    if ratio_hi < ratio_lo:
        raise WindowInfeasible(f"empty ratio window [{ratio_lo}, {ratio_hi}]")
    best: tuple[int, int] | None = None
    best_obj = best_bound
    lo_sq = ratio_lo * ratio_lo + 1
    n = 0
    while True:
        n += 1
        if best_obj is not None and lo_sq * n * n >= best_obj:
            break
        if n > n_cap:
            break
        m = max(n + 1, math.ceil(ratio_lo * n))
        m_end = math.floor(ratio_hi * n)
        while m <= m_end:
            obj = m * m + n * n
            if best_obj is not None and obj >= best_obj:
                break
            verdict = classify(m, n)
            if verdict == "accept":
                best, best_obj = (m, n), obj
                break
            if verdict == "above":
                break
            m += 1
    if best is None:
        raise WindowInfeasible("no lattice point (m, n) inside the window")
    return best


def _as_bounds(L, U) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    """Outer and inner (conservative) endpoints of an m/n window."""
    lo_out, lo_in = (L.lo, L.hi) if isinstance(L, DirectedInterval) else (Fraction(L), Fraction(L))
    hi_in, hi_out = (U.lo, U.hi) if isinstance(U, DirectedInterval) else (Fraction(U), Fraction(U))
    return lo_out, lo_in, hi_in, hi_out


def min_hyp_window(L, U, n_cap: int = DEFAULT_N_CAP) -> tuple[int, int]:
    """(m, n) minimising m^2 + n^2 subject to L n <= m <= U n.

    Interval endpoints are shrunk conservatively (``L.hi``, ``U.lo``) so the
    returned ratio is certified inside the true window.
    """
    lo_out, lo_in, hi_in, hi_out = _as_bounds(L, U)
    if lo_in >= hi_in:
        raise WindowInfeasible(f"degenerate window [{lo_in}, {hi_in}]")

    def classify(m: int, n: int) -> Classification:
        r = Fraction(m, n)
        if r < lo_in:
            return "below"
        if r > hi_in:
            return "above"
        return "accept"

    return _lattice_search(lo_in, hi_in, classify, n_cap=n_cap)


def min_hyp_sine(L, U, n_cap: int = DEFAULT_N_CAP) -> tuple[int, int]:
    """Smallest generator whose sine leg m^2 - n^2 puts the angle in the window.

    The window ``sqrt((1+sin lo)/(1-sin lo)) <= m/n <= sqrt((1+sin hi)/(1-sin hi))``
    is passed already converted to m/n bounds.
    """
    return min_hyp_window(L, U, n_cap)


def min_hyp_cosine(L, U, n_cap: int = DEFAULT_N_CAP) -> tuple[int, int]:
    """Cosine-leg counterpart of :func:`min_hyp_sine` (window on m/n from cot(theta/2))."""
    return min_hyp_window(L, U, n_cap)


def _sine_angle(m: int, n: int) -> RationalAngle:
    c = m * m + n * n
    return RationalAngle(Fraction(m * m - n * n, c), Fraction(2 * m * n, c))


def _cosine_angle(m: int, n: int) -> RationalAngle:
    c = m * m + n * n
    return RationalAngle(Fraction(2 * m * n, c), Fraction(m * m - n * n, c))


def next_stage_triple(
    prev: RationalAngle, kappa: Fraction, precision_bits: int
) -> PythagoreanTriple:
    """Minimum-hypotenuse triple with angle in [prev/2, kappa * prev/2].

    The lower endpoint is tested exactly; the upper one, irrational in
    general, through interval enclosures (Indecisive when they overlap).
    Equal objectives go to the cosine branch.
    """
    bits = precision_bits
    ctx = ivctx(bits)
    prev_iv = prev.enclose(bits).to_iv()
    upper = iv_from_fraction(ctx, kappa) * prev_iv / 2
    upper_d = DirectedInterval.from_iv(upper, bits)

    def upper_test(theta: RationalAngle) -> bool | None:
        enc = theta.enclose(bits)
        if enc.hi <= upper_d.lo:
            return True
        if enc.lo > upper_d.hi:
            return False
        raise Indecisive("candidate angle touches kappa * theta / 2")

    quarter_pi = ctx.pi / 4
    sin_lo = DirectedInterval.from_iv(ctx.tan(quarter_pi + prev_iv / 4), bits).lo
    sin_hi = DirectedInterval.from_iv(ctx.tan(quarter_pi + upper / 2), bits).hi

    def classify_sine(m: int, n: int) -> Classification:
        theta = _sine_angle(m, n)
        if not half_angle_geq(theta, prev):
            return "below"
        return "accept" if upper_test(theta) else "above"

    cos_lo = DirectedInterval.from_iv(ctx.cot(upper / 2), bits).lo
    cos_hi = DirectedInterval.from_iv(ctx.cot(prev_iv / 4), bits).hi

    def classify_cosine(m: int, n: int) -> Classification:
        theta = _cosine_angle(m, n)
        if not half_angle_geq(theta, prev):
            return "above"
        return "accept" if upper_test(theta) else "below"

    try:
        ms, ns = _lattice_search(max(sin_lo, Fraction(1)), sin_hi, classify_sine)
        sine_obj = ms * ms + ns * ns
    except WindowInfeasible:
        ms = ns = None
        sine_obj = None
    try:
        bound = None if sine_obj is None else sine_obj + 1
        mc, nc = _lattice_search(max(cos_lo, Fraction(1)), cos_hi, classify_cosine, best_bound=bound)
    except WindowInfeasible:
        if sine_obj is None:
            raise
        return PythagoreanTriple(ms * ms - ns * ns, 2 * ms * ns, sine_obj)
    return PythagoreanTriple(2 * mc * nc, mc * mc - nc * nc, mc * mc + nc * nc)


# ------------------------------------------------------------ constructors


def auto_kappa(delta, nu: int | None = None, precision_bits: int | None = None) -> Fraction:
    """(1 - 1e-6) times a certified lower bound of kappa_delta."""
    delta = Fraction(delta)
    nu = nu if nu is not None else nu_delta(delta, precision_bits)
    return KAPPA_SAFETY * kappa_delta(delta, nu, precision_bits).lo


def optimized_schedule(
    delta, kappa: Fraction | str = "auto", precision_bits: int | None = None
) -> AngleSchedule:
    """Greedy minimum-hypotenuse schedule of length nu_delta."""
    delta = Fraction(delta)
    if delta <= 0:
        raise PreconditionError(f"delta must be positive, got {delta}")
    nu = nu_delta(delta, precision_bits)
    if isinstance(kappa, str):
        if kappa != "auto":
            raise PreconditionError(f"kappa must be a rational or 'auto', got {kappa!r}")
        kappa = auto_kappa(delta, nu, precision_bits)
    kappa = Fraction(kappa)
    if not (1 < kappa < 2):
        raise PreconditionError(f"kappa must lie in (1, 2), got {kappa}")

    def build(bits: int) -> tuple[PythagoreanTriple, ...]:
        triples = []
        prev = RIGHT_ANGLE
        for _ in range(nu):
            t = next_stage_triple(prev, kappa, bits)
            triples.append(t)
            prev = angle_of(t, "a")
        return tuple(triples)

    triples = retry_with_precision(build, precision_bits)
    return AngleSchedule(triples, "optimized", delta=delta, kappa_used=kappa).require_certified()


def closedform_triple(j: int) -> PythagoreanTriple:
    if j < 1:
        raise PreconditionError(f"stage index must be positive, got {j}")
    if j == 1:
        return PythagoreanTriple(120, 119, 169)
    return type_ii_triple(2 ** (j - 2) + 2)


def type_ii_triple(h: int) -> PythagoreanTriple:
    """(2h - 1, 2h^2 - 2h, 2h^2 - 2h + 1)."""
    return PythagoreanTriple(2 * h - 1, 2 * h * h - 2 * h, 2 * h * h - 2 * h + 1)


def closedform_schedule(delta=None, nu: int | None = None) -> AngleSchedule:
    """Explicit schedule; length hat_nu_delta(delta) unless ``nu`` is given."""
    if delta is None and nu is None:
        raise PreconditionError("closedform_schedule needs delta or nu")
    if delta is not None:
        delta = Fraction(delta)
        length = hat_nu_delta(delta) if nu is None else nu
    else:
        length = nu
    sched = AngleSchedule(tuple(closedform_triple(j) for j in range(1, length + 1)), "closedform", delta=delta)
    return sched.require_certified()


def psi1(C: int) -> tuple[Fraction, int]:
    _check_C(C)
    m = check_h(C)
    return Fraction(m * m + (m - 1) ** 2, 2 * m * (m - 1)), m


def psi2(C: int) -> tuple[Fraction, int]:
    _check_C(C)
    m = math.isqrt(C - 1)
    return Fraction(m * m + 1, m * m - 1), m


def psi(C: int) -> Fraction:
    """Smallest secant c/b over Pythagorean triples with c <= C."""
    v1, _ = psi1(C)
    v2, _ = psi2(C)
    if v1 > v2:
        raise CertificationError(f"psi1({C}) > psi2({C}); expected psi1 <= psi2 for C >= 23")
    return v1


def _check_C(C) -> None:
    if not isinstance(C, int) or isinstance(C, bool) or C < MIN_C:
        raise PreconditionError(f"C must be an integer >= {MIN_C}, got {C!r}")


def reverse_h_chain(C: int) -> list[int]:
    """h values for stages 2..nu, run backwards by h_{j-1} = ceil((h_j + 1) / 2)."""
    nu = check_nu_C(C)
    chain = [check_h(C)]
    for _ in range(nu - 2):
        chain.append((chain[-1] + 2) // 2)
    return chain[::-1]


def reverse_schedule(C: int) -> AngleSchedule:
    _check_C(C)
    triples = [PythagoreanTriple(120, 119, 169)] + [type_ii_triple(h) for h in reverse_h_chain(C)]
    sched = AngleSchedule(tuple(triples), "reverse", delta=psi(C) - 1, C=C)
    return sched.require_certified()


def best_secant_below(target: Fraction, cap: int) -> PythagoreanTriple:
    """argmax c/b over triples with c <= cap and c/b <= target.

    For each n the extremal m of each orientation is computed with integer
    square roots, which covers every primitive triple with c <= cap.  Ties
    (equal c/b) resolve to the smaller c, then the smaller a.
    """
    target = Fraction(target)
    if target <= 1:
        raise WindowInfeasible(f"no triple has c/b <= {target}")
    p, q = target.numerator, target.denominator
    best: tuple[Fraction, int, int] | None = None
    best_t: PythagoreanTriple | None = None

    def consider(t: PythagoreanTriple) -> None:
        nonlocal best, best_t
        key = (t.sec, -t.c, -t.a)
        if best is None or key > best:
            best, best_t = key, t

    # b = 2mn: sec = (m^2 + n^2) / (2mn) increases with m/n.
    n = 1
    while 2 * n * n + 2 * n + 1 <= cap:
        disc = n * n * (p * p - q * q)
        m = min((n * p + math.isqrt(disc)) // q, math.isqrt(cap - n * n))
        while m > n and (m * m + n * n) * q > 2 * m * n * p:
            m -= 1
        if m > n:
            consider(PythagoreanTriple(m * m - n * n, 2 * m * n, m * m + n * n))
        n += 1
    # b = m^2 - n^2: sec = (m^2 + n^2) / (m^2 - n^2) decreases with m/n.
    # The smallest admissible m grows with n, so the first n over the cap ends the scan.
    n = 1
    while True:
        num, den = n * n * (p + q), p - q
        m = max(n + 1, math.isqrt(num // den))
        while m * m * den < num:
            m += 1
        if m * m + n * n > cap:
            break
        consider(PythagoreanTriple(2 * m * n, m * m - n * n, m * m + n * n))
        n += 1
    if best_t is None:
        raise WindowInfeasible(f"no triple with c <= {cap} and c/b <= {target}")
    return best_t


def improved_schedule(C: int, c_cap: int = DEFAULT_C_CAP) -> AngleSchedule:
    """Backward greedy schedule: each earlier angle is pushed towards twice the later one."""
    _check_C(C)
    if C > c_cap:
        raise SizeGuardError(f"C = {C} exceeds the enumeration cap {c_cap}")
    _, m = psi1(C)
    current = type_ii_triple(m)
    backwards = [current]
    while True:
        doubled = angle_of(current, "a").doubled()
        if doubled is None or doubled.is_right:
            break
        cap = max(MIN_C, current.c)
        current = best_secant_below(doubled.sec, cap)
        backwards.append(current)
    sched = AngleSchedule(tuple(reversed(backwards)), "improved", delta=psi(C) - 1, C=C)
    return sched.require_certified()


def build_schedule(construction: str, delta=None, C: int | None = None, **kwargs) -> AngleSchedule:
    if construction == "optimized":
        if delta is None:
            raise PreconditionError("optimized construction needs delta")
        return optimized_schedule(delta, **kwargs)
    if construction == "closedform":
        if delta is None:
            raise PreconditionError("closedform construction needs delta")
        return closedform_schedule(delta)
    if construction == "reverse":
        if C is None:
            raise PreconditionError("reverse construction needs C")
        return reverse_schedule(C)
    if construction == "improved":
        if C is None:
            raise PreconditionError("improved construction needs C")
        return improved_schedule(C, **kwargs)
    raise PreconditionError(f"unknown construction {construction!r}")


def triples_of(schedule: AngleSchedule) -> list[tuple[int, int, int]]:
    return [t.as_tuple() for t in schedule.triples]


def primitive_triples_upto(c_max: int) -> Iterable[PythagoreanTriple]:
    """All primitive triples with c <= c_max, both leg orders (a < b and a > b)."""
    m = 2
    while m * m + 1 <= c_max:
        for n in range(1 + (m % 2), m, 2):
            if m * m + n * n > c_max:
                break
            if math.gcd(m, n) == 1:
                yield PythagoreanTriple(m * m - n * n, 2 * m * n, m * m + n * n)
                yield PythagoreanTriple(2 * m * n, m * m - n * n, m * m + n * n)
        m += 1


__all__ = [
    "AngleSchedule",
    "Certificate",
    "CONSTRUCTIONS",
    "auto_kappa",
    "best_secant_below",
    "build_schedule",
    "closedform_schedule",
    "closedform_triple",
    "improved_schedule",
    "min_hyp_cosine",
    "min_hyp_sine",
    "min_hyp_window",
    "next_stage_triple",
    "optimized_schedule",
    "primitive_triples_upto",
    "psi",
    "psi1",
    "psi2",
    "reverse_h_chain",
    "reverse_schedule",
    "triples_of",
    "type_ii_triple",
]
