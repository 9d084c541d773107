"""Independent oracles.

Nothing here calls into conecarve: values are recomputed with plain mpmath
(non-interval) at high precision, numpy enumeration, or closed-form geometry.
"""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import numpy as np

DPS = 60


def _mpf(q) -> mpmath.mpf:
    q = Fraction(q)
    return mpmath.mpf(q.numerator) / q.denominator


def arcsec(s) -> mpmath.mpf:
    with mpmath.workdps(DPS):
        return mpmath.acos(1 / _mpf(s))


def nu_delta(delta) -> int:
    with mpmath.workdps(DPS):
        return int(mpmath.ceil(mpmath.log(mpmath.pi / (2 * arcsec(1 + Fraction(delta))), 2)))


def hat_nu_delta(delta) -> int:
    with mpmath.workdps(DPS):
        raw = int(mpmath.ceil(mpmath.log(-6 + 2 * mpmath.sqrt(1 + 2 / _mpf(delta)), 2)))
    return max(raw, 2)


def kappa(delta, nu: int) -> mpmath.mpf:
    with mpmath.workdps(DPS):
        return 2 * (2 / mpmath.pi * arcsec(1 + Fraction(delta))) ** (mpmath.mpf(1) / nu)


def primitive_triples(c_max: int) -> np.ndarray:
    """All primitive (a, b, c), both leg orders, c <= c_max, as an int64 array."""
    chunks = []
    for m in range(2, math.isqrt(c_max - 1) + 1):
        n = np.arange(1 + m % 2, m, 2, dtype=np.int64)
        n = n[(np.gcd(m, n) == 1) & (m * m + n * n <= c_max)]
        if n.size:
            chunks.append(np.stack([m * m - n * n, 2 * m * n, m * m + n * n], 1))
    t = np.concatenate(chunks)
    return np.concatenate([t, t[:, [1, 0, 2]]])


def psi_bruteforce(C: int) -> Fraction:
    """Smallest secant c / (larger leg) over all primitive triples with c <= C."""
    t = primitive_triples(C)
    big = np.maximum(t[:, 0], t[:, 1])
    ratio = t[:, 2] / big
    best = np.flatnonzero(ratio <= ratio.min() * (1 + 1e-12))
    return min(Fraction(int(t[i, 2]), int(big[i])) for i in best)


def window_hits(triples: np.ndarray, lo: float, hi: float, c_below: int) -> list[tuple[int, int, int]]:
    """Triples with c < c_below whose angle atan2(a, b) lies in [lo, hi] (float, padded)."""
    ang = np.arctan2(triples[:, 0].astype(float), triples[:, 1].astype(float))
    pad = 1e-12
    mask = (triples[:, 2] < c_below) & (ang >= lo - pad) & (ang <= hi + pad)
    return [tuple(int(v) for v in row) for row in triples[mask]]


def exact_angle_in_window(t, prev, kap) -> bool:
    """High-precision check that atan(a/b) lies in [phi/2, kap*phi/2], phi = angle of prev."""
    with mpmath.workdps(DPS):
        theta = mpmath.atan2(t[0], t[1])
        phi = mpmath.pi / 2 if prev is None else mpmath.atan2(prev[0], prev[1])
        return phi / 2 <= theta <= kap * phi / 2


# ------------------------------------------------------- ball geometry


def ball_min_2d(centers, radii, beta) -> mpmath.mpf:
    """min beta.x over an intersection of discs, by enumerating active sets.

    The optimum is either a single-disc minimizer lying in every disc or an
    intersection point of two circles; all candidates are evaluated at DPS digits.
    """
    with mpmath.workdps(DPS):
        b = [_mpf(v) for v in beta]
        nb = mpmath.sqrt(b[0] ** 2 + b[1] ** 2)
        C = [(mpmath.mpf(u[0]), mpmath.mpf(u[1])) for u in centers]
        R = [mpmath.mpf(r) for r in radii]
        tol = mpmath.mpf(10) ** (-DPS + 10)

        def feasible(p):
            return all((p[0] - c[0]) ** 2 + (p[1] - c[1]) ** 2 <= r * r + tol for c, r in zip(C, R))

        cands = [(c[0] - r * b[0] / nb, c[1] - r * b[1] / nb) for c, r in zip(C, R)]
        for i in range(len(C)):
            for j in range(i + 1, len(C)):
                cands += _circle_intersections(C[i], R[i], C[j], R[j])
        vals = [b[0] * p[0] + b[1] * p[1] for p in cands if feasible(p)]
        if not vals:
            raise ValueError("empty intersection")
        return min(vals)


def _circle_intersections(c0, r0, c1, r1):
    dx, dy = c1[0] - c0[0], c1[1] - c0[1]
    d = mpmath.sqrt(dx * dx + dy * dy)
    if d == 0 or d > r0 + r1 or d < abs(r0 - r1):
        return []
    a = (r0 * r0 - r1 * r1 + d * d) / (2 * d)
    h = mpmath.sqrt(max(r0 * r0 - a * a, 0))
    mx, my = c0[0] + a * dx / d, c0[1] + a * dy / d
    return [(mx + h * dy / d, my - h * dx / d), (mx - h * dy / d, my + h * dx / d)]


def lattice_bruteforce(centers, radii, box):
    """Integer points of the box inside every ball, by direct nested loops."""
    out = set()

    def rec(prefix):
        k = len(prefix)
        if k == len(box):
            p = tuple(prefix)
            if all(sum((x - c) ** 2 for x, c in zip(p, u)) <= r * r for u, r in zip(centers, radii)):
                out.add(p)
            return
        for v in range(box[k][0], box[k][1] + 1):
            rec(prefix + [v])

    rec([])
    return out


def best_secant_bruteforce(table: np.ndarray, target: Fraction, cap: int) -> tuple[int, int, int]:
    """argmax c/b over ``table`` rows with c <= cap and c/b <= target; ties to smaller c, then a.

    Floats only shortlist candidates; the decision is exact.
    """
    sub = table[table[:, 2] <= cap]
    ratio = sub[:, 2] / sub[:, 1]
    ok = ratio <= float(target) * (1 + 1e-12)
    sub, ratio = sub[ok], ratio[ok]
    near = sub[ratio >= ratio.max() * (1 - 1e-12)]
    best = None
    for a, b, c in near.tolist():
        r = Fraction(c, b)
        if r <= target:
            key = (r, -c, -a)
            if best is None or key > best[0]:
                best = (key, (a, b, c))
    return best[1]


def ball_min_2d_bisect(centers, radii, beta, iters: int = 200) -> float:
    """min beta.x over two discs by nested bisection on the Lagrange dual.

    Outer: lam >= 0 multiplies the second disc; the dual is concave, so bisect on
    the sign of its derivative |x(lam) - u2|^2 - R2^2.  Inner: minimize
    beta.x + lam |x - u2|^2 over the first disc, bisecting on the first disc's
    multiplier until the stationary point lands on its boundary.
    """
    (u1, u2), (R1, R2) = [tuple(map(float, u)) for u in centers], map(float, radii)
    b = tuple(map(float, beta))
    nb = math.hypot(*b)

    def inner(lam):
        if lam == 0:
            return (u1[0] - R1 * b[0] / nb, u1[1] - R1 * b[1] / nb)

        def x_of(mu):
            s = 2 * (lam + mu)
            return tuple((2 * lam * u2[k] + 2 * mu * u1[k] - b[k]) / s for k in range(2))

        def outside(mu):
            x = x_of(mu)
            return math.hypot(x[0] - u1[0], x[1] - u1[1]) > R1

        if not outside(0.0):
            return x_of(0.0)
        lo, hi = 0.0, 1.0
        while outside(hi):
            hi *= 2
        for _ in range(iters):
            mid = (lo + hi) / 2
            lo, hi = (mid, hi) if outside(mid) else (lo, mid)
        return x_of(hi)

    def slope(lam):
        x = inner(lam)
        return (x[0] - u2[0]) ** 2 + (x[1] - u2[1]) ** 2 - R2 * R2

    if slope(0.0) <= 0:
        x = inner(0.0)
    else:
        lo, hi = 0.0, 1.0
        while slope(hi) > 0:
            hi *= 2
        for _ in range(iters):
            mid = (lo + hi) / 2
            lo, hi = (mid, hi) if slope(mid) > 0 else (lo, mid)
        x = inner(hi)
    return b[0] * x[0] + b[1] * x[1]
