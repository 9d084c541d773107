"""Acceptance criteria, one marked group per criterion.

The terminal summary prints one PASS/FAIL line per criterion, failing it on
any failed test or when the group's wall time exceeds its limit.
"""

import random
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from conecarve.bench import (
    BallIntersectionInstance,
    build_formulations,
    certified_slack,
    lattice_polytope,
    paper_instance,
    random_objective,
)
from conecarve.cli import EXIT_SIZE, main
from conecarve.cone3 import build_P, build_P_tilde, witness_values
from conecarve.exactnum import DirectedInterval, enclose_arcsec, iv_from_fraction, ivctx
from conecarve.sizing import check_nu_C, coeff_bound_L3, delta_epsilon, hat_nu_delta, hat_nu_report, nu_delta
from conecarve.towern import build_QN
from conecarve.triplesearch import (
    closedform_schedule,
    improved_schedule,
    optimized_schedule,
    psi,
    reverse_schedule,
    triples_of,
)
from conecarve.verify import lattice_equivalence_check, lp_solve

import oracles
import reference_values as ref
import samplers

criterion = pytest.mark.criterion


# 1 -----------------------------------------------------------------------


@criterion(1, "stage counts for delta = 1e-4 .. 1e-7", 1)
def test_stage_counts():
    for delta, (nu, hat) in ref.STAGE_COUNTS.items():
        assert (nu_delta(delta), hat_nu_delta(delta)) == (nu, hat)


# 2 -----------------------------------------------------------------------


@criterion(2, "closed-form schedule, 14 stages verbatim", 1)
def test_closedform_rows():
    s = closedform_schedule(nu=14)
    assert triples_of(s) == ref.CLOSEDFORM
    assert s.certificate().half_angle_ok


# 3 -----------------------------------------------------------------------


@criterion(3, "reverse schedules for C = 1e5, 1e6, 1e7", 1)
@pytest.mark.parametrize("C", [10**5, 10**6, 10**7])
def test_reverse(C):
    s = reverse_schedule(C)
    assert triples_of(s) == ref.REVERSE[C]
    assert s.nu == ref.REVERSE_STAGES[C] == check_nu_C(C)
    a, b, c = s.triples[-1].as_tuple()
    assert psi(C) == Fraction(c, b)
    assert s.certificate(C=C).ok


# 4 -----------------------------------------------------------------------


@criterion(4, "optimized schedules verbatim and window-optimal", 30)
@pytest.mark.parametrize("delta", [Fraction(1, 10**5), Fraction(1, 10**6), Fraction(1, 10**7)])
def test_optimized(delta):
    s = optimized_schedule(delta)
    assert triples_of(s) == ref.OPTIMIZED[delta]
    assert s.certificate(delta).ok
    table = oracles.primitive_triples(s.max_coefficient)
    kap = s.kappa_used
    prev = None
    for t in s.triples:
        assert oracles.exact_angle_in_window(t.as_tuple(), prev, kap)
        phi = np.pi / 2 if prev is None else np.arctan2(prev[0], prev[1])
        for cand in oracles.window_hits(table, phi / 2, kap * phi / 2, t.c):
            assert not oracles.exact_angle_in_window(cand, prev, kap), (t, cand)
        prev = t.as_tuple()


# 5 -----------------------------------------------------------------------


def _doubled_sec(a, b, c):
    """sec of twice the angle with sine a/c, or None once it reaches a right angle."""
    den = b * b - a * a
    return None if den <= 0 else Fraction(c * c, den)


@criterion(5, "improved schedule for C = 1e7 against brute force", 300)
def test_improved_1e7():
    C = 10**7
    s = improved_schedule(C)
    assert s.nu == 12
    assert triples_of(s) == ref.IMPROVED_1E7
    assert s.sec_final == Fraction(9994921, 9994920)
    assert psi(C) - 1 == Fraction(1, 9994920)
    assert oracles.psi_bruteforce(C) == psi(C)
    assert s.certificate(C=C).ok

    table = oracles.primitive_triples(C)
    chain = triples_of(s)[::-1]
    for later, earlier in zip(chain, chain[1:]):
        target = _doubled_sec(*later)
        assert target is not None
        assert oracles.best_secant_bruteforce(table, target, max(169, later[2])) == earlier
    assert _doubled_sec(*chain[-1]) is None


# 6 -----------------------------------------------------------------------


def _log_uniform(rng, lo, hi):
    x = lo * (hi / lo) ** rng.random()
    return Fraction(x).limit_denominator(10**12)


@criterion(6, "sizing sweeps, 200 samples each", 30)
def test_hat_nu_gap():
    rng = random.Random(61)
    for _ in range(200):
        d = _log_uniform(rng, 1e-8, 0.25)
        assert 0 <= hat_nu_delta(d) - nu_delta(d) <= 2, d


@criterion(6, "sizing sweeps, 200 samples each", 30)
def test_coefficient_bound():
    rng = random.Random(62)
    for _ in range(200):
        d = _log_uniform(rng, 1e-8, 0.25)
        cb = coeff_bound_L3(d)
        assert cb.exact == closedform_schedule(d).triples[-1].c
        assert cb.exact <= 4 / d
        if not hat_nu_report(d).clamped:
            # C <= 4/d + 7 - 6 sqrt(1 + 2/d), squared exactly; the clamp to two stages breaks it
            rest = 4 / d + 7 - cb.exact
            assert rest >= 0 and 36 * (1 + 2 / d) <= rest * rest, d


@criterion(6, "sizing sweeps, 200 samples each", 30)
def test_check_nu_against_nu_of_psi():
    rng = random.Random(63)
    for _ in range(200):
        C = rng.randint(169, 10**7)
        gap = check_nu_C(C) - nu_delta(psi(C) - 1)
        assert 0 <= gap <= 1, C


@criterion(6, "sizing sweeps, 200 samples each", 30)
def test_elementary_inequalities():
    rng = random.Random(64)
    for _ in range(200):
        d = _log_uniform(rng, 1e-8, 0.25)
        ctx = ivctx(256)
        x = iv_from_fraction(ctx, d)
        lhs = DirectedInterval.from_iv(-3 + ctx.sqrt(1 + 2 / x), 256)
        rhs = DirectedInterval.from_iv(ctx.sqrt(2 / x), 256)
        two_root = DirectedInterval.from_iv(2 * ctx.sqrt(x), 256)
        assert lhs.hi <= rhs.lo, d
        assert enclose_arcsec(1 + d).hi <= two_root.lo, d


# 7 -----------------------------------------------------------------------


SCHEDULES = [
    (f"{kind} 1e-{k}", lambda kind=kind, k=k: build(Fraction(1, 10**k)))
    for kind, build in (("optimized", optimized_schedule), ("closedform", closedform_schedule))
    for k in (3, 5, 7)
] + [
    (f"{kind} 1e{k}", lambda build=build, k=k: build(10**k))
    for kind, build in (("reverse", reverse_schedule), ("improved", improved_schedule))
    for k in (4, 6)
]


@criterion(7, "cone points lift, lifted points project into the outer cone", 60)
@pytest.mark.parametrize("name,make", SCHEDULES, ids=[n for n, _ in SCHEDULES])
def test_l3_sampling(name, make):
    s = make()
    P, Z = build_P(s), build_P_tilde(s)
    bound = s.sec_final**2
    rng = random.Random(name)
    for _ in range(1000):
        x = samplers.l3_point(rng)
        w = witness_values(x, s)
        assert Z.is_satisfied(w), x
    for k in range(1000):
        v = samplers.lifted_P(s, rng)
        assert (P if k % 2 else Z).is_satisfied(v)
        assert v["x1"] ** 2 + v["x2"] ** 2 <= bound * v["x3"] ** 2


# 8 -----------------------------------------------------------------------


@criterion(8, "tower outer bound for N = 3, 5, 9", 60)
@pytest.mark.parametrize("N", [3, 5, 9])
def test_tower_sampling(N):
    eps = Fraction(1, 100)
    s = optimized_schedule(delta_epsilon(eps, N))
    Q = build_QN(s, N)
    f = Q.meta["outer_factor"]
    assert f <= 1 + eps
    rng = random.Random(N)
    for _ in range(500):
        v = samplers.lifted_tower(s, N, rng)
        assert Q.is_satisfied(v)
        assert sum(v[f"x{i}"] ** 2 for i in range(1, N)) <= f * f * v[f"x{N}"] ** 2


# 9 -----------------------------------------------------------------------


@criterion(9, "ball intersection N = 2 against the conic optimum", 120)
def test_ball_lp():
    inst = paper_instance(2)
    f = build_formulations(inst, Fraction(1, 10**7))
    factor = f.Z.meta["outer_factor"]
    tol = Fraction(1, 10**9)
    for seed in range(20):
        beta = random_objective(2, seed)
        obj = {"x1": beta[0], "x2": beta[1]}
        z = lp_solve(f.Z, obj)
        q = lp_solve(f.Q, obj)
        assert z.optimal and q.optimal
        assert q.objective == z.objective
        socp = oracles.ball_min_2d_bisect(inst.centers, inst.radii, beta)
        with mpmath.workdps(oracles.DPS):
            exact = oracles.ball_min_2d(inst.centers, inst.radii, beta)
        assert abs(socp - float(exact)) < 1e-9
        socp = Fraction(socp)
        slack = certified_slack(inst, beta, factor)
        assert socp - slack - tol <= z.objective <= socp + tol, seed


# 10 ----------------------------------------------------------------------


@criterion(10, "integer points preserved for admissible accuracies", 120)
def test_lattice_equivalence():
    inst = BallIntersectionInstance(((0, 0), (1, 0)), (2, 3), "pair")
    for R, e in zip(inst.radii, (Fraction(1, 10), Fraction(1, 20))):
        assert 0 < e and (1 + e) ** 2 < 1 + Fraction(1, R * R)
    good = lattice_equivalence_check(inst, lattice_polytope(inst, [Fraction(1, 10), Fraction(1, 20)]))
    assert good.equal
    assert good.counterexample is None
    bad = lattice_equivalence_check(inst, lattice_polytope(inst, [1, 1]))
    assert not bad.equal and bad.counterexample is not None


# 11 ----------------------------------------------------------------------


@criterion(11, "bench beyond the in-process limit emits files", 120)
def test_bench_size_guard(tmp_path):
    code = main(["bench", "--N", "8", "--objectives", "2", "--out-dir", str(tmp_path)])
    assert code == EXIT_SIZE
    names = {p.name for p in tmp_path.iterdir()}
    for form in ("R", "Q", "Z"):
        assert f"balls-N8_{form}.lp" in names and f"balls-N8_{form}.mps" in names
    assert "objectives.csv" in names
