import random
from fractions import Fraction

import pytest

from conecarve.cone3 import (
    StageData,
    build_P,
    build_P_stages,
    build_P_tilde,
    canonical_witness,
    in_L3,
    integerize_values,
    integerize_witness,
    l3_block,
    membership_certificate,
    witness_values,
)
from conecarve.errors import PreconditionError
from conecarve.exactnum import PythagoreanTriple
from conecarve.triplesearch import AngleSchedule, closedform_schedule, optimized_schedule, reverse_schedule
from conecarve.verify import lp_solve

import samplers

SCHED = optimized_schedule(Fraction(1, 10**5))
SMALL = AngleSchedule((PythagoreanTriple(3, 4, 5),), "closedform")


def test_shapes():
    for s in (SCHED, closedform_schedule(nu=3), SMALL):
        for P in (build_P(s), build_P_tilde(s)):
            assert P.shape == (3 * s.nu + 6, 2 * s.nu + 5)
            assert P.meta["nu"] == s.nu
    assert build_P(SCHED).provenance == "Q"
    assert build_P_tilde(SCHED).provenance == "Z"


def test_lifted_bounds():
    P = build_P_tilde(SCHED)
    lowers = {v.name: v.lower for v in P.variables}
    assert lowers["xi0"] == 0 and lowers["eta0"] == 0
    assert lowers["x1"] is None and lowers["x3"] is None


def test_z_rows_are_scaled_q_rows():
    P, Z = build_P(SCHED), build_P_tilde(SCHED)
    assert [r.name for r in P.rows] == [r.name for r in Z.rows]
    for rq, rz in zip(P.rows, Z.rows):
        qm, zm = rq.coeff_map, rz.coeff_map
        assert qm.keys() == zm.keys() and rq.sense == rz.sense
        k = next(zm[v] / qm[v] for v in qm)
        assert k > 0
        assert all(zm[v] == k * qm[v] for v in qm) and rz.rhs == k * rq.rhs


def test_z_coefficients_bounded_by_hypotenuse():
    Z = build_P_tilde(SCHED)
    assert Z.max_abs_coefficient() == SCHED.max_coefficient


def test_single_stage_rows():
    Z = build_P_tilde(SMALL)
    rot = next(r for r in Z.rows if r.role == "rotate")
    assert rot.coeff_map == {"xi1": 5, "xi0": -4, "eta0": -3}
    tip = next(r for r in Z.rows if r.name == "tip")
    assert tip.coeff_map == {"eta1": 4, "xi1": -3}


def test_prefixed_block_names():
    vs, rows = l3_block(SMALL, "Q", ("u", "v", "w"), prefix="blk_")
    assert {v.name for v in vs} == {"blk_xi0", "blk_xi1", "blk_eta0", "blk_eta1"}
    assert all(r.name.startswith("blk_") for r in rows)
    with pytest.raises(PreconditionError):
        l3_block(SMALL, "F", ("u", "v", "w"))
    with pytest.raises(PreconditionError):
        l3_block(StageData.from_schedule(SMALL), "Z", ("u", "v", "w"))


def test_real_stages_system():
    st = StageData((Fraction(0.8),), (Fraction(0.6),), Fraction(0.75))
    P = build_P_stages(st)
    assert P.provenance == "R" and P.shape == (9, 7)


def test_canonical_witness_trace():
    w = canonical_witness((Fraction(3), Fraction(-4), 5), SMALL)
    assert w.xi == (3, Fraction(24, 5))
    assert w.eta == (4, Fraction(7, 5))


def test_witness_on_random_cone_points():
    rng = random.Random(11)
    P, Z = build_P(SCHED), build_P_tilde(SCHED)
    for _ in range(200):
        x = samplers.l3_point(rng)
        v = witness_values(x, SCHED)
        assert P.is_satisfied(v) and Z.is_satisfied(v)


def test_random_lifted_points_satisfy_outer_bound():
    rng = random.Random(12)
    Z = build_P_tilde(SCHED)
    sec = SCHED.sec_final
    for _ in range(200):
        v = samplers.lifted_P(SCHED, rng)
        assert Z.is_satisfied(v)
        assert v["x1"] ** 2 + v["x2"] ** 2 <= sec * sec * v["x3"] ** 2


def test_outer_factor_is_tight():
    # the boundary ray (sec, 0, 1) maximizes x1 at x3 = 1, x2 = 0
    Z = build_P_tilde(SMALL)
    res = lp_solve(Z, {"x1": 1}, "max", fixings={"x3": 1, "x2": 0})
    assert res.objective == Fraction(5, 4)


def test_membership_classes():
    s = SCHED
    assert membership_certificate((3, 4, 5), s) == "inside-L3-certified"
    assert membership_certificate((6, 0, 5), s) == "outside-P-certified"
    assert membership_certificate((0, 0, -1), s) == "outside-P-certified"
    # just outside the cone, within the approximation
    x = (1 + Fraction(1, 200000), 0, 1)
    assert in_L3((1, 0, 1)) and not in_L3(x)
    assert x[0] < s.sec_final
    assert membership_certificate(x, SMALL) == "inside-P-certified"
    assert membership_certificate(x, s) == "inside-P-certified"
    assert membership_certificate((1 + Fraction(1, 10**5), 0, 1), s) == "outside-P-certified"


def test_membership_agrees_with_lp():
    rng = random.Random(5)
    Z = build_P_tilde(SMALL)
    for _ in range(40):
        x = (Fraction(rng.randint(-50, 50), 40), Fraction(rng.randint(-50, 50), 40), Fraction(1))
        cls = membership_certificate(x, SMALL)
        feasible = lp_solve(Z, fixings=dict(zip(("x1", "x2", "x3"), x))).status == "optimal"
        assert (cls != "outside-P-certified") == feasible


def test_integerize_witness():
    s = reverse_schedule(10**4)
    Z = build_P_tilde(s)
    I = integerize_witness(Z)
    assert I.provenance == "Z"
    rng = random.Random(2)
    for _ in range(50):
        x = samplers.l3_point(rng)
        scale = 1
        for q in x:
            scale = scale * q.denominator
        xi = tuple(q * scale for q in x)  # an integral cone point
        iv = integerize_values(witness_values(xi, s), I)
        assert I.is_satisfied(iv)
        assert all(v.denominator == 1 for v in iv.values())
    with pytest.raises(PreconditionError):
        integerize_witness(build_P(s))
