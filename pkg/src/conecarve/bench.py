"""Intersection-of-balls experiments over the R, Q and Z encodings."""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import PreconditionError, SizeGuardError
from .linsys import LinearSystem, Variable
from .sizing import nu_delta
from .towern import rotation_stages, tower_block
from .triplesearch import AngleSchedule, build_schedule, optimized_schedule
from .verify import in_balls, lp_solve

DEFAULT_DELTA = Fraction(1, 10**7)
DEFAULT_MAX_DIM = 4
CSV_COLUMNS = ("instance", "formulation", "objective_index", "status", "objective_value", "iterations", "wall_time_ms")


@dataclass(frozen=True)
class BallIntersectionInstance:
    centers: tuple[tuple[int, ...], ...]
    radii: tuple[int, ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "centers", tuple(tuple(c) for c in self.centers))
        object.__setattr__(self, "radii", tuple(self.radii))
        if not self.centers or len(self.centers) != len(self.radii):
            raise PreconditionError("need one radius per center and at least one ball")
        dims = {len(c) for c in self.centers}
        if len(dims) != 1:
            raise PreconditionError("all centers must have the same dimension")
        for c in self.centers:
            if not all(isinstance(v, int) for v in c):
                raise PreconditionError(f"center {c} is not integral")
        for R in self.radii:
            if not isinstance(R, int) or R <= 0:
                raise PreconditionError(f"radius {R!r} is not a positive integer")

    @property
    def N(self) -> int:
        return len(self.centers[0])

    @property
    def I(self) -> int:
        return len(self.centers)


def paper_instance(N: int) -> BallIntersectionInstance:
    """Balls of radius 10 i around 10 e_i, i = 1..N."""
    if N < 2:
        raise PreconditionError(f"need N >= 2, got {N}")
    centers = tuple(tuple(10 if j == i else 0 for j in range(N)) for i in range(N))
    inst = BallIntersectionInstance(centers, tuple(10 * (i + 1) for i in range(N)), f"balls-N{N}")
    if not in_balls(centers[0], inst):
        raise PreconditionError("instance is empty")
    return inst


def random_objective(N: int, seed: int) -> tuple[Fraction, ...]:
    """Gaussian direction, normalized, rounded half-to-even to six decimals."""
    g = np.random.default_rng(seed).standard_normal(N)
    g = g / np.linalg.norm(g)
    q = Decimal("0.000001")
    return tuple(Fraction(Decimal(float(v)).quantize(q, rounding=ROUND_HALF_EVEN)) for v in g)


# --------------------------------------------------------- formulations


def ball_system(
    instance: BallIntersectionInstance, stages, form: str, provenance: str | None = None, start: int = 1
) -> LinearSystem:
    """One tower per ball on (x - u_i, R_i); the last cone coordinate is the constant R_i."""
    N = instance.N
    xs = [f"x{j}" for j in range(1, N + 1)]
    variables = [Variable(x, "x") for x in xs]
    rows = []
    factor = None
    for i, (u, R) in enumerate(zip(instance.centers, instance.radii), start=start):
        inputs = [({x: Fraction(1)}, Fraction(-c)) for x, c in zip(xs, u)]
        v, r, layout = tower_block(stages, form, inputs, R, f"b{i}_")
        variables += v
        rows += r
        if isinstance(stages, AngleSchedule):
            factor = stages.sec_final**layout.K
    meta = {"instance": instance.name, "outer_factor": factor}
    return LinearSystem(variables, rows, provenance or form, f"{instance.name}:{form}", meta)


def lattice_polytope(
    instance: BallIntersectionInstance, epsilons: Sequence, construction: str = "optimized"
) -> LinearSystem:
    """Z system with one outer approximation of accuracy eps_i per ball.

    ``meta['outer_factor']`` is the largest certified inflation over the balls.
    """
    if len(epsilons) != instance.I:
        raise PreconditionError("need one epsilon per ball")
    parts = []
    factor = Fraction(1)
    for i, (eps, (u, R)) in enumerate(zip(epsilons, zip(instance.centers, instance.radii)), start=1):
        schedule = build_schedule(construction, delta=Fraction(eps))
        single = BallIntersectionInstance((u,), (R,), instance.name)
        part = ball_system(single, schedule, "Z", start=i)
        parts.append(part)
        factor = max(factor, part.meta["outer_factor"])
    return LinearSystem.combine(parts, provenance="Z", tag=f"{instance.name}:T", meta={"outer_factor": factor})


@dataclass(frozen=True)
class Formulations:
    R: LinearSystem
    Q: LinearSystem
    Z: LinearSystem
    schedule: AngleSchedule = field(compare=False)

    def items(self):
        return (("R", self.R), ("Q", self.Q), ("Z", self.Z))


def build_formulations(
    instance: BallIntersectionInstance, delta=DEFAULT_DELTA, schedule: AngleSchedule | None = None
) -> Formulations:
    delta = Fraction(delta)
    schedule = schedule or optimized_schedule(delta)
    stages = rotation_stages(nu_delta(delta))
    return Formulations(
        R=ball_system(instance, stages, "R"),
        Q=ball_system(instance, schedule, "Q"),
        Z=ball_system(instance, schedule, "Z"),
        schedule=schedule,
    )


# ---------------------------------------------------------------- runs


@dataclass(frozen=True)
class ExperimentRecord:
    instance: str
    formulation: str
    objective_index: int
    objective: tuple[Fraction, ...]
    status: str
    value: Fraction | float | None
    iterations: int
    wall_time_ms: float

    def row(self) -> dict:
        return {
            "instance": self.instance,
            "formulation": self.formulation,
            "objective_index": self.objective_index,
            "status": self.status,
            "objective_value": "" if self.value is None else _fmt_value(self.value),
            "iterations": self.iterations,
            "wall_time_ms": f"{self.wall_time_ms:.3f}",
        }


def _fmt_value(v) -> str:
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return repr(float(v))


def run_lp_comparison(
    instance: BallIntersectionInstance,
    objectives: Sequence[Sequence],
    formulations: Formulations | Iterable[tuple[str, LinearSystem]],
    max_dim: int = DEFAULT_MAX_DIM,
    size_cap: int | None = None,
) -> list[ExperimentRecord]:
    """min beta^T x over each formulation, exactly; R optima are reported as floats."""
    if instance.N > max_dim:
        raise SizeGuardError(
            f"N = {instance.N} exceeds the in-process limit {max_dim}; emit model files for an external solver"
        )
    systems = list(formulations.items() if isinstance(formulations, Formulations) else formulations)
    xs = [f"x{j}" for j in range(1, instance.N + 1)]
    records = []
    for idx, beta in enumerate(objectives):
        obj = dict(zip(xs, (Fraction(b) for b in beta)))
        for tag, system in systems:
            t0 = time.perf_counter()
            res = lp_solve(system, obj, "min", size_cap=size_cap)
            ms = (time.perf_counter() - t0) * 1000
            value = res.objective
            if value is not None and tag == "R":
                value = float(value)
            records.append(ExperimentRecord(instance.name, tag, idx, tuple(obj.values()), res.status, value, res.iterations, ms))
    return records


def write_csv(records: Iterable[ExperimentRecord], stream: io.TextIOBase | None = None) -> str:
    out = stream or io.StringIO()
    w = csv.DictWriter(out, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in records:
        w.writerow(r.row())
    return out.getvalue() if stream is None else ""


# ----------------------------------------------------- certified slack


def sqrt_upper(q: Fraction, digits: int = 12) -> Fraction:
    """Rational upper bound on sqrt(q) with ``digits`` decimals."""
    scale = 10**digits
    n = q * scale * scale
    r = math.isqrt(math.ceil(n))
    if r * r < n:
        r += 1
    return Fraction(r, scale)


def margin_lower(point: Sequence[Fraction], instance: BallIntersectionInstance) -> Fraction:
    """min_i R_i - ||point - u_i||, rounded down."""
    return min(
        R - sqrt_upper(sum((Fraction(p) - c) ** 2 for p, c in zip(point, u)))
        for u, R in zip(instance.centers, instance.radii)
    )


def interior_point(instance: BallIntersectionInstance) -> tuple[tuple[Fraction, ...], Fraction]:
    """A point of positive margin among centers, pairwise midpoints and the centroid."""
    cands = [tuple(Fraction(v) for v in u) for u in instance.centers]
    cands += [tuple((Fraction(a) + b) / 2 for a, b in zip(u, w)) for u, w in zip(instance.centers, instance.centers[1:])]
    cands.append(tuple(sum(Fraction(u[j]) for u in instance.centers) / instance.I for j in range(instance.N)))
    best = max(cands, key=lambda p: margin_lower(p, instance))
    r = margin_lower(best, instance)
    if r <= 0:
        raise PreconditionError("no interior point found among the candidates")
    return best, r


def certified_slack(instance: BallIntersectionInstance, beta: Sequence, outer_factor: Fraction) -> Fraction:
    """Upper bound on (true minimum) - (minimum over balls inflated by ``outer_factor``).

    With an interior point x0 of margin r, any y in the inflated intersection
    mixes with x0 (weight tau = (f-1) max R / r) into a point of S, which gives
    min_T >= OPT - tau (beta^T x0 - LB) with LB = max_i beta^T u_i - R_i ||beta||.
    """
    beta = [Fraction(b) for b in beta]
    f = Fraction(outer_factor)
    x0, r = interior_point(instance)
    tau = (f - 1) * max(instance.radii) / r
    norm_up = sqrt_upper(sum(b * b for b in beta))
    lb = max(sum(b * c for b, c in zip(beta, u)) - R * norm_up for u, R in zip(instance.centers, instance.radii))
    return tau * (sum(b * x for b, x in zip(beta, x0)) - lb)
