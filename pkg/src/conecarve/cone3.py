"""Polyhedral approximations of the three-dimensional Lorentz cone.

A schedule of nu rotation angles gives a lifted system in
``(x1, x2, x3, xi^0..xi^nu, eta^0..eta^nu)`` with ``3 nu + 6`` rows once the
absolute values are split.  Three encodings share one row layout:

* ``Q`` - rotation rows with rational sines and cosines;
* ``Z`` - the same rows multiplied through by the hypotenuses (integer data);
* ``R`` - arbitrary (floating) cosines and sines, used for the irrational baseline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Mapping, Sequence

from .errors import PreconditionError
from .linsys import LinearSystem, Operand, Row, Variable, make_row
from .triplesearch import AngleSchedule

Form = Literal["Q", "Z", "R"]
Membership = Literal[
    "inside-L3-certified", "inside-P-certified", "outside-P-certified", "undetermined-by-witness"
]


@dataclass(frozen=True)
class StageData:
    """Per-stage cosines/sines plus tan of the last angle, for Q and R encodings."""

    cos: tuple[Fraction, ...]
    sin: tuple[Fraction, ...]
    tan_final: Fraction

    @classmethod
    def from_schedule(cls, schedule: AngleSchedule) -> "StageData":
        ts = schedule.triples
        return cls(
            tuple(Fraction(t.b, t.c) for t in ts),
            tuple(Fraction(t.a, t.c) for t in ts),
            Fraction(ts[-1].a, ts[-1].b),
        )

    @property
    def nu(self) -> int:
        return len(self.cos)


@dataclass(frozen=True)
class Witness:
    xi: tuple[Fraction, ...]
    eta: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.xi) != len(self.eta):
            raise ValueError("xi and eta must have equal length")


def lifted_names(prefix: str, nu: int) -> tuple[list[str], list[str]]:
    return [f"{prefix}xi{j}" for j in range(nu + 1)], [f"{prefix}eta{j}" for j in range(nu + 1)]


def l3_block(
    stages: AngleSchedule | StageData,
    form: Form,
    inputs: Sequence[Operand] = ("x1", "x2", "x3"),
    prefix: str = "",
) -> tuple[list[Variable], list[Row]]:
    """Lifted variables and rows of one L3 approximation block.

    ``inputs`` are the three cone coordinates; each may be a variable name,
    a constant, or an affine expression.
    """
    if form not in ("Q", "Z", "R"):
        raise PreconditionError(f"unknown form {form!r}; expected Q, Z or R")
    if form == "Z":
        if not isinstance(stages, AngleSchedule):
            raise PreconditionError("the Z encoding needs Pythagorean triples")
        triples = stages.triples
        nu = len(triples)
    else:
        data = stages if isinstance(stages, StageData) else StageData.from_schedule(stages)
        nu = data.nu
    u, v, w = inputs
    block = prefix or None
    xi, eta = lifted_names(prefix, nu)
    zero = Fraction(0)
    variables = [Variable(xi[j], "xi", zero, block, j) for j in range(nu + 1)]
    variables += [Variable(eta[j], "eta", zero, block, j) for j in range(nu + 1)]

    def row(terms, sense, name, role, stage=None):
        return make_row(terms, sense, 0, f"{prefix}{name}", role=role, block=block, stage=stage)

    rows = [
        row([(1, xi[0]), (-1, u)], ">=", "abs1p", "abs", 0),
        row([(1, xi[0]), (1, u)], ">=", "abs1m", "abs", 0),
        row([(1, eta[0]), (-1, v)], ">=", "abs2p", "abs", 0),
        row([(1, eta[0]), (1, v)], ">=", "abs2m", "abs", 0),
    ]
    for j in range(1, nu + 1):
        if form == "Z":
            a, b, c = triples[j - 1]
            cj, bj, aj = c, b, a
        else:
            cj, bj, aj = 1, data.cos[j - 1], data.sin[j - 1]
        rows.append(row([(cj, xi[j]), (-bj, xi[j - 1]), (-aj, eta[j - 1])], "=", f"rot{j}", "rotate", j))
        rows.append(row([(cj, eta[j]), (aj, xi[j - 1]), (-bj, eta[j - 1])], ">=", f"fold{j}p", "fold", j))
        rows.append(row([(cj, eta[j]), (-aj, xi[j - 1]), (bj, eta[j - 1])], ">=", f"fold{j}m", "fold", j))
    rows.append(row([(1, xi[nu]), (-1, w)], "<=", "top", "top", nu))
    if form == "Z":
        a, b, _ = triples[-1]
        rows.append(row([(b, eta[nu]), (-a, xi[nu])], "<=", "tip", "tip", nu))
    else:
        rows.append(row([(1, eta[nu]), (-data.tan_final, xi[nu])], "<=", "tip", "tip", nu))
    return variables, rows


def _original(names: Sequence[str]) -> list[Variable]:
    return [Variable(n, "x") for n in names]


def build_P(schedule: AngleSchedule) -> LinearSystem:
    """Rational-coefficient system (rotation rows with sin/cos)."""
    lifted, rows = l3_block(schedule, "Q")
    return LinearSystem(
        _original(("x1", "x2", "x3")) + lifted, rows, "Q", "P", {"nu": schedule.nu, "form": "Q"}
    )


def build_P_tilde(schedule: AngleSchedule) -> LinearSystem:
    """Integer-coefficient system (rows multiplied through by c_j, and b_nu for the tip)."""
    lifted, rows = l3_block(schedule, "Z")
    return LinearSystem(
        _original(("x1", "x2", "x3")) + lifted, rows, "Z", "P_tilde", {"nu": schedule.nu, "form": "Z"}
    )


def build_P_stages(stages: StageData, provenance: str = "R") -> LinearSystem:
    lifted, rows = l3_block(stages, "R")
    return LinearSystem(_original(("x1", "x2", "x3")) + lifted, rows, provenance, "P_real", {"nu": stages.nu})


# ------------------------------------------------------------- witnesses


def canonical_witness(x: Sequence, schedule: AngleSchedule) -> Witness:
    """Rotate-and-fold witness: xi^0 = |x1|, eta^0 = |x2|, then each stage in turn."""
    xi = [abs(Fraction(x[0]))]
    eta = [abs(Fraction(x[1]))]
    for t in schedule.triples:
        s, c = Fraction(t.a, t.c), Fraction(t.b, t.c)
        prev_xi, prev_eta = xi[-1], eta[-1]
        xi.append(c * prev_xi + s * prev_eta)
        eta.append(abs(-s * prev_xi + c * prev_eta))
    return Witness(tuple(xi), tuple(eta))


def witness_values(
    x: Sequence, schedule: AngleSchedule, prefix: str = "", names: Sequence[str] = ("x1", "x2", "x3")
) -> dict[str, Fraction]:
    """Full assignment (original plus lifted variables) built from the canonical witness."""
    w = canonical_witness(x, schedule)
    xi, eta = lifted_names(prefix, schedule.nu)
    values = {n: Fraction(v) for n, v in zip(names, x)}
    values.update(zip(xi, w.xi))
    values.update(zip(eta, w.eta))
    return values


def in_L3(x: Sequence) -> bool:
    x1, x2, x3 = (Fraction(v) for v in x)
    return x3 >= 0 and x1 * x1 + x2 * x2 <= x3 * x3


def membership_certificate(x: Sequence, schedule: AngleSchedule, delta=None, use_lp: bool = True) -> Membership:
    """Classify a rational point against the approximation of ``schedule``.

    Points of the cone itself and points whose canonical witness closes the
    last two rows are certified directly; everything else is settled by
    exact LP feasibility (or reported undetermined when ``use_lp`` is False).
    """
    x = tuple(Fraction(v) for v in x)
    if in_L3(x):
        return "inside-L3-certified"
    values = witness_values(x, schedule)
    if build_P_tilde(schedule).is_satisfied(values):
        return "inside-P-certified"
    sec = schedule.sec_final
    if delta is not None:
        sec = min(sec, 1 + Fraction(delta)) if schedule.certificate(delta).ok else sec
    if x[2] < 0 or x[0] ** 2 + x[1] ** 2 > sec * sec * x[2] ** 2:
        return "outside-P-certified"
    if not use_lp:
        return "undetermined-by-witness"
    from .verify import is_member

    return "inside-P-certified" if is_member(x, build_P_tilde(schedule)) else "outside-P-certified"


# --------------------------------------------------------- integerization


def integerize_witness(system: LinearSystem) -> LinearSystem:
    """Rescale lifted variables so integral x keeps an integral witness.

    Stage-j variables of each block are replaced by ``prod_{j' <= j} c_{j'}``
    times themselves; every row is then cleared of denominators.  The scale
    of each variable is recorded in ``meta['scales']``.
    """
    if system.provenance != "Z":
        raise PreconditionError("integerize_witness needs an integer (Z) system")
    hyp: dict[tuple[str | None, int], int] = {}
    lifted = {v.name: v for v in system.variables if v.kind in ("xi", "eta")}
    for r in system.rows:
        if r.role != "rotate":
            continue
        target = next(
            (c for name, c in r.coeffs if name in lifted and lifted[name].kind == "xi" and lifted[name].stage == r.stage),
            None,
        )
        if target is None:
            raise PreconditionError(f"rotation row {r.name} has no stage variable")
        hyp[(r.block, r.stage)] = int(target)
    scales: dict[str, int] = {}
    for name, v in lifted.items():
        s = 1
        for j in range(1, (v.stage or 0) + 1):
            s *= hyp[(v.block, j)]
        scales[name] = s
    rows = []
    for r in system.rows:
        coeffs = [(n, c / scales.get(n, 1)) for n, c in r.coeffs]
        lcm = 1
        for _, c in coeffs:
            lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
        rows.append(
            Row(
                tuple((n, c * lcm) for n, c in coeffs),
                r.sense,
                r.rhs * lcm,
                r.name,
                r.role,
                r.block,
                r.stage,
            )
        )
    meta = dict(system.meta)
    meta["scales"] = scales
    return LinearSystem(system.variables, rows, "Z", system.tag + "+integerized", meta)


def integerize_values(values: Mapping[str, Fraction], integerized: LinearSystem) -> dict[str, Fraction]:
    scales = integerized.meta["scales"]
    return {k: Fraction(v) * scales.get(k, 1) for k, v in values.items()}
