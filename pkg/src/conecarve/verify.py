"""Exact rational LP and brute-force lattice checks.

The simplex keeps a sparse tableau of Fractions and pivots with Bland's
rule, so it always terminates and is deterministic.  It is meant for
desk-scale systems; larger ones are refused by a size guard.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import CertificationError, PreconditionError, SizeGuardError
from .linsys import LinearSystem

DEFAULT_SIZE_CAP = 20000


@dataclass(frozen=True)
class LPResult:
    status: str  # optimal | infeasible | unbounded
    objective: Fraction | None = None
    values: dict[str, Fraction] = field(default_factory=dict, compare=False)
    iterations: int = 0
    basis: tuple[str, ...] = ()

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


class _Tableau:
    """Sparse dictionary tableau; column indices double as Bland's order."""

    def __init__(self, rows: list[dict[int, Fraction]], rhs: list[Fraction], basis: list[int]):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.pivots = 0

    def pivot(self, r: int, s: int, cost: dict[int, Fraction], value: list[Fraction]) -> None:
        row = self.rows[r]
        p = row[s]
        if p != 1:
            inv = 1 / p
            for k in row:
                row[k] *= inv
            self.rhs[r] *= inv
        rr = self.rhs[r]
        items = list(row.items())
        for i, other in enumerate(self.rows):
            if i == r:
                continue
            f = other.get(s)
            if f is None:
                continue
            for k, v in items:
                nv = other.get(k, 0) - f * v
                if nv:
                    other[k] = nv
                else:
                    other.pop(k, None)
            self.rhs[i] -= f * rr
        f = cost.get(s)
        if f is not None:
            for k, v in items:
                nv = cost.get(k, 0) - f * v
                if nv:
                    cost[k] = nv
                else:
                    cost.pop(k, None)
            value[0] += f * rr
        self.basis[r] = s
        self.pivots += 1

    def optimize(self, cost: dict[int, Fraction], value: list[Fraction], allowed) -> str:
        """Minimize; ``cost`` holds reduced costs, ``value`` the current objective."""
        while True:
            entering = min((k for k, v in cost.items() if v < 0 and allowed(k)), default=None)
            if entering is None:
                return "optimal"
            best = None
            for i, row in enumerate(self.rows):
                a = row.get(entering)
                if a is None or a <= 0:
                    continue
                ratio = self.rhs[i] / a
                key = (ratio, self.basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
            if best is None:
                return "unbounded"
            self.pivot(best[1], entering, cost, value)


def _reduced(cost_vec: Mapping[int, Fraction], tab: _Tableau) -> tuple[dict[int, Fraction], list[Fraction]]:
    cost = {k: Fraction(v) for k, v in cost_vec.items() if v}
    value = [Fraction(0)]
    for i, b in enumerate(tab.basis):
        cb = cost.get(b)
        if not cb:
            continue
        for k, v in tab.rows[i].items():
            nv = cost.get(k, 0) - cb * v
            if nv:
                cost[k] = nv
            else:
                cost.pop(k, None)
        value[0] += cb * tab.rhs[i]
    return cost, value


def lp_solve(
    system: LinearSystem,
    objective: Mapping[str, Fraction] | None = None,
    sense: str = "min",
    fixings: Mapping[str, Fraction] | None = None,
    size_cap: int | None = DEFAULT_SIZE_CAP,
) -> LPResult:
    """Exact two-phase simplex over ``system`` with some variables fixed.

    With no objective only feasibility is decided.  The returned point is
    re-checked against every row in exact arithmetic.
    """
    if sense not in ("min", "max"):
        raise PreconditionError(f"sense must be 'min' or 'max', got {sense!r}")
    objective = {k: Fraction(v) for k, v in (objective or {}).items()}
    fixings = {k: Fraction(v) for k, v in (fixings or {}).items()}
    declared = {v.name: v for v in system.variables}
    for name in [*objective, *fixings]:
        if name not in declared:
            raise PreconditionError(f"unknown variable {name}")
    for name, val in fixings.items():
        lo = declared[name].lower
        if lo is not None and val < lo:
            return LPResult("infeasible")

    # columns: shifted bounded variables, split free variables
    cols: list[tuple[str, int]] = []  # (variable, sign)
    index: dict[str, list[int]] = {}
    for v in system.variables:
        if v.name in fixings:
            continue
        index[v.name] = [len(cols)]
        cols.append((v.name, 1))
        if v.lower is None:
            index[v.name].append(len(cols))
            cols.append((v.name, -1))
    lower = {v.name: (v.lower or Fraction(0)) for v in system.variables}

    std_rows: list[dict[int, Fraction]] = []
    std_rhs: list[Fraction] = []
    senses: list[str] = []
    for r in system.rows:
        rhs = r.rhs
        coeffs: dict[int, Fraction] = {}
        for name, c in r.coeffs:
            if name in fixings:
                rhs -= c * fixings[name]
                continue
            rhs -= c * lower[name]
            for col in index[name]:
                coeffs[col] = c * cols[col][1]
        if not coeffs:
            ok = (0 <= rhs) if r.sense == "<=" else (0 >= rhs) if r.sense == ">=" else rhs == 0
            if not ok:
                return LPResult("infeasible")
            continue
        row_sense = r.sense
        if row_sense == ">=":
            coeffs = {k: -v for k, v in coeffs.items()}
            rhs, row_sense = -rhs, "<="
        std_rows.append(coeffs)
        std_rhs.append(rhs)
        senses.append(row_sense)

    n_struct = len(cols)
    n_slack = sum(s != "=" for s in senses)
    if size_cap is not None and len(std_rows) * (n_struct + n_slack) > size_cap:
        raise SizeGuardError(
            f"LP with {len(std_rows)} rows and {n_struct + n_slack} columns exceeds the in-process cap "
            f"of {size_cap} entries; emit the model to a file and use an external solver"
        )

    basis: list[int] = []
    nxt = n_struct
    artificial_start = n_struct + n_slack
    art = artificial_start
    for i, sense_i in enumerate(senses):
        row = std_rows[i]
        slack = None
        if sense_i != "=":
            slack = nxt
            row[slack] = Fraction(1)
            nxt += 1
        if std_rhs[i] < 0:
            for k in row:
                row[k] = -row[k]
            std_rhs[i] = -std_rhs[i]
        if slack is not None and row[slack] == 1:
            basis.append(slack)
        else:
            row[art] = Fraction(1)
            basis.append(art)
            art += 1
    tab = _Tableau(std_rows, std_rhs, basis)

    if art > artificial_start:
        cost, value = _reduced({k: 1 for k in range(artificial_start, art)}, tab)
        tab.optimize(cost, value, lambda k: True)
        if value[0] != 0:
            return LPResult("infeasible", iterations=tab.pivots)
        _drive_out_artificials(tab, artificial_start)
    else:
        cost = {}

    if objective:
        sign = 1 if sense == "min" else -1
        cvec: dict[int, Fraction] = {}
        for name, c in objective.items():
            for col in index.get(name, ()):
                cvec[col] = sign * c * cols[col][1]
        cost, value = _reduced(cvec, tab)
        for k in range(artificial_start, art):
            cost.pop(k, None)
        status = tab.optimize(cost, value, lambda k: k < artificial_start)
        if status == "unbounded":
            return LPResult("unbounded", iterations=tab.pivots)

    colval = dict.fromkeys(range(n_struct), Fraction(0))
    for i, b in enumerate(tab.basis):
        if b < n_struct:
            colval[b] = tab.rhs[i]
    values = dict(fixings)
    for name, idx in index.items():
        values[name] = lower[name] + sum(colval[c] * cols[c][1] for c in idx)
    bad = system.violated_rows(values)
    if bad:
        raise CertificationError(f"simplex returned a point violating {bad[:3]}")
    obj = sum((c * values[n] for n, c in objective.items()), Fraction(0))
    names = tuple(cols[b][0] if b < n_struct else f"_s{b}" for b in tab.basis)
    return LPResult("optimal", obj, values, tab.pivots, names)


def _drive_out_artificials(tab: _Tableau, artificial_start: int) -> None:
    dummy_cost: dict[int, Fraction] = {}
    dummy_value = [Fraction(0)]
    keep = []
    for i in range(len(tab.rows)):
        if tab.basis[i] < artificial_start:
            keep.append(i)
            continue
        col = min((k for k, v in tab.rows[i].items() if k < artificial_start and v), default=None)
        if col is None:
            continue  # redundant equality
        tab.pivot(i, col, dummy_cost, dummy_value)
        keep.append(i)
    tab.rows = [tab.rows[i] for i in keep]
    tab.rhs = [tab.rhs[i] for i in keep]
    tab.basis = [tab.basis[i] for i in keep]
    for row in tab.rows:
        for k in [k for k in row if k >= artificial_start]:
            del row[k]


def is_member(x: Sequence, system: LinearSystem, size_cap: int | None = DEFAULT_SIZE_CAP) -> bool:
    """Exact feasibility with the original variables pinned to ``x``."""
    names = system.original_variables
    if len(names) != len(x):
        raise PreconditionError(f"point has {len(x)} coordinates, system has {len(names)} originals")
    return lp_solve(system, fixings=dict(zip(names, x)), size_cap=size_cap).optimal


# ------------------------------------------------------------ lattices


def _ball_box(center: Sequence[int], radius) -> list[tuple[int, int]]:
    r = Fraction(radius)
    return [(math.ceil(c - r), math.floor(c + r)) for c in center]


def default_box(instance, inflation=1) -> list[tuple[int, int]]:
    """Bounding box of the first ball intersected with every other ball's box."""
    box = None
    for u, R in zip(instance.centers, instance.radii):
        b = _ball_box(u, Fraction(R) * Fraction(inflation))
        box = b if box is None else [(max(l1, l2), min(h1, h2)) for (l1, h1), (l2, h2) in zip(box, b)]
    return box


def in_balls(point: Sequence[int], instance) -> bool:
    return all(
        sum((p - c) ** 2 for p, c in zip(point, u)) <= R * R for u, R in zip(instance.centers, instance.radii)
    )


def enumerate_lattice(instance, box: Sequence[tuple[int, int]] | None = None) -> set[tuple[int, ...]]:
    box = default_box(instance) if box is None else box
    if any(lo > hi for lo, hi in box):
        return set()
    ranges = [range(lo, hi + 1) for lo, hi in box]
    return {p for p in itertools.product(*ranges) if in_balls(p, instance)}


@dataclass(frozen=True)
class LatticeCheck:
    equal: bool
    counterexample: tuple[int, ...] | None
    lattice_points: frozenset
    polytope_points: frozenset


def lattice_equivalence_check(
    instance, T: LinearSystem, box: Sequence[tuple[int, int]] | None = None, inflation=None
) -> LatticeCheck:
    """Compare integer points of the ball intersection with integer points certified in T.

    The default box covers the balls inflated by ``inflation`` (taken from
    ``T.meta['outer_factor']`` when present) so points of T outside S are seen.
    """
    if box is None:
        f = inflation if inflation is not None else T.meta.get("outer_factor", 1)
        box = default_box(instance, f)
    S = enumerate_lattice(instance, box)
    ranges = [range(lo, hi + 1) for lo, hi in box]
    inside = set()
    if all(lo <= hi for lo, hi in box):
        for p in itertools.product(*ranges):
            if is_member(p, T, size_cap=None):
                inside.add(p)
    diff = sorted(S ^ inside)
    return LatticeCheck(not diff, diff[0] if diff else None, frozenset(S), frozenset(inside))
