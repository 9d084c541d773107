"""Higher-dimensional cones assembled from three-dimensional blocks.

The tower pairs coordinates in a binary tree: node ``(k, i)`` constrains
``(y[k, 2i-1], y[k, 2i], y[k+1, i])`` to one L3 block.  Leaves are the first
``N - 1`` coordinates (padded with variables pinned to zero) and the root
output is the last coordinate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath

from .cone3 import StageData, canonical_witness, l3_block, lifted_names
from .errors import PreconditionError
from .linsys import LinearSystem, Operand, Row, Variable, make_row
from .sizing import QUARTER, ceil_log2_tower, coeff_bound_LN, delta_epsilon, nu_delta
from .triplesearch import AngleSchedule, closedform_schedule, psi


@dataclass(frozen=True)
class TowerLayout:
    N: int
    K: int
    padded_dim: int
    nodes: tuple[tuple[int, int], ...]

    @property
    def pads(self) -> tuple[int, ...]:
        """Leaf indices beyond N - 1 that are pinned to zero."""
        return tuple(range(self.N, self.padded_dim))

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def internal_outputs(self) -> tuple[tuple[int, int], ...]:
        """Tower variables y[k, i] with 1 <= k < K."""
        return tuple((k + 1, i) for k, i in self.nodes if k + 1 < self.K)


def tower_layout(N: int) -> TowerLayout:
    if N < 3:
        raise PreconditionError(f"need N >= 3, got {N}")
    K = ceil_log2_tower(N - 1)
    nodes = tuple((k, i) for k in range(K) for i in range(1, 2 ** (K - k - 1) + 1))
    return TowerLayout(N, K, 2**K + 1, nodes)


def tower_block(
    stages: AngleSchedule | StageData,
    form: str,
    inputs: Sequence[Operand],
    top: Operand,
    base: str = "",
) -> tuple[list[Variable], list[Row], TowerLayout]:
    """Tower over ``len(inputs) + 1`` coordinates with root output ``top``."""
    layout = tower_layout(len(inputs) + 1)
    K = layout.K
    variables: list[Variable] = []
    rows: list[Row] = []
    leaf: dict[int, Operand] = dict(enumerate(inputs, start=1))
    for i in layout.pads:
        name = f"{base}pad{i}"
        variables.append(Variable(name, "pad"))
        rows.append(make_row([(1, name)], "=", 0, f"{base}padrow{i}", role="pad"))
        leaf[i] = name

    def y(k: int, i: int) -> Operand:
        if k == 0:
            return leaf[i]
        if k == K:
            return top
        return f"{base}y{k}_{i}"

    for k, i in layout.internal_outputs:
        variables.append(Variable(f"{base}y{k}_{i}", "y", Fraction(0), base or None, None))
    for k, i in layout.nodes:
        v, r = l3_block(stages, form, (y(k, 2 * i - 1), y(k, 2 * i), y(k + 1, i)), f"{base}n{k}_{i}_")
        variables += v
        rows += r
    return variables, rows, layout


def _tower_meta(layout: TowerLayout, nu: int, factor: Fraction | None) -> dict:
    lifted = layout.node_count * (2 * nu + 2)
    return {
        "N": layout.N,
        "K": layout.K,
        "nu": nu,
        "nodes": layout.node_count,
        "lifted_variables": lifted,
        "tower_variables": len(layout.internal_outputs),
        "pad_variables": len(layout.pads),
        "cone_rows": layout.node_count * (3 * nu + 6),
        "reference_variable_count": (2 * nu + 3) * (layout.N - 2),
        "reference_row_count": (3 * nu + 6) * (layout.N - 2),
        "outer_factor": factor,
    }


def build_QN(schedule: AngleSchedule, N: int, form: str = "Z") -> LinearSystem:
    """Tower of integer (``Z``) or rational (``Q``) blocks approximating L^N.

    ``meta['outer_factor']`` is sec(theta_nu)**K, the exact outer accuracy.
    """
    names = [f"x{i}" for i in range(1, N + 1)]
    variables, rows, layout = tower_block(schedule, form, names[:-1], names[-1])
    meta = _tower_meta(layout, schedule.nu, schedule.sec_final**layout.K)
    return LinearSystem([Variable(n, "x") for n in names] + variables, rows, form, f"Q{N}", meta)


def build_QN_closedform(epsilon, N: int) -> LinearSystem:
    epsilon = Fraction(epsilon)
    delta = delta_epsilon(epsilon, N)
    if not delta < QUARTER:
        raise PreconditionError(
            f"per-level accuracy (1+eps)^(1/K) - 1 = {delta} must be below 1/4 for the closed form"
        )
    schedule = closedform_schedule(delta)
    system = build_QN(schedule, N)
    system.meta.update(
        epsilon=epsilon,
        delta=delta,
        coefficient_bound=coeff_bound_LN(epsilon, N) if epsilon < 1 else None,
        max_coefficient=int(system.max_abs_coefficient()),
    )
    return system


def rotation_stages(nu: int) -> StageData:
    """Nearest-double cos/sin of pi / 2^(j+1), j = 1..nu, and tan of the last angle."""
    with mpmath.workprec(200):
        angles = [mpmath.pi / 2 ** (j + 1) for j in range(1, nu + 1)]
        cos = tuple(Fraction(float(mpmath.cos(t))) for t in angles)
        sin = tuple(Fraction(float(mpmath.sin(t))) for t in angles)
        tan = Fraction(float(mpmath.tan(angles[-1])))
    return StageData(cos, sin, tan)


def build_RN(N: int, delta=None, epsilon=None) -> LinearSystem:
    """Floating-coefficient tower with the dyadic angle sequence (provenance R)."""
    if (delta is None) == (epsilon is None):
        raise PreconditionError("build_RN needs exactly one of delta or epsilon")
    delta = delta_epsilon(epsilon, N) if delta is None else Fraction(delta)
    stages = rotation_stages(nu_delta(delta))
    names = [f"x{i}" for i in range(1, N + 1)]
    variables, rows, layout = tower_block(stages, "R", names[:-1], names[-1])
    meta = _tower_meta(layout, stages.nu, None)
    meta["delta"] = delta
    return LinearSystem([Variable(n, "x") for n in names] + variables, rows, "R", f"R{N}", meta)


def disaggregation_layout(N: int, schedule: AngleSchedule | None = None) -> LinearSystem:
    """Rotated-cone formulation: x_i^2 <= z_i x_N, sum z_i <= x_N, z >= 0.

    Each rotated cone is the L3 condition on (2 x_i, z_i - x_N, z_i + x_N),
    twice the exact map, so every coefficient stays integral.
    """
    if N < 3:
        raise PreconditionError(f"need N >= 3, got {N}")
    schedule = schedule or closedform_schedule(Fraction(1, 10**5))
    xs = [f"x{i}" for i in range(1, N + 1)]
    zs = [f"z{i}" for i in range(1, N)]
    xN = xs[-1]
    variables = [Variable(n, "x") for n in xs] + [Variable(z, "z") for z in zs]
    rows = []
    for i, (x, z) in enumerate(zip(xs, zs), start=1):
        u = ({x: Fraction(2)}, Fraction(0))
        v = ({z: Fraction(1), xN: Fraction(-1)}, Fraction(0))
        w = ({z: Fraction(1), xN: Fraction(1)}, Fraction(0))
        lv, lr = l3_block(schedule, "Z", (u, v, w), f"d{i}_")
        variables += lv
        rows += lr
    rows.append(make_row([(1, z) for z in zs] + [(-1, xN)], "<=", 0, "link", role="link"))
    rows.append(make_row([(1, xN)], ">=", 0, "nonneg_xN", role="nonneg"))
    rows += [make_row([(1, z)], ">=", 0, f"nonneg_{z}", role="nonneg") for z in zs]
    meta = {"N": N, "nu": schedule.nu, "blocks": N - 1}
    return LinearSystem(variables, rows, "Z", f"D{N}", meta)


def accuracy_given_C(C: int, N: int) -> Fraction:
    """psi(C)^K - 1: the tower accuracy reachable with coefficients capped at C."""
    return psi(C) ** tower_layout(N).K - 1


def tower_witness(x: Sequence, schedule: AngleSchedule, base: str = "") -> dict[str, Fraction]:
    """Bottom-up canonical witnesses; each node passes xi^nu to its parent."""
    x = [Fraction(v) for v in x]
    N = len(x)
    layout = tower_layout(N)
    values = {f"x{i}": v for i, v in enumerate(x, start=1)}
    level = {i: x[i - 1] for i in range(1, N)}
    for i in layout.pads:
        values[f"{base}pad{i}"] = Fraction(0)
        level[i] = Fraction(0)
    for k in range(layout.K):
        nxt = {}
        for i in range(1, 2 ** (layout.K - k - 1) + 1):
            w = canonical_witness((level[2 * i - 1], level[2 * i], 0), schedule)
            xi, eta = lifted_names(f"{base}n{k}_{i}_", schedule.nu)
            values.update(zip(xi, w.xi))
            values.update(zip(eta, w.eta))
            nxt[i] = w.xi[-1]
            if k + 1 < layout.K:
                values[f"{base}y{k + 1}_{i}"] = w.xi[-1]
        level = nxt
    return values
