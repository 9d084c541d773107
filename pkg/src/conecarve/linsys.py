"""Sparse rational constraint systems over named variables."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from .errors import PreconditionError

SENSES = ("<=", "=", ">=")
PROVENANCES = ("R", "Q", "Z")
VARIABLE_KINDS = ("x", "xi", "eta", "y", "z", "pad")


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str = "x"
    lower: Fraction | None = None  # None means free
    block: str | None = None
    stage: int | None = None

    def __post_init__(self):
        if self.kind not in VARIABLE_KINDS:
            raise PreconditionError(f"unknown variable kind {self.kind!r}")
        if len(self.name) > 255 or not self.name:
            raise PreconditionError(f"variable name must have 1..255 characters: {self.name!r}")


@dataclass(frozen=True)
class Row:
    coeffs: tuple[tuple[str, Fraction], ...]
    sense: str
    rhs: Fraction
    name: str
    role: str = ""
    block: str | None = None
    stage: int | None = None

    def __post_init__(self):
        if self.sense not in SENSES:
            raise PreconditionError(f"unknown row sense {self.sense!r}")

    @property
    def coeff_map(self) -> dict[str, Fraction]:
        return dict(self.coeffs)

    def activity(self, values: Mapping[str, Fraction]) -> Fraction:
        return sum((c * Fraction(values[v]) for v, c in self.coeffs), Fraction(0))

    def satisfied(self, values: Mapping[str, Fraction]) -> bool:
        lhs = self.activity(values)
        if self.sense == "<=":
            return lhs <= self.rhs
        if self.sense == ">=":
            return lhs >= self.rhs
        return lhs == self.rhs


# An operand is a variable name, a constant, or an affine map (coeffs, constant).
Affine = tuple[Mapping[str, Fraction], Fraction]
Operand = Union[str, int, Fraction, Affine]


def _affine(op: Operand) -> Affine:
    if isinstance(op, str):
        return {op: Fraction(1)}, Fraction(0)
    if isinstance(op, (int, Fraction)):
        return {}, Fraction(op)
    coeffs, const = op
    return dict(coeffs), Fraction(const)


def make_row(
    terms: Iterable[tuple[Fraction | int, Operand]],
    sense: str,
    rhs: Fraction | int,
    name: str,
    **meta,
) -> Row:
    """Row from ``sum coef * operand  (sense)  rhs``, constants folded into the rhs."""
    acc: dict[str, Fraction] = {}
    rhs = Fraction(rhs)
    for coef, op in terms:
        coef = Fraction(coef)
        coeffs, const = _affine(op)
        rhs -= coef * const
        for v, a in coeffs.items():
            acc[v] = acc.get(v, Fraction(0)) + coef * Fraction(a)
    items = tuple((v, c) for v, c in acc.items() if c != 0)
    return Row(items, sense, rhs, name, **meta)


@dataclass(frozen=True)
class LinearSystem:
    variables: tuple[Variable, ...]
    rows: tuple[Row, ...]
    provenance: str = "Q"
    tag: str = ""
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "rows", tuple(self.rows))
        if self.provenance not in PROVENANCES:
            raise PreconditionError(f"unknown provenance {self.provenance!r}")
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            dup = sorted({n for n in names if names.count(n) > 1})
            raise PreconditionError(f"duplicate variables: {dup[:5]}")
        declared = set(names)
        for r in self.rows:
            for v, _ in r.coeffs:
                if v not in declared:
                    raise PreconditionError(f"row {r.name} references undeclared variable {v}")
        if self.provenance == "Z":
            for r in self.rows:
                if r.rhs.denominator != 1 or any(c.denominator != 1 for _, c in r.coeffs):
                    raise PreconditionError(f"row {r.name} has non-integral data in a Z system")

    # -------------------------------------------------------------- queries

    @property
    def variable_names(self) -> list[str]:
        return [v.name for v in self.variables]

    def variables_of_kind(self, *kinds: str) -> list[Variable]:
        return [v for v in self.variables if v.kind in kinds]

    @property
    def original_variables(self) -> list[str]:
        return [v.name for v in self.variables if v.kind == "x"]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.variables)

    @property
    def nonzeros(self) -> int:
        return sum(len(r.coeffs) for r in self.rows)

    def max_abs_coefficient(self) -> Fraction:
        return max((abs(c) for r in self.rows for _, c in r.coeffs), default=Fraction(0))

    def violated_rows(self, values: Mapping[str, Fraction]) -> list[str]:
        """Names of rows (and lower bounds) violated by a full assignment, exactly."""
        bad = [r.name for r in self.rows if not r.satisfied(values)]
        bad += [f"lower:{v.name}" for v in self.variables if v.lower is not None and values[v.name] < v.lower]
        return bad

    def is_satisfied(self, values: Mapping[str, Fraction]) -> bool:
        return not self.violated_rows(values)

    # ----------------------------------------------------------- combinators

    @classmethod
    def combine(
        cls,
        parts: Sequence["LinearSystem"],
        extra_variables: Sequence[Variable] = (),
        extra_rows: Sequence[Row] = (),
        provenance: str | None = None,
        tag: str = "",
        meta: dict | None = None,
    ) -> "LinearSystem":
        """Union of systems; variables shared by name are merged."""
        seen: dict[str, Variable] = {}
        for v in [*extra_variables, *(v for p in parts for v in p.variables)]:
            seen.setdefault(v.name, v)
        rows = [r for p in parts for r in p.rows] + list(extra_rows)
        prov = provenance or _weakest(p.provenance for p in parts)
        return cls(tuple(seen.values()), tuple(rows), prov, tag, dict(meta or {}))


def _weakest(provs: Iterable[str]) -> str:
    order = {"Z": 0, "Q": 1, "R": 2}
    return max(provs, key=order.__getitem__, default="Z")
