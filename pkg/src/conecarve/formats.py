"""File formats: schedule documents, LP, fixed MPS and lossless JSON systems.

JSON keeps every rational as a "p/q" string.  LP and MPS are written for
external solvers: integers and terminating decimals are exact, anything
else is printed with 17 significant digits and listed in a header comment.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import Context, Decimal
from fractions import Fraction
from typing import Any, Mapping

from .errors import PreconditionError
from .exactnum import PythagoreanTriple
from .linsys import LinearSystem, Row, Variable
from .triplesearch import AngleSchedule

FORMAT_VERSION = 1
_SIG17 = Context(prec=17)


def rat_str(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def terminating_decimal(q: Fraction) -> str | None:
    """Exact decimal expansion when the denominator is 2^a 5^b, else None."""
    d = q.denominator
    a = b = 0
    while d % 2 == 0:
        d //= 2
        a += 1
    while d % 5 == 0:
        d //= 5
        b += 1
    if d != 1:
        return None
    digits = max(a, b)
    scaled = q * 10**digits
    s = str(abs(scaled.numerator)).rjust(digits + 1, "0")
    out = s if digits == 0 else f"{s[:-digits]}.{s[-digits:]}".rstrip("0").rstrip(".")
    return ("-" if q < 0 else "") + out


# ------------------------------------------------------------- schedules


@dataclass(frozen=True)
class ScheduleDocument:
    construction: str
    triples: tuple[tuple[int, int, int], ...]
    delta: Fraction | None = None
    kappa: Fraction | None = None
    C: int | None = None
    half_angle_ok: bool = True
    sec_final: Fraction | None = None
    bound: Fraction | None = None
    format_version: int = FORMAT_VERSION

    @classmethod
    def from_schedule(cls, schedule: AngleSchedule) -> "ScheduleDocument":
        cert = schedule.certificate()
        return cls(
            schedule.construction,
            tuple(t.as_tuple() for t in schedule.triples),
            schedule.delta,
            schedule.kappa_used,
            schedule.C,
            cert.half_angle_ok,
            cert.sec_final,
            cert.bound,
        )

    def to_schedule(self) -> AngleSchedule:
        triples = []
        for t in self.triples:
            a, b, c = t
            if a * a + b * b != c * c:
                raise PreconditionError(f"{tuple(t)} is not a Pythagorean triple")
            triples.append(PythagoreanTriple(a, b, c))
        return AngleSchedule(tuple(triples), self.construction, self.delta, self.C, self.kappa)

    def to_json(self) -> dict:
        kappa = None
        if self.kappa is not None:
            kappa = terminating_decimal(self.kappa) or rat_str(self.kappa)
        return {
            "format_version": self.format_version,
            "construction": self.construction,
            "delta": None if self.delta is None else rat_str(self.delta),
            "kappa": kappa,
            "C": self.C,
            "triples": [list(t) for t in self.triples],
            "certificate": {
                "half_angle_ok": self.half_angle_ok,
                "sec_final": None if self.sec_final is None else rat_str(self.sec_final),
                "bound": None if self.bound is None else rat_str(self.bound),
            },
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "ScheduleDocument":
        version = data.get("format_version")
        if version != FORMAT_VERSION:
            raise PreconditionError(f"unsupported schedule format version {version!r}")
        cert = data.get("certificate") or {}

        def opt(v):
            return None if v is None else Fraction(v)

        return cls(
            construction=data["construction"],
            triples=tuple(tuple(int(v) for v in t) for t in data["triples"]),
            delta=opt(data.get("delta")),
            kappa=opt(data.get("kappa")),
            C=data.get("C"),
            half_angle_ok=bool(cert.get("half_angle_ok", True)),
            sec_final=opt(cert.get("sec_final")),
            bound=opt(cert.get("bound")),
            format_version=version,
        )

    def dumps(self) -> str:
        data = self.to_json()
        triples = data.pop("triples")
        text = json.dumps(data, indent=2)
        rows = ",\n".join(f"    {json.dumps(t)}" for t in triples)
        return text[:-2] + f',\n  "triples": [\n{rows}\n  ]\n}}\n'

    @classmethod
    def loads(cls, text: str) -> "ScheduleDocument":
        return cls.from_json(json.loads(text))


# ----------------------------------------------------------- system JSON


def _jsonable(v):
    if isinstance(v, Fraction):
        return rat_str(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def system_to_json(system: LinearSystem) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "provenance": system.provenance,
        "tag": system.tag,
        "variables": [
            {
                "name": v.name,
                "kind": v.kind,
                "lower": None if v.lower is None else rat_str(v.lower),
                "block": v.block,
                "stage": v.stage,
            }
            for v in system.variables
        ],
        "rows": [
            {
                "name": r.name,
                "sense": r.sense,
                "rhs": rat_str(r.rhs),
                "coeffs": [[n, rat_str(c)] for n, c in r.coeffs],
                "role": r.role,
                "block": r.block,
                "stage": r.stage,
            }
            for r in system.rows
        ],
        "meta": _jsonable(system.meta),
    }


def system_from_json(data: Mapping[str, Any]) -> LinearSystem:
    if data.get("format_version") != FORMAT_VERSION:
        raise PreconditionError(f"unsupported system format version {data.get('format_version')!r}")
    variables = [
        Variable(v["name"], v["kind"], None if v["lower"] is None else Fraction(v["lower"]), v["block"], v["stage"])
        for v in data["variables"]
    ]
    rows = [
        Row(
            tuple((n, Fraction(c)) for n, c in r["coeffs"]),
            r["sense"],
            Fraction(r["rhs"]),
            r["name"],
            r.get("role", ""),
            r.get("block"),
            r.get("stage"),
        )
        for r in data["rows"]
    ]
    return LinearSystem(variables, rows, data["provenance"], data.get("tag", ""), dict(data.get("meta") or {}))


def dumps_system(system: LinearSystem) -> str:
    return json.dumps(system_to_json(system), indent=1) + "\n"


def loads_system(text: str) -> LinearSystem:
    return system_from_json(json.loads(text))


# ------------------------------------------------------- number printing


class _Printer:
    """Formats coefficients by provenance and remembers inexact ones."""

    def __init__(self, provenance: str):
        self.provenance = provenance
        self.inexact: list[tuple[str, str, Fraction, str]] = []

    def __call__(self, q: Fraction, where: str, what: str) -> str:
        if q.denominator == 1:
            return str(q.numerator)
        if self.provenance == "Z":
            raise PreconditionError(f"non-integral value {q} in a Z system ({where})")
        exact = terminating_decimal(q)
        if exact is not None and (self.provenance == "Q" or len(exact.replace("-", "").replace(".", "").lstrip("0")) <= 17):
            return exact
        text = format(float(q), ".17g") if self.provenance == "R" else _sig17(q)
        if Fraction(text) != q:
            self.inexact.append((where, what, q, text))
        return text

    def header(self, comment: str) -> list[str]:
        if not self.inexact:
            return []
        lines = [f"{comment} {len(self.inexact)} coefficient(s) printed inexactly (17 significant digits):"]
        lines += [f"{comment}   {w} {v}: exact {rat_str(q)} printed {t}" for w, v, q, t in self.inexact]
        return lines


def _sig17(q: Fraction) -> str:
    d = _SIG17.divide(Decimal(q.numerator), Decimal(q.denominator))
    return format(d, "f") if -6 <= d.adjusted() < 17 else format(d, "E")


# -------------------------------------------------------------------- LP


def write_lp(system: LinearSystem, objective: Mapping[str, Fraction] | None = None, sense: str = "min") -> str:
    """CPLEX LP text; lifted variables keep their lower bounds, the rest are free."""
    pr = _Printer(system.provenance)
    body: list[str] = ["Minimize" if sense == "min" else "Maximize"]
    opr = _Printer("Q" if system.provenance == "Z" else system.provenance)
    body.append(_lp_expr("obj", [(n, Fraction(c)) for n, c in (objective or {}).items()], opr, "obj"))
    body.append("Subject To")
    for r in system.rows:
        op = {"<=": "<=", ">=": ">=", "=": "="}[r.sense]
        expr = _lp_expr(r.name, list(r.coeffs), pr, r.name)
        body.append(f"{expr} {op} {pr(r.rhs, r.name, 'rhs')}")
    body.append("Bounds")
    for v in system.variables:
        if v.lower is None:
            body.append(f" {v.name} free")
        elif v.lower != 0:
            body.append(f" {v.name} >= {pr(v.lower, 'bounds', v.name)}")
    body.append("End")
    head = [f"\\ {system.tag or 'system'}: provenance {system.provenance}, {len(system.rows)} rows, {len(system.variables)} columns"]
    head += pr.header("\\") + opr.header("\\")
    return "\n".join(head + body) + "\n"


def _lp_expr(name: str, terms, pr: _Printer, where: str) -> str:
    parts = [f" {name}:"]
    width = len(parts[0])
    lines = []
    for i, (var, c) in enumerate(terms):
        sign = "-" if c < 0 else "+"
        mag = pr(abs(c), where, var)
        tok = f"{'-' if c < 0 else ''}{mag} {var}" if i == 0 else f"{sign} {mag} {var}"
        if width + len(tok) > 240:
            lines.append(" ".join(parts))
            parts, width = ["  "], 2
        parts.append(tok)
        width += len(tok) + 1
    lines.append(" ".join(parts))
    return "\n".join(lines)


# ------------------------------------------------------------------- MPS


def write_mps(system: LinearSystem, objective: Mapping[str, Fraction] | None = None, name: str = "CONECARV") -> str:
    """Fixed-format MPS with 8-character aliases; one matrix entry per line.

    Original names are listed in '*' comment lines.  Value fields start at
    column 25 and may run past column 36 when 17 digits are needed.
    """
    pr = _Printer(system.provenance)
    rows = [(f"R{i:07d}", r) for i, r in enumerate(system.rows, start=1)]
    cols = {v.name: f"C{j:07d}" for j, v in enumerate(system.variables, start=1)}
    objective = {k: Fraction(v) for k, v in (objective or {}).items()}
    entries: dict[str, list[tuple[str, Fraction, str]]] = {v.name: [] for v in system.variables}
    for var, c in objective.items():
        entries[var].append(("OBJ", c, "obj"))
    opr = _Printer("Q" if system.provenance == "Z" else system.provenance)
    for alias, r in rows:
        for var, c in r.coeffs:
            entries[var].append((alias, c, r.name))

    def field(a: str, b: str, val: str) -> str:
        return f"    {a:<8}  {b:<8}  {val}"

    out = [f"NAME          {name[:8]}", "ROWS", " N  OBJ"]
    out += [f" {'L' if r.sense == '<=' else 'G' if r.sense == '>=' else 'E'}  {a}" for a, r in rows]
    out.append("COLUMNS")
    for v in system.variables:
        for alias, c, where in entries[v.name]:
            out.append(field(cols[v.name], alias, (opr if alias == "OBJ" else pr)(c, where, v.name)))
    out.append("RHS")
    for alias, r in rows:
        if r.rhs != 0:
            out.append(field("RHS", alias, pr(r.rhs, r.name, "rhs")))
    out.append("BOUNDS")
    for v in system.variables:
        if v.lower is None:
            out.append(f" FR BND       {cols[v.name]}")
        elif v.lower != 0:
            out.append(f" LO BND       {cols[v.name]}  {pr(v.lower, 'bounds', v.name)}")
    out.append("ENDATA")
    head = [f"* {system.tag or 'system'}: provenance {system.provenance}"]
    head += pr.header("*") + opr.header("*")
    head += [f"* row {a} = {r.name}" for a, r in rows]
    head += [f"* col {cols[v.name]} = {v.name}" for v in system.variables]
    return "\n".join(head + out) + "\n"
