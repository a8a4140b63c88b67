"""Linear programs with named rows, and their LP text format.

Every variable is implicitly bounded below by zero. The objective is always
maximized. Rows carry a name that records where they come from
(``pnode_c2_u1``, ``flow_1_0``, ...), and those names are preserved through
the text format.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

SENSES = ("<=", ">=", "=")


class LPFormatError(ValueError):
    pass


@dataclass
class Constraint:
    name: str
    coeffs: dict[str, float]
    sense: str
    rhs: float

    def __post_init__(self):
        if self.sense not in SENSES:
            raise ValueError(f"bad sense {self.sense!r}")

    def activity(self, values) -> float:
        return sum(a * values.get(v, 0.0) for v, a in self.coeffs.items())

    def violation(self, values) -> float:
        lhs = self.activity(values)
        if self.sense == "<=":
            return max(0.0, lhs - self.rhs)
        if self.sense == ">=":
            return max(0.0, self.rhs - lhs)
        return abs(lhs - self.rhs)


@dataclass
class LinearProgram:
    variables: list[str] = field(default_factory=list)
    constraints: list[Constraint] = field(default_factory=list)
    objective: dict[str, float] = field(default_factory=dict)
    name: str = "capacity"

    def __post_init__(self):
        self._known = set(self.variables)

    def add_variable(self, name: str) -> str:
        if name not in self._known:
            self._known.add(name)
            self.variables.append(name)
        return name

    def add(self, name: str, coeffs: dict[str, float], sense: str, rhs: float) -> Constraint:
        for v in coeffs:
            if v not in self._known:
                raise KeyError(f"constraint {name} uses undeclared variable {v}")
        c = Constraint(name, dict(coeffs), sense, float(rhs))
        self.constraints.append(c)
        return c

    def constraint(self, name: str) -> Constraint:
        for c in self.constraints:
            if c.name == name:
                return c
        raise KeyError(name)

    def scaled_objective(self, k: float) -> "LinearProgram":
        return LinearProgram(list(self.variables), list(self.constraints),
                             {v: k * a for v, a in self.objective.items()}, self.name)

    def objective_value(self, values) -> float:
        return sum(a * values.get(v, 0.0) for v, a in self.objective.items())

    def matrices(self):
        """``(c, A_ub, b_ub, A_eq, b_eq)`` with ``>=`` rows negated into ``<=`` form.

        Matrices are CSR; columns follow ``self.variables``.
        """
        col = {v: j for j, v in enumerate(self.variables)}
        c = np.zeros(len(self.variables))
        for v, a in self.objective.items():
            c[col[v]] = a
        ub: tuple[list, list, list, list] = ([], [], [], [])
        eq: tuple[list, list, list, list] = ([], [], [], [])
        for con in self.constraints:
            rows, cols, vals, rhs = eq if con.sense == "=" else ub
            sign = -1.0 if con.sense == ">=" else 1.0
            i = len(rhs)
            for v, a in con.coeffs.items():
                rows.append(i)
                cols.append(col[v])
                vals.append(sign * a)
            rhs.append(sign * con.rhs)
        n = len(self.variables)

        def build(parts):
            rows, cols, vals, rhs = parts
            a = sp.csr_matrix((vals, (rows, cols)), shape=(len(rhs), n))
            a.sum_duplicates()
            return a, np.array(rhs, dtype=float)

        a_ub, b_ub = build(ub)
        a_eq, b_eq = build(eq)
        return c, a_ub, b_ub, a_eq, b_eq


# -- text format ---------------------------------------------------------------

_WRAP = 200


def _num(x: float) -> str:
    if x == 0:
        return "0"
    return repr(float(x))


def _expr(coeffs: dict[str, float]) -> list[str]:
    parts = []
    for v, a in coeffs.items():
        sign = "-" if a < 0 else "+"
        parts.append(f"{sign} {_num(abs(a))} {v}")
    return parts


def _wrap(head: str, parts: list[str], tail: str = "") -> list[str]:
    lines = []
    cur = head
    for p in parts:
        if len(cur) + len(p) + 1 > _WRAP and cur.strip():
            lines.append(cur)
            cur = "   "
        cur += " " + p
    cur += tail
    lines.append(cur)
    return lines


def dumps(lp: LinearProgram) -> str:
    """Render ``lp`` in the CPLEX LP text format."""
    out = [f"\\ {lp.name}", "Maximize"]
    obj = _expr(lp.objective)
    out += _wrap(" obj:", obj)
    out.append("Subject To")
    for c in lp.constraints:
        terms = _expr(c.coeffs) or [f"0 {lp.variables[0]}"]
        out += _wrap(f" {c.name}:", terms, f" {c.sense} {_num(c.rhs)}")
    out.append("Bounds")
    out += [f" {v} >= 0" for v in lp.variables]
    out.append("End")
    return "\n".join(out) + "\n"


def write_lp(lp: LinearProgram, path: str | Path) -> None:
    Path(path).write_text(dumps(lp))


_NUMBER = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_TOKEN = re.compile(r"<=|>=|=<|=>|=|[+-]|:|" + _NUMBER + r"|[^\s:<>=+-]+")
_is_number = re.compile(_NUMBER + "$").match
_HEADERS = {
    "maximize": "max", "maximum": "max", "max": "max",
    "subject to": "st", "such that": "st", "st": "st", "s.t.": "st",
    "bounds": "bounds", "bound": "bounds", "end": "end",
}


def _parse_terms(toks: list[str], i: int, stop: set[str]) -> tuple[dict[str, float], int]:
    coeffs: dict[str, float] = {}
    sign = 1.0
    coef = None
    while i < len(toks) and toks[i] not in stop:
        tok = toks[i]
        if tok in "+-":
            sign = -1.0 if tok == "-" else 1.0
        elif _is_number(tok):
            coef = float(tok)
        else:
            a = sign * (1.0 if coef is None else coef)
            coeffs[tok] = coeffs.get(tok, 0.0) + a
            sign, coef = 1.0, None
        i += 1
    return coeffs, i


def loads(text: str) -> LinearProgram:
    """Parse the subset of the LP format produced by :func:`dumps`."""
    sections: dict[str, list[str]] = {"max": [], "st": [], "bounds": []}
    current = None
    for raw in text.splitlines():
        line = raw.split("\\", 1)[0].strip()
        if not line:
            continue
        low = " ".join(line.lower().split())
        if low in _HEADERS:
            current = _HEADERS[low]
            if current == "end":
                break
            continue
        if low in ("minimize", "minimum", "min"):
            raise LPFormatError("only maximization problems are supported")
        if current is None:
            raise LPFormatError(f"text before any section: {line!r}")
        sections[current].append(line)

    lp = LinearProgram()
    toks = _TOKEN.findall(" ".join(sections["max"]))
    if len(toks) >= 2 and toks[1] == ":":
        toks = toks[2:]
    objective, _ = _parse_terms(toks, 0, set())
    toks = _TOKEN.findall(" ".join(sections["st"]))
    rows = []
    i = 0
    while i < len(toks):
        if i + 1 >= len(toks) or toks[i + 1] != ":":
            raise LPFormatError(f"expected a row name near {' '.join(toks[i:i + 5])!r}")
        name = toks[i]
        coeffs, i = _parse_terms(toks, i + 2, {"<=", ">=", "=<", "=>", "="})
        if i >= len(toks):
            raise LPFormatError(f"row {name} has no sense")
        sense = {"=<": "<=", "=>": ">="}.get(toks[i], toks[i])
        i += 1
        sign = 1.0
        if toks[i] in "+-":
            sign = -1.0 if toks[i] == "-" else 1.0
            i += 1
        rhs = sign * float(toks[i])
        i += 1
        rows.append((name, coeffs, sense, rhs))
    for line in sections["bounds"]:
        tok = line.split()
        if len(tok) == 3 and tok[1] == ">=" and float(tok[2]) == 0:
            lp.add_variable(tok[0])
        else:
            raise LPFormatError(f"unsupported bound {line!r}")
    for v in list(objective) + [v for r in rows for v in r[1]]:
        lp.add_variable(v)
    lp.objective = {v: a for v, a in objective.items() if a != 0}
    for name, coeffs, sense, rhs in rows:
        lp.add(name, {v: a for v, a in coeffs.items() if a != 0}, sense, rhs)
    return lp


def read_lp(path: str | Path) -> LinearProgram:
    return loads(Path(path).read_text())
