"""Self-contained exact simplex over rationals.

Solves  min d.v  s.t.  A.v <= b,  E.v = c,  v >= 0  with a dense two-phase
tableau and Bland's entering/leaving rule, so cycling is impossible and
every reported number is exact.  Arithmetic uses gmpy2 rationals when the
package is importable and fractions.Fraction otherwise; inputs and outputs
are always Fractions.

Artificial columns are kept (banned from entering) through phase 2: they
hold the running basis inverse, which yields the dual vector at optimality
for free.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import SolverError

try:
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover - exercised only without gmpy2
    _Q = Fraction

__all__ = ["SimplexResult", "simplex_solve"]

MAX_PIVOTS = 200_000


@dataclass(frozen=True)
class SimplexResult:
    """status is one of optimal / infeasible / unbounded.

    values, dual_ineq, dual_eq, and objective are meaningful only at
    status=optimal.  dual conventions: y >= 0, objective = -y.b - z.c,
    feasibility -A'y - E'z <= d.  basis lists the basic variable of each
    tableau row (slack and artificial indices included).
    """

    status: str
    objective: Fraction
    values: tuple[Fraction, ...]
    dual_ineq: tuple[Fraction, ...]
    dual_eq: tuple[Fraction, ...]
    basis: tuple[int, ...]
    pivots: int


def _to_q(value: Fraction):
    return _Q(value.numerator, value.denominator)


def _to_fraction(value) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))


class _Tableau:
    def __init__(self, nvars: int, rows: list[list], rhs: list, art_start: int):
        self.rows = rows
        self.rhs = rhs
        self.nvars = nvars
        self.art_start = art_start
        self.ncols = len(rows[0]) if rows else 0
        self.basis = list(range(art_start, art_start + len(rows)))
        self.cost = [_Q(0)] * self.ncols
        self.cost_rhs = _Q(0)
        self.pivots = 0

    def set_cost(self, coeffs: list) -> None:
        self.cost = list(coeffs) + [_Q(0)] * (self.ncols - len(coeffs))
        self.cost_rhs = _Q(0)
        for i, b in enumerate(self.basis):
            cb = self.cost[b]
            if cb != 0:
                row = self.rows[i]
                for j in range(self.ncols):
                    if row[j] != 0:
                        self.cost[j] -= cb * row[j]
                self.cost_rhs -= cb * self.rhs[i]

    def pivot(self, r: int, j: int) -> None:
        self.pivots += 1
        if self.pivots > MAX_PIVOTS:
            raise SolverError(f"pivot budget {MAX_PIVOTS} exhausted")
        row = self.rows[r]
        inv = 1 / row[j]
        if inv != 1:
            for k in range(self.ncols):
                if row[k] != 0:
                    row[k] *= inv
            self.rhs[r] *= inv
        for i, other in enumerate(self.rows):
            if i == r or other[j] == 0:
                continue
            factor = other[j]
            for k in range(self.ncols):
                if row[k] != 0:
                    other[k] -= factor * row[k]
            self.rhs[i] -= factor * self.rhs[r]
        factor = self.cost[j]
        if factor != 0:
            for k in range(self.ncols):
                if row[k] != 0:
                    self.cost[k] -= factor * row[k]
            self.cost_rhs -= factor * self.rhs[r]
        self.basis[r] = j

    def run(self, allow_artificial: bool) -> str:
        """Bland's rule: smallest negative-reduced-cost column enters; the
        eligible row whose basic variable has the smallest index leaves."""
        limit = self.ncols if allow_artificial else self.art_start
        while True:
            enter = -1
            for j in range(limit):
                if self.cost[j] < 0:
                    enter = j
                    break
            if enter < 0:
                return "optimal"
            leave = -1
            best = None
            for i, row in enumerate(self.rows):
                coeff = row[enter]
                if coeff > 0:
                    ratio = self.rhs[i] / coeff
                    if best is None or ratio < best or (
                        ratio == best and self.basis[i] < self.basis[leave]
                    ):
                        best = ratio
                        leave = i
            if leave < 0:
                return "unbounded"
            self.pivot(leave, enter)


def simplex_solve(
    objective: Sequence[Fraction],
    ineq_rows: Sequence[Sequence[Fraction]],
    ineq_rhs: Sequence[Fraction],
    eq_rows: Sequence[Sequence[Fraction]],
    eq_rhs: Sequence[Fraction],
) -> SimplexResult:
    nv = len(objective)
    n_ineq, n_eq = len(ineq_rows), len(eq_rows)
    n_rows = n_ineq + n_eq
    if n_rows == 0:
        raise SolverError("no constraints")
    n_slack = n_ineq
    art_start = nv + n_slack
    ncols = art_start + n_rows

    rows: list[list] = []
    rhs: list = []
    signs: list[int] = []
    for i in range(n_rows):
        src = ineq_rows[i] if i < n_ineq else eq_rows[i - n_ineq]
        if len(src) != nv:
            raise SolverError(f"row {i} has {len(src)} coefficients, expected {nv}")
        row = [_to_q(v) for v in src] + [_Q(0)] * (n_slack + n_rows)
        b = _to_q(ineq_rhs[i] if i < n_ineq else eq_rhs[i - n_ineq])
        if i < n_ineq:
            row[nv + i] = _Q(1)
        sign = 1
        if b < 0:
            sign = -1
            b = -b
            for k in range(nv + n_slack):
                row[k] = -row[k]
        row[art_start + i] = _Q(1)
        rows.append(row)
        rhs.append(b)
        signs.append(sign)

    tableau = _Tableau(nv, rows, rhs, art_start)
    phase1 = [_Q(0)] * art_start + [_Q(1)] * n_rows
    tableau.set_cost(phase1)
    status = tableau.run(allow_artificial=False)
    if status != "optimal":
        raise SolverError("phase 1 reported unbounded, which is impossible")
    if -tableau.cost_rhs > 0:
        return SimplexResult(
            "infeasible", Fraction(0), (), (), (), tuple(tableau.basis), tableau.pivots
        )
    for i in range(n_rows):
        if tableau.basis[i] >= art_start:
            for j in range(art_start):
                if tableau.rows[i][j] != 0:
                    tableau.pivot(i, j)
                    break

    tableau.set_cost([_to_q(v) for v in objective])
    status = tableau.run(allow_artificial=False)
    if status == "unbounded":
        return SimplexResult(
            "unbounded", Fraction(0), (), (), (), tuple(tableau.basis), tableau.pivots
        )

    values = [Fraction(0)] * nv
    for i, b in enumerate(tableau.basis):
        if b < nv:
            values[b] = _to_fraction(tableau.rhs[i])
    duals = [
        signs[i] * _to_fraction(tableau.cost[art_start + i]) for i in range(n_rows)
    ]
    return SimplexResult(
        "optimal",
        _to_fraction(-tableau.cost_rhs),
        tuple(values),
        tuple(duals[:n_ineq]),
        tuple(duals[n_ineq:]),
        tuple(tableau.basis),
        tableau.pivots,
    )
