"""Deterministic linear programming with verified certificates.

A dense two-phase tableau simplex under Bland's smallest-index rule, run
either over exact Fractions (reference mode, zero tolerance) or over floats
with explicit tolerances.  Every outcome carries a certificate that is
checked before returning:

* optimal: primal and dual solutions with complementary slackness and a
  zero (or tol-bounded) duality gap,
* infeasible: a Farkas vector over the rows whose aggregate constraint no
  point within the variable bounds can satisfy,
* unbounded: a feasible improving ray.

Also hosts the linear-fractional solve (ratio of two linear functionals over
a polyhedral cone) via the normalization substitution that turns it into a
plain LP.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import DegenerateDenominator, NumericBreakdown
from .numbers import Num

LE, EQ, GE = "<=", "==", ">="

OPTIMAL, INFEASIBLE, UNBOUNDED = "optimal", "infeasible", "unbounded"

_MAX_PIVOTS = 20000


@dataclass(frozen=True)
class LinearProgram:
    """min/max objective.x subject to rows and per-variable bounds.

    Bounds are (lower, upper) with None for unbounded; two-sided finite
    bounds are not supported (state the second side as a row instead).
    """

    sense: str
    objective: tuple[Num, ...]
    rows: tuple[tuple[tuple[Num, ...], str, Num], ...]
    bounds: tuple[tuple[Num | None, Num | None], ...]

    def __post_init__(self):
        n = len(self.objective)
        if self.sense not in ("min", "max"):
            raise ValueError(f"sense must be min or max, got {self.sense!r}")
        for coeffs, rel, _ in self.rows:
            if len(coeffs) != n:
                raise ValueError("row dimension mismatch")
            if rel not in (LE, EQ, GE):
                raise ValueError(f"unknown relation {rel!r}")
        if len(self.bounds) != n:
            raise ValueError("bounds dimension mismatch")
        for lo, hi in self.bounds:
            if lo is not None and hi is not None:
                raise ValueError("two-sided bounds unsupported; add a row")


def lp(sense, objective, rows, bounds=None) -> LinearProgram:
    objective = tuple(objective)
    if bounds is None:
        bounds = tuple((0, None) for _ in objective)
    return LinearProgram(
        sense=sense,
        objective=objective,
        rows=tuple((tuple(c), rel, rhs) for c, rel, rhs in rows),
        bounds=tuple(bounds),
    )


@dataclass(frozen=True)
class LpOutcome:
    status: str
    x: tuple[Num, ...] | None = None
    value: Num | None = None
    row_duals: tuple[Num, ...] | None = None
    farkas: tuple[Num, ...] | None = None
    ray: tuple[Num, ...] | None = None


class _Standardizer:
    """Maps a LinearProgram onto min c.u, A u = b, u >= 0 and back."""

    def __init__(self, prog: LinearProgram, exact: bool):
        self.prog = prog
        self.exact = exact
        zero = Fraction(0) if exact else 0.0
        one = Fraction(1) if exact else 1.0
        self.zero, self.one = zero, one
        cast = (lambda v: Fraction(v)) if exact else float

        n = len(prog.objective)
        # user var j -> [(std col, sign)] plus a constant shift:
        #   x_j = shift_j + sum(sign * u_col)
        self.var_cols: list[list[tuple[int, int]]] = []
        self.shift: list[Num] = []
        ncols = 0
        for lo, hi in prog.bounds:
            if lo is not None:
                self.var_cols.append([(ncols, 1)])
                self.shift.append(cast(lo))
                ncols += 1
            elif hi is not None:
                self.var_cols.append([(ncols, -1)])
                self.shift.append(cast(hi))
                ncols += 1
            else:
                self.var_cols.append([(ncols, 1), (ncols + 1, -1)])
                self.shift.append(zero)
                ncols += 2

        sign = -1 if prog.sense == "max" else 1
        c = [zero] * ncols
        for j in range(n):
            cj = cast(prog.objective[j]) * sign
            for col, s in self.var_cols[j]:
                c[col] = c[col] + cj * s

        rows_a: list[list[Num]] = []
        rhs: list[Num] = []
        rels: list[str] = []
        for coeffs, rel, b in prog.rows:
            row = [zero] * ncols
            shift_total = zero
            for j, a in enumerate(coeffs):
                aj = cast(a)
                if aj == 0:
                    continue
                shift_total += aj * self.shift[j]
                for col, s in self.var_cols[j]:
                    row[col] = row[col] + aj * s
            rows_a.append(row)
            rhs.append(cast(b) - shift_total)
            rels.append(rel)

        # slack columns, then sign-normalize rhs >= 0
        self.slack_col: list[int | None] = []
        for i, rel in enumerate(rels):
            if rel == EQ:
                self.slack_col.append(None)
                continue
            col = ncols
            ncols += 1
            for row in rows_a:
                row.append(zero)
            rows_a[i][col] = one if rel == LE else -one
            self.slack_col.append(col)

        self.flip: list[int] = []
        for i in range(len(rows_a)):
            if rhs[i] < 0:
                rows_a[i] = [-v for v in rows_a[i]]
                rhs[i] = -rhs[i]
                self.flip.append(-1)
            else:
                self.flip.append(1)

        self.A = rows_a
        self.b = rhs
        self.c = c + [zero] * (ncols - len(c))
        self.ncols = ncols
        self.nrows = len(rows_a)
        self.sense_sign = sign

    def to_user_x(self, u: Sequence[Num]) -> tuple[Num, ...]:
        out = []
        for j in range(len(self.prog.objective)):
            v = self.shift[j]
            for col, s in self.var_cols[j]:
                v = v + s * u[col]
            out.append(v)
        return tuple(out)

    def to_user_dir(self, u: Sequence[Num]) -> tuple[Num, ...]:
        out = []
        for j in range(len(self.prog.objective)):
            v = self.zero
            for col, s in self.var_cols[j]:
                v = v + s * u[col]
            out.append(v)
        return tuple(out)


class _Tableau:
    def __init__(self, std: _Standardizer, tol):
        self.std = std
        self.tol = tol
        self.rows = [list(r) for r in std.A]
        self.b = list(std.b)
        self.basis: list[int] = []
        self.row_alive = [True] * std.nrows
        self.n_real = std.ncols
        self.n_art = 0
        self.pivots = 0

    def _pivot(self, cost: list[Num], cost_const: list[Num], pr: int, pc: int) -> None:
        self.pivots += 1
        if self.pivots > _MAX_PIVOTS:
            raise NumericBreakdown("pivot limit exceeded")
        piv = self.rows[pr][pc]
        inv = 1 / piv
        self.rows[pr] = [v * inv for v in self.rows[pr]]
        self.b[pr] = self.b[pr] * inv
        prow = self.rows[pr]
        for i in range(len(self.rows)):
            if i == pr or not self.row_alive[i]:
                continue
            f = self.rows[i][pc]
            if f != 0:
                self.rows[i] = [a - f * p for a, p in zip(self.rows[i], prow)]
                self.b[i] = self.b[i] - f * self.b[pr]
        f = cost[pc]
        if f != 0:
            for j in range(len(cost)):
                cost[j] = cost[j] - f * prow[j]
            cost_const[0] = cost_const[0] - f * self.b[pr]
        self.basis[pr] = pc

    def _bland_step(self, cost: list[Num], cost_const: list[Num], allowed: int) -> int | str:
        """One Bland pivot on columns [0, allowed): returns 'optimal',
        'pivoted', or the entering column index when unbounded."""
        tol = self.tol
        enter = -1
        for j in range(allowed):
            if cost[j] < -tol:
                enter = j
                break
        if enter < 0:
            return "optimal"
        leave, best, best_var = -1, None, None
        for i in range(len(self.rows)):
            if not self.row_alive[i]:
                continue
            a = self.rows[i][enter]
            if a > tol:
                ratio = self.b[i] / a
                if (
                    best is None
                    or ratio < best
                    or (ratio == best and self.basis[i] < best_var)
                ):
                    leave, best, best_var = i, ratio, self.basis[i]
        if leave < 0:
            return enter
        self._pivot(cost, cost_const, leave, enter)
        return "pivoted"

    def phase1(self) -> Num:
        """Install a basic feasible solution; returns the artificial residue."""
        std = self.std
        zero = std.zero
        need_art = []
        self.basis = [-1] * std.nrows
        for i in range(std.nrows):
            col = std.slack_col[i]
            if col is not None and self.rows[i][col] == 1:
                self.basis[i] = col
            else:
                need_art.append(i)
        self.n_art = len(need_art)
        if not self.n_art:
            return zero
        width = self.n_real + self.n_art
        for row in self.rows:
            row.extend([zero] * self.n_art)
        for k, i in enumerate(need_art):
            self.rows[i][self.n_real + k] = std.one
            self.basis[i] = self.n_real + k
        cost = [zero] * width
        const = [zero]
        for k in range(self.n_art):
            cost[self.n_real + k] = std.one
        for i in need_art:  # price out the artificial basis
            for j in range(width):
                cost[j] = cost[j] - self.rows[i][j]
            const[0] = const[0] - self.b[i]
        while True:
            step = self._bland_step(cost, const, self.n_real)
            if step == "optimal":
                return -const[0]
            if step != "pivoted":
                raise NumericBreakdown("phase-1 objective unbounded")

    def drive_out_artificials(self) -> None:
        zero = self.std.zero
        for i in range(len(self.rows)):
            if not self.row_alive[i] or self.basis[i] < self.n_real:
                continue
            pivot_col = -1
            for j in range(self.n_real):
                if abs(self.rows[i][j]) > self.tol:
                    pivot_col = j
                    break
            if pivot_col >= 0:
                dummy = [zero] * len(self.rows[i])
                self._pivot(dummy, [zero], i, pivot_col)
            else:
                self.row_alive[i] = False  # redundant row

    def phase2(self) -> int | None:
        """Optimize the real objective; returns an entering column index if
        unbounded, else None."""
        std = self.std
        zero = std.zero
        width = len(self.rows[0]) if self.rows else self.n_real
        cost = list(std.c) + [zero] * (width - self.n_real)
        const = [zero]
        for i in range(len(self.rows)):  # price out the current basis
            if not self.row_alive[i]:
                continue
            f = cost[self.basis[i]]
            if f != 0:
                prow = self.rows[i]
                for j in range(width):
                    cost[j] = cost[j] - f * prow[j]
                const[0] = const[0] - f * self.b[i]
        while True:
            step = self._bland_step(cost, const, self.n_real)
            if step == "optimal":
                return None
            if step != "pivoted":
                return step


def _solve_square(matrix: list[list[Num]], rhs: list[Num], tol) -> list[Num] | None:
    """Gauss-Jordan with partial pivoting; None if singular."""
    n = len(matrix)
    a = [list(row) + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(a[r][col]))
        if abs(a[piv][col]) <= tol:
            return None
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [v * inv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    return [a[i][n] for i in range(n)]


def _dot(a, b):
    total = 0
    for ai, bi in zip(a, b):
        total += ai * bi
    return total


def solve_lp(prog: LinearProgram, exact: bool = True, tol: float = 1e-9) -> LpOutcome:
    """Solve with fixed deterministic pivoting; certificates verified before
    return.  Float mode raises NumericBreakdown when verification fails."""
    std = _Standardizer(prog, exact)
    zero = std.zero
    eff_tol = zero if exact else tol
    tab = _Tableau(std, eff_tol)
    residue = tab.phase1()
    feas_tol = zero if exact else tol * (1 + max((abs(v) for v in std.b), default=0))
    if residue > feas_tol:
        y = _dual_from_basis(std, tab, phase1=True)
        if y is None:
            raise NumericBreakdown("cannot recover Farkas certificate")
        farkas = tuple(std.flip[i] * y[i] for i in range(std.nrows))
        _verify_farkas(prog, farkas, exact, tol)
        return LpOutcome(status=INFEASIBLE, farkas=farkas)
    if tab.n_art:
        tab.drive_out_artificials()
    unbounded_col = tab.phase2()
    if unbounded_col is not None:
        ray_u = [zero] * std.ncols
        ray_u[unbounded_col] = std.one
        for i in range(len(tab.rows)):
            if tab.row_alive[i] and tab.basis[i] < std.ncols:
                ray_u[tab.basis[i]] = -tab.rows[i][unbounded_col]
        ray = std.to_user_dir(ray_u)
        _verify_ray(prog, ray, exact, tol)
        return LpOutcome(status=UNBOUNDED, ray=ray)

    u = [zero] * std.ncols
    for i in range(len(tab.rows)):
        if tab.row_alive[i] and tab.basis[i] < std.ncols:
            u[tab.basis[i]] = tab.b[i]
    x = std.to_user_x(u)
    value = _dot(prog.objective, x)
    y = _dual_from_basis(std, tab, phase1=False)
    if y is None:
        raise NumericBreakdown("cannot recover dual solution")
    _verify_optimal(std, u, y, exact, tol)
    duals = tuple(std.sense_sign * std.flip[i] * y[i] for i in range(std.nrows))
    return LpOutcome(status=OPTIMAL, x=x, value=value, row_duals=duals)


def _dual_from_basis(std: _Standardizer, tab: _Tableau, phase1: bool):
    """Solve B^T y = c_B over the live rows against the original matrix."""
    live = [i for i in range(std.nrows) if tab.row_alive[i]]
    n = len(live)
    bt_rows: list[list[Num]] = []  # one row per basic column: A[live, col]^T
    c_b: list[Num] = []
    for pos, i in enumerate(live):
        col_idx = tab.basis[i]
        if col_idx < std.ncols:
            bt_rows.append([std.A[r][col_idx] for r in live])
            c_b.append(std.zero if phase1 else std.c[col_idx])
        else:
            unit = [std.zero] * n
            unit[pos] = std.one
            bt_rows.append(unit)
            c_b.append(std.one if phase1 else std.zero)
    y_live = _solve_square(bt_rows, c_b, tab.tol)
    if y_live is None:
        return None
    y = [std.zero] * std.nrows
    for pos, i in enumerate(live):
        y[i] = y_live[pos]
    return y


def _verify_optimal(std: _Standardizer, u, y, exact, tol) -> None:
    scale = 1 + max((abs(v) for v in std.b), default=0)
    t = 0 if exact else tol * scale
    for i in range(std.nrows):
        lhs = _dot(std.A[i], u)
        if abs(lhs - std.b[i]) > t:
            raise NumericBreakdown(f"primal residual {lhs - std.b[i]} on row {i}")
    cols = range(std.ncols)
    for j in cols:
        if u[j] < -t:
            raise NumericBreakdown(f"negative basic value u[{j}]={u[j]}")
        reduced = std.c[j] - _dot([std.A[i][j] for i in range(std.nrows)], y)
        if reduced < -(0 if exact else tol * (1 + abs(std.c[j]))):
            raise NumericBreakdown(f"dual infeasible: reduced cost {reduced} at col {j}")
        if exact and u[j] > 0 and reduced != 0:
            raise NumericBreakdown("complementary slackness violated")


def _verify_farkas(prog: LinearProgram, farkas, exact, tol) -> None:
    t = 0 if exact else tol
    n = len(prog.objective)
    w = [0] * n
    delta = 0
    for (coeffs, rel, rhs), yi in zip(prog.rows, farkas):
        if rel == GE and yi < -t:
            raise NumericBreakdown("Farkas sign violated on >= row")
        if rel == LE and yi > t:
            raise NumericBreakdown("Farkas sign violated on <= row")
        for j in range(n):
            w[j] = w[j] + yi * coeffs[j]
        delta += yi * rhs
    # sup of w.x over the bounds must fall strictly below delta
    sup = 0
    for j in range(n):
        lo, hi = prog.bounds[j]
        wj = w[j]
        if abs(wj) <= t:
            continue
        if wj > 0:
            if hi is None:
                raise NumericBreakdown("Farkas aggregate unbounded above")
            sup += wj * hi
        else:
            if lo is None:
                raise NumericBreakdown("Farkas aggregate unbounded above")
            sup += wj * lo
    if not sup < delta - t:
        raise NumericBreakdown(f"Farkas aggregate sup {sup} !< rhs {delta}")


def _verify_ray(prog: LinearProgram, ray, exact, tol) -> None:
    t = 0 if exact else tol
    improving = _dot(prog.objective, ray)
    ok = improving < -t if prog.sense == "min" else improving > t
    if not ok:
        raise NumericBreakdown(f"ray does not improve objective ({improving})")
    for coeffs, rel, _ in prog.rows:
        d = _dot(coeffs, ray)
        if rel == LE and d > t:
            raise NumericBreakdown("ray escapes a <= row")
        if rel == GE and d < -t:
            raise NumericBreakdown("ray escapes a >= row")
        if rel == EQ and abs(d) > t:
            raise NumericBreakdown("ray escapes an == row")
    for (lo, hi), dj in zip(prog.bounds, ray):
        if lo is not None and dj < -t:
            raise NumericBreakdown("ray escapes a lower bound")
        if hi is not None and dj > t:
            raise NumericBreakdown("ray escapes an upper bound")


# --- linear-fractional programs ---------------------------------------------


@dataclass(frozen=True)
class FractionalOutcome:
    status: str
    value: Num | None = None
    witness: tuple[Num, ...] | None = None


def solve_fractional(
    numerator: Sequence[Num],
    denominator: Sequence[Num],
    cone_rows: Sequence[tuple[Sequence[Num], str, Num]],
    sense: str = "max",
    exact: bool = True,
    tol: float = 1e-9,
) -> FractionalOutcome:
    """Optimize num(X)/den(X) over {X >= 0, homogeneous cone rows}.

    Uses the normalization substitution den(Y) = 1: the ratio is constant
    along rays of the cone, so optimizing num over the normalized slice
    solves the fractional program; the witness returned is the normalized Y.
    Requires the denominator to be positive somewhere on the cone (checked
    by an auxiliary LP); raises DegenerateDenominator otherwise.
    """
    n = len(numerator)
    for coeffs, _, rhs in cone_rows:
        if rhs != 0:
            raise ValueError("cone rows must be homogeneous (rhs 0)")
        if len(coeffs) != n:
            raise ValueError("cone row dimension mismatch")
    aux = lp("max", denominator, list(cone_rows) + [(denominator, LE, 1)])
    aux_out = solve_lp(aux, exact, tol)
    if aux_out.status != OPTIMAL or not aux_out.value > (0 if exact else tol):
        raise DegenerateDenominator("denominator vanishes on the whole cone")
    main = lp(sense, numerator, list(cone_rows) + [(denominator, EQ, 1)])
    out = solve_lp(main, exact, tol)
    if out.status == UNBOUNDED:
        return FractionalOutcome(status=UNBOUNDED)
    if out.status != OPTIMAL:
        raise DegenerateDenominator("normalized slice is empty")
    return FractionalOutcome(status=OPTIMAL, value=out.value, witness=out.x)
