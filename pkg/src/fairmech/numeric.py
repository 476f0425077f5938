"""Exact linear programming over the rationals.

Systems have the form ``A x = b`` with per-variable bounds ``l <= x <= u``
(either side may be absent).  The solver is a revised simplex method with
Bland's anti-cycling rule, run entirely in :class:`fractions.Fraction`, so
every vertex, tight set and infeasibility certificate is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .exceptions import BlockedEdgeError, InvariantViolation, MalformedInputError, UnboundedError

__all__ = [
    "Rational",
    "as_rational",
    "format_rational",
    "LinearSystem",
    "FarkasCertificate",
    "LpOutcome",
    "solve_vertex",
    "move_to_adjacent_vertex",
    "rank",
]

Rational = Fraction

FEASIBLE = "feasible-vertex"
INFEASIBLE = "infeasible"
OPTIMAL = "optimal"


def as_rational(value) -> Fraction:
    """Convert ``value`` to a Fraction without going through binary floats.

    Floats are read through their shortest decimal repr, so ``0.1`` becomes
    ``1/10``.  Strings may be ``"a/b"``, integers or decimals.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise MalformedInputError(f"not a number: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            raise MalformedInputError(f"not a finite number: {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise MalformedInputError(f"cannot parse rational {value!r}") from exc
    try:
        # numpy scalars and similar
        if hasattr(value, "item"):
            return as_rational(value.item())
    except MalformedInputError:
        raise
    raise MalformedInputError(f"cannot interpret {value!r} as a rational")


def format_rational(value: Fraction) -> str:
    """Canonical ``"a/b"`` text form; zero is ``"0/1"``."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def _independent_rows(rows: Iterable[Sequence[Fraction]], width: int):
    """Yield ``(index, independent)`` for each row, reducing incrementally."""
    pivots: list[tuple[int, list[Fraction]]] = []
    for index, row in enumerate(rows):
        vec = [Fraction(x) for x in row]
        for col, prow in pivots:
            coef = vec[col]
            if coef:
                for k in range(width):
                    if prow[k]:
                        vec[k] -= coef * prow[k]
        lead = next((k for k in range(width) if vec[k]), None)
        if lead is None:
            yield index, False
            continue
        inv = 1 / vec[lead]
        vec = [x * inv for x in vec]
        for _, prow in pivots:
            coef = prow[lead]
            if coef:
                for k in range(width):
                    if vec[k]:
                        prow[k] -= coef * vec[k]
        pivots.append((lead, vec))
        yield index, True


def rank(rows: Sequence[Sequence[Fraction]]) -> int:
    """Exact rank of a rational matrix given as a list of rows."""
    if not rows:
        return 0
    width = len(rows[0])
    return sum(1 for _, ok in _independent_rows(rows, width) if ok)


def _solve_square(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """Gauss-Jordan solve; ``None`` when singular."""
    size = len(matrix)
    aug = [list(map(Fraction, row)) + [Fraction(r)] for row, r in zip(matrix, rhs)]
    for col in range(size):
        piv = next((r for r in range(col, size) if aug[r][col]), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(size):
            if r != col and aug[r][col]:
                coef = aug[r][col]
                aug[r] = [x - coef * y for x, y in zip(aug[r], aug[col])]
    return [aug[r][size] for r in range(size)]


@dataclass(frozen=True)
class LinearSystem:
    """``a_eq @ x == b_eq`` with ``lower <= x <= upper``.

    ``None`` in ``lower`` or ``upper`` means that side is unbounded.  An
    optional linear ``objective`` is minimised, or maximised when
    ``maximize`` is set.
    """

    a_eq: tuple
    b_eq: tuple
    lower: tuple
    upper: tuple
    objective: tuple | None = None
    maximize: bool = False

    @classmethod
    def build(cls, a_eq, b_eq, n_vars=None, lower=0, upper=None, objective=None, maximize=False):
        """Normalise nested sequences into a validated system.

        Scalar ``lower``/``upper`` are broadcast to every variable.
        """
        a_rows = tuple(tuple(as_rational(x) for x in row) for row in a_eq)
        if n_vars is None:
            if not a_rows:
                raise MalformedInputError("n_vars is required when there are no equality rows")
            n_vars = len(a_rows[0])

        def bounds(given):
            if given is None or not isinstance(given, (list, tuple)):
                return tuple(None if given is None else as_rational(given) for _ in range(n_vars))
            return tuple(None if x is None else as_rational(x) for x in given)

        obj = None if objective is None else tuple(as_rational(x) for x in objective)
        return cls(a_rows, tuple(as_rational(x) for x in b_eq), bounds(lower), bounds(upper), obj, bool(maximize))

    def __post_init__(self):
        n = len(self.lower)
        if len(self.upper) != n:
            raise MalformedInputError("lower and upper bounds differ in length")
        if len(self.a_eq) != len(self.b_eq):
            raise MalformedInputError("a_eq and b_eq differ in length")
        if any(len(row) != n for row in self.a_eq):
            raise MalformedInputError("every equality row needs one coefficient per variable")
        if self.objective is not None and len(self.objective) != n:
            raise MalformedInputError("objective length does not match the variables")

    @property
    def n_vars(self) -> int:
        return len(self.lower)

    def constraint_row(self, cid) -> tuple:
        """Coefficient row of a constraint id ``("eq", r)``, ``("lower", j)`` or ``("upper", j)``."""
        kind, idx = cid
        if kind == "eq":
            return self.a_eq[idx]
        return tuple(Fraction(int(k == idx)) for k in range(self.n_vars))

    def is_feasible(self, x: Sequence[Fraction]) -> bool:
        if len(x) != self.n_vars:
            return False
        for row, rhs in zip(self.a_eq, self.b_eq):
            if sum(a * v for a, v in zip(row, x) if a) != rhs:
                return False
        for v, lo, hi in zip(x, self.lower, self.upper):
            if lo is not None and v < lo:
                return False
            if hi is not None and v > hi:
                return False
        return True

    def tight_set(self, x: Sequence[Fraction]) -> tuple:
        tight = [("eq", r) for r in range(len(self.a_eq))]
        for j, (v, lo, hi) in enumerate(zip(x, self.lower, self.upper)):
            if lo is not None and v == lo:
                tight.append(("lower", j))
            if hi is not None and v == hi:
                tight.append(("upper", j))
        return tuple(tight)

    def independent_basis(self, tight: Sequence, exclude=None) -> tuple:
        """Greedy maximal independent subset of ``tight`` in the given order."""
        ids = [cid for cid in tight if cid != exclude]
        rows = [self.constraint_row(cid) for cid in ids]
        return tuple(ids[i] for i, ok in _independent_rows(rows, self.n_vars) if ok)


@dataclass(frozen=True)
class FarkasCertificate:
    """Multipliers proving ``{A x = b, l <= x <= u}`` empty.

    ``eq`` weights the equality rows, ``lower`` and ``upper`` are
    nonnegative weights on the bound constraints.  Validity means
    ``A^T eq == lower - upper`` and ``eq . b < lower . l - upper . u``:
    every feasible point would satisfy the reverse inequality.
    """

    eq: tuple
    lower: tuple
    upper: tuple

    def gap(self, system: LinearSystem) -> Fraction:
        total = sum((y * b for y, b in zip(self.eq, system.b_eq)), Fraction(0))
        for lam, lo in zip(self.lower, system.lower):
            if lam:
                total -= lam * lo
        for mu, hi in zip(self.upper, system.upper):
            if mu:
                total += mu * hi
        return total

    def verify(self, system: LinearSystem) -> bool:
        n = system.n_vars
        if len(self.eq) != len(system.b_eq) or len(self.lower) != n or len(self.upper) != n:
            return False
        for j in range(n):
            lam, mu = self.lower[j], self.upper[j]
            if lam < 0 or mu < 0:
                return False
            if lam and system.lower[j] is None:
                return False
            if mu and system.upper[j] is None:
                return False
            col = sum((y * row[j] for y, row in zip(self.eq, system.a_eq) if y and row[j]), Fraction(0))
            if col != lam - mu:
                return False
        return self.gap(system) < 0


@dataclass(frozen=True)
class LpOutcome:
    """Result of a solve or an edge move.

    ``basis`` lists ``n_vars`` linearly independent tight constraints that
    pin down ``vertex``; ``entered`` names the bound that became tight on
    an edge move.
    """

    status: str
    vertex: tuple | None = None
    tight: tuple = ()
    basis: tuple = ()
    certificate: FarkasCertificate | None = None
    objective_value: Fraction | None = None
    entered: tuple | None = None

    @property
    def feasible(self) -> bool:
        return self.status != INFEASIBLE


class _StandardForm:
    """``C z = d, z >= 0`` with ``d >= 0`` plus the map back to ``x``."""

    def __init__(self, system: LinearSystem):
        n = system.n_vars
        self.system = system
        self.var_terms: list[list[tuple[int, int]]] = []
        self.offsets: list[Fraction] = []
        self.bound_rows: dict[int, int] = {}
        cols: list[list[tuple[int, Fraction]]] = []
        n_eq = len(system.a_eq)
        rhs = [Fraction(b) for b in system.b_eq]
        extra_rows: list[tuple[int, Fraction]] = []
        for j in range(n):
            lo, hi = system.lower[j], system.upper[j]
            col = [(r, system.a_eq[r][j]) for r in range(n_eq) if system.a_eq[r][j]]
            if lo is not None:
                self.offsets.append(lo)
                z = len(cols)
                cols.append(list(col))
                self.var_terms.append([(z, 1)])
                if hi is not None:
                    row = n_eq + len(extra_rows)
                    self.bound_rows[j] = row
                    extra_rows.append((j, hi - lo))
                    cols[z].append((row, Fraction(1)))
                    cols.append([(row, Fraction(1))])
            elif hi is not None:
                self.offsets.append(hi)
                z = len(cols)
                cols.append([(r, -a) for r, a in col])
                self.var_terms.append([(z, -1)])
            else:
                self.offsets.append(Fraction(0))
                z = len(cols)
                cols.append(list(col))
                cols.append([(r, -a) for r, a in col])
                self.var_terms.append([(z, 1), (z + 1, -1)])
        for r in range(n_eq):
            rhs[r] -= sum((system.a_eq[r][j] * self.offsets[j] for j in range(n) if system.a_eq[r][j]), Fraction(0))
        rhs.extend(cap for _, cap in extra_rows)
        self.signs = [(-1 if d < 0 else 1) for d in rhs]
        self.rhs = [abs(d) for d in rhs]
        self.cols = [[(r, a * self.signs[r]) for r, a in col] for col in cols]
        self.n_rows = len(rhs)

    def objective(self) -> list[Fraction]:
        system = self.system
        cost = [Fraction(0)] * len(self.cols)
        if system.objective is None:
            return cost
        sign = -1 if system.maximize else 1
        for j, terms in enumerate(self.var_terms):
            c = system.objective[j] * sign
            for z, s in terms:
                cost[z] += c * s
        return cost

    def recover(self, z: Sequence[Fraction]) -> tuple:
        return tuple(
            self.offsets[j] + sum((s * z[k] for k, s in terms), Fraction(0))
            for j, terms in enumerate(self.var_terms)
        )

    def certificate(self, y_std: Sequence[Fraction]) -> FarkasCertificate:
        """Translate standard-form Farkas multipliers back to the original rows."""
        system = self.system
        n_eq = len(system.a_eq)
        y = [y_std[r] * self.signs[r] for r in range(n_eq)]
        lower = []
        upper = []
        for j in range(system.n_vars):
            col = sum((y[r] * system.a_eq[r][j] for r in range(n_eq) if system.a_eq[r][j]), Fraction(0))
            lower.append(col if col > 0 else Fraction(0))
            upper.append(-col if col < 0 else Fraction(0))
        cert = FarkasCertificate(tuple(y), tuple(lower), tuple(upper))
        gap = cert.gap(system)
        if gap >= 0:
            raise InvariantViolation("Farkas multipliers do not separate")
        scale = -1 / gap
        return FarkasCertificate(
            tuple(v * scale for v in cert.eq),
            tuple(v * scale for v in cert.lower),
            tuple(v * scale for v in cert.upper),
        )


class _RevisedSimplex:
    """Revised simplex on ``C z = d, z >= 0`` with explicit basis inverse."""

    def __init__(self, cols, rhs, n_rows):
        self.cols = cols
        self.n_real = len(cols)
        self.m = n_rows
        self.basis = [self.n_real + r for r in range(n_rows)]
        self.is_basic = [False] * self.n_real + [True] * n_rows
        self.binv = [[Fraction(int(r == k)) for k in range(n_rows)] for r in range(n_rows)]
        self.xb = list(rhs)

    def column(self, j):
        if j < self.n_real:
            return self.cols[j]
        return [(j - self.n_real, Fraction(1))]

    def duals(self, cost):
        y = [Fraction(0)] * self.m
        for r, j in enumerate(self.basis):
            c = cost[j]
            if c:
                row = self.binv[r]
                for k in range(self.m):
                    if row[k]:
                        y[k] += c * row[k]
        return y

    def ftran(self, j):
        u = [Fraction(0)] * self.m
        for k, a in self.column(j):
            for r in range(self.m):
                b = self.binv[r][k]
                if b:
                    u[r] += b * a
        return u

    def pivot(self, r, j, u):
        piv = u[r]
        row = self.binv[r]
        inv = 1 / piv
        row[:] = [x * inv if x else x for x in row]
        self.xb[r] *= inv
        for i in range(self.m):
            if i != r and u[i]:
                coef = u[i]
                other = self.binv[i]
                for k in range(self.m):
                    if row[k]:
                        other[k] -= coef * row[k]
                self.xb[i] -= coef * self.xb[r]
        self.is_basic[self.basis[r]] = False
        self.basis[r] = j
        self.is_basic[j] = True

    def run(self, cost) -> bool:
        """Minimise ``cost``; only real columns may enter.  ``False`` if unbounded."""
        while True:
            y = self.duals(cost)
            entering = None
            for j in range(self.n_real):
                if self.is_basic[j]:
                    continue
                d = cost[j] - sum((y[k] * a for k, a in self.cols[j] if y[k]), Fraction(0))
                if d < 0:
                    entering = j
                    break
            if entering is None:
                return True
            u = self.ftran(entering)
            leave = None
            best = None
            for r in range(self.m):
                if u[r] > 0:
                    ratio = self.xb[r] / u[r]
                    if best is None or ratio < best or (ratio == best and self.basis[r] < self.basis[leave]):
                        best, leave = ratio, r
            if leave is None:
                return False
            self.pivot(leave, entering, u)

    def drive_out_artificials(self):
        for r in range(self.m):
            if self.basis[r] < self.n_real:
                continue
            row = self.binv[r]
            for j in range(self.n_real):
                if self.is_basic[j]:
                    continue
                if sum((row[k] * a for k, a in self.cols[j] if row[k]), Fraction(0)):
                    self.pivot(r, j, self.ftran(j))
                    break

    def point(self):
        z = [Fraction(0)] * self.n_real
        for r, j in enumerate(self.basis):
            if j < self.n_real:
                z[j] = self.xb[r]
        return z


def _vertex_outcome(system: LinearSystem, x: tuple, status: str, value, describe: bool) -> LpOutcome:
    if not system.is_feasible(x):
        raise InvariantViolation("simplex returned an infeasible point")
    tight = system.tight_set(x)
    if not describe:
        return LpOutcome(status, x, tight, (), None, value)
    basis = system.independent_basis(tight)
    if len(basis) != system.n_vars:
        raise UnboundedError("feasible region has no vertex (it contains a line)")
    return LpOutcome(status, x, tight, basis, None, value)


def solve_vertex(system: LinearSystem, describe: bool = True) -> LpOutcome:
    """Find a vertex of the system, or an optimal one if there is an objective.

    Returns an infeasible outcome carrying a verified Farkas certificate
    when the system is empty.  Raises :class:`UnboundedError` when the
    objective is unbounded.  ``describe=False`` skips the vertex basis,
    which is quadratic in the number of variables.

    >>> sys = LinearSystem.build([[1], [1]], [1, 2], lower=None)
    >>> out = solve_vertex(sys)
    >>> out.status, out.certificate.eq
    ('infeasible', (Fraction(1, 1), Fraction(-1, 1)))
    """
    std = _StandardForm(system)
    simplex = _RevisedSimplex(std.cols, std.rhs, std.n_rows)
    phase1 = [Fraction(0)] * simplex.n_real + [Fraction(1)] * simplex.m
    simplex.run(phase1)
    residual = sum((simplex.xb[r] for r, j in enumerate(simplex.basis) if j >= simplex.n_real), Fraction(0))
    if residual > 0:
        y = simplex.duals(phase1)
        cert = std.certificate([-v for v in y])
        if not cert.verify(system):
            raise InvariantViolation("Farkas certificate failed verification")
        return LpOutcome(INFEASIBLE, certificate=cert)
    simplex.drive_out_artificials()
    if system.objective is None:
        return _vertex_outcome(system, std.recover(simplex.point()), FEASIBLE, None, describe)
    cost = std.objective() + [Fraction(0)] * simplex.m
    if not simplex.run(cost):
        raise UnboundedError("objective is unbounded on the feasible region")
    x = std.recover(simplex.point())
    value = sum((c * v for c, v in zip(system.objective, x)), Fraction(0))
    return _vertex_outcome(system, x, OPTIMAL, value, describe)


def move_to_adjacent_vertex(system: LinearSystem, outcome: LpOutcome, relax: int, direction: int) -> LpOutcome:
    """Walk along the edge that releases the tight bound on variable ``relax``.

    ``direction`` is ``+1`` to increase the variable off its lower bound
    and ``-1`` to decrease it off its upper bound.  Every other constraint
    in the vertex basis stays tight.  The returned outcome records in
    ``entered`` the bound that stops the walk.
    """
    if outcome.vertex is None:
        raise MalformedInputError("outcome carries no vertex")
    if direction not in (1, -1):
        raise MalformedInputError("direction must be +1 or -1")
    x = outcome.vertex
    n = system.n_vars
    cid = ("lower", relax) if direction > 0 else ("upper", relax)
    if cid not in outcome.tight:
        raise BlockedEdgeError(f"{cid} is not tight at this vertex")
    if cid in outcome.basis:
        basis = tuple(b for b in outcome.basis if b != cid)
    else:
        eqs = [t for t in outcome.tight if t[0] == "eq"]
        rest = [t for t in outcome.tight if t[0] != "eq" and t != cid]
        basis = tuple(b for b in system.independent_basis(eqs + [cid] + rest) if b != cid)
    if len(basis) != n - 1:
        raise BlockedEdgeError("relaxed bound is implied by the remaining tight constraints")
    rows = [list(system.constraint_row(b)) for b in basis]
    rows.append([Fraction(int(k == relax)) for k in range(n)])
    d = _solve_square(rows, [Fraction(0)] * (n - 1) + [Fraction(direction)])
    if d is None:
        raise BlockedEdgeError("relaxed bound is implied by the remaining basis")
    step = None
    entered = None
    for k in range(n):
        if d[k] < 0 and system.lower[k] is not None:
            t, bound = (x[k] - system.lower[k]) / -d[k], ("lower", k)
        elif d[k] > 0 and system.upper[k] is not None:
            t, bound = (system.upper[k] - x[k]) / d[k], ("upper", k)
        else:
            continue
        if step is None or t < step:
            step, entered = t, bound
    if step is None:
        raise UnboundedError("edge direction is unbounded")
    if step == 0:
        raise BlockedEdgeError(f"edge blocked immediately by {entered}")
    y = tuple(xi + step * di for xi, di in zip(x, d))
    if not system.is_feasible(y):
        raise InvariantViolation("edge walk left the feasible region")
    tight = system.tight_set(y)
    new_basis = tuple(basis) + (entered,)
    return LpOutcome(outcome.status, y, tight, new_basis, None, None, entered)
