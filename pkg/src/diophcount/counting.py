"""Exact solution counting over boxes {1..N}^k, densities and growth scans.

Counting picks one variable to solve for and loops over the remaining ones
("fibers").  The variable is chosen by what can be certified from the
equation itself:

* degree 1 in an algebraic equation: solved exactly on every fiber;
* weakly monotone for all positive values of the others: two bisections
  per fiber locate the run of zeros;
* otherwise every candidate value is tested (algebraic fibers only test
  divisors of the lowest nonzero coefficient).

Nothing is assumed; when no certificate exists the fallback scan is used.
"""

from __future__ import annotations

import enum
import itertools
import logging
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Sequence

from .algebra import Polynomial
from .errors import Case1NoAsymptote, CountExceedsBox, NotAlgebraic, NotExplicit
from .eqparse import (
    Const,
    Equation,
    Negate,
    Power,
    Product,
    Sum,
    Var,
    compile_expr,
    evaluate,
    expand_polynomial,
    variables_of,
)

log = logging.getLogger(__name__)

DEFAULT_TIMEOUT = 60.0
CASE3_TOLERANCE = 0.1
GOOD_FIT_R2 = 0.999


class Method(enum.Enum):
    FULL_SCAN = "FullScan"
    PRUNED_MONOTONE = "PrunedMonotone"
    CLOSED_FORM = "ClosedForm"


@dataclass(frozen=True)
class BoxDomain:
    k: int
    N: int

    def __post_init__(self):
        if self.k < 1 or self.N < 1:
            raise ValueError(f"box needs k >= 1 and N >= 1, got k={self.k}, N={self.N}")

    @property
    def size(self) -> int:
        return self.N**self.k


@dataclass(frozen=True)
class CountReport:
    pi: int
    N: int
    k: int
    method: Method
    elapsed: float = field(default=0.0, compare=False)
    partial: bool = False

    @property
    def density(self) -> Fraction:
        return Fraction(self.pi, self.N**self.k)

    @property
    def probability(self) -> Fraction:
        # a uniformly random tuple from the box is a solution with this probability
        return self.density


def density(pi: int, box: BoxDomain) -> Fraction:
    if pi < 0 or pi > box.size:
        raise CountExceedsBox(f"count {pi} outside [0, {box.size}]")
    return Fraction(pi, box.size)


# --- monotonicity certificates ---

_POS, _NONNEG = "pos", "nonneg"


def _combine(dirs) -> int | None:
    if None in dirs:
        return None
    nonzero = {d for d in dirs if d}
    if len(nonzero) > 1:
        return None
    return nonzero.pop() if nonzero else 0


def _sign_of_all(signs) -> str | None:
    if all(s == _POS for s in signs):
        return _POS
    if all(s in (_POS, _NONNEG) for s in signs):
        return _NONNEG
    return None


def expr_monotonicity(e, var: int) -> tuple[int | None, str | None]:
    """Direction of ``e`` in ``x_var`` when every variable is >= 1.

    Returns ``(direction, sign)``: direction is +1 (non-decreasing), -1
    (non-increasing), 0 (independent) or None (not certified); sign is
    "pos" (always >= 1), "nonneg" or None.
    """
    if isinstance(e, Const):
        return 0, (_POS if e.value > 0 else _NONNEG if e.value == 0 else None)
    if isinstance(e, Var):
        return (1 if e.index == var else 0), _POS
    if isinstance(e, Negate):
        d, _ = expr_monotonicity(e.operand, var)
        return (None if d is None else -d), None
    if isinstance(e, Sum):
        parts = [expr_monotonicity(t, var) for t in e.terms]
        return _combine([d for d, _ in parts]), _sign_of_all([s for _, s in parts])
    if isinstance(e, Product):
        parts = [expr_monotonicity(f, var) for f in e.factors]
        sign = _sign_of_all([s for _, s in parts])
        if sign is None:
            return None, None
        return _combine([d for d, _ in parts]), sign
    if isinstance(e, Power):
        bd, bs = expr_monotonicity(e.base, var)
        if not variables_of(e.exponent):
            if bs is None:
                return None, None
            return bd, bs
        ed, es = expr_monotonicity(e.exponent, var)
        if bs != _POS or es is None:
            return None, None
        return _combine([bd, ed]), _POS
    raise TypeError(f"not an expression node: {e!r}")


def polynomial_direction(p: Polynomial, var: int) -> int | None:
    """+1/-1 if every monomial containing ``x_var`` has that coefficient sign."""
    signs = {1 if c > 0 else -1 for e, c in p.terms.items() if e[var - 1]}
    if len(signs) == 1:
        return signs.pop()
    return None


# --- compiled evaluation ---


def _poly_source(p: Polynomial) -> str:
    if not p.terms:
        return "0"
    pieces = []
    for exps, coef in p.terms.items():
        factors = [f"({coef})"]
        for i, e in enumerate(exps):
            if e == 1:
                factors.append(f"x{i + 1}")
            elif e:
                factors.append(f"x{i + 1}**{e}")
        pieces.append("*".join(factors))
    return " + ".join(pieces)


def compile_polynomial(p: Polynomial, k: int) -> Callable[..., int]:
    args = ", ".join(f"x{i}" for i in range(1, k + 1))
    return eval(f"lambda {args}: {_poly_source(p)}", {"__builtins__": {}})


def _first(pred: Callable[[int], bool], lo: int, hi: int) -> int:
    """Smallest t in [lo, hi) with pred(t), assuming pred is monotone; hi if none."""
    while lo < hi:
        mid = (lo + hi) // 2
        if pred(mid):
            hi = mid
        else:
            lo = mid + 1
    return lo


def zero_run(g: Callable[[int], int], N: int, direction: int) -> range:
    """Zeros of a weakly monotone integer function on [1, N]; they form a run."""
    s = -1 if direction < 0 else 1
    lo = _first(lambda t: s * g(t) >= 0, 1, N + 1)
    if lo > N or g(lo) != 0:
        return range(0)
    if lo == N or s * g(lo + 1) > 0:
        return range(lo, lo + 1)
    hi = _first(lambda t: s * g(t) > 0, lo + 1, N + 1)
    return range(lo, hi)


def _horner(coeffs: Sequence[int], t: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = acc * t + c
    return acc


def _univariate_zeros(coeffs: list[int], N: int) -> range | list[int]:
    """Natural zeros in [1, N] of sum coeffs[j] * t**j."""
    if not any(coeffs[1:]):
        return range(1, N + 1) if coeffs[0] == 0 else range(0)
    upper = coeffs[1:]
    if all(c >= 0 for c in upper) or all(c <= 0 for c in upper):
        return zero_run(lambda t: _horner(coeffs, t), N, 1 if any(c > 0 for c in upper) else -1)
    low = next(j for j, c in enumerate(coeffs) if c)
    reduced = coeffs[low:]
    c0 = abs(reduced[0])
    # an integer root divides the lowest nonzero coefficient
    return [t for t in range(1, min(N, c0) + 1) if c0 % t == 0 and _horner(reduced, t) == 0]


# --- fiber solver ---


class FiberSolver:
    """Solve one equation for one variable over fibers of the others.

    ``fixed`` lists variables whose values are supplied by the caller in
    ``base`` argument lists (used when intersecting systems).
    """

    def __init__(self, eq: Equation, k: int, N: int, fixed: Sequence[int] = ()):
        if eq.k > k:
            raise ValueError(f"equation uses {eq.k} variables but the box has k={k}")
        self.eq, self.k, self.N = eq, k, N
        fixed = set(fixed)
        self.poly = expand_polynomial(eq).with_k(k) if eq.is_algebraic else None
        used = self.poly.variables() if self.poly is not None else eq.variables()
        self.active = [v for v in used if v not in fixed]
        self.solve_var: int | None = None
        self.strategy = "check"
        self.direction = 1
        if self.poly is not None:
            self._plan_algebraic()
        else:
            self._plan_general()
        self.fiber_vars = [v for v in self.active if v != self.solve_var]

    @property
    def method(self) -> Method:
        return {
            "check": Method.CLOSED_FORM,
            "linear": Method.CLOSED_FORM,
            "monotone": Method.PRUNED_MONOTONE,
            "scan": Method.FULL_SCAN,
        }[self.strategy]

    def _plan_algebraic(self):
        p, k = self.poly, self.k
        self.fn = compile_polynomial(p, k)
        if not self.active:
            return
        linear = [v for v in self.active if p.degree_in(v) == 1]
        monotone = [v for v in self.active if polynomial_direction(p, v) is not None]
        if linear:
            self.strategy, self.solve_var = "linear", linear[0]
        elif monotone:
            self.strategy, self.solve_var = "monotone", monotone[0]
            self.direction = polynomial_direction(p, self.solve_var)
        else:
            self.strategy, self.solve_var = "scan", self.active[-1]
        parts = p.coefficients_in(self.solve_var)
        top = max(parts)
        self.coef_fns = [
            compile_polynomial(parts.get(j, Polynomial.constant(0, k)), k) for j in range(top + 1)
        ]

    def _plan_general(self):
        self.fn = compile_expr(self.eq.F, self.k)
        if not self.active:
            return
        for v in self.active:
            d, _ = expr_monotonicity(self.eq.F, v)
            if d is not None:
                self.strategy, self.solve_var, self.direction = "monotone", v, d
                return
        self.strategy, self.solve_var = "scan", self.active[-1]

    def solutions(self, args: list[int]) -> range | list[int]:
        """Values of the solve variable completing ``args`` to a solution."""
        N = self.N
        if self.strategy == "check":
            return range(1) if self.fn(*args) == 0 else range(0)
        pos = self.solve_var - 1
        if self.poly is not None:
            coeffs = [f(*args) for f in self.coef_fns]
            if self.strategy == "linear":
                b, a = coeffs
                if a == 0:
                    return range(1, N + 1) if b == 0 else range(0)
                if b % a:
                    return range(0)
                t = -b // a
                return range(t, t + 1) if 1 <= t <= N else range(0)
            return _univariate_zeros(coeffs, N)

        def g(t):
            args[pos] = t
            return self.fn(*args)

        if self.strategy == "monotone":
            return zero_run(g, N, self.direction)
        return [t for t in range(1, N + 1) if g(t) == 0]

    def iter_fibers(self, base: Sequence[int], first: range | None = None) -> Iterator[list[int]]:
        args = list(base)
        ranges = [range(1, self.N + 1)] * len(self.fiber_vars)
        if first is not None and ranges:
            ranges[0] = first
        positions = [v - 1 for v in self.fiber_vars]
        for values in itertools.product(*ranges):
            for p, val in zip(positions, values):
                args[p] = val
            yield args

    def count(self, base: Sequence[int], first: range | None = None,
              deadline: float | None = None) -> tuple[int, bool]:
        """Number of (fiber, solve-variable) completions; ``True`` if cut short."""
        total = 0
        for i, args in enumerate(self.iter_fibers(base, first)):
            if deadline is not None and i % 256 == 0 and time.monotonic() > deadline:
                return total, True
            total += len(self.solutions(args))
        return total, False

    def iter_completions(self, base: Sequence[int]) -> Iterator[tuple[int, ...]]:
        """Full argument tuples solving the equation, extending ``base``."""
        for args in self.iter_fibers(base):
            sols = self.solutions(args)
            if self.solve_var is None:
                if len(sols):
                    yield tuple(args)
                continue
            pos = self.solve_var - 1
            for t in sols:
                out = list(args)
                out[pos] = t
                yield tuple(out)


# --- counting entry points ---


def _count_chunk(eq: Equation, k: int, N: int, lo: int, hi: int, budget: float) -> tuple[int, bool]:
    solver = FiberSolver(eq, k, N)
    return solver.count([1] * k, range(lo, hi), time.monotonic() + budget)


def _chunks(N: int, workers: int) -> list[tuple[int, int]]:
    workers = max(1, min(workers, N))
    step, extra = divmod(N, workers)
    out, lo = [], 1
    for w in range(workers):
        hi = lo + step + (1 if w < extra else 0)
        out.append((lo, hi))
        lo = hi
    return out


def count_solutions(eq: Equation, box: BoxDomain, workers: int = 1,
                    timeout: float | None = DEFAULT_TIMEOUT) -> CountReport:
    """Exact number of tuples in ``{1..N}^k`` with ``F = 0``.

    Variables of the box that do not occur in the equation are free and
    multiply the count by N each.  With ``workers > 1`` the range of the
    outermost fiber variable is split across processes; the result does not
    depend on the worker count.
    """
    start = time.monotonic()
    budget = math.inf if timeout is None else timeout
    solver = FiberSolver(eq, box.k, box.N)
    free = box.k - len(solver.active)
    if workers > 1 and solver.fiber_vars and box.N > 1:
        parts = _chunks(box.N, workers)
        with ProcessPoolExecutor(max_workers=len(parts)) as pool:
            futures = [pool.submit(_count_chunk, eq, box.k, box.N, lo, hi, budget) for lo, hi in parts]
            results = [f.result() for f in futures]
        count = sum(c for c, _ in results)
        partial = any(p for _, p in results)
    else:
        count, partial = solver.count([1] * box.k, deadline=start + budget)
    if partial:
        log.warning("count of %s at N=%d timed out; result is partial", eq, box.N)
    return CountReport(count * box.N**free, box.N, box.k, solver.method,
                       time.monotonic() - start, partial)


def naive_count(eq: Equation, box: BoxDomain) -> int:
    """Reference count: evaluate the tree at every point of the box."""
    return sum(1 for pt in itertools.product(range(1, box.N + 1), repeat=box.k)
               if evaluate(eq.F, pt) == 0)


def iter_solutions(eq: Equation, box: BoxDomain) -> Iterator[tuple[int, ...]]:
    """Every solution tuple in the box, free variables included."""
    solver = FiberSolver(eq, box.k, box.N)
    free = [v - 1 for v in range(1, box.k + 1) if v not in solver.active]
    for sol in solver.iter_completions([1] * box.k):
        out = list(sol)
        for values in itertools.product(range(1, box.N + 1), repeat=len(free)):
            for p, val in zip(free, values):
                out[p] = val
            yield tuple(out)


def explicit_variable(eq: Equation) -> tuple[int, object]:
    """``(i, f)`` when the equation reads ``x_i = f(others)`` on either side."""
    for side, other in ((eq.lhs, eq.rhs), (eq.rhs, eq.lhs)):
        if isinstance(side, Var) and side.index not in variables_of(other):
            return side.index, other
    raise NotExplicit(f"{eq} does not isolate a variable on one side")


def count_explicit(eq: Equation, box: BoxDomain) -> CountReport:
    start = time.monotonic()
    index, f = explicit_variable(eq)
    fn = compile_expr(f, box.k)
    others = [v for v in range(1, box.k + 1) if v != index]
    args = [1] * box.k
    count = 0
    for values in itertools.product(range(1, box.N + 1), repeat=len(others)):
        for v, val in zip(others, values):
            args[v - 1] = val
        if 1 <= fn(*args) <= box.N:
            count += 1
    return CountReport(count, box.N, box.k, Method.CLOSED_FORM, time.monotonic() - start)


def verify_bound(eq: Equation, box: BoxDomain, report: CountReport) -> bool:
    """True iff the count respects ``pi <= n * N^(k-1)`` for degree n."""
    if not eq.is_algebraic:
        raise NotAlgebraic("the degree bound applies to algebraic equations only")
    bound = eq.degree * box.N ** (box.k - 1)
    ok = report.pi <= bound
    if not ok:
        log.warning("degree bound violated: %s has %d solutions at N=%d, k=%d (bound %d)",
                    eq, report.pi, box.N, box.k, bound)
    return ok


# --- growth scans ---


@dataclass(frozen=True)
class GrowthScan:
    samples: tuple[tuple[int, int], ...]
    k: int
    exponent: float | None
    density_case: int
    coefficient: float | None = None
    r_squared: float | None = None
    limit_estimate: float | None = None
    partial: bool = False


def growth_from_samples(samples: Sequence[tuple[int, int]], k: int, partial: bool = False) -> GrowthScan:
    """Fit ``pi ~ C * N^s`` on log-log axes and assign the density case.

    Case 1 when pi is constant over the top half of the samples, case 3 when
    the fitted exponent is within ``CASE3_TOLERANCE`` of k, else case 2.
    """
    samples = tuple((int(n), int(p)) for n, p in samples)
    if len(samples) < 3:
        raise ValueError("a growth scan needs at least three sizes")
    if any(b[0] <= a[0] for a, b in zip(samples, samples[1:])):
        raise ValueError("sizes must be strictly increasing")
    top = samples[len(samples) // 2:]
    positive = [(n, p) for n, p in samples if p > 0]
    exponent = coefficient = r2 = None
    if len(positive) >= 2:
        xs = [math.log(n) for n, _ in positive]
        ys = [math.log(p) for _, p in positive]
        exponent, intercept = statistics.linear_regression(xs, ys)
        coefficient = math.exp(intercept)
        resid = sum((y - (exponent * x + intercept)) ** 2 for x, y in zip(xs, ys))
        spread = sum((y - statistics.fmean(ys)) ** 2 for y in ys)
        r2 = 1.0 if spread == 0 else 1.0 - resid / spread
    if len({p for _, p in top}) == 1:
        case = 1
    elif exponent is not None and abs(exponent - k) < CASE3_TOLERANCE:
        case = 3
    else:
        case = 2
    limit = None
    if case == 3:
        n_last, p_last = samples[-1]
        limit = p_last / n_last**k
    return GrowthScan(samples, k, exponent, case, coefficient, r2, limit, partial)


def growth_scan(eq: Equation, Ns: Sequence[int], k: int | None = None, workers: int = 1,
                timeout: float | None = DEFAULT_TIMEOUT) -> GrowthScan:
    k = k or eq.k
    samples, partial = [], False
    for N in Ns:
        report = count_solutions(eq, BoxDomain(k, N), workers=workers, timeout=timeout)
        samples.append((N, report.pi))
        partial = partial or report.partial
    return growth_from_samples(samples, k, partial)


@dataclass(frozen=True)
class AsymptoticForm:
    """``coefficient * N^exponent``."""

    coefficient: float
    exponent: float
    good_fit: bool

    @property
    def exponent_fraction(self) -> Fraction | None:
        """Small-denominator rational matching the exponent, if one is close."""
        f = Fraction(self.exponent).limit_denominator(12)
        return f if abs(float(f) - self.exponent) < 1e-6 else None

    def __str__(self):
        f = self.exponent_fraction
        power = (str(f) if f.denominator == 1 else f"({f})") if f is not None else f"{self.exponent:.4g}"
        return f"{self.coefficient:.4g}*N^{power}"


def fit_asymptotic(scan: GrowthScan, k: int | None = None) -> tuple[AsymptoticForm, AsymptoticForm]:
    """Count form ``f(N) = C N^s`` and density form ``g(N) = C N^(s-k)``."""
    k = scan.k if k is None else k
    if scan.density_case == 1 or scan.exponent is None:
        raise Case1NoAsymptote("the count stays bounded; there is no growth to fit")
    good = scan.r_squared is not None and scan.r_squared >= GOOD_FIT_R2
    count_form = AsymptoticForm(scan.coefficient, scan.exponent, good)
    density_form = AsymptoticForm(scan.coefficient, scan.exponent - k, good)
    return count_form, density_form
