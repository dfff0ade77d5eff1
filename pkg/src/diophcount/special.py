"""Systems of equations, power chains and the non-algebraic families.

Closed forms here are always paired with a bounded search elsewhere in the
package so that the two can be compared.
"""

from __future__ import annotations

import logging
import math
import time
import warnings
from dataclasses import dataclass
from typing import Sequence

from .algebra import SignVerdict, sign_classify
from .counting import (
    DEFAULT_TIMEOUT,
    BoxDomain,
    CountReport,
    FiberSolver,
    Method,
    count_solutions,
)
from .eqparse import Equation, expand_polynomial, parse_equation, parse_system
from .errors import ConstantPolynomial

log = logging.getLogger(__name__)


class UnverifiedClaimWarning(UserWarning):
    """A published count could not be reproduced by exhaustive search."""


def iroot(n: int, e: int) -> int:
    """Largest t >= 0 with t**e <= n."""
    if n < 0 or e < 1:
        raise ValueError("iroot needs n >= 0 and e >= 1")
    if n < 2 or e == 1:
        return n
    # Newton from an upper bound, exact integers only
    t = 1 << -(-n.bit_length() // e)
    while True:
        nxt = ((e - 1) * t + n // t ** (e - 1)) // e
        if nxt >= t:
            break
        t = nxt
    while t**e > n:
        t -= 1
    while (t + 1) ** e <= n:
        t += 1
    return t


# --- systems ---


@dataclass(frozen=True)
class SystemOfEquations:
    equations: tuple[Equation, ...]

    def __post_init__(self):
        object.__setattr__(self, "equations", tuple(self.equations))
        if not self.equations:
            raise ValueError("a system needs at least one equation")
        if len({eq.k for eq in self.equations}) > 1:
            raise ValueError("all equations of a system must share the same k")
        m, k = len(self.equations), self.equations[0].k
        if not 1 < m < k:
            log.warning("system has %d equations in %d variables; expected 1 < m < k", m, k)

    @classmethod
    def parse(cls, texts: Sequence[str]) -> SystemOfEquations:
        return cls(tuple(parse_system(texts)))

    @property
    def k(self) -> int:
        return self.equations[0].k


def _has_no_solutions(eq: Equation) -> bool:
    if not eq.is_algebraic:
        return False
    p = expand_polynomial(eq)
    if p.degree == 0:
        return not p.is_zero
    try:
        return sign_classify(p).verdict is SignVerdict.NO_SOLUTIONS
    except ConstantPolynomial:
        return False


def _cost_key(eq: Equation):
    n = eq.degree if eq.is_algebraic else math.inf
    # fewer variables gives the smaller n*N^(k-1) bound; degree breaks ties
    return (len(eq.variables()), n)


def count_system(system: SystemOfEquations, box: BoxDomain,
                 timeout: float | None = DEFAULT_TIMEOUT) -> CountReport:
    """Tuples of the box satisfying every equation of the system.

    Solutions of the cheapest equation are enumerated first; each one is
    extended through the remaining equations, and variables that no
    equation mentions contribute a factor N each.
    """
    start = time.monotonic()
    k, N = box.k, box.N
    if system.k > k:
        raise ValueError(f"system uses {system.k} variables but the box has k={k}")
    if any(_has_no_solutions(eq) for eq in system.equations):
        return CountReport(0, N, k, Method.CLOSED_FORM, time.monotonic() - start)
    if len(system.equations) == 1:
        return count_solutions(system.equations[0], box, timeout=timeout)

    deadline = None if timeout is None else start + timeout
    order = sorted(system.equations, key=_cost_key)
    partial = False

    def extend(idx: int, args: tuple[int, ...], assigned: frozenset[int]) -> int:
        nonlocal partial
        if deadline is not None and time.monotonic() > deadline:
            partial = True
            return 0
        if idx == len(order):
            return N ** (k - len(assigned))
        solver = FiberSolver(order[idx], k, N, fixed=assigned)
        now_assigned = assigned | set(solver.active)
        total = 0
        for full in solver.iter_completions(args):
            total += extend(idx + 1, full, now_assigned)
            if partial:
                break
        return total

    pi = extend(0, (1,) * k, frozenset())
    return CountReport(pi, N, k, Method.FULL_SCAN, time.monotonic() - start, partial)


# --- power chains x1^n1 = x2^n2 = ... = xk^nk ---


@dataclass(frozen=True)
class PowerChainSystem:
    exponents: tuple[int, ...]

    def __post_init__(self):
        exps = tuple(int(n) for n in self.exponents)
        object.__setattr__(self, "exponents", exps)
        if len(exps) < 2:
            raise ValueError("a power chain needs at least two exponents")
        if exps[0] < 1 or any(b <= a for a, b in zip(exps, exps[1:])):
            raise ValueError("exponents must be natural and strictly increasing")

    @property
    def k(self) -> int:
        return len(self.exponents)

    @property
    def m(self) -> int:
        return math.lcm(*self.exponents)

    def equations(self) -> SystemOfEquations:
        e = self.exponents
        return SystemOfEquations(tuple(
            parse_equation(f"x{i + 1}^{e[i]} = x{i + 2}^{e[i + 1]}", len(e))
            for i in range(len(e) - 1)
        ))

    def parametric_solution(self, t: int) -> tuple[int, ...]:
        return tuple(t ** (self.m // n) for n in self.exponents)


def power_chain_count(system: PowerChainSystem, N: int) -> int:
    """floor(N^(n1/m)): the number of t with t^(m/n1) <= N."""
    return iroot(N, system.m // system.exponents[0])


# --- non-algebraic families ---


def count_exponential(a: int, N: int) -> int:
    """Number of x1 in [1, N] with a^x1 <= N."""
    if a < 2:
        raise ValueError("base must be at least 2")
    count, value = 0, a
    while value <= N:
        count += 1
        value *= a
    return count


def count_power_tower(N: int) -> int:
    """Triples (x1, x2, x1^x2) in {1..N}^3 with x1 >= 2."""
    if N < 2:
        raise ValueError("N must be at least 2")
    return sum(count_exponential(a, N) for a in range(2, N + 1))


DEFAULT_CATALAN_BOX = ((2, 60), (2, 10), (1, 40))


def catalan_check(x1_range: tuple[int, int] = DEFAULT_CATALAN_BOX[0],
                  x2_range: tuple[int, int] = DEFAULT_CATALAN_BOX[1],
                  x3_range: tuple[int, int] = DEFAULT_CATALAN_BOX[2]) -> list[tuple[int, int, int]]:
    """All (x1, x2, x3) in the inclusive box with x1^x2 - 2^x3 = 1."""
    if x2_range[0] < 2:
        log.warning("x2 may equal 1: every x1 = 2^x3 + 1 then solves the equation")
    found = []
    for x1 in range(x1_range[0], x1_range[1] + 1):
        for x2 in range(x2_range[0], x2_range[1] + 1):
            v = x1**x2 - 1
            if v > 0 and v & (v - 1) == 0:
                x3 = v.bit_length() - 1
                if x3_range[0] <= x3 <= x3_range[1]:
                    found.append((x1, x2, x3))
    return found


def exp_sum_check(bound: int = 30) -> list[tuple[int, int, int]]:
    """All exponents in [1, bound]^3 with 2^x1 + 3^x2 = 5^x3."""
    found = []
    for x3 in range(1, bound + 1):
        for x2 in range(1, bound + 1):
            v = 5**x3 - 3**x2
            if v <= 0:
                break
            if v & (v - 1) == 0:
                x1 = v.bit_length() - 1
                if 1 <= x1 <= bound:
                    found.append((x1, x2, x3))
    return sorted(found)


# --- a published count that does not survive exhaustive search ---


@dataclass(frozen=True)
class ClaimCheck:
    N: int
    claimed: int
    family_count: int
    oracle_count: int
    outside_family: tuple[tuple[int, int, int], ...]

    @property
    def confirmed(self) -> bool:
        return self.claimed == self.oracle_count


def ternary_quadratic_claim(N: int = 100, timeout: float | None = DEFAULT_TIMEOUT) -> ClaimCheck:
    """Compare floor(sqrt((N-1)/2)) with the true count of 2x1^2 + x2^2 = x3^2.

    The claimed formula counts a one-parameter family (2t, t, 3t); the
    exhaustive count over {1..N}^3 also finds primitive solutions such as
    (4, 7, 9).  A mismatch raises ``UnverifiedClaimWarning``.
    """
    eq = parse_equation("2*x1^2 + x2^2 - x3^2 = 0")
    claimed = math.isqrt((N - 1) // 2) if N >= 1 else 0
    family = N // 3
    oracle = count_solutions(eq, BoxDomain(3, N), timeout=timeout).pi
    outside = []
    solver = FiberSolver(eq, 3, N)
    for sol in solver.iter_completions((1, 1, 1)):
        x1, x2, x3 = sol
        if not (x1 == 2 * x2 and x3 == 3 * x2):
            outside.append(sol)
    check = ClaimCheck(N, claimed, family, oracle, tuple(sorted(outside)))
    if not check.confirmed:
        example = check.outside_family[0] if check.outside_family else None
        warnings.warn(
            f"claimed count floor(sqrt((N-1)/2)) = {claimed} at N={N} disagrees with the "
            f"exhaustive count {oracle}; solutions outside (2t, t, 3t) include {example}",
            UnverifiedClaimWarning,
            stacklevel=2,
        )
    return check
