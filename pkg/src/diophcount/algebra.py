"""Exact polynomial arithmetic, linear Diophantine solving and sign-based
finiteness tests.

Everything here works on Python integers; nothing touches floating point.
Natural numbers start at 1 throughout the package.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

from .errors import (
    AllZero,
    ConstantPolynomial,
    NotMonotoneCase,
    ZeroConstantTerm,
)

Exponents = tuple[int, ...]


class Polynomial:
    """Sparse multivariate polynomial with integer coefficients.

    ``terms`` maps exponent vectors of length ``k`` to nonzero coefficients.
    Variable ``x_i`` (1-based) corresponds to position ``i - 1``.
    """

    __slots__ = ("terms", "k")

    def __init__(self, terms: Mapping[Exponents, int], k: int):
        if k < 0:
            raise ValueError("k must be non-negative")
        clean = {}
        for exps, coef in terms.items():
            exps = tuple(exps)
            if len(exps) != k:
                raise ValueError(f"exponent vector {exps} does not have length {k}")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            if coef:
                clean[exps] = clean.get(exps, 0) + coef
                if not clean[exps]:
                    del clean[exps]
        self.terms: dict[Exponents, int] = clean
        self.k = k

    @classmethod
    def constant(cls, value: int, k: int = 0) -> Polynomial:
        return cls({(0,) * k: value}, k)

    @classmethod
    def variable(cls, index: int, k: int) -> Polynomial:
        if not 1 <= index <= k:
            raise ValueError(f"variable x{index} outside 1..{k}")
        exps = [0] * k
        exps[index - 1] = 1
        return cls({tuple(exps): 1}, k)

    def with_k(self, k: int) -> Polynomial:
        """Same polynomial viewed in ``k >= self.k`` variables."""
        if k < self.k:
            raise ValueError("cannot drop variables")
        pad = (0,) * (k - self.k)
        return Polynomial({e + pad: c for e, c in self.terms.items()}, k)

    def _align(self, other) -> tuple[Polynomial, Polynomial]:
        if isinstance(other, int):
            other = Polynomial.constant(other, self.k)
        k = max(self.k, other.k)
        return self.with_k(k), other.with_k(k)

    @property
    def degree(self) -> int:
        """Maximum total degree; 0 for constants including the zero polynomial."""
        return max((sum(e) for e in self.terms), default=0)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def constant_term(self) -> int:
        return self.terms.get((0,) * self.k, 0)

    def variables(self) -> tuple[int, ...]:
        """1-based indices of the variables that actually occur."""
        used = set()
        for exps in self.terms:
            used.update(i + 1 for i, e in enumerate(exps) if e)
        return tuple(sorted(used))

    def degree_in(self, index: int) -> int:
        return max((e[index - 1] for e in self.terms), default=0)

    def coefficient(self, exps: Sequence[int]) -> int:
        return self.terms.get(tuple(exps), 0)

    def coefficients_in(self, index: int) -> dict[int, Polynomial]:
        """Split as ``sum_j C_j * x_index**j``; each ``C_j`` lacks ``x_index``."""
        parts: dict[int, dict[Exponents, int]] = {}
        pos = index - 1
        for exps, coef in self.terms.items():
            rest = exps[:pos] + (0,) + exps[pos + 1:]
            parts.setdefault(exps[pos], {})[rest] = coef
        return {j: Polynomial(t, self.k) for j, t in sorted(parts.items())}

    def evaluate(self, values: Sequence[int]) -> int:
        if len(values) < self.k:
            raise ValueError(f"need {self.k} values, got {len(values)}")
        total = 0
        for exps, coef in self.terms.items():
            term = coef
            for v, e in zip(values, exps):
                if e:
                    term *= v**e
            total += term
        return total

    __call__ = evaluate

    def __add__(self, other):
        a, b = self._align(other)
        terms = dict(a.terms)
        for e, c in b.terms.items():
            terms[e] = terms.get(e, 0) + c
        return Polynomial(terms, a.k)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial({e: -c for e, c in self.terms.items()}, self.k)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._align(other)
        terms: dict[Exponents, int] = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return Polynomial(terms, a.k)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers must be natural numbers")
        result = Polynomial.constant(1, self.k)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = Polynomial.constant(other, self.k)
        if not isinstance(other, Polynomial):
            return NotImplemented
        a, b = self._align(other)
        return a.terms == b.terms

    def __hash__(self):
        trimmed = self.with_k(max(self.k, 1))
        return hash(frozenset(trimmed.terms.items()))

    def __repr__(self):
        return f"Polynomial({self.terms!r}, k={self.k})"

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        # highest total degree first, then lexicographic on exponents
        for exps in sorted(self.terms, key=lambda e: (-sum(e), tuple(-x for x in e))):
            coef = self.terms[exps]
            mono = "*".join(
                f"x{i + 1}" if e == 1 else f"x{i + 1}^{e}"
                for i, e in enumerate(exps) if e
            )
            mag = abs(coef)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            if not pieces:
                pieces.append(body if coef > 0 else f"-{body}")
            else:
                pieces.append(f"+ {body}" if coef > 0 else f"- {body}")
        return " ".join(pieces)


# --- gcd machinery ---


def gcd_list(values: Sequence[int]) -> int:
    if not any(values):
        raise AllZero("gcd of an all-zero list is undefined")
    return math.gcd(*values)


def extended_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, u, v)`` with ``a*u + b*v == g == gcd(a, b) >= 0``."""
    old_r, r = a, b
    old_u, u = 1, 0
    old_v, v = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_u, u = u, old_u - q * u
        old_v, v = v, old_v - q * v
    if old_r < 0:
        old_r, old_u, old_v = -old_r, -old_u, -old_v
    return old_r, old_u, old_v


def bezout_vector(coefficients: Sequence[int]) -> tuple[int, list[int]]:
    """Return ``(g, u)`` with ``sum(a_i * u_i) == g == gcd(a)``."""
    g = 0
    u: list[int] = []
    for a in coefficients:
        g_new, s, t = extended_gcd(g, a)
        u = [s * x for x in u] + [t]
        g = g_new
    return g, u


# --- linear equations ---


class PositiveClass(enum.Enum):
    NONE = "none"
    FINITE = "finite"
    INFINITE = "infinite"


@dataclass(frozen=True)
class LinearEquation:
    """``a_1 x_1 + ... + a_k x_k = b``."""

    coefficients: tuple[int, ...]
    b: int

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(int(a) for a in self.coefficients))
        if not self.coefficients:
            raise ValueError("a linear equation needs at least one variable")
        if not any(self.coefficients):
            raise AllZero("all coefficients are zero")

    @property
    def k(self) -> int:
        return len(self.coefficients)

    def __str__(self):
        lhs = " + ".join(f"{a}*x{i + 1}" for i, a in enumerate(self.coefficients))
        return f"{lhs} = {self.b}".replace("+ -", "- ")


@dataclass(frozen=True)
class LinearSolutionDescription:
    solvable: bool
    d: int
    particular: tuple[int, ...] | None
    positive_class: PositiveClass
    positive_count: int | None  # None iff positive_class is INFINITE


def count_positive_representations(coefficients: Sequence[int], b: int) -> int:
    """Number of positive solutions of ``sum a_i x_i = b`` with all ``a_i > 0``.

    Coin-change count after the shift ``x_i = y_i + 1``.
    """
    if any(a <= 0 for a in coefficients):
        raise ValueError("coefficients must be positive")
    target = b - sum(coefficients)
    if target < 0:
        return 0
    ways = [1] + [0] * target
    for a in coefficients:
        for total in range(a, target + 1):
            ways[total] += ways[total - a]
    return ways[target]


def linear_solve(eq: LinearEquation) -> LinearSolutionDescription:
    a, b = eq.coefficients, eq.b
    d, u = bezout_vector(a)
    if b % d:
        return LinearSolutionDescription(False, d, None, PositiveClass.NONE, 0)
    particular = tuple(x * (b // d) for x in u)

    nonzero = [c for c in a if c]
    has_free = len(nonzero) < len(a)
    if any(c > 0 for c in nonzero) and any(c < 0 for c in nonzero):
        return LinearSolutionDescription(True, d, particular, PositiveClass.INFINITE, None)

    # one sign among the nonzero coefficients: normalize to positive
    sign = 1 if nonzero[0] > 0 else -1
    count = count_positive_representations([sign * c for c in nonzero], sign * b)
    if count and has_free:
        return LinearSolutionDescription(True, d, particular, PositiveClass.INFINITE, None)
    return LinearSolutionDescription(True, d, particular, PositiveClass.FINITE, count)


def iter_linear_solutions(eq: LinearEquation, N: int) -> Iterator[tuple[int, ...]]:
    """Yield every solution with all ``x_i`` in ``[1, N]``, lexicographically."""
    a, b = eq.coefficients, eq.b
    last = max(i for i, c in enumerate(a) if c)
    free = [i for i in range(len(a)) if i != last]
    all_positive = all(c > 0 for c in a) and b > 0

    def walk(pos: int, rem: int, assigned: dict[int, int]):
        if pos == len(free):
            if rem % a[last] == 0 and 1 <= rem // a[last] <= N:
                assigned[last] = rem // a[last]
                yield tuple(assigned[i] for i in range(len(a)))
            return
        i = free[pos]
        for v in range(1, N + 1):
            r = rem - a[i] * v
            if all_positive and r <= 0:
                break
            assigned[i] = v
            yield from walk(pos + 1, r, assigned)

    yield from walk(0, b, {})


def linear_positive_count(eq: LinearEquation, N: int) -> int:
    """Exact number of solutions of ``eq`` inside ``[1, N]^k``."""
    if N < 1:
        return 0
    return sum(1 for _ in iter_linear_solutions(eq, N))


# --- sign-based finiteness (naturals start at 1) ---


class SignVerdict(enum.Enum):
    NO_SOLUTIONS = "NoSolutions"
    FINITE_WITH_BOX = "FiniteWithBox"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class SignClassification:
    verdict: SignVerdict
    bounds: tuple[int, ...] | None = None


def sign_classify(p: Polynomial) -> SignClassification:
    if p.degree == 0:
        raise ConstantPolynomial(f"{p} has no unknowns")
    const = p.constant_term
    others = [c for e, c in p.terms.items() if any(e)]
    if all(c > 0 for c in others):
        if const >= 0:
            return SignClassification(SignVerdict.NO_SOLUTIONS)
        if len(p.variables()) < p.k:
            # an absent variable is free, so the solution set cannot be boxed
            return SignClassification(SignVerdict.INCONCLUSIVE)
        bounds = tuple(max(1, _first_positive_along(p, i) - 1) for i in range(p.k))
        return SignClassification(SignVerdict.FINITE_WITH_BOX, bounds)
    return SignClassification(SignVerdict.INCONCLUSIVE)


def _first_positive_along(p: Polynomial, pos: int) -> int:
    """Smallest v >= 1 with p(1, .., v, .., 1) > 0 (p increasing in every variable)."""
    point = [1] * p.k

    def at(v):
        point[pos] = v
        return p.evaluate(point)

    hi = 1
    while at(hi) <= 0:
        hi *= 2
    lo = hi // 2 + 1 if hi > 1 else 1
    while lo < hi:
        mid = (lo + hi) // 2
        if at(mid) > 0:
            hi = mid
        else:
            lo = mid + 1
    return lo


def iter_monotone_solutions(p: Polynomial) -> Iterator[tuple[int, ...]]:
    """Scan the bounding box of a FiniteWithBox polynomial.

    Since p increases in every variable, a coordinate loop stops as soon as
    p with all later coordinates at 1 turns positive.
    """
    verdict = sign_classify(p)
    if verdict.verdict is not SignVerdict.FINITE_WITH_BOX:
        raise NotMonotoneCase(f"{p} is not in the all-positive, negative-constant case")
    bounds = verdict.bounds
    point = [1] * p.k

    def walk(pos: int):
        if pos == p.k:
            if p.evaluate(point) == 0:
                yield tuple(point)
            return
        for v in range(1, bounds[pos] + 1):
            point[pos] = v
            if p.evaluate(point) > 0:
                break
            yield from walk(pos + 1)
        point[pos] = 1

    yield from walk(0)


def count_monotone(p: Polynomial) -> int:
    return sum(1 for _ in iter_monotone_solutions(p))


def natural_divisors(n: int) -> list[int]:
    n = abs(n)
    if n == 0:
        raise ValueError("0 has infinitely many divisors")
    small, large = [], []
    for d in range(1, math.isqrt(n) + 1):
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
    return small + large[::-1]


def univariate_roots(p: Polynomial) -> list[int]:
    """Natural roots of a one-variable polynomial with nonzero constant term."""
    if p.k != 1:
        raise ValueError("expected a polynomial in exactly one variable")
    const = p.constant_term
    if const == 0:
        raise ZeroConstantTerm("factor out the variable before counting roots")
    return [d for d in natural_divisors(const) if p.evaluate((d,)) == 0]


def count_univariate(p: Polynomial) -> int:
    return len(univariate_roots(p))


def box_points(k: int, N: int) -> Iterator[tuple[int, ...]]:
    return itertools.product(range(1, N + 1), repeat=k)
