"""Second-order curve and surface classification with count-bound predictions.

The symmetric-matrix convention is used throughout: the off-diagonal entry
for ``x_i x_j`` is half the expanded coefficient, and the border entry for
``x_i`` is half the linear coefficient.  All arithmetic is exact.

Classification is decided by matrix inertia (Sylvester's law).  For
three-variable surfaces the classical determinant conditions are evaluated
alongside, and any disagreement becomes a warning on the result.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

from .algebra import Polynomial
from .errors import NotQuadratic

Matrix = tuple[tuple[Fraction, ...], ...]


# --- exact linear algebra ---


def det(m: Sequence[Sequence]) -> Fraction:
    a = [[Fraction(x) for x in row] for row in m]
    n = len(a)
    result = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            result = -result
        p = a[col][col]
        result *= p
        for r in range(col + 1, n):
            f = a[r][col] / p
            if f:
                for c in range(col, n):
                    a[r][c] -= f * a[col][c]
    return result


def inertia(m: Sequence[Sequence]) -> tuple[int, int, int]:
    """Return ``(positive, negative, zero)`` eigenvalue counts of a symmetric matrix.

    Symmetric elimination by congruence; when the diagonal is all zero a
    row/column pair is folded in first so that a nonzero pivot appears.
    """
    a = [[Fraction(x) for x in row] for row in m]
    n = len(a)
    pos = neg = 0
    while a:
        size = len(a)
        p = next((i for i in range(size) if a[i][i] != 0), None)
        if p is None:
            pair = next(
                ((i, j) for i in range(size) for j in range(i + 1, size) if a[i][j] != 0),
                None,
            )
            if pair is None:
                break
            i, j = pair
            for c in range(size):
                a[i][c] += a[j][c]
            for r in range(size):
                a[r][i] += a[r][j]
            p = i
        piv = a[p][p]
        if piv > 0:
            pos += 1
        else:
            neg += 1
        rest = [i for i in range(size) if i != p]
        a = [[a[r][c] - a[r][p] * a[p][c] / piv for c in rest] for r in rest]
    return pos, neg, n - pos - neg


def _minor(m: Sequence[Sequence], drop: int) -> list[list]:
    return [[x for j, x in enumerate(row) if j != drop] for i, row in enumerate(m) if i != drop]


def symmetric_matrix(p: Polynomial, k: int) -> Matrix:
    """(k+1)x(k+1) symmetric matrix of a polynomial of degree <= 2."""
    if p.degree > 2:
        raise NotQuadratic(f"{p} has degree {p.degree}")
    p = p.with_k(max(k, p.k))
    if p.k > k:
        raise ValueError(f"polynomial uses {p.k} variables, more than k={k}")
    m = [[Fraction(0)] * (k + 1) for _ in range(k + 1)]
    for exps, coef in p.terms.items():
        idx = [i for i, e in enumerate(exps) for _ in range(e)]
        if len(idx) == 2:
            i, j = idx
            if i == j:
                m[i][i] += coef
            else:
                m[i][j] += Fraction(coef, 2)
                m[j][i] += Fraction(coef, 2)
        elif len(idx) == 1:
            (i,) = idx
            m[i][k] += Fraction(coef, 2)
            m[k][i] += Fraction(coef, 2)
        else:
            m[k][k] += coef
    return tuple(tuple(row) for row in m)


# --- conics ---


class CurveClass(enum.Enum):
    ELLIPSE = "Ellipse"
    IMAGINARY_ELLIPSE = "ImaginaryEllipse"
    HYPERBOLA = "Hyperbola"
    PARABOLA = "Parabola"
    DEGENERATE_ELLIPSE = "DegenerateEllipse"
    DEGENERATE_HYPERBOLA = "DegenerateHyperbola"
    PARALLEL_LINES = "ParallelLines"
    COINCIDENT_LINES = "CoincidentLines"
    IMAGINARY_PARALLEL_LINES = "ImaginaryParallelLines"


@dataclass(frozen=True)
class ConicForm:
    a11: Fraction
    a22: Fraction
    a12: Fraction
    a13: Fraction
    a23: Fraction
    a3: Fraction

    def __post_init__(self):
        for name in ("a11", "a22", "a12", "a13", "a23", "a3"):
            value = Fraction(getattr(self, name))
            object.__setattr__(self, name, value)
            scale = 1 if name in ("a11", "a22", "a3") else 2
            if (value * scale).denominator != 1:
                raise ValueError(f"{name}={value} is not an integer multiple of 1/{scale}")

    @classmethod
    def from_polynomial(cls, p: Polynomial) -> ConicForm:
        if p.k > 2:
            raise NotQuadratic(f"{p} has more than two variables")
        m = symmetric_matrix(p, 2)
        return cls(m[0][0], m[1][1], m[0][1], m[0][2], m[1][2], m[2][2])

    @property
    def quadratic_part(self) -> Matrix:
        return ((self.a11, self.a12), (self.a12, self.a22))

    @property
    def matrix(self) -> Matrix:
        return (
            (self.a11, self.a12, self.a13),
            (self.a12, self.a22, self.a23),
            (self.a13, self.a23, self.a3),
        )


@dataclass(frozen=True)
class ConicInvariants:
    D: Fraction
    delta: Fraction


def conic_invariants(c: ConicForm) -> ConicInvariants:
    return ConicInvariants(D=c.a11 * c.a22 - c.a12**2, delta=det(c.matrix))


def _require_quadratic(q: Matrix):
    if all(x == 0 for row in q for x in row):
        raise NotQuadratic("the quadratic part vanishes")


def classify_conic(c: ConicForm) -> CurveClass:
    q = c.quadratic_part
    _require_quadratic(q)
    p, n, _ = inertia(q)
    P, Nm, _ = inertia(c.matrix)
    r, R = p + n, P + Nm
    q_definite = p == r or n == r
    m_definite = P == R or Nm == R
    if R == 3:
        if r == 2:
            if q_definite:
                return CurveClass.IMAGINARY_ELLIPSE if m_definite else CurveClass.ELLIPSE
            return CurveClass.HYPERBOLA
        return CurveClass.PARABOLA
    if R == 2:
        if r == 2:
            return CurveClass.DEGENERATE_ELLIPSE if q_definite else CurveClass.DEGENERATE_HYPERBOLA
        return CurveClass.IMAGINARY_PARALLEL_LINES if m_definite else CurveClass.PARALLEL_LINES
    return CurveClass.COINCIDENT_LINES


def degenerate_point(c: ConicForm) -> tuple[Fraction, Fraction] | None:
    """Real point of a degenerate ellipse: the center, cross term included."""
    D = c.a11 * c.a22 - c.a12**2
    if D == 0:
        return None
    x = (-c.a13 * c.a22 + c.a23 * c.a12) / D
    y = (-c.a23 * c.a11 + c.a13 * c.a12) / D
    return x, y


# --- quadrics ---


class SurfaceClass(enum.Enum):
    ELLIPSOID = "Ellipsoid"
    IMAGINARY_ELLIPSOID = "ImaginaryEllipsoid"
    ONE_SHEETED_HYPERBOLOID = "OneSheetedHyperboloid"
    TWO_SHEETED_HYPERBOLOID = "TwoSheetedHyperboloid"
    ELLIPTIC_PARABOLOID = "EllipticParaboloid"
    HYPERBOLIC_PARABOLOID = "HyperbolicParaboloid"
    REAL_CONE = "RealCone"
    IMAGINARY_CONE = "ImaginaryCone"
    ELLIPTIC_CYLINDER = "EllipticCylinder"
    IMAGINARY_ELLIPTIC_CYLINDER = "ImaginaryEllipticCylinder"
    PARABOLIC_CYLINDER = "ParabolicCylinder"
    HYPERBOLIC_CYLINDER = "HyperbolicCylinder"
    INTERSECTING_PLANES = "PairOfIntersectingPlanes"
    IMAGINARY_INTERSECTING_PLANES = "PairOfImaginaryIntersectingPlanes"
    PARALLEL_PLANES = "PairOfParallelPlanes"
    IMAGINARY_PARALLEL_PLANES = "PairOfImaginaryParallelPlanes"
    COINCIDENT_PLANES = "PairOfCoincidentPlanes"


@dataclass(frozen=True)
class QuadricForm:
    """Symmetric (k+1)x(k+1) matrix; the leading k x k block is the quadratic part."""

    matrix: Matrix
    k: int

    def __post_init__(self):
        m = tuple(tuple(Fraction(x) for x in row) for row in self.matrix)
        object.__setattr__(self, "matrix", m)
        if len(m) != self.k + 1 or any(len(row) != self.k + 1 for row in m):
            raise ValueError(f"matrix must be {self.k + 1}x{self.k + 1}")
        for i in range(self.k + 1):
            for j in range(self.k + 1):
                if m[i][j] != m[j][i]:
                    raise ValueError("matrix is not symmetric")
                if (2 * m[i][j]).denominator != 1:
                    raise ValueError("entries must be integer multiples of 1/2")

    @classmethod
    def from_polynomial(cls, p: Polynomial, k: int | None = None) -> QuadricForm:
        k = max(p.k, k or 0, 3)
        return cls(symmetric_matrix(p, k), k)

    @property
    def quadratic_part(self) -> Matrix:
        return tuple(row[: self.k] for row in self.matrix[: self.k])


@dataclass(frozen=True)
class QuadricInvariants:
    I: Fraction
    A_prime: Fraction
    J: Fraction
    detD: Fraction
    detA: Fraction


def quadric_invariants(q: QuadricForm) -> QuadricInvariants:
    d = q.quadratic_part
    k = q.k
    return QuadricInvariants(
        I=sum((d[i][i] for i in range(k)), Fraction(0)),
        A_prime=sum((det(_minor(q.matrix, i)) for i in range(k + 1)), Fraction(0)),
        J=sum(
            (d[i][i] * d[j][j] - d[i][j] ** 2 for i in range(k) for j in range(i + 1, k)),
            Fraction(0),
        ),
        detD=det(d),
        detA=det(q.matrix),
    )


def _surface_from_inertia(qi: tuple[int, int, int], mi: tuple[int, int, int], k: int) -> SurfaceClass:
    p, n, _ = qi
    P, Nm, _ = mi
    r, R = p + n, P + Nm
    q_definite = p == r or n == r
    m_definite = P == R or Nm == R
    S = SurfaceClass
    if R == r + 2:
        if r == k - 1:
            return S.ELLIPTIC_PARABOLOID if q_definite else S.HYPERBOLIC_PARABOLOID
        return S.PARABOLIC_CYLINDER
    if R == r + 1:
        if r == 1:
            return S.IMAGINARY_PARALLEL_PLANES if m_definite else S.PARALLEL_PLANES
        if q_definite:
            if r == k:
                return S.IMAGINARY_ELLIPSOID if m_definite else S.ELLIPSOID
            return S.IMAGINARY_ELLIPTIC_CYLINDER if m_definite else S.ELLIPTIC_CYLINDER
        if r == k:
            return S.ONE_SHEETED_HYPERBOLOID if min(P, Nm) >= 2 else S.TWO_SHEETED_HYPERBOLOID
        return S.HYPERBOLIC_CYLINDER
    if r == 1:
        return S.COINCIDENT_PLANES
    if r == 2:
        return S.IMAGINARY_INTERSECTING_PLANES if q_definite else S.INTERSECTING_PLANES
    return S.IMAGINARY_CONE if q_definite else S.REAL_CONE


# classical determinant tests for three-variable surfaces
_DETERMINANT_TESTS = {
    SurfaceClass.ELLIPSOID: ("|A| < 0, |D| != 0, I|D| > 0",
                             lambda v: v.detA < 0 and v.detD != 0 and v.I * v.detD > 0),
    SurfaceClass.IMAGINARY_ELLIPSOID: ("|A| > 0, |D| != 0, I|D| < 0",
                                       lambda v: v.detA > 0 and v.detD != 0 and v.I * v.detD < 0),
    SurfaceClass.TWO_SHEETED_HYPERBOLOID: ("|A| < 0, |D| != 0, I|D| < 0",
                                           lambda v: v.detA < 0 and v.detD != 0 and v.I * v.detD < 0),
    SurfaceClass.ONE_SHEETED_HYPERBOLOID: ("|A| > 0, |D| != 0, I|D| < 0",
                                           lambda v: v.detA > 0 and v.detD != 0 and v.I * v.detD < 0),
    SurfaceClass.ELLIPTIC_PARABOLOID: ("|A| < 0, |D| = 0",
                                       lambda v: v.detA < 0 and v.detD == 0),
    SurfaceClass.REAL_CONE: ("|A| = 0, |D| != 0, I|D| <= 0",
                             lambda v: v.detA == 0 and v.detD != 0 and v.I * v.detD <= 0),
    SurfaceClass.IMAGINARY_CONE: ("|A| = 0, |D| != 0, I|D| > 0",
                                  lambda v: v.detA == 0 and v.detD != 0 and v.I * v.detD > 0),
}


def determinant_condition_warnings(surface: SurfaceClass, inv: QuadricInvariants) -> list[str]:
    warnings = []
    if surface in _DETERMINANT_TESTS:
        text, test = _DETERMINANT_TESTS[surface]
        if not test(inv):
            warnings.append(
                f"determinant test for {surface.value} ({text}) fails although inertia gives {surface.value}"
            )
    for other, (text, test) in _DETERMINANT_TESTS.items():
        if other is not surface and test(inv):
            warnings.append(
                f"determinant test ({text}) indicates {other.value} but inertia gives {surface.value}"
            )
    return warnings


@dataclass(frozen=True)
class QuadricClassification:
    surface: SurfaceClass
    warnings: tuple[str, ...] = ()


def classify_quadric(q: QuadricForm) -> QuadricClassification:
    if q.k < 3:
        raise ValueError("use classify_conic for two variables")
    d = q.quadratic_part
    _require_quadratic(d)
    surface = _surface_from_inertia(inertia(d), inertia(q.matrix), q.k)
    warnings = ()
    if q.k == 3:
        warnings = tuple(determinant_condition_warnings(surface, quadric_invariants(q)))
    return QuadricClassification(surface, warnings)


# --- count bounds ---


class BoundCategory(enum.Enum):
    NO_SOLUTIONS = "NoSolutions"
    FINITE_CONSTANT = "FiniteConstant"
    AT_MOST = "AtMost"


@dataclass(frozen=True)
class BoundFormula:
    """Sum of terms ``coef * N**power``; a ``None`` coefficient is the
    class-specific finite constant ``c``."""

    terms: tuple[tuple[int | None, int], ...]

    def evaluate(self, N: int, c: int = 0) -> int:
        return sum((c if coef is None else coef) * N**power for coef, power in self.terms)

    def __str__(self):
        parts = []
        for coef, power in self.terms:
            n_part = "" if power == 0 else ("N" if power == 1 else f"N^{power}")
            if coef is None:
                parts.append(f"c*{n_part}" if n_part else "c")
            elif coef == 1 and n_part:
                parts.append(n_part)
            else:
                parts.append(f"{coef}*{n_part}" if n_part else str(coef))
        return " + ".join(parts)


@dataclass(frozen=True)
class BoundPrediction:
    category: BoundCategory
    formula: BoundFormula | None
    density_case: int
    note: str = field(default="", compare=False)

    def holds(self, N: int, pi: int, c: int = 0) -> bool:
        """Check one count against an AtMost or NoSolutions prediction.

        FiniteConstant needs several sizes to check; see ``holds_over``.
        """
        if self.category is BoundCategory.NO_SOLUTIONS:
            return pi == 0
        if self.category is BoundCategory.AT_MOST:
            return pi <= self.formula.evaluate(N, c)
        raise ValueError("a FiniteConstant prediction cannot be checked at a single N")

    def holds_over(self, counts: Sequence[tuple[int, int]], c: int = 0) -> bool:
        if self.category is BoundCategory.FINITE_CONSTANT:
            return len({pi for _, pi in counts}) <= 1
        return all(self.holds(N, pi, c) for N, pi in counts)


def _at_most(*terms, note="") -> BoundPrediction:
    return BoundPrediction(BoundCategory.AT_MOST, BoundFormula(tuple(terms)), 2, note)


_FINITE = BoundPrediction(BoundCategory.FINITE_CONSTANT, None, 1)
_NONE = BoundPrediction(BoundCategory.NO_SOLUTIONS, None, 1)

ShapeClass = Union[CurveClass, SurfaceClass, None]


def predict_bound(shape: ShapeClass, n: int, k: int) -> BoundPrediction:
    """Count bound and asymptotic-density case for a classified equation.

    ``shape=None`` gives the generic degree-``n`` bound ``n*N^(k-1)``.
    Surface bounds are stated for three variables; each extra variable
    multiplies them by ``N``.
    """
    generic = _at_most((n, k - 1), note="generic degree bound")
    C, S = CurveClass, SurfaceClass
    if shape is None:
        return generic
    if shape in (C.ELLIPSE, C.DEGENERATE_ELLIPSE, S.ELLIPSOID, S.IMAGINARY_CONE):
        return _FINITE
    if shape in (C.IMAGINARY_ELLIPSE, C.IMAGINARY_PARALLEL_LINES, S.IMAGINARY_ELLIPSOID,
                 S.IMAGINARY_ELLIPTIC_CYLINDER, S.IMAGINARY_PARALLEL_PLANES):
        return _NONE
    if shape is C.DEGENERATE_HYPERBOLA:
        return _at_most((2, 1))
    if shape is C.PARALLEL_LINES:
        return _at_most((n, 1))
    if shape is C.COINCIDENT_LINES:
        return _at_most((1, 1))
    if isinstance(shape, CurveClass):
        return generic
    extra = k - 3
    table = {
        S.ELLIPTIC_CYLINDER: ((None, 1 + extra),),
        S.PARABOLIC_CYLINDER: ((1, 2 + extra),),
        S.HYPERBOLIC_CYLINDER: ((1, 2 + extra),),
        S.INTERSECTING_PLANES: ((1, 2 + extra), (None, 1 + extra)),
        S.PARALLEL_PLANES: ((2, 2 + extra),),
        S.COINCIDENT_PLANES: ((1, 2 + extra),),
        S.IMAGINARY_INTERSECTING_PLANES: ((1, 1 + extra),),
    }
    if shape in table:
        return _at_most(*table[shape])
    return generic


# --- one-call classification of a parsed polynomial ---


@dataclass(frozen=True)
class Classification:
    k: int
    shape: CurveClass | SurfaceClass
    invariants: ConicInvariants | QuadricInvariants
    bound: BoundPrediction
    warnings: tuple[str, ...] = ()
    point: tuple[Fraction, Fraction] | None = None


def classify_polynomial(p: Polynomial, k: int | None = None) -> Classification:
    """Classify a degree-2 polynomial as a curve (k=2) or surface (k>=3)."""
    if p.degree != 2:
        raise NotQuadratic(f"{p} is of degree {p.degree}, not 2")
    k = max(p.k, k or 0, 2)
    if k == 2:
        form = ConicForm.from_polynomial(p)
        shape = classify_conic(form)
        point = degenerate_point(form) if shape is CurveClass.DEGENERATE_ELLIPSE else None
        return Classification(2, shape, conic_invariants(form), predict_bound(shape, 2, 2), (), point)
    form = QuadricForm.from_polynomial(p, k)
    result = classify_quadric(form)
    return Classification(
        k, result.surface, quadric_invariants(form), predict_bound(result.surface, 2, k), result.warnings
    )
