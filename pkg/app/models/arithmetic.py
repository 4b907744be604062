"""Exact value types for Hecke correspondences on the modular surface.

All integer fields are Python ints, so intermediate products never overflow;
callers enforce the documented size guards instead.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction


@dataclass(frozen=True, slots=True)
class IntMatrix2:
    """Integral 2x2 matrix [[a, b], [c, d]] with positive determinant."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.det <= 0:
            raise ValueError(f"Determinant must be positive, got {self.det}")

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> int:
        return self.a + self.d

    @property
    def content(self) -> int:
        return math.gcd(self.a, self.b, self.c, self.d)

    def __matmul__(self, other: "IntMatrix2") -> "IntMatrix2":
        return IntMatrix2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def scaled_down(self, factor: int) -> "IntMatrix2":
        """Exact division of every entry by ``factor``."""
        return IntMatrix2(
            self.a // factor, self.b // factor, self.c // factor, self.d // factor
        )

    def act(self, z: complex) -> complex:
        """Moebius action z -> (az + b)/(cz + d) on the upper half-plane."""
        return (self.a * z + self.b) / (self.c * z + self.d)


@dataclass(frozen=True, slots=True, order=True)
class CosetClass:
    """Hermite normal form [[alpha, beta], [0, delta]] of a left coset Gamma*M.

    alpha, delta > 0 and 0 <= beta < delta.
    """

    alpha: int
    beta: int
    delta: int

    @property
    def det(self) -> int:
        return self.alpha * self.delta

    @property
    def content(self) -> int:
        return math.gcd(self.alpha, self.beta, self.delta)

    def as_matrix(self) -> IntMatrix2:
        return IntMatrix2(self.alpha, self.beta, 0, self.delta)

    def scaled_down(self, factor: int) -> "CosetClass":
        return CosetClass(
            self.alpha // factor, self.beta // factor, self.delta // factor
        )


class IsometryKind(str, Enum):
    """Conjugacy type of the map z -> Mz on the upper half-plane."""

    SCALAR_ACTING = "scalar-acting"
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    HYPERBOLIC = "hyperbolic"


class DecompositionMethod(str, Enum):
    """How the iterate T_p^n is decomposed into primitive levels."""

    EXHAUSTIVE = "exhaustive"
    COMPOSED = "composed"


def level_degree(p: int, j: int) -> int:
    """Degree of the primitive correspondence of determinant p^j."""
    return 1 if j == 0 else p**j + p ** (j - 1)


@dataclass(frozen=True)
class PowerDecomposition:
    """T_p^n as a sum of primitive correspondences with multiplicities m_{n,j}."""

    p: int
    n: int
    multiplicities: dict[int, int]

    def __post_init__(self):
        for j in self.multiplicities:
            if not 0 <= j <= self.n or (self.n - j) % 2:
                raise ValueError(f"Level {j} is not admissible for n = {self.n}")
        if self.total_degree() != (self.p + 1) ** self.n:
            raise ValueError(
                f"Degree law fails: {self.total_degree()} != {(self.p + 1) ** self.n}"
            )

    def total_degree(self) -> int:
        return sum(m * level_degree(self.p, j) for j, m in self.multiplicities.items())


@dataclass(frozen=True, slots=True)
class QuadForm:
    """Positive definite binary quadratic form ax^2 + bxy + cy^2."""

    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    @property
    def content(self) -> int:
        return math.gcd(self.a, self.b, self.c)

    def is_reduced(self) -> bool:
        """|b| <= a <= c, with b >= 0 when |b| = a or a = c."""
        if not abs(self.b) <= self.a <= self.c:
            return False
        if abs(self.b) == self.a or self.a == self.c:
            return self.b >= 0
        return True


class ContentFilter(str, Enum):
    """Which elliptic matrices count as fixed points of a level."""

    ALL = "all"
    PRIME_TO_P = "prime-to-p"


@dataclass(frozen=True, slots=True)
class EllipticFixedPoint:
    """Elliptic Gamma-class of determinant N and trace t, with its fixed point.

    The fixed point z = (-b + i*sqrt(4N - t^2)) / (2a) is stored exactly as
    the triple (-b, 4N - t^2, 2a) and as a floating complex number.
    """

    trace: int
    form: QuadForm
    matrix: IntMatrix2
    weight: Fraction

    @property
    def determinant(self) -> int:
        return self.matrix.det

    @property
    def exact_location(self) -> tuple[int, int, int]:
        """(real numerator, squared imaginary numerator, denominator)."""
        return (-self.form.b, -self.form.discriminant, 2 * self.form.a)

    @property
    def x(self) -> Fraction:
        return Fraction(-self.form.b, 2 * self.form.a)

    @property
    def y_squared(self) -> Fraction:
        return Fraction(-self.form.discriminant, 4 * self.form.a**2)

    @property
    def z(self) -> complex:
        real, imag_sq, denom = self.exact_location
        return complex(real / denom, math.sqrt(imag_sq) / denom)


@dataclass(frozen=True, slots=True)
class WeightedPoint:
    """Point of the fundamental domain with an exact or floating weight."""

    z: complex
    weight: Fraction | float
    level: int = 0
    source: EllipticFixedPoint | None = field(default=None, compare=False)


@dataclass(frozen=True, slots=True)
class FundDomainCell:
    """Rectangle [x1, x2) x [y1, y2) with y1 >= 1 inside F, or the residual cell.

    The residual cell is F intersected with {y < 1}; ``y2`` may be infinite.
    The whole-domain cell stands alone as a one-cell partition.
    """

    x1: float = -0.5
    x2: float = 0.5
    y1: float = 1.0
    y2: float = math.inf
    residual: bool = False
    whole: bool = False

    def __post_init__(self):
        if self.residual or self.whole:
            return
        if not -0.5 <= self.x1 < self.x2 <= 0.5:
            raise ValueError(f"Bad x-interval [{self.x1}, {self.x2})")
        if not 1.0 <= self.y1 < self.y2:
            raise ValueError(f"Bad y-interval [{self.y1}, {self.y2})")

    @classmethod
    def residual_cell(cls) -> "FundDomainCell":
        return cls(residual=True)

    @classmethod
    def whole_domain(cls) -> "FundDomainCell":
        return cls(whole=True)

    @property
    def label(self) -> str:
        if self.whole:
            return "F"
        if self.residual:
            return "F & y<1"
        return f"x[{self.x1:g},{self.x2:g}) y[{self.y1:g},{self.y2:g})"

    def contains(self, z: complex) -> bool:
        """Membership of a point already reduced to F."""
        if self.whole:
            return True
        if self.residual:
            return z.imag < 1.0
        return self.x1 <= z.real < self.x2 and self.y1 <= z.imag < self.y2
