"""Reduced binary quadratic forms, Hurwitz class numbers and elliptic classes.

Elliptic Gamma-classes of determinant N and trace t correspond to reduced
forms of discriminant t^2 - 4N, so the isolated fixed points of a Hecke
correspondence are read off a sweep over traces. The class-number relation

    sum_{t^2 <= 4N} H(4N - t^2) = sum_{d | N} max(d, N/d)

gives an independent oracle for the weighted counts.
"""

import logging
import math
from collections.abc import Iterable
from fractions import Fraction

import sympy

from app.config import get_settings
from app.errors import BudgetExceededError, InvalidDiscriminantError
from app.models.arithmetic import (
    ContentFilter,
    EllipticFixedPoint,
    IntMatrix2,
    QuadForm,
)

logger = logging.getLogger(__name__)

MAX_DETERMINANT = 2**50
HALF = Fraction(1, 2)
THIRD = Fraction(1, 3)


def form_weight(form: QuadForm) -> Fraction:
    """1/2 for multiples of x^2 + y^2, 1/3 for multiples of x^2 + xy + y^2, else 1."""
    if form.a == form.c and form.b == 0:
        return HALF
    if form.a == form.b == form.c:
        return THIRD
    return Fraction(1)


def reduced_forms(discriminant: int) -> list[tuple[QuadForm, Fraction]]:
    """All reduced forms of a negative discriminant, imprimitive ones included.

    Args:
        discriminant: D < 0 with D = 0 or 1 mod 4.

    Returns:
        (form, weight) pairs ordered by (b, a).

    Raises:
        InvalidDiscriminantError: If D is not a negative discriminant.
    """
    if discriminant >= 0 or discriminant % 4 not in (0, 1):
        raise InvalidDiscriminantError(
            f"{discriminant} is not a negative discriminant (0 or 1 mod 4)"
        )
    size = -discriminant
    found = []
    b_max = math.isqrt(size // 3)
    for b in range(-b_max, b_max + 1):
        if (b - discriminant) % 2:
            continue
        ac = (b * b - discriminant) // 4
        for a in sympy.divisors(ac):
            c = ac // a
            if a < abs(b) or a > c:
                continue
            form = QuadForm(a, b, c)
            if form.is_reduced():
                found.append((form, form_weight(form)))
    return found


def hurwitz_twelfths(n_max: int) -> list[int]:
    """Table of 12*H(n) for 0 <= n <= n_max, from one sweep over reduced forms.

    Entry 0 holds 12*H(0) = -1.
    """
    table = [0] * (n_max + 1)
    table[0] = -1
    a = 1
    while 3 * a * a <= n_max:
        for b in range(-a + 1, a + 1):
            c = a
            while (n := 4 * a * c - b * b) <= n_max:
                if not (a == c and b < 0):
                    if b == 0 and a == c:
                        table[n] += 6
                    elif a == b == c:
                        table[n] += 4
                    else:
                        table[n] += 12
                c += 1
        a += 1
    return table


def hurwitz(n: int) -> Fraction:
    """Hurwitz class number H(n) with H(0) = -1/12 and H(n) = 0 for n = 1, 2 mod 4."""
    if n < 0:
        raise ValueError(f"H(n) needs n >= 0, got {n}")
    if n == 0:
        return Fraction(-1, 12)
    if n % 4 in (1, 2):
        return Fraction(0)
    return sum((weight for _, weight in reduced_forms(-n)), Fraction(0))


def elliptic_fixed_points(
    determinant: int,
    content_filter: ContentFilter = ContentFilter.ALL,
    p: int | None = None,
) -> list[EllipticFixedPoint]:
    """Elliptic classes of integral matrices of a given determinant.

    For each trace t with t^2 < 4N and each reduced form (a, b, c) of
    discriminant t^2 - 4N, the matrix [[(t-b)/2, -c], [a, (t+b)/2]] has trace
    t and determinant N and fixes the root (-b + sqrt(t^2 - 4N)) / (2a) of the
    form, which lies in the closed fundamental domain.

    Args:
        determinant: N >= 1, at most 2^50.
        content_filter: ``PRIME_TO_P`` keeps matrices whose content is prime to p.
        p: The prime for ``PRIME_TO_P``.

    Returns:
        Fixed points ordered by trace, then by form.
    """
    if not 1 <= determinant <= MAX_DETERMINANT:
        raise ValueError(f"Determinant must lie in [1, 2^50], got {determinant}")
    if content_filter is ContentFilter.PRIME_TO_P and p is None:
        raise ValueError("PRIME_TO_P filtering needs p")

    t_max = math.isqrt(4 * determinant - 1)
    points = []
    for t in range(-t_max, t_max + 1):
        for form, weight in reduced_forms(t * t - 4 * determinant):
            matrix = IntMatrix2((t - form.b) // 2, -form.c, form.a, (t + form.b) // 2)
            if content_filter is ContentFilter.PRIME_TO_P and matrix.content % p == 0:
                continue
            points.append(EllipticFixedPoint(t, form, matrix, weight))
    logger.debug(
        "Determinant %d (%s): %d elliptic classes",
        determinant,
        content_filter.value,
        len(points),
    )
    return points


def weighted_count(points: Iterable[EllipticFixedPoint]) -> Fraction:
    """Sum of Hurwitz weights."""
    return sum((point.weight for point in points), Fraction(0))


def divisor_side(n: int) -> int:
    """sum over d | N of max(d, N/d)."""
    return sum(max(d, n // d) for d in sympy.divisors(n))


def class_relation_check(n: int, table: list[int] | None = None) -> Fraction:
    """Residual of the Hurwitz class-number relation at N; zero when it holds.

    Args:
        n: N >= 1, bounded by the relation budget.
        table: Optional ``hurwitz_twelfths`` table covering 4N.

    Raises:
        BudgetExceededError: If N exceeds the configured relation budget.
    """
    budget = get_settings().budgets.relation_n
    if n > budget:
        raise BudgetExceededError(f"N = {n} exceeds the relation budget {budget}")
    if n < 1:
        raise ValueError(f"N must be positive, got {n}")
    if table is None or len(table) <= 4 * n:
        table = hurwitz_twelfths(4 * n)
    t_max = math.isqrt(4 * n)
    twelfths = sum(table[4 * n - t * t] for t in range(-t_max, t_max + 1))
    return Fraction(twelfths, 12) - divisor_side(n)
