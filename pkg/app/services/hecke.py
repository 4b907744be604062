"""Exact arithmetic of the Hecke correspondence T_p on PSL(2,Z)\\H.

Branches of T_p are the left cosets Gamma*M of integral matrices of determinant
p; a coset is identified by its Hermite normal form. Iterates are decomposed
into primitive levels (matrices of determinant p^j with content 1) plus
scalar multiples, which act trivially on the surface.
"""

import logging
from collections import Counter, defaultdict
from collections.abc import Iterable
from fractions import Fraction

import sympy
from sympy.core.intfunc import igcdex

from app.config import get_settings
from app.errors import BudgetExceededError, NonPrimeError, RegularityError
from app.models.arithmetic import (
    ContentFilter,
    CosetClass,
    DecompositionMethod,
    IntMatrix2,
    IsometryKind,
    PowerDecomposition,
    WeightedPoint,
    level_degree,
)
from app.services import forms, fundamental_domain

logger = logging.getLogger(__name__)

MAX_PRIME = 97
TORSION_NOTE = (
    "Gamma = PSL(2,Z) has torsion; the orbifold points i and exp(2 pi i/3) carry "
    "Hurwitz weights 1/2 and 1/3"
)


def _check_prime(p: int) -> None:
    if not 2 <= p <= MAX_PRIME or not sympy.isprime(p):
        raise NonPrimeError(f"p must be a prime <= {MAX_PRIME}, got {p}")


def coset_reps(p: int) -> list[IntMatrix2]:
    """The p + 1 branches [[1, k], [0, p]] (0 <= k < p) and [[p, 0], [0, 1]].

    Raises:
        NonPrimeError: If ``p`` is not a prime up to 97.
    """
    _check_prime(p)
    reps = [IntMatrix2(1, k, 0, p) for k in range(p)]
    reps.append(IntMatrix2(p, 0, 0, 1))
    return reps


def hnf(m: IntMatrix2) -> CosetClass:
    """Hermite normal form of the left coset Gamma*M.

    Left multiplication by gamma = [[u, v], [-c/g, a/g]] with ua + vc = g clears
    the lower-left entry; a unipotent row operation then reduces beta mod delta.
    """
    g_x, g_y, g = igcdex(m.a, m.c)
    if g < 0:
        g_x, g_y, g = -g_x, -g_y, -g
    beta = g_x * m.b + g_y * m.d
    delta = m.det // g
    return CosetClass(int(g), int(beta % delta), int(delta))


def classify(m: IntMatrix2) -> tuple[IsometryKind, int]:
    """Conjugacy type of the primitive part of ``m`` and its content.

    Only elliptic matrices have a fixed point in H, and it is isolated; a
    scalar-acting matrix fixes every point, so none is isolated.
    """
    content = m.content
    primitive = m.scaled_down(content)
    if primitive.b == 0 and primitive.c == 0 and primitive.a == primitive.d:
        return IsometryKind.SCALAR_ACTING, content
    discriminant = primitive.trace**2 - 4 * primitive.det
    if discriminant < 0:
        return IsometryKind.ELLIPTIC, content
    if discriminant == 0:
        return IsometryKind.PARABOLIC, content
    return IsometryKind.HYPERBOLIC, content


def _p_valuation(value: int, p: int) -> int:
    exponent = 0
    while value % p == 0:
        value //= p
        exponent += 1
    if value != 1:
        raise RegularityError(f"Content {value * p**exponent} is not a power of {p}")
    return exponent


def _level_tally(
    p: int, n: int, classes: Iterable[tuple[CosetClass, int]]
) -> dict[int, int]:
    """Group coset multiplicities by primitive level and check regularity."""
    tally: dict[int, Counter] = defaultdict(Counter)
    for coset, mult in classes:
        content = coset.content
        level = n - 2 * _p_valuation(content, p)
        tally[level][coset.scaled_down(content)] += mult

    multiplicities = {}
    for level, cosets in sorted(tally.items(), reverse=True):
        values = set(cosets.values())
        if len(values) != 1 or len(cosets) != level_degree(p, level):
            raise RegularityError(
                f"Level {level} of T_{p}^{n}: {len(cosets)} cosets with tallies "
                f"{sorted(values)}, expected {level_degree(p, level)} equal tallies"
            )
        multiplicities[level] = values.pop()
    return multiplicities


def _exhaustive_classes(p: int, n: int) -> Counter:
    reps = coset_reps(p)
    classes: Counter = Counter()

    def descend(product: IntMatrix2, depth: int) -> None:
        if depth == n:
            classes[hnf(product)] += 1
            return
        for rep in reps:
            descend(product @ rep, depth + 1)

    descend(IntMatrix2(1, 0, 0, 1), 0)
    return classes


def iterate_cosets(p: int, n: int) -> Counter:
    """Cosets of all length-n branch products with the number of words for each.

    Composes the correspondence with T_p one letter at a time, keeping one entry
    per coset; Gamma*M*R depends only on Gamma*M.
    """
    reps = coset_reps(p)
    state: Counter = Counter({CosetClass(1, 0, 1): 1})
    for _ in range(n):
        following: Counter = Counter()
        for coset, mult in state.items():
            matrix = coset.as_matrix()
            for rep in reps:
                following[hnf(matrix @ rep)] += mult
        state = following
    return state


def power_decomposition(
    p: int, n: int, method: DecompositionMethod = DecompositionMethod.COMPOSED
) -> PowerDecomposition:
    """Multiplicities m_{n,j} of the primitive levels j in T_p^n.

    Raises:
        BudgetExceededError: If exhaustive enumeration exceeds the word budget.
        RegularityError: If tallies are not constant across the cosets of a level.
    """
    _check_prime(p)
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    if method is DecompositionMethod.EXHAUSTIVE:
        budget = get_settings().budgets.hecke_words
        if (p + 1) ** n > budget:
            raise BudgetExceededError(
                f"(p+1)^n = {(p + 1) ** n} exceeds the Hecke word budget {budget}"
            )
        classes = _exhaustive_classes(p, n)
    else:
        classes = iterate_cosets(p, n)

    multiplicities = _level_tally(p, n, classes.items())
    logger.debug("T_%d^%d decomposes as %s (%s)", p, n, multiplicities, method.value)
    return PowerDecomposition(p, n, multiplicities)


def level_fixed_points(p: int, j: int) -> list:
    """Elliptic fixed points of the primitive correspondence of determinant p^j."""
    return forms.elliptic_fixed_points(p**j, ContentFilter.PRIME_TO_P, p)


def fixed_point_measure(
    p: int, n: int, method: DecompositionMethod = DecompositionMethod.COMPOSED
) -> tuple[list[WeightedPoint], Fraction, PowerDecomposition]:
    """Isolated fixed points P_n of T_p^n and the exact ratio |P_n| / (p+1)^n.

    Level 0 (scalar-acting words) is excluded: every point is fixed there and
    none is isolated. Each level j >= 1 contributes m_{n,j} copies of the
    elliptic fixed points of determinant p^j with content prime to p.

    Returns:
        Tuple of (weighted points, exact ratio, decomposition used).
    """
    decomposition = power_decomposition(p, n, method)
    points: list[WeightedPoint] = []
    weighted = Fraction(0)
    for level, mult in sorted(decomposition.multiplicities.items()):
        if level == 0:
            continue
        fixed = level_fixed_points(p, level)
        weighted += mult * forms.weighted_count(fixed)
        points.extend(
            WeightedPoint(point.z, mult * point.weight, level=level, source=point)
            for point in fixed
        )
    ratio = weighted / (p + 1) ** n
    logger.info("Fixed points of T_%d^%d: ratio %s", p, n, ratio)
    return points, ratio, decomposition


def hecke_orbit(p: int, n: int, z0: complex) -> list[WeightedPoint]:
    """Pushforward of the Dirac mass at z0 by T_p^n, reduced to F.

    One point per coset of length-n branch products, weighted by the number of
    words landing in that coset; total weight (p+1)^n.
    """
    _check_prime(p)
    budget = get_settings().budgets.hecke_words
    if (p + 1) ** n > budget:
        raise BudgetExceededError(
            f"(p+1)^n = {(p + 1) ** n} exceeds the Hecke word budget {budget}"
        )
    points = []
    for coset, mult in sorted(iterate_cosets(p, n).items()):
        image = fundamental_domain.reduce_to_F(coset.as_matrix().act(z0))
        points.append(WeightedPoint(z=image, weight=mult, level=n))
    return points
