"""Enumeration of the word sets H_n over a generator system.

Words are visited depth-first in lexicographic order. A run can be split into
independent tasks by fixing the length-k prefix; the task index enumerates
prefixes in the same lexicographic order, so merging per-task results in
ascending task order reproduces the unpartitioned traversal.
"""

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from functools import reduce

import numpy as np

from app.errors import PartitionError, WordCountOverflowError
from app.models.geometry import GeneratorMode, UnitQuaternion, Word
from app.services import rotor

logger = logging.getLogger(__name__)

INT64_MAX = 2**63 - 1
DEFAULT_PARTITION_DEPTH = 8
MIN_TASK_WORDS = 4096
_INVERSE_TOL = 1e-10

# Quaternions of norm 5 with w = 1: they generate a free subgroup of SO(3).
_SQRT5 = math.sqrt(5.0)
LPS5 = (
    UnitQuaternion.from_components(1 / _SQRT5, 2 / _SQRT5, 0.0, 0.0),
    UnitQuaternion.from_components(1 / _SQRT5, 0.0, 2 / _SQRT5, 0.0),
    UnitQuaternion.from_components(1 / _SQRT5, 0.0, 0.0, 2 / _SQRT5),
)

Visitor = Callable[[Word, UnitQuaternion], None]


@dataclass(frozen=True)
class GeneratorSystem:
    """Ordered generator list and the rule for forming words.

    In ``GROUP`` mode the list has even length 2d and generators i and
    2d-1-i are mutually inverse; words are reduced.
    """

    generators: tuple[UnitQuaternion, ...]
    mode: GeneratorMode = GeneratorMode.SEMIGROUP

    def __post_init__(self):
        if not self.generators:
            raise ValueError("Generator system needs at least one generator")
        if self.mode is GeneratorMode.GROUP:
            size = len(self.generators)
            if size % 2:
                raise ValueError(f"Group mode needs an even alphabet, got {size}")
            for i in range(size // 2):
                product = rotor.compose(
                    self.generators[i], self.generators[self.inverse_index(i)]
                )
                if rotor.rotation_angle(product) > _INVERSE_TOL:
                    raise ValueError(
                        f"Generators {i} and {self.inverse_index(i)} are not inverse"
                    )

    @property
    def alphabet_size(self) -> int:
        return len(self.generators)

    @property
    def degree(self) -> int:
        """Number of generators d (half the alphabet in group mode)."""
        if self.mode is GeneratorMode.GROUP:
            return self.alphabet_size // 2
        return self.alphabet_size

    def inverse_index(self, i: int) -> int:
        """Index of the inverse letter (group mode)."""
        return self.alphabet_size - 1 - i

    def as_array(self) -> np.ndarray:
        """Generators as an (m, 4) float64 array."""
        return np.stack([g.as_array() for g in self.generators])


def lps_system(mode: GeneratorMode = GeneratorMode.SEMIGROUP) -> GeneratorSystem:
    """The p = 5 preset.

    Semigroup mode uses the pair {q1, q2}; group mode uses q1, q2, q3 and their
    inverses in the order q1, q2, q3, q3^-1, q2^-1, q1^-1.
    """
    if mode is GeneratorMode.SEMIGROUP:
        return GeneratorSystem(LPS5[:2], mode)
    inverses = tuple(rotor.conjugate(q) for q in reversed(LPS5))
    return GeneratorSystem(LPS5 + inverses, mode)


def group_closure(generators: Sequence[UnitQuaternion]) -> GeneratorSystem:
    """Group-mode system from generators g_1..g_d, appending inverses in reverse."""
    gens = tuple(generators)
    inverses = tuple(rotor.conjugate(q) for q in reversed(gens))
    return GeneratorSystem(gens + inverses, GeneratorMode.GROUP)


def word_count(system: GeneratorSystem, n: int) -> int:
    """Number of words of length n: d^n, or 2d(2d-1)^(n-1) reduced words.

    Raises:
        WordCountOverflowError: If the count exceeds the signed 64-bit range.
    """
    if n < 0:
        raise ValueError(f"Word length must be nonnegative, got {n}")
    size = system.alphabet_size
    if system.mode is GeneratorMode.SEMIGROUP:
        count = size**n
    else:
        count = 1 if n == 0 else size * (size - 1) ** (n - 1)
    if count > INT64_MAX:
        raise WordCountOverflowError(
            f"{count} words of length {n} exceed the 64-bit range"
        )
    return count


def default_depth(system: GeneratorSystem, n: int) -> int:
    """Default prefix-partition depth.

    Starts from min(n, 8) and moves toward the root while a task would hold
    fewer than ``MIN_TASK_WORDS`` words.
    """
    total = word_count(system, n)
    depth = min(n, DEFAULT_PARTITION_DEPTH)
    while depth > 0 and total // word_count(system, depth) < MIN_TASK_WORDS:
        depth -= 1
    return depth


def prefix_for_task(system: GeneratorSystem, depth: int, task: int) -> Word:
    """The length-``depth`` prefix owned by ``task``, in lexicographic order.

    Raises:
        PartitionError: If the task index is out of range.
    """
    total = word_count(system, depth)
    if not 0 <= task < total:
        raise PartitionError(f"Task {task} out of range for {total} prefixes")
    if depth == 0:
        return Word(())
    size = system.alphabet_size
    if system.mode is GeneratorMode.SEMIGROUP:
        letters = []
        for _ in range(depth):
            task, digit = divmod(task, size)
            letters.append(digit)
        return Word(tuple(reversed(letters)))

    # Mixed radix: size choices first, then size - 1 per position.
    block = (size - 1) ** (depth - 1)
    first, rest = divmod(task, block)
    letters = [first]
    for position in range(depth - 1, 0, -1):
        block = (size - 1) ** (position - 1)
        digit, rest = divmod(rest, block)
        forbidden = system.inverse_index(letters[-1])
        letters.append(digit if digit < forbidden else digit + 1)
    return Word(tuple(letters))


def _children(system: GeneratorSystem, last: int | None) -> range | list[int]:
    if system.mode is GeneratorMode.SEMIGROUP or last is None:
        return range(system.alphabet_size)
    forbidden = system.inverse_index(last)
    return [j for j in range(system.alphabet_size) if j != forbidden]


def evaluate(system: GeneratorSystem, word: Word) -> UnitQuaternion:
    """Left-to-right product of the word's letters."""
    return reduce(
        rotor.compose,
        (system.generators[i] for i in word.letters),
        UnitQuaternion.identity(),
    )


def _check_partition(system: GeneratorSystem, n: int, partition: tuple[int, int]):
    depth, task = partition
    if not 0 <= depth <= n:
        raise PartitionError(f"Partition depth {depth} outside [0, {n}]")
    return prefix_for_task(system, depth, task)


def enumerate_words(
    system: GeneratorSystem,
    n: int,
    visitor: Visitor,
    partition: tuple[int, int] = (0, 0),
) -> None:
    """Visit every length-n word under the task's prefix, depth-first.

    The product handed to the visitor is maintained incrementally, one
    quaternion product per tree edge, leftmost letter as leftmost factor.

    Args:
        system: Generator system.
        n: Word length.
        visitor: Called once per word with (word, product).
        partition: (depth k, task index); (0, 0) visits everything.
    """
    prefix = _check_partition(system, n, partition)
    letters = list(prefix.letters)
    start = evaluate(system, prefix)

    def descend(product: UnitQuaternion) -> None:
        if len(letters) == n:
            visitor(Word(tuple(letters)), product)
            return
        for j in _children(system, letters[-1] if letters else None):
            letters.append(j)
            descend(rotor.compose(product, system.generators[j]))
            letters.pop()

    descend(start)


def word_products(
    system: GeneratorSystem,
    n: int,
    partition: tuple[int, int] = (0, 0),
) -> np.ndarray:
    """Products of all length-n words under the task's prefix.

    Same order and the same one-product-per-edge evaluation as
    ``enumerate_words``, expanded one level at a time as (N, 4) arrays.

    Returns:
        Canonical-sign float64 array of shape (words under prefix, 4).
    """
    prefix = _check_partition(system, n, partition)
    gens = system.as_array()
    size = system.alphabet_size
    products = evaluate(system, prefix).as_array()[None, :]
    last = np.array([prefix.letters[-1] if prefix.letters else -1])

    for _ in range(n - len(prefix)):
        expanded = rotor.compose_batch(products[:, None, :], gens[None, :, :])
        expanded = expanded.reshape(-1, 4)
        letters = np.tile(np.arange(size), len(products))
        if system.mode is GeneratorMode.GROUP:
            parents = np.repeat(last, size)
            keep = (parents < 0) | (letters != size - 1 - parents)
            expanded, letters = expanded[keep], letters[keep]
        products, last = expanded, letters

    logger.debug(
        "Expanded %d words of length %d under prefix %s",
        len(products),
        n,
        prefix.letters,
    )
    return rotor.canonical_sign_batch(products)
