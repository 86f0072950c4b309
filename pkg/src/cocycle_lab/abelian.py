"""Finitely generated abelian groups in invariant-factor form, and maps between them.

A factor of 0 stands for a copy of Z; coordinates in a factor f > 0 are reduced mod f.
"""

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

from cocycle_lab.errors import ModuleMismatch
from cocycle_lab.snf import IntegerMatrix, smith_normal_form


@dataclass(frozen=True)
class AbelianGroup:
    factors: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(int(f) for f in self.factors))
        assert all(f >= 0 for f in self.factors), "invalid invariant factors"

    @property
    def rank(self) -> int:
        return sum(1 for f in self.factors if f == 0)

    @property
    def order(self) -> int | None:
        return None if self.rank else math.prod(self.factors)

    def reduce(self, coordinates) -> tuple[int, ...]:
        return tuple(int(c) % f if f else int(c) for c, f in zip(coordinates, self.factors))

    def elements(self):
        if self.rank:
            raise ValueError("an infinite group has no element list")
        return itertools.product(*(range(f) for f in self.factors))


def _relation_columns(factors: tuple[int, ...], offset: int = 0) -> list[dict[int, int]]:
    return [{offset + k: f} for k, f in enumerate(factors) if f]


@dataclass(frozen=True)
class AbelianHom:
    """Column k of matrix holds the image of the k-th source generator."""

    source: AbelianGroup
    target: AbelianGroup
    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in row) for row in self.matrix)
        object.__setattr__(self, "matrix", rows)
        if len(rows) != len(self.target.factors) or any(
            len(row) != len(self.source.factors) for row in rows
        ):
            raise ModuleMismatch("matrix shape does not match the groups")
        for k, f in enumerate(self.source.factors):
            if f and any(self.target.reduce([f * row[k] for row in rows])):
                raise ModuleMismatch(f"generator {k} of order {f} maps to an element of other order")

    def __call__(self, coordinates) -> tuple[int, ...]:
        return self.target.reduce(
            [sum(a * c for a, c in zip(row, coordinates)) for row in self.matrix]
        )

    def _augmented(self) -> IntegerMatrix:
        columns = [
            {i: row[k] for i, row in enumerate(self.matrix) if row[k]}
            for k in range(len(self.source.factors))
        ]
        return IntegerMatrix.from_columns(
            len(self.target.factors), columns + _relation_columns(self.target.factors)
        )

    @cached_property
    def _image_solver(self):
        return smith_normal_form(self._augmented(), track_rows=True, track_cols=True)

    def preimage(self, y) -> tuple[int, ...] | None:
        """Some source element mapping onto y, or None outside the image."""
        solution = self._image_solver.solve([int(c) for c in y])
        if solution is None:
            return None
        return self.source.reduce(solution[: len(self.source.factors)])

    def in_image(self, y) -> bool:
        return self.preimage(y) is not None

    @cached_property
    def kernel_generators(self) -> list[tuple[int, ...]]:
        """Source coordinates spanning the kernel, before reduction by the source relations."""
        smith = smith_normal_form(self._augmented(), track_cols=True, divisibility=False)
        width = len(self.source.factors)
        return [tuple(v.get(k, 0) for k in range(width)) for v in smith.kernel_basis()]

    @cached_property
    def injective(self) -> bool:
        return all(not any(self.source.reduce(x)) for x in self.kernel_generators)

    @cached_property
    def cokernel_factors(self) -> list[int]:
        return smith_normal_form(self._augmented()).factors

    @property
    def surjective(self) -> bool:
        return not self.cokernel_factors

    @property
    def bijective(self) -> bool:
        return self.injective and self.surjective

    @cached_property
    def image_factors(self) -> list[int]:
        """Invariant factors of the image, as source / kernel."""
        width = len(self.source.factors)
        columns = [{k: x for k, x in enumerate(v) if x} for v in self.kernel_generators]
        matrix = IntegerMatrix.from_columns(width, columns + _relation_columns(self.source.factors))
        return smith_normal_form(matrix).factors

    def compose(self, first: "AbelianHom") -> "AbelianHom":
        """self ∘ first."""
        if first.target != self.source:
            raise ModuleMismatch("abelian homomorphisms are not composable")
        columns = [
            self([row[k] for row in first.matrix]) for k in range(len(first.source.factors))
        ]
        rows = tuple(
            tuple(column[i] for column in columns) for i in range(len(self.target.factors))
        )
        return AbelianHom(first.source, self.target, rows)


def _prime_factors(n: int) -> list[int]:
    primes, q = [], 2
    while q * q <= n:
        if n % q == 0:
            primes.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        primes.append(n)
    return primes


def factors_from_torsion_counts(order: int, torsion: Callable[[int], int]) -> list[int]:
    """Invariant factors of a finite abelian group from the sizes |H[k]| of its k-torsion."""
    elementary: dict[int, list[int]] = {}
    for q in _prime_factors(order):
        log_sizes, power = [0], 1
        q_part = q ** _valuation(order, q)
        while q ** log_sizes[-1] < q_part:
            power *= q
            log_sizes.append(_valuation(torsion(power), q))
        # at least j cyclic q-factors of exponent >= j
        ranks = [b - a for a, b in itertools.pairwise(log_sizes)] + [0]
        elementary[q] = [
            j + 1 for j in range(len(ranks) - 1) for _ in range(ranks[j] - ranks[j + 1])
        ]
    length = max((len(v) for v in elementary.values()), default=0)
    factors = [1] * length
    for q, exponents in elementary.items():
        for k, e in enumerate(sorted(exponents, reverse=True)):
            factors[length - 1 - k] *= q**e
    return factors


def _valuation(n: int, q: int) -> int:
    k = 0
    while n % q == 0 and n:
        n //= q
        k += 1
    return k
