import itertools
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.typing import NDArray

from cocycle_lab.errors import DivisibilityError, GroupAxiomError


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """A finite group given by its multiplication table; element 0 is the identity.

    The Haar measure is the uniform probability, so a set of p-tuples has
    mass count / order**p.
    """

    mul: NDArray[np.int64]
    label: str = ""

    def __post_init__(self):
        table = np.asarray(self.mul, dtype=np.int64)
        object.__setattr__(self, "mul", table)
        table.setflags(write=False)
        _validate_table(table)

    @property
    def order(self) -> int:
        return self.mul.shape[0]

    @cached_property
    def inv(self) -> NDArray[np.int64]:
        rows, cols = np.nonzero(self.mul == 0)
        inverse = np.empty(self.order, dtype=np.int64)
        inverse[rows] = cols
        inverse.setflags(write=False)
        return inverse

    def element_order(self, g: int) -> int:
        k, x = 1, g
        while x != 0:
            x = self.mul[x, g]
            k += 1
        return k

    @cached_property
    def exponent(self) -> int:
        return math.lcm(*(self.element_order(g) for g in range(self.order)))

    @cached_property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mul, self.mul.T))

    def product(self, elements) -> int:
        x = 0
        for g in elements:
            x = int(self.mul[x, g])
        return x

    def __eq__(self, other):
        if not isinstance(other, FiniteGroup):
            return NotImplemented
        return self is other or np.array_equal(self.mul, other.mul)

    def __hash__(self):
        return hash(self.mul.tobytes())

    def __repr__(self):
        return f"FiniteGroup(order={self.order}, label={self.label!r})"


def _validate_table(table: NDArray[np.int64]) -> None:
    if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] == 0:
        raise GroupAxiomError(f"multiplication table has shape {table.shape}")
    n = table.shape[0]
    if table.min() < 0 or table.max() >= n:
        raise GroupAxiomError("multiplication table is not closed")
    identity = np.arange(n)
    if not np.array_equal(table[0], identity) or not np.array_equal(table[:, 0], identity):
        raise GroupAxiomError("element 0 is not a two-sided identity")
    for g in range(n):
        right, left = np.nonzero(table[g] == 0)[0], np.nonzero(table[:, g] == 0)[0]
        if len(right) != 1 or len(left) != 1 or right[0] != left[0]:
            raise GroupAxiomError(f"element {g} has no two-sided inverse")
    if (failing := associativity_failure(table)) is not None:
        raise GroupAxiomError(f"associativity fails at {failing}")


def associativity_failure(table: NDArray[np.int64]) -> tuple[int, int, int] | None:
    """The first triple (g, h, k), ordered by h, with (gh)k != g(hk)."""
    # all g at once, one (h, k) slice at a time
    for h in range(table.shape[0]):
        lhs = table[table[:, h]]
        rhs = table[:, table[h]]
        if not np.array_equal(lhs, rhs):
            g, k = np.argwhere(lhs != rhs)[0]
            return int(g), h, int(k)
    return None


@dataclass(frozen=True, eq=False)
class GroupHom:
    source: FiniteGroup
    target: FiniteGroup
    map: NDArray[np.int64]

    def __post_init__(self):
        images = np.asarray(self.map, dtype=np.int64)
        object.__setattr__(self, "map", images)
        images.setflags(write=False)
        if images.shape != (self.source.order,):
            raise GroupAxiomError(f"homomorphism map has shape {images.shape}")
        if images.min() < 0 or images.max() >= self.target.order:
            raise GroupAxiomError("homomorphism map leaves the target group")
        if images[0] != 0:
            raise GroupAxiomError("homomorphism does not preserve the identity")
        lhs = images[self.source.mul]
        rhs = self.target.mul[images[:, None], images[None, :]]
        if not np.array_equal(lhs, rhs):
            g, h = np.argwhere(lhs != rhs)[0]
            raise GroupAxiomError(f"map is not multiplicative at ({g}, {h})")

    @cached_property
    def surjective(self) -> bool:
        return len(np.unique(self.map)) == self.target.order

    @cached_property
    def injective(self) -> bool:
        return len(np.unique(self.map)) == self.source.order

    def __eq__(self, other):
        if not isinstance(other, GroupHom):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and np.array_equal(self.map, other.map)
        )

    def __hash__(self):
        return hash(self.map.tobytes())


def identity_hom(group: FiniteGroup) -> GroupHom:
    return GroupHom(group, group, np.arange(group.order))


def compose(second: GroupHom, first: GroupHom) -> GroupHom:
    """second ∘ first."""
    if first.target != second.source:
        raise GroupAxiomError("homomorphisms are not composable")
    return GroupHom(first.source, second.target, second.map[first.map])


@dataclass(frozen=True, eq=False)
class Tower:
    """Finite groups G_1 <- G_2 <- ... <- G_M joined by surjections.

    steps[m] maps levels[m + 1] onto levels[m]; G_1 is the coarsest level.
    """

    levels: tuple[FiniteGroup, ...]
    steps: tuple[GroupHom, ...]
    _composites: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))
        object.__setattr__(self, "steps", tuple(self.steps))
        if len(self.steps) != len(self.levels) - 1:
            raise GroupAxiomError("a tower needs one step per consecutive pair of levels")
        for m, step in enumerate(self.steps):
            if step.source != self.levels[m + 1] or step.target != self.levels[m]:
                raise GroupAxiomError(f"step {m} does not join levels {m + 1} and {m}")
            if not step.surjective:
                raise GroupAxiomError(f"step {m} is not surjective")

    def composite(self, m: int, k: int) -> GroupHom:
        """The surjection from level m onto level k (0-based, m >= k)."""
        if m < k:
            raise ValueError(f"Invalid composite {m=} {k=}")
        if (m, k) not in self._composites:
            hom = identity_hom(self.levels[m])
            for step in reversed(self.steps[k:m]):
                hom = compose(step, hom)
            self._composites[(m, k)] = hom
        return self._composites[(m, k)]


def make_cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise ValueError(f"Invalid cyclic order {n=}")
    i = np.arange(n)
    return FiniteGroup((i[:, None] + i[None, :]) % n, label=f"Z/{n}")


def make_product(first: FiniteGroup, second: FiniteGroup) -> FiniteGroup:
    """Direct product with (g, h) stored at index g * |H| + h."""
    n, m = first.order, second.order
    g, h = np.divmod(np.arange(n * m), m)
    table = first.mul[g[:, None], g[None, :]] * m + second.mul[h[:, None], h[None, :]]
    return FiniteGroup(table, label=f"{first.label} x {second.label}")


def make_symmetric(k: int) -> FiniteGroup:
    """S_k with permutations in lexicographic order, composed as (gh)(x) = g(h(x))."""
    perms = list(itertools.permutations(range(k)))
    index = {perm: i for i, perm in enumerate(perms)}
    table = [[index[tuple(g[h[x]] for x in range(k))] for h in perms] for g in perms]
    return FiniteGroup(np.array(table), label=f"S{k}")


def make_quotient_hom(n: int, k: int) -> GroupHom:
    if n % k:
        raise DivisibilityError(f"{k} does not divide {n}")
    return GroupHom(make_cyclic(n), make_cyclic(k), np.arange(n) % k)


def make_tower(orders: list[int]) -> Tower:
    """Cyclic tower Z/n_1 <- Z/n_2 <- ... with each n_i dividing n_(i+1)."""
    steps = [make_quotient_hom(n, k) for k, n in itertools.pairwise(orders)]
    levels = [make_cyclic(orders[0])] + [step.source for step in steps]
    logging.info(f"Built cyclic tower of orders {orders}")
    return Tower(tuple(levels), tuple(steps))


def tuple_digits(n: int, p: int, indices: NDArray[np.int64] | None = None):
    """Element indices of the p-tuples of G^p in row-major lexicographic order."""
    if indices is None:
        indices = np.arange(n**p, dtype=np.int64)
    if p == 0:
        return ()
    return np.unravel_index(indices, (n,) * p)


def tuple_index(n: int, digits) -> NDArray[np.int64]:
    if len(digits) == 0:
        return np.zeros(1, dtype=np.int64)
    return np.ravel_multi_index(tuple(digits), (n,) * len(digits))
