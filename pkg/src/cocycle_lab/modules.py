import itertools
from abc import ABC, abstractmethod
from collections import Counter
from dataclasses import dataclass
from enum import StrEnum
from fractions import Fraction
from functools import cached_property
from typing import Mapping

import numpy as np
from numpy.typing import NDArray

from cocycle_lab.errors import GroupAxiomError, ModuleMismatch, WrongCoefficientKind
from cocycle_lab.groups import FiniteGroup, GroupHom

# lexicographic tie-breaking in select_lift enumerates coefficient groups up to this size
VECTORIZED_LIFT_LIMIT = 4096


class CoefficientKind(StrEnum):
    free = "free"
    finite = "finite"
    rational = "rational"
    torus = "torus"


def smallness_profile(counts: Mapping[Fraction, int], total: int) -> tuple[Fraction, Fraction | None]:
    """rho_0 of a table whose row norms have the given counts, and the next breakpoint above it.

    The mass of {rho > eps} is a step function of eps with breaks at the
    row norms, so the infimum of {eps : mass(rho > eps) < eps} is found by
    scanning those breakpoints.
    """
    positive = sorted((Fraction(v), c) for v, c in counts.items() if v > 0)
    breakpoints = [Fraction(0)] + [v for v, _ in positive]
    above = sum(c for _, c in positive)
    for j, value in enumerate(breakpoints):
        if j:
            above -= positive[j - 1][1]
        candidate = max(value, Fraction(above, total))
        following = breakpoints[j + 1] if j + 1 < len(breakpoints) else None
        if following is None or candidate < following:
            return candidate, following
    raise AssertionError("unreachable")


def smallness_radius(counts: Mapping[Fraction, int], total: int) -> Fraction:
    return smallness_profile(counts, total)[0]


def mass_above(counts: Mapping[Fraction, int], total: int, eps: Fraction) -> Fraction:
    return Fraction(sum(c for v, c in counts.items() if v > eps), total)


def as_fractions(values) -> NDArray:
    out = np.empty(np.shape(values), dtype=object)
    flat = out.reshape(-1)
    for i, x in enumerate(np.asarray(values, dtype=object).reshape(-1)):
        flat[i] = Fraction(x)
    return out


@dataclass(frozen=True)
class CoefficientGroup:
    """Z^d, a finite abelian group Z/m_1 x ... x Z/m_d, Q^d or (Q/Z)^d.

    Discrete kinds use the metric rho(a, b) = [a != b]; Q^d the sup-norm;
    (Q/Z)^d the sup over coordinates of the circle distance.
    """

    kind: CoefficientKind
    moduli: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "kind", CoefficientKind(self.kind))
        object.__setattr__(self, "moduli", tuple(int(m) for m in self.moduli))
        if not self.moduli:
            raise WrongCoefficientKind("coefficient groups need at least one coordinate")
        if self.kind == CoefficientKind.finite:
            if any(m < 1 for m in self.moduli):
                raise WrongCoefficientKind(f"invalid invariant factors {self.moduli}")
        elif any(self.moduli):
            raise WrongCoefficientKind(f"{self.kind} coefficients carry no moduli")

    @classmethod
    def free(cls, rank: int = 1) -> "CoefficientGroup":
        return cls(CoefficientKind.free, (0,) * rank)

    @classmethod
    def finite(cls, factors: list[int] | tuple[int, ...]) -> "CoefficientGroup":
        return cls(CoefficientKind.finite, tuple(factors))

    @classmethod
    def rational(cls, dimension: int = 1) -> "CoefficientGroup":
        return cls(CoefficientKind.rational, (0,) * dimension)

    @classmethod
    def torus(cls, dimension: int = 1) -> "CoefficientGroup":
        return cls(CoefficientKind.torus, (0,) * dimension)

    @property
    def width(self) -> int:
        return len(self.moduli)

    @property
    def is_discrete(self) -> bool:
        return self.kind in (CoefficientKind.free, CoefficientKind.finite)

    @property
    def is_finite(self) -> bool:
        return self.kind == CoefficientKind.finite

    @property
    def dtype(self):
        return np.int64 if self.is_discrete else object

    @property
    def order(self) -> int | None:
        return int(np.prod(self.moduli)) if self.is_finite else None

    def reduce(self, values: NDArray) -> NDArray:
        match self.kind:
            case CoefficientKind.finite:
                return np.mod(values, np.array(self.moduli, dtype=np.int64))
            case CoefficientKind.torus:
                return np.mod(as_fractions(values), 1)
            case CoefficientKind.rational:
                return as_fractions(values)
            case _:
                return np.asarray(values, dtype=np.int64)

    def row_norms(self, values: NDArray) -> list[Fraction]:
        match self.kind:
            case CoefficientKind.rational:
                return [max(abs(x) for x in row) for row in values]
            case CoefficientKind.torus:
                return [max(min(x, 1 - x) for x in row) for row in values]
            case _:
                return [Fraction(int(bool(x))) for x in np.any(values != 0, axis=1)]

    def norm_counts(self, values: NDArray) -> Counter:
        if self.is_discrete:
            nonzero = int(np.count_nonzero(np.any(values != 0, axis=1)))
            return Counter({Fraction(1): nonzero, Fraction(0): len(values) - nonzero})
        return Counter(self.row_norms(values))

    def elements(self) -> NDArray[np.int64]:
        """All elements in lexicographic coordinate order."""
        if not self.is_finite:
            raise WrongCoefficientKind(f"{self.kind} coefficients cannot be enumerated")
        return np.array(list(itertools.product(*(range(m) for m in self.moduli))), dtype=np.int64)

    def codes(self, values: NDArray[np.int64]) -> NDArray[np.int64]:
        return np.ravel_multi_index(tuple(np.asarray(values).T), self.moduli)

    def parse(self, text) -> int | Fraction:
        try:
            return int(text) if self.is_discrete else Fraction(text)
        except (TypeError, ValueError) as err:
            raise WrongCoefficientKind(f"{text!r} is not a {self.kind} value") from err


class Module(ABC):
    """A G-module whose values are stored as rows of a (rows, width) array."""

    group: FiniteGroup

    @property
    @abstractmethod
    def width(self) -> int: ...

    @property
    @abstractmethod
    def dtype(self): ...

    @property
    @abstractmethod
    def is_discrete(self) -> bool: ...

    @property
    @abstractmethod
    def is_finite(self) -> bool: ...

    @property
    @abstractmethod
    def is_isometric(self) -> bool: ...

    @property
    def is_trivial(self) -> bool:
        return False

    @abstractmethod
    def reduce(self, values: NDArray) -> NDArray: ...

    @abstractmethod
    def act(self, g: int, values: NDArray) -> NDArray: ...

    @abstractmethod
    def row_norms(self, values: NDArray) -> list[Fraction]: ...

    def norm_counts(self, values: NDArray) -> Counter:
        return Counter(self.row_norms(values))

    def zeros(self, rows: int) -> NDArray:
        if self.dtype is object:
            return as_fractions(np.zeros((rows, self.width), dtype=np.int64))
        return np.zeros((rows, self.width), dtype=self.dtype)


@dataclass(frozen=True, eq=False)
class GModule(Module):
    """Coefficients with G acting by integer (or, for Q^d, rational) matrices.

    matrices[g] acts on column vectors, so a row of values v maps to v @ matrices[g].T.
    """

    group: FiniteGroup
    coefficients: CoefficientGroup
    matrices: NDArray | None = None

    def __post_init__(self):
        if self.matrices is not None:
            object.__setattr__(self, "matrices", self._checked_matrices(self.matrices))

    def _checked_matrices(self, matrices) -> NDArray | None:
        n, w = self.group.order, self.coefficients.width
        if self.coefficients.kind == CoefficientKind.rational:
            table = as_fractions(matrices)
        else:
            table = np.asarray(matrices)
            if table.dtype == object and any(
                Fraction(x).denominator != 1 for x in table.reshape(-1)
            ):
                raise GroupAxiomError("action matrices must be integral")
            table = table.astype(np.int64)
        if table.shape != (n, w, w):
            raise GroupAxiomError(f"action matrices have shape {table.shape}, expected {(n, w, w)}")
        identity = np.eye(w, dtype=np.int64)
        if self.coefficients.is_finite:
            moduli = np.array(self.coefficients.moduli, dtype=np.int64)
            # column j must send the relation m_j e_j into the relations
            if np.any((table * moduli[None, None, :]) % moduli[None, :, None]):
                raise GroupAxiomError("action matrices do not respect the coefficient relations")

        def same(a, b) -> bool:
            if self.coefficients.is_finite:
                return not np.any((a - b) % moduli[:, None])
            return bool(np.all(a == b))

        if not same(table[0], identity):
            raise GroupAxiomError("the identity does not act trivially")
        mul = self.group.mul
        for g in range(n):
            for h in range(n):
                if not same(table[mul[g, h]], table[g].dot(table[h])):
                    raise GroupAxiomError(f"action is not a homomorphism at ({g}, {h})")
        if all(same(t, identity) for t in table):
            return None
        table.setflags(write=False)
        return table

    @property
    def width(self) -> int:
        return self.coefficients.width

    @property
    def dtype(self):
        return self.coefficients.dtype

    @property
    def is_discrete(self) -> bool:
        return self.coefficients.is_discrete

    @property
    def is_finite(self) -> bool:
        return self.coefficients.is_finite

    @property
    def is_trivial(self) -> bool:
        return self.matrices is None

    @cached_property
    def is_isometric(self) -> bool:
        if self.is_discrete or self.is_trivial:
            return True
        if all(_is_signed_permutation(t) for t in self.matrices):
            return True
        samples = _isometry_samples(self.width, self.coefficients.kind)
        norms = self.coefficients.row_norms(samples)
        return all(
            self.coefficients.row_norms(self.act(g, samples)) == norms
            for g in range(self.group.order)
        )

    def action_matrix(self, g: int) -> NDArray:
        if self.matrices is None:
            return np.eye(self.width, dtype=np.int64)
        return self.matrices[g]

    def reduce(self, values: NDArray) -> NDArray:
        return self.coefficients.reduce(values)

    def act(self, g: int, values: NDArray) -> NDArray:
        if self.matrices is None or g == 0:
            return self.reduce(np.array(values, copy=True))
        return self.reduce(np.asarray(values).dot(self.matrices[g].T))

    def row_norms(self, values: NDArray) -> list[Fraction]:
        return self.coefficients.row_norms(values)

    def norm_counts(self, values: NDArray) -> Counter:
        return self.coefficients.norm_counts(values)

    def pullback(self, hom: GroupHom) -> "GModule":
        if hom.target != self.group:
            raise ModuleMismatch("homomorphism does not land in the module's group")
        matrices = None if self.matrices is None else self.matrices[hom.map]
        return GModule(hom.source, self.coefficients, matrices)

    def __eq__(self, other):
        if not isinstance(other, GModule):
            return NotImplemented
        if self.group != other.group or self.coefficients != other.coefficients:
            return False
        if self.matrices is None or other.matrices is None:
            return self.matrices is None and other.matrices is None
        return bool(np.all(self.matrices == other.matrices))

    def __hash__(self):
        return hash((self.group, self.coefficients))

    def __repr__(self):
        action = "trivial" if self.is_trivial else "matrices"
        return f"GModule({self.group.label or self.group.order}, {self.coefficients}, {action})"


def _is_signed_permutation(matrix: NDArray) -> bool:
    nonzero = matrix != 0
    return (
        bool(np.all(nonzero.sum(axis=0) == 1))
        and bool(np.all(nonzero.sum(axis=1) == 1))
        and all(abs(x) == 1 for x in matrix[nonzero])
    )


def _isometry_samples(width: int, kind: CoefficientKind) -> NDArray:
    # unit vectors and pairwise sums and differences, shrunk onto the circle for tori
    scale = Fraction(1, 3) if kind == CoefficientKind.torus else Fraction(1)
    rows = [np.eye(width, dtype=np.int64)[i] for i in range(width)]
    for i, j in itertools.combinations(range(width), 2):
        rows.append(rows[i] + rows[j])
        rows.append(rows[i] - rows[j])
    samples = as_fractions(np.array(rows)) * scale
    return np.mod(samples, 1) if kind == CoefficientKind.torus else samples


@dataclass(frozen=True, eq=False)
class InducedModule(Module):
    """C(G, A): maps G -> A stored as |G| consecutive blocks, with the diagonal action

    (R^g f)(h) = T^g f(g^{-1} h)

    and the metric rho_0 of the base module.
    """

    base: Module

    @property
    def group(self) -> FiniteGroup:
        return self.base.group

    @property
    def width(self) -> int:
        return self.group.order * self.base.width

    @property
    def dtype(self):
        return self.base.dtype

    @property
    def is_discrete(self) -> bool:
        return False

    @property
    def is_finite(self) -> bool:
        return self.base.is_finite

    @property
    def is_isometric(self) -> bool:
        return self.base.is_isometric

    def blocks(self, values: NDArray) -> NDArray:
        return np.asarray(values).reshape(len(values), self.group.order, self.base.width)

    def reduce(self, values: NDArray) -> NDArray:
        rows = len(values)
        return self.base.reduce(np.asarray(values).reshape(-1, self.base.width)).reshape(rows, self.width)

    def act(self, g: int, values: NDArray) -> NDArray:
        rows = len(values)
        moved = self.blocks(values)[:, self.group.mul[self.group.inv[g]], :]
        acted = self.base.act(g, moved.reshape(-1, self.base.width))
        return acted.reshape(rows, self.width)

    def row_norms(self, values: NDArray) -> list[Fraction]:
        n = self.group.order
        if self.base.is_discrete:
            nonzero = np.count_nonzero(np.any(self.blocks(values) != 0, axis=2), axis=1)
            return [Fraction(int(k), n) if k < n else Fraction(1) for k in nonzero]
        return [
            smallness_radius(self.base.norm_counts(block), n) for block in self.blocks(values)
        ]

    def norm_counts(self, values: NDArray) -> Counter:
        n = self.group.order
        if self.base.is_discrete:
            nonzero = np.count_nonzero(np.any(self.blocks(values) != 0, axis=2), axis=1)
            return Counter(
                {
                    Fraction(int(k), n) if k < n else Fraction(1): int(c)
                    for k, c in zip(*np.unique(nonzero, return_counts=True))
                }
            )
        return Counter(self.row_norms(values))

    def __eq__(self, other):
        return isinstance(other, InducedModule) and self.base == other.base

    def __hash__(self):
        return hash(("induced", self.base))


@dataclass(frozen=True, eq=False)
class QuotientModule(Module):
    """F(A) = C(G, A) / iota(A), each class stored as its select_lift representative."""

    numerator: InducedModule

    @property
    def group(self) -> FiniteGroup:
        return self.numerator.group

    @property
    def width(self) -> int:
        return self.numerator.width

    @property
    def dtype(self):
        return self.numerator.dtype

    @property
    def is_discrete(self) -> bool:
        return False

    @property
    def is_finite(self) -> bool:
        return self.numerator.is_finite

    @property
    def is_isometric(self) -> bool:
        return self.numerator.is_isometric

    def reduce(self, values: NDArray) -> NDArray:
        return select_lift(self.numerator, values)

    def act(self, g: int, values: NDArray) -> NDArray:
        return self.reduce(self.numerator.act(g, values))

    def row_norms(self, values: NDArray) -> list[Fraction]:
        return self.numerator.row_norms(values)

    def norm_counts(self, values: NDArray) -> Counter:
        return self.numerator.norm_counts(values)

    def __eq__(self, other):
        return isinstance(other, QuotientModule) and self.numerator == other.numerator

    def __hash__(self):
        return hash(("quotient", self.numerator))


def quotient_of(module: Module) -> QuotientModule:
    return QuotientModule(InducedModule(module))


def embed_constants(a, module: Module) -> NDArray:
    """iota(a): the constant map h -> a, as a single row of C(G, A)."""
    row = module.reduce(np.asarray(a, dtype=module.dtype).reshape(1, module.width))
    return np.tile(row, (1, module.group.order))


def induced_action(module: Module, g: int, f: NDArray) -> NDArray:
    """(R^g f)(h) = T^g f(g^{-1} h) for a single map f given as a flat row."""
    induced = InducedModule(module)
    return induced.act(g, np.asarray(f).reshape(1, induced.width))[0]


def is_constant(induced: InducedModule, values: NDArray) -> NDArray[np.bool_]:
    blocks = induced.blocks(values)
    return np.all(blocks == blocks[:, :1, :], axis=(1, 2))


def select_lift(induced: InducedModule, values: NDArray) -> NDArray:
    """Canonical representative of f + iota(A): minimal rho_0, ties broken lexicographically.

    Only the constants f(h) are tried as offsets; on a discrete base this is
    the exact minimum over the coset, since any other offset leaves no zero.
    """
    values = induced.reduce(values)
    base = induced.base
    if (
        isinstance(base, GModule)
        and base.is_finite
        and base.coefficients.order <= VECTORIZED_LIFT_LIMIT
    ):
        return _select_lift_finite(induced, values)
    return _select_lift_generic(induced, values)


def _select_lift_finite(induced: InducedModule, values: NDArray) -> NDArray:
    coefficients = induced.base.coefficients
    rows, n = len(values), induced.group.order
    blocks = induced.blocks(values)
    elements = coefficients.elements()
    codes = coefficients.codes(blocks.reshape(-1, coefficients.width)).reshape(rows, n)
    counts = np.zeros((rows, len(elements)), dtype=np.int64)
    np.add.at(counts, (np.repeat(np.arange(rows), n), codes.reshape(-1)), 1)
    # ties: among modal offsets a, prefer the one making f(e) - a smallest
    first = coefficients.reduce(blocks[:, 0, None, :] - elements[None, :, :])
    tie_keys = coefficients.codes(first.reshape(-1, coefficients.width)).reshape(rows, -1)
    modal = counts == counts.max(axis=1, keepdims=True)
    offsets = elements[np.where(modal, tie_keys, len(elements)).argmin(axis=1)]
    return induced.reduce((blocks - offsets[:, None, :]).reshape(rows, -1))


def _select_lift_generic(induced: InducedModule, values: NDArray) -> NDArray:
    base, n = induced.base, induced.group.order
    out = []
    for row in induced.blocks(values):
        best = None
        for a in _distinct_rows(row):
            shifted = base.reduce(row - a[None, :])
            key = (
                smallness_radius(base.norm_counts(shifted), n),
                tuple(shifted.reshape(-1).tolist()),
            )
            if best is None or key < best[0]:
                best = (key, shifted)
        out.append(best[1].reshape(-1))
    return np.array(out, dtype=induced.dtype).reshape(len(values), induced.width)


def _distinct_rows(block: NDArray) -> list[NDArray]:
    seen, distinct = set(), []
    for row in block:
        key = tuple(row.tolist())
        if key not in seen:
            seen.add(key)
            distinct.append(row)
    return distinct


def truncate_torus(module: GModule, denominator: int) -> GModule:
    """(1/N)Z^d / Z^d inside (Q/Z)^d, presented as (Z/N)^d with the same integer action."""
    if module.coefficients.kind != CoefficientKind.torus:
        raise WrongCoefficientKind("only torus coefficients can be truncated")
    coefficients = CoefficientGroup.finite((denominator,) * module.width)
    matrices = None if module.matrices is None else np.asarray(module.matrices, dtype=np.int64)
    return GModule(module.group, coefficients, matrices)


def integral_module(module: GModule) -> GModule:
    matrices = None if module.matrices is None else np.asarray(module.matrices, dtype=np.int64)
    return GModule(module.group, CoefficientGroup.free(module.width), matrices)


def rational_module(module: GModule) -> GModule:
    return GModule(module.group, CoefficientGroup.rational(module.width), module.matrices)
