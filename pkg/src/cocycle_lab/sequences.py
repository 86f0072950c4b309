"""Short exact sequences 0 -> A -> B -> C -> 0 of G-modules and their connecting maps."""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np
from numpy.typing import NDArray

from cocycle_lab.cochains import Cochain, coboundary, require_cocycle
from cocycle_lab.config import SesFamily
from cocycle_lab.errors import InternalBreach, ModuleMismatch, SectionFailure
from cocycle_lab.groups import FiniteGroup
from cocycle_lab.modules import CoefficientGroup, GModule, as_fractions


def _sample_values(module: GModule) -> NDArray:
    """Every element of a finite module, otherwise the signed unit vectors."""
    if module.is_finite:
        return module.coefficients.elements()
    eye = np.eye(module.width, dtype=np.int64)
    samples = np.concatenate([eye, -eye])
    return samples if module.is_discrete else module.reduce(as_fractions(samples) / 3)


def _rational_inverse(matrix: NDArray) -> list[list[Fraction]]:
    n = len(matrix)
    rows = [
        [Fraction(int(x)) for x in row] + [Fraction(int(i == k)) for k in range(n)]
        for i, row in enumerate(matrix)
    ]
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col]), None)
        if pivot is None:
            raise ModuleMismatch("module map is not invertible over Q")
        rows[col], rows[pivot] = rows[pivot], rows[col]
        scale = rows[col][col]
        rows[col] = [x / scale for x in rows[col]]
        for r in range(n):
            if r != col and rows[r][col]:
                factor = rows[r][col]
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[col])]
    return [row[n:] for row in rows]


@dataclass(frozen=True, eq=False)
class ModuleMap:
    """An equivariant additive map; matrix[target_coordinate, source_coordinate]."""

    source: GModule
    target: GModule
    matrix: NDArray

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=np.int64).reshape(self.target.width, self.source.width)
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        if self.source.group != self.target.group:
            raise ModuleMismatch("module map between modules over different groups")
        samples = _sample_values(self.source)
        for g in range(self.source.group.order):
            lhs = self.push(self.source.act(g, samples))
            rhs = self.target.act(g, self.push(samples))
            if not np.all(lhs == rhs):
                raise ModuleMismatch(f"module map does not commute with the action of {g}")

    def push(self, values: NDArray) -> NDArray:
        values = np.asarray(values)
        if self.target.dtype is object:
            values = as_fractions(values)
        return self.target.reduce(values.dot(self.matrix.T))

    def push_cochain(self, phi: Cochain) -> Cochain:
        if phi.module != self.source:
            raise ModuleMismatch("cochain does not live in the map's source")
        return Cochain(self.target, phi.degree, self.push(phi.values))

    @cached_property
    def _preimages(self) -> dict[bytes, NDArray]:
        elements = self.source.coefficients.elements()
        images = self.push(elements)
        return {image.tobytes(): element for element, image in zip(elements, images)}

    @cached_property
    def _inverse(self) -> list[list[Fraction]]:
        return _rational_inverse(self.matrix)

    def preimage(self, values: NDArray) -> NDArray:
        """The unique source values mapping onto values; the map must be injective."""
        if self.source.is_finite:
            table = self._preimages
            out = []
            for row in self.target.reduce(values):
                if (key := np.asarray(row, dtype=np.int64).tobytes()) not in table:
                    raise InternalBreach(f"{row.tolist()} is not in the image")
                out.append(table[key])
            return np.array(out, dtype=np.int64).reshape(len(values), self.source.width)
        solved = as_fractions(values).dot(as_fractions(self._inverse).T)
        if self.source.is_discrete:
            if any(x.denominator != 1 for x in solved.reshape(-1)):
                raise InternalBreach("value is not in the image of an integral map")
            return np.array([[int(x) for x in row] for row in solved], dtype=np.int64)
        return solved


class Section(ABC):
    @abstractmethod
    def __call__(self, values: NDArray) -> NDArray: ...


class CanonicalSection(Section):
    """Smallest non-negative representative: Z/m -> Z as [0, m), Q/Z -> Q as [0, 1)."""

    def __init__(self, target: GModule):
        self.target = target

    def __call__(self, values: NDArray) -> NDArray:
        return self.target.reduce(np.array(values, copy=True))


class SymmetricSection(Section):
    """Z/m -> Z through representatives in [-m/2, m/2)."""

    def __init__(self, target: GModule, moduli: tuple[int, ...]):
        self.target = target
        self.moduli = np.array(moduli, dtype=np.int64)

    def __call__(self, values: NDArray) -> NDArray:
        values = np.asarray(values, dtype=np.int64)
        return np.where(2 * values >= self.moduli, values - self.moduli, values)


class TableSection(Section):
    """Explicit images of every element of a finite C, in element order."""

    def __init__(self, quotient: GModule, table: NDArray):
        self.quotient = quotient
        self.table = np.asarray(table, dtype=np.int64)

    def __call__(self, values: NDArray) -> NDArray:
        codes = self.quotient.coefficients.codes(self.quotient.reduce(values))
        return self.table[codes]


@dataclass(frozen=True, eq=False)
class ModuleSES:
    i: ModuleMap
    j: ModuleMap
    section: Section
    family: SesFamily = SesFamily.explicit

    def __post_init__(self):
        if self.i.target != self.j.source:
            raise ModuleMismatch("i and j do not meet in the same module")
        samples = _sample_values(self.C)
        if not np.all(self.j.push(self.section(samples)) == samples):
            raise SectionFailure("j o s is not the identity")
        if self.A.is_finite and self.B.is_finite and self.C.is_finite:
            self._check_finite_exactness()

    @property
    def A(self) -> GModule:
        return self.i.source

    @property
    def B(self) -> GModule:
        return self.i.target

    @property
    def C(self) -> GModule:
        return self.j.target

    @property
    def group(self) -> FiniteGroup:
        return self.B.group

    def _check_finite_exactness(self) -> None:
        codes_b = self.B.coefficients.codes
        images = codes_b(self.i.push(self.A.coefficients.elements()))
        if len(set(images.tolist())) != self.A.coefficients.order:
            raise ModuleMismatch("i is not injective")
        b_elements = self.B.coefficients.elements()
        pushed = self.C.coefficients.codes(self.j.push(b_elements))
        if len(set(pushed.tolist())) != self.C.coefficients.order:
            raise ModuleMismatch("j is not surjective")
        kernel = set(codes_b(b_elements[pushed == 0]).tolist())
        if kernel != set(images.tolist()):
            raise ModuleMismatch("image of i differs from kernel of j")


def multiplication_ses(
    group: FiniteGroup, m: int, width: int = 1, matrices=None, section: str = "canonical"
) -> ModuleSES:
    """Z^d --(x m)--> Z^d --> (Z/m)^d."""
    free = GModule(group, CoefficientGroup.free(width), matrices)
    quotient = GModule(group, CoefficientGroup.finite((m,) * width), matrices)
    i = ModuleMap(free, free, m * np.eye(width, dtype=np.int64))
    j = ModuleMap(free, quotient, np.eye(width, dtype=np.int64))
    match section:
        case "canonical":
            lift = CanonicalSection(free)
        case "symmetric":
            lift = SymmetricSection(free, quotient.coefficients.moduli)
        case _:
            raise ValueError(f"Invalid {section=}")
    return ModuleSES(i, j, lift, SesFamily.multiplication)


def rational_ses(group: FiniteGroup, width: int = 1, matrices=None) -> ModuleSES:
    """Z^d -> Q^d -> (Q/Z)^d with the [0, 1) section."""
    integral = GModule(group, CoefficientGroup.free(width), matrices)
    rational = GModule(group, CoefficientGroup.rational(width), matrices)
    torus = GModule(group, CoefficientGroup.torus(width), matrices)
    eye = np.eye(width, dtype=np.int64)
    return ModuleSES(
        ModuleMap(integral, rational, eye),
        ModuleMap(rational, torus, eye),
        CanonicalSection(rational),
        SesFamily.rational,
    )


def explicit_ses(
    a: GModule, b: GModule, c: GModule, i_matrix, j_matrix, section_table=None
) -> ModuleSES:
    """A finite sequence from explicit matrices; the default section picks the first preimage."""
    j = ModuleMap(b, c, j_matrix)
    if section_table is None:
        b_elements = b.coefficients.elements()
        codes = c.coefficients.codes(j.push(b_elements))
        first = {}
        for code, element in zip(codes.tolist(), b_elements):
            first.setdefault(code, element)
        if len(first) != c.coefficients.order:
            raise SectionFailure("j is not surjective, no section exists")
        section_table = [first[code] for code in range(c.coefficients.order)]
    return ModuleSES(ModuleMap(a, b, i_matrix), j, TableSection(c, section_table))


def connecting_map(ses: ModuleSES, psi: Cochain) -> Cochain:
    """delta(psi) = i^-1 d(s o psi), a (p+1)-cocycle valued in A."""
    if psi.module != ses.C:
        raise ModuleMismatch("cochain does not live in the quotient module")
    require_cocycle(psi)
    lifted = Cochain(ses.B, psi.degree, ses.section(psi.values))
    boundary = coboundary(lifted)
    logging.debug(f"Connecting map on a degree {psi.degree} cocycle")
    return Cochain(ses.A, psi.degree + 1, ses.i.preimage(boundary.values))
