"""Group extensions 0 -> A -> E -> G -> 1 of a finite module A, and their factor sets.

E is stored on the index set A x G with (a, g) at code(a) * |G| + g, where
code enumerates A in lexicographic coordinate order.
"""

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from cocycle_lab.cochains import Cochain, coboundary, is_cocycle, require_cocycle
from cocycle_lab.cohomology import Membership, cohomology, is_coboundary
from cocycle_lab.config import check_capacity
from cocycle_lab.errors import (
    CapacityExceeded,
    GroupAxiomError,
    InternalBreach,
    KernelMismatch,
    ModuleMismatch,
    NotACocycle,
    SectionInvalid,
    UnsupportedDegree,
    WrongCoefficientKind,
)
from cocycle_lab.groups import FiniteGroup, GroupHom, associativity_failure
from cocycle_lab.modules import CoefficientGroup, GModule


@dataclass(frozen=True, eq=False)
class ExtensionPresentation:
    """E with the embedding i: A -> E (by element code) and the projection j: E -> G."""

    group: FiniteGroup
    module: GModule
    embedding: NDArray[np.int64]
    projection: GroupHom
    cocycle: Cochain | None = None
    normalization: Cochain | None = None

    def __post_init__(self):
        embedding = np.asarray(self.embedding, dtype=np.int64)
        object.__setattr__(self, "embedding", embedding)
        coefficients = self.module.coefficients
        if self.group.order != coefficients.order * self.quotient.order:
            raise ModuleMismatch("|E| differs from |A| * |G|")
        if self.projection.source != self.group or self.quotient != self.module.group:
            raise ModuleMismatch("projection does not run from E onto the module's group")
        if not self.projection.surjective:
            raise ModuleMismatch("projection is not surjective")
        if len(set(embedding.tolist())) != coefficients.order:
            raise ModuleMismatch("embedding is not injective")
        kernel = set(np.nonzero(self.projection.map == 0)[0].tolist())
        if kernel != set(embedding.tolist()):
            raise ModuleMismatch("image of the embedding differs from the kernel of the projection")
        elements = coefficients.elements()
        sums = elements[:, None, :] + elements[None, :, :]
        sums = coefficients.codes(coefficients.reduce(sums.reshape(-1, coefficients.width)))
        products = self.group.mul[embedding[:, None], embedding[None, :]].reshape(-1)
        if not np.array_equal(embedding[sums], products):
            raise ModuleMismatch("embedding is not a homomorphism")

    @property
    def quotient(self) -> FiniteGroup:
        return self.projection.target

    def canonical_section(self) -> NDArray[np.int64]:
        """The smallest preimage of every g; s(e) is the identity."""
        section = np.zeros(self.quotient.order, dtype=np.int64)
        images = self.projection.map
        section[images[::-1]] = np.arange(self.group.order)[::-1]
        return section

    @classmethod
    def from_maps(
        cls, group: FiniteGroup, embedding, projection: GroupHom, coefficients: CoefficientGroup
    ) -> "ExtensionPresentation":
        """Wrap a raw extension, with the G-action on A given by conjugation in E."""
        embedding = np.asarray(embedding, dtype=np.int64)
        lookup = {int(x): k for k, x in enumerate(embedding)}
        quotient, w = projection.target, coefficients.width
        elements = coefficients.elements()
        section = np.zeros(quotient.order, dtype=np.int64)
        section[projection.map[::-1]] = np.arange(group.order)[::-1]
        units = np.eye(w, dtype=np.int64)
        unit_images = embedding[coefficients.codes(coefficients.reduce(units))]
        matrices = np.zeros((quotient.order, w, w), dtype=np.int64)
        for g, s in enumerate(section):
            conjugated = group.mul[group.mul[s, unit_images], group.inv[s]]
            if any(int(x) not in lookup for x in conjugated):
                raise ModuleMismatch("the embedded subgroup is not normal")
            matrices[g] = elements[[lookup[int(x)] for x in conjugated]].T
        try:
            module = GModule(quotient, coefficients, matrices)
        except GroupAxiomError as e:
            raise ModuleMismatch(f"conjugation does not define an action: {e}") from e
        return cls(group, module, embedding, projection)


def _multiplication_table(psi: Cochain) -> NDArray[np.int64]:
    """(a, g)(b, h) = (a + T^g b + psi(g, h), gh)."""
    module = psi.module
    coefficients, quotient = module.coefficients, module.group
    n, w = quotient.order, module.width
    elements = coefficients.elements()
    size = len(elements) * n
    check_capacity(size * size * w, "extension table")
    acted = np.stack([module.act(g, elements) for g in range(n)])
    a, g = np.divmod(np.arange(size), n)
    total = (
        elements[a][:, None, :]
        + acted[g[:, None], a[None, :]]
        + psi.values[g[:, None] * n + g[None, :]]
    )
    codes = coefficients.codes(coefficients.reduce(total.reshape(-1, w))).reshape(size, size)
    return codes * n + quotient.mul[g[:, None], g[None, :]]


def extension_from_cocycle(psi: Cochain, *, diagnostic: bool = False) -> ExtensionPresentation:
    """E(psi) after normalizing psi(e, .) = psi(., e) = 0 by the constant cochain psi(e, e).

    In diagnostic mode psi need not be a cocycle: a failing associativity
    triple of the table is reported instead.
    """
    module = psi.module
    if not isinstance(module, GModule) or not module.is_finite:
        raise WrongCoefficientKind("extensions need finite coefficients")
    if psi.degree != 2:
        raise UnsupportedDegree("extensions are classified by degree 2 cocycles")
    if not diagnostic:
        require_cocycle(psi)
    n = module.group.order
    normalization = Cochain(module, 1, np.repeat(psi.values[:1], n, axis=0))
    normalized = psi - coboundary(normalization)
    table = _multiplication_table(normalized)
    if diagnostic and (failing := associativity_failure(table)) is not None:
        over_g = tuple(x % n for x in failing)
        raise NotACocycle(f"extension table is not associative over G at {over_g}", failing)
    label = f"{module.coefficients.kind}({module.coefficients.moduli}) . {module.group.label}"
    group = FiniteGroup(table, label=label)
    projection = GroupHom(group, module.group, np.arange(group.order) % n)
    embedding = np.arange(module.coefficients.order) * n
    logging.info(f"Built extension of order {group.order}")
    return ExtensionPresentation(group, module, embedding, projection, normalized, normalization)


def _checked_section(ext: ExtensionPresentation, section) -> NDArray[np.int64]:
    section = ext.canonical_section() if section is None else np.asarray(section, dtype=np.int64)
    if section.shape != (ext.quotient.order,):
        raise SectionInvalid(f"section has shape {section.shape}")
    if section.min() < 0 or section.max() >= ext.group.order:
        raise SectionInvalid("section leaves the extension group")
    if not np.array_equal(ext.projection.map[section], np.arange(ext.quotient.order)):
        raise SectionInvalid("j o s is not the identity")
    if section[0] != 0:
        raise SectionInvalid("s(e) is not the identity")
    return section


def cocycle_from_extension(ext: ExtensionPresentation, section=None) -> Cochain:
    """The factor set psi(g, h) = i^-1(s(g) s(h) s(gh)^-1)."""
    section = _checked_section(ext, section)
    group, quotient = ext.group, ext.quotient
    n = quotient.order
    lookup = np.full(group.order, -1, dtype=np.int64)
    lookup[ext.embedding] = np.arange(len(ext.embedding))
    g, h = np.divmod(np.arange(n * n), n)
    defect = group.mul[group.mul[section[g], section[h]], group.inv[section[quotient.mul[g, h]]]]
    codes = lookup[defect]
    if np.any(codes < 0):
        k = int(np.argmax(codes < 0))
        raise KernelMismatch(f"s(g)s(h)s(gh)^-1 is outside i(A) at {(int(g[k]), int(h[k]))}")
    psi = Cochain(ext.module, 2, ext.module.coefficients.elements()[codes])
    if not is_cocycle(psi):
        raise InternalBreach("factor set of an extension is not a cocycle")
    return psi


def equivalence_map(ext: ExtensionPresentation, section=None) -> GroupHom:
    """(a, g) -> i(a) s(g) from E(factor set of s) onto ext, commuting with i and j."""
    section = _checked_section(ext, section)
    rebuilt = extension_from_cocycle(cocycle_from_extension(ext, section))
    n = ext.quotient.order
    a, g = np.divmod(np.arange(rebuilt.group.order), n)
    images = ext.group.mul[ext.embedding[a], section[g]]
    hom = GroupHom(rebuilt.group, ext.group, images)
    if not np.array_equal(hom.map[rebuilt.embedding], ext.embedding):
        raise InternalBreach("equivalence does not commute with the embeddings")
    if not np.array_equal(ext.projection.map[hom.map], rebuilt.projection.map):
        raise InternalBreach("equivalence does not commute with the projections")
    return hom


def extensions_equivalent(first: Cochain, second: Cochain) -> Membership:
    """Equal classes in H^2, with lambda such that first - second = d(lambda)."""
    if first.module != second.module or first.degree != 2 or second.degree != 2:
        raise ModuleMismatch("factor sets must be degree 2 cocycles in the same module")
    require_cocycle(first)
    require_cocycle(second)
    return is_coboundary(first - second, cohomology(first.module, 2))


def _generators(group: FiniteGroup) -> list[int]:
    generators, reached = [], {0}
    for g in range(group.order):
        if g in reached:
            continue
        generators.append(g)
        frontier = list(reached)
        while frontier:
            following = []
            for x in frontier:
                for s in generators:
                    if (y := int(group.mul[s, x])) not in reached:
                        reached.add(y)
                        following.append(y)
            frontier = following
    return generators


def _extend(ext: ExtensionPresentation, generators: list[int], images: tuple[int, ...]) -> NDArray | None:
    quotient, group = ext.quotient, ext.group
    section = {0: 0}
    frontier = [0]
    while frontier:
        following = []
        for x in frontier:
            for s, image in zip(generators, images):
                y, value = int(quotient.mul[s, x]), int(group.mul[image, section[x]])
                if y not in section:
                    section[y] = value
                    following.append(y)
                elif section[y] != value:
                    return None
        frontier = following
    candidate = np.array([section[g] for g in range(quotient.order)], dtype=np.int64)
    if np.array_equal(group.mul[candidate[:, None], candidate[None, :]], candidate[quotient.mul]):
        return candidate
    return None


def find_homomorphic_section(ext: ExtensionPresentation, limit: int = 1_000_000) -> NDArray | None:
    generators = _generators(ext.quotient)
    fibers = [np.nonzero(ext.projection.map == s)[0] for s in generators]
    visited = 0
    for images in np.ndindex(*(len(f) for f in fibers)):
        visited += 1
        if visited > limit:
            raise CapacityExceeded(f"section search visited more than {limit} candidates")
        chosen = tuple(int(f[k]) for f, k in zip(fibers, images))
        if (section := _extend(ext, generators, chosen)) is not None:
            return section
    return None
