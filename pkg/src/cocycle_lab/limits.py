"""Finite shadows of inverse towers of groups and direct systems of coefficient modules."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

import numpy as np

from cocycle_lab.abelian import AbelianHom
from cocycle_lab.cochains import Cochain, coboundary, is_cocycle, require_cocycle, rho0
from cocycle_lab.cohomology import (
    CohomologyGroup,
    class_of,
    cohomology,
    combination,
    induced_hom,
    inflate,
    is_coboundary,
)
from cocycle_lab.errors import (
    InternalBreach,
    ModuleMismatch,
    NotSmallEnough,
    UnsupportedDegree,
    WrongCoefficientKind,
)
from cocycle_lab.groups import FiniteGroup, GroupHom, Tower, tuple_digits, tuple_index
from cocycle_lab.modules import CoefficientGroup, GModule
from cocycle_lab.regularization import trivialize_small_discrete
from cocycle_lab.sequences import ModuleMap


def _cohomology_per_level(modules: list[GModule], degree: int, threads: int, multiplier: int):
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(
            pool.map(
                lambda module: cohomology(module, degree, denominator_multiplier=multiplier), modules
            )
        )


def _same_map(first: AbelianHom, second: AbelianHom) -> bool:
    width = len(first.source.factors)
    return all(
        first([int(i == k) for i in range(width)]) == second([int(i == k) for i in range(width)])
        for k in range(width)
    )


def _stabilization(flags: list[bool]) -> int | None:
    if flags and not flags[-1]:
        return None
    index = len(flags)
    while index and flags[index - 1]:
        index -= 1
    return index


@dataclass(frozen=True)
class TowerExperimentReport:
    degree: int
    groups: tuple[CohomologyGroup, ...]
    inflations: tuple[AbelianHom, ...]
    functorial: bool

    @property
    def injective(self) -> list[bool]:
        return [hom.injective for hom in self.inflations]

    @property
    def surjective(self) -> list[bool]:
        return [hom.surjective for hom in self.inflations]

    @property
    def stabilization(self) -> int | None:
        """Observed within the tower only; it says nothing about the limit group."""
        return _stabilization([hom.bijective for hom in self.inflations])


def tower_experiment(
    tower: Tower, module: GModule, degree: int, *, threads: int = 1, denominator_multiplier: int = 1
) -> TowerExperimentReport:
    """H^p along G_1 <- G_2 <- ... with the inflation maps expressed on generators."""
    if module.group != tower.levels[0]:
        raise ModuleMismatch("the module must be given over the coarsest level of the tower")
    modules = [module] + [
        module.pullback(tower.composite(m, 0)) for m in range(1, len(tower.levels))
    ]
    groups = _cohomology_per_level(modules, degree, threads, denominator_multiplier)
    inflations = []
    for m, step in enumerate(tower.steps):
        logging.info(f"Inflating H^{degree} from level {m} to level {m + 1}")
        images = [inflate(step, g) for g in groups[m].generators]
        inflations.append(induced_hom(groups[m], groups[m + 1], images))
    functorial = True
    if len(inflations) > 1:
        direct = induced_hom(
            groups[0],
            groups[-1],
            [inflate(tower.composite(len(groups) - 1, 0), g) for g in groups[0].generators],
        )
        chained = inflations[0]
        for hom in inflations[1:]:
            chained = hom.compose(chained)
        functorial = _same_map(direct, chained)
    return TowerExperimentReport(degree, tuple(groups), tuple(inflations), functorial)


def descended_module(module: GModule, hom: GroupHom) -> GModule:
    """The module over hom.target whose pullback along hom is module."""
    if module.group != hom.source:
        raise ModuleMismatch("the module does not live over the homomorphism's source")
    if module.matrices is None:
        return GModule(hom.target, module.coefficients)
    section = np.zeros(hom.target.order, dtype=np.int64)
    section[hom.map[::-1]] = np.arange(hom.source.order)[::-1]
    base = GModule(hom.target, module.coefficients, module.matrices[section])
    if base.pullback(hom) != module:
        raise ModuleMismatch("the action does not factor through the homomorphism")
    return base


def modal_lift(psi: Cochain, hom: GroupHom, base: GModule) -> Cochain:
    """psi_1 over hom.target: the most frequent value of psi on each fiber, ties lexicographic."""
    p, n_source, n_target = psi.degree, hom.source.order, hom.target.order
    fibers = tuple_index(n_target, tuple(hom.map[d] for d in tuple_digits(n_source, p)))
    keys = np.column_stack([fibers, psi.values.astype(np.int64)])
    unique, counts = np.unique(keys, axis=0, return_counts=True)
    best: dict[int, tuple[int, np.ndarray]] = {}
    for row, count in zip(unique, counts):
        fiber = int(row[0])
        if fiber not in best or count > best[fiber][0]:
            best[fiber] = (int(count), row[1:])
    values = np.array([best[f][1] for f in range(n_target**p)], dtype=np.int64)
    return Cochain(base, p, values.reshape(n_target**p, base.width))


@dataclass(frozen=True)
class Descent:
    """psi = inflate(psi_prime) + d(witness) over the finer group."""

    psi_prime: Cochain
    witness: Cochain
    path: Literal["regularity", "exact"]
    defect_rho0: Fraction


@dataclass(frozen=True)
class Obstruction:
    defect_rho0: Fraction
    coordinates: tuple
    image_generators: tuple[tuple[int, ...], ...]


def _regularity_path(psi: Cochain, hom: GroupHom, base: GModule, **gates) -> tuple[Descent | None, Fraction]:
    candidate = modal_lift(psi, hom, base)
    if not is_cocycle(candidate):
        # d(psi_1) is small, so psi_1 is corrected by a small primitive of it
        try:
            candidate = candidate - trivialize_small_discrete(coboundary(candidate), **gates)
        except NotSmallEnough as e:
            logging.info(f"Cocycle correction of the modal lift failed: {e}")
            return None, rho0(psi - inflate(hom, candidate))
    defect = psi - inflate(hom, candidate)
    defect_rho0 = rho0(defect)
    try:
        witness = trivialize_small_discrete(defect, **gates)
    except NotSmallEnough as e:
        logging.info(f"Defect is not small enough for the regularity path: {e}")
        return None, defect_rho0
    return Descent(candidate, witness, "regularity", defect_rho0), defect_rho0


def descend_cocycle(
    psi: Cochain, hom: GroupHom, *, threshold_override: Fraction | None = None, eta_scale: int = 100
) -> Descent | Obstruction:
    """Push a cocycle over G_M down to G_m up to a coboundary, or explain why it cannot be."""
    module = psi.module
    if not isinstance(module, GModule) or not module.is_discrete:
        raise WrongCoefficientKind("descent needs a discrete coefficient module")
    if psi.degree < 1:
        raise UnsupportedDegree("descent needs a cocycle of degree at least 1")
    require_cocycle(psi)
    base = descended_module(module, hom)
    gates = {"threshold_override": threshold_override, "eta_scale": eta_scale}
    descent, defect_rho0 = _regularity_path(psi, hom, base, **gates)
    if descent is None:
        fine, coarse = cohomology(module, psi.degree), cohomology(base, psi.degree)
        inflation = induced_hom(coarse, fine, [inflate(hom, g) for g in coarse.generators])
        coordinates = class_of(psi, fine)
        solution = inflation.preimage(coordinates)
        if solution is None:
            logging.info(f"Class {coordinates} is outside the inflation image")
            images = tuple(inflation(x) for x in coarse.group.elements()) if coarse.order else ()
            return Obstruction(defect_rho0, coordinates, images)
        psi_prime = combination(coarse, solution)
        membership = is_coboundary(psi - inflate(hom, psi_prime), fine)
        descent = Descent(psi_prime, membership.witness, "exact", defect_rho0)
    if inflate(hom, descent.psi_prime) + coboundary(descent.witness) != psi:
        raise InternalBreach("descent certificate does not reproduce the cocycle")
    logging.info(f"Descended a degree {psi.degree} cocycle along the {descent.path} path")
    return descent


@dataclass(frozen=True, eq=False)
class DirectSystem:
    """Stages A_1 -> A_2 -> ... of modules over one group, optionally inside an ambient A."""

    group: FiniteGroup
    stages: tuple[GModule, ...]
    inclusions: tuple[ModuleMap, ...]
    ambient: GModule | None = None
    ambient_maps: tuple[ModuleMap, ...] = ()

    def __post_init__(self):
        if len(self.inclusions) != len(self.stages) - 1:
            raise ModuleMismatch("a direct system needs one inclusion per consecutive pair")
        for m, inclusion in enumerate(self.inclusions):
            if inclusion.source != self.stages[m] or inclusion.target != self.stages[m + 1]:
                raise ModuleMismatch(f"inclusion {m} does not join stages {m} and {m + 1}")
            _require_injective(inclusion)
        if self.ambient is None:
            return
        if len(self.ambient_maps) != len(self.stages):
            raise ModuleMismatch("every stage needs a map into the ambient module")
        for m, inclusion in enumerate(self.ambient_maps):
            _require_injective(inclusion)
            if m and not np.all(
                self.ambient_maps[m].push(self.inclusions[m - 1].push(_elements(self.stages[m - 1])))
                == self.ambient_maps[m - 1].push(_elements(self.stages[m - 1]))
            ):
                raise ModuleMismatch(f"ambient maps are not compatible at stage {m}")


def _elements(module: GModule) -> np.ndarray:
    if not module.is_finite:
        raise WrongCoefficientKind("direct system stages must be finite")
    return module.coefficients.elements()


def _require_injective(inclusion: ModuleMap) -> None:
    images = inclusion.target.coefficients.codes(inclusion.push(_elements(inclusion.source)))
    if len(set(images.tolist())) != inclusion.source.coefficients.order:
        raise ModuleMismatch("a direct system map is not injective")


def two_power_chain(group: FiniteGroup, depth: int, width: int = 1, matrices=None) -> DirectSystem:
    """(2^-m Z / Z)^d inside (Q/Z)^d for m = 1..depth, with the top truncation as ambient."""
    stages = [
        GModule(group, CoefficientGroup.finite((2**m,) * width), matrices)
        for m in range(1, depth + 1)
    ]
    eye = np.eye(width, dtype=np.int64)
    inclusions = [ModuleMap(a, b, 2 * eye) for a, b in zip(stages, stages[1:])]
    ambient_maps = [
        ModuleMap(stage, stages[-1], 2 ** (depth - m) * eye) for m, stage in enumerate(stages, 1)
    ]
    return DirectSystem(group, tuple(stages), tuple(inclusions), stages[-1], tuple(ambient_maps))


def constant_system(module: GModule, length: int) -> DirectSystem:
    eye = np.eye(module.width, dtype=np.int64)
    inclusions = [ModuleMap(module, module, eye) for _ in range(length - 1)]
    maps = [ModuleMap(module, module, eye) for _ in range(length)]
    return DirectSystem(module.group, (module,) * length, tuple(inclusions), module, tuple(maps))


def explicit_chain(
    stages: list[GModule], inclusion_matrices: list, ambient: GModule | None = None, ambient_matrices=()
) -> DirectSystem:
    inclusions = [ModuleMap(a, b, m) for a, b, m in zip(stages, stages[1:], inclusion_matrices)]
    maps = [ModuleMap(stage, ambient, m) for stage, m in zip(stages, ambient_matrices)]
    return DirectSystem(stages[0].group, tuple(stages), tuple(inclusions), ambient, tuple(maps))


@dataclass(frozen=True)
class StageHit:
    """The least stage holding every value of an ambient generator cocycle."""

    generator: int
    stage: int | None
    hit: bool


@dataclass(frozen=True)
class StageDeath:
    """A stage class dying in the ambient module, and the stage where it already dies."""

    stage: int
    coordinates: tuple[int, ...]
    dies_at: int | None


@dataclass(frozen=True)
class DirectSystemReport:
    degree: int
    groups: tuple[CohomologyGroup, ...]
    maps: tuple[AbelianHom, ...]
    ambient_group: CohomologyGroup | None = None
    hits: tuple[StageHit, ...] = ()
    deaths: tuple[StageDeath, ...] = ()

    @property
    def bijective(self) -> list[bool]:
        return [hom.bijective for hom in self.maps]


def _stage_preimage(inclusion: ModuleMap, z: Cochain) -> Cochain | None:
    try:
        values = inclusion.preimage(z.values)
    except InternalBreach:
        return None
    return Cochain(inclusion.source, z.degree, values)


def _hits(system: DirectSystem, ambient_group: CohomologyGroup) -> list[StageHit]:
    hits = []
    for k, z in enumerate(ambient_group.generators):
        expected = class_of(z, ambient_group)
        hit = None
        for m, inclusion in enumerate(system.ambient_maps):
            if (lifted := _stage_preimage(inclusion, z)) is not None:
                hit = StageHit(k, m, class_of(inclusion.push_cochain(lifted), ambient_group) == expected)
                break
        hits.append(hit or StageHit(k, None, False))
    return hits


def _deaths(groups, maps, to_ambient: list[AbelianHom]) -> list[StageDeath]:
    deaths = []
    for m, hom in enumerate(to_ambient):
        for x in hom.kernel_generators:
            x = groups[m].group.reduce(x)
            if not any(x):
                continue
            y, dies_at = x, None
            for k in range(m, len(groups)):
                if not any(groups[k].group.reduce(y)):
                    dies_at = k
                    break
                if k < len(maps):
                    y = maps[k](y)
            deaths.append(StageDeath(m, x, dies_at))
    return deaths


def direct_system_experiment(
    system: DirectSystem, degree: int, *, threads: int = 1
) -> DirectSystemReport:
    """H^p along the stages, the inclusion-induced maps, and evidence against the ambient module."""
    groups = _cohomology_per_level(list(system.stages), degree, threads, 1)
    maps = [
        induced_hom(groups[m], groups[m + 1], [inclusion.push_cochain(g) for g in groups[m].generators])
        for m, inclusion in enumerate(system.inclusions)
    ]
    if system.ambient is None:
        return DirectSystemReport(degree, tuple(groups), tuple(maps))
    ambient_group = cohomology(system.ambient, degree)
    to_ambient = [
        induced_hom(groups[m], ambient_group, [inclusion.push_cochain(g) for g in groups[m].generators])
        for m, inclusion in enumerate(system.ambient_maps)
    ]
    hits = _hits(system, ambient_group)
    deaths = _deaths(groups, maps, to_ambient)
    logging.info(f"Direct system H^{degree}: {len(hits)} ambient generators, {len(deaths)} dying classes")
    return DirectSystemReport(degree, tuple(groups), tuple(maps), ambient_group, tuple(hits), tuple(deaths))
