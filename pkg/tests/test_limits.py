from fractions import Fraction

import numpy as np
import pytest

from cocycle_lab.cochains import Cochain, coboundary, random_cochain, zero_cochain
from cocycle_lab.cohomology import class_of, cohomology, elements, inflate
from cocycle_lab.errors import GroupAxiomError, ModuleMismatch, UnsupportedDegree, WrongCoefficientKind
from cocycle_lab.groups import FiniteGroup, make_quotient_hom, make_tower
from cocycle_lab.limits import (
    Descent,
    DirectSystem,
    Obstruction,
    constant_system,
    descend_cocycle,
    descended_module,
    direct_system_experiment,
    explicit_chain,
    modal_lift,
    tower_experiment,
    two_power_chain,
)
from cocycle_lab.modules import CoefficientGroup, GModule

from .helper import carry_cocycle


@pytest.fixture
def z4_mod2(z4: FiniteGroup) -> GModule:
    return GModule(z4, CoefficientGroup.finite([2]))


def test_tower_in_degree_one(z2_mod2: GModule) -> None:
    report = tower_experiment(make_tower([2, 4, 8]), z2_mod2, 1)
    assert [group.factors for group in report.groups] == [(2,), (2,), (2,)]
    assert report.injective == [True, True]
    assert report.surjective == [True, True]
    assert report.stabilization == 0
    assert report.functorial


def test_tower_in_degree_two(z2_mod2: GModule) -> None:
    report = tower_experiment(make_tower([2, 4, 8]), z2_mod2, 2, threads=3)
    assert [group.factors for group in report.groups] == [(2,), (2,), (2,)]
    assert report.injective == [False, False]
    assert report.stabilization is None
    assert report.functorial


def test_tower_thread_count_does_not_matter(z2_mod2: GModule) -> None:
    tower = make_tower([2, 4, 8])
    single = tower_experiment(tower, z2_mod2, 2, threads=1)
    pooled = tower_experiment(tower, z2_mod2, 2, threads=4)
    assert [g.factors for g in single.groups] == [g.factors for g in pooled.groups]
    assert [h.matrix for h in single.inflations] == [h.matrix for h in pooled.inflations]


def test_tower_needs_module_over_coarsest_level(z4_mod2: GModule) -> None:
    with pytest.raises(ModuleMismatch, match="coarsest level"):
        tower_experiment(make_tower([2, 4]), z4_mod2, 1)


def test_descended_module(z2: FiniteGroup, z4: FiniteGroup) -> None:
    hom = make_quotient_hom(4, 2)
    sign = GModule(z2, CoefficientGroup.free(), np.array([[[1]], [[-1]]]))
    assert descended_module(sign.pullback(hom), hom) == sign
    assert descended_module(GModule(z4, CoefficientGroup.finite([2])), hom) == GModule(
        z2, CoefficientGroup.finite([2])
    )
    # 2 has order 4 mod 5, so the action cannot factor through Z/2
    doubling = GModule(z4, CoefficientGroup.finite([5]), np.array([1, 2, 4, 3]).reshape(4, 1, 1))
    with pytest.raises(GroupAxiomError):
        descended_module(doubling, hom)


def test_modal_lift(z4_mod2: GModule, z2_mod2: GModule) -> None:
    hom = make_quotient_hom(4, 2)
    lifted = modal_lift(Cochain(z4_mod2, 1, np.array([[0], [1], [0], [1]])), hom, z2_mod2)
    assert lifted.values.tolist() == [[0], [1]]
    # fiber {0, 2} is tied, the smaller value wins
    tied = modal_lift(Cochain(z4_mod2, 1, np.array([[0], [1], [1], [1]])), hom, z2_mod2)
    assert tied.values.tolist() == [[0], [1]]


def test_descend_degree_one(z4_mod2: GModule) -> None:
    hom = make_quotient_hom(4, 2)
    psi = Cochain(z4_mod2, 1, np.array([[0], [1], [0], [1]]))
    descent = descend_cocycle(psi, hom)
    assert isinstance(descent, Descent)
    assert descent.path == "regularity"
    assert descent.defect_rho0 == 0
    assert descent.psi_prime.values.tolist() == [[0], [1]]


def test_descend_inflated_class(z4_mod2: GModule, z2_mod2: GModule, rng) -> None:
    hom = make_quotient_hom(4, 2)
    psi = inflate(hom, carry_cocycle(z2_mod2)) + coboundary(random_cochain(z4_mod2, 1, rng))
    descent = descend_cocycle(psi, hom)
    assert isinstance(descent, Descent)
    assert inflate(hom, descent.psi_prime) + coboundary(descent.witness) == psi


def test_descend_obstruction(z4_mod2: GModule) -> None:
    result = descend_cocycle(carry_cocycle(z4_mod2), make_quotient_hom(4, 2))
    assert isinstance(result, Obstruction)
    assert result.coordinates == (1,)
    assert set(result.image_generators) == {(0,)}
    assert result.defect_rho0 == Fraction(1, 4)


def test_descend_rejections(z4: FiniteGroup, z4_mod2: GModule) -> None:
    hom = make_quotient_hom(4, 2)
    with pytest.raises(WrongCoefficientKind):
        descend_cocycle(zero_cochain(GModule(z4, CoefficientGroup.torus()), 1), hom)
    with pytest.raises(UnsupportedDegree):
        descend_cocycle(zero_cochain(z4_mod2, 0), hom)


def test_two_power_chain_degree_one(z2: FiniteGroup) -> None:
    report = direct_system_experiment(two_power_chain(z2, 3), 1)
    assert [group.factors for group in report.groups] == [(2,), (2,), (2,)]
    assert report.bijective == [True, True]
    assert report.deaths == ()


def test_two_power_chain_degree_two(z2: FiniteGroup) -> None:
    report = direct_system_experiment(two_power_chain(z2, 3), 2, threads=2)
    assert report.bijective == [False, False]
    assert [(death.stage, death.dies_at) for death in report.deaths] == [(0, 1), (1, 2)]
    assert all(hit.hit for hit in report.hits)
    assert report.ambient_group.factors == (2,)


def test_constant_system(z2_mod2: GModule) -> None:
    report = direct_system_experiment(constant_system(z2_mod2, 3), 1)
    assert report.bijective == [True, True]
    assert [hit.stage for hit in report.hits] == [0]


def test_invalid_direct_systems(z2: FiniteGroup) -> None:
    a, b = GModule(z2, CoefficientGroup.finite([4])), GModule(z2, CoefficientGroup.finite([2]))
    with pytest.raises(ModuleMismatch, match="not injective"):
        explicit_chain([a, b], [[[1]]])
    with pytest.raises(ModuleMismatch, match="one inclusion per consecutive pair"):
        DirectSystem(z2, (a, b), ())
    free = GModule(z2, CoefficientGroup.free())
    with pytest.raises(WrongCoefficientKind):
        explicit_chain([free, free], [[[1]]])


@pytest.mark.parametrize("degree", [1, 2])
@pytest.mark.parametrize(
    ("n", "k"), [(8, 4), (8, 2), (4, 2), (6, 3), (6, 2)], ids=["8-4", "8-2", "4-2", "6-3", "6-2"]
)
def test_descend_matches_inflation_image(n: int, k: int, degree: int) -> None:
    hom = make_quotient_hom(n, k)
    fine = cohomology(GModule(hom.source, CoefficientGroup.finite([2])), degree)
    coarse = cohomology(GModule(hom.target, CoefficientGroup.finite([2])), degree)
    image = {class_of(inflate(hom, psi), fine) for _, psi in elements(coarse)}
    for _, psi in elements(fine):
        coordinates = class_of(psi, fine)
        result = descend_cocycle(psi, hom)
        if coordinates in image:
            assert isinstance(result, Descent)
            assert class_of(inflate(hom, result.psi_prime), fine) == coordinates
        else:
            assert isinstance(result, Obstruction)
            assert result.coordinates == coordinates
            assert set(result.image_generators) == image
