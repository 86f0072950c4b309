from fractions import Fraction

import numpy as np
import pytest

from cocycle_lab.cochains import (
    Cochain,
    average_kappa,
    coboundary,
    coboundary_at_identity,
    dimension_shift_Q,
    first_cocycle_failure,
    indicator_cochain,
    is_cocycle,
    is_eps_small,
    is_sqrt_small,
    random_coboundary,
    random_cochain,
    require_cocycle,
    rho0,
    rho_inf,
    zero_cochain,
)
from cocycle_lab.cohomology import cohomology, random_cocycle
from cocycle_lab.config import capacity_limit
from cocycle_lab.errors import (
    CapacityExceeded,
    ModuleMismatch,
    NotACocycle,
    UnsupportedDegree,
    WrongCoefficientKind,
)
from cocycle_lab.groups import FiniteGroup, make_cyclic, make_product, make_symmetric
from cocycle_lab.modules import CoefficientGroup, GModule, InducedModule, as_fractions, embed_constants

from .helper import carry_cocycle

GROUPS = {
    "Z2": make_cyclic(2),
    "Z3": make_cyclic(3),
    "Z2xZ2": make_product(make_cyclic(2), make_cyclic(2)),
    "S3": make_symmetric(3),
}
WIDE_GROUPS = GROUPS | {
    "Z4": make_cyclic(4),
    "Z12": make_cyclic(12),
    "Z2xZ6": make_product(make_cyclic(2), make_cyclic(6)),
}
COEFFICIENTS = {
    "Z/2": CoefficientGroup.finite([2]),
    "Z/3": CoefficientGroup.finite([3]),
    "Z/2xZ/4": CoefficientGroup.finite([2, 4]),
    "Z": CoefficientGroup.free(),
    "Q": CoefficientGroup.rational(),
    "Q/Z": CoefficientGroup.torus(),
}


def test_cochain_shape_is_checked(z2_mod2: GModule) -> None:
    with pytest.raises(ModuleMismatch, match="expected"):
        Cochain(z2_mod2, 2, np.zeros((3, 1), dtype=np.int64))
    with pytest.raises(UnsupportedDegree):
        Cochain(z2_mod2, -1, np.zeros((1, 1), dtype=np.int64))
    with capacity_limit(3), pytest.raises(CapacityExceeded):
        zero_cochain(z2_mod2, 2)


def test_arithmetic_reduces(z2_mod2: GModule) -> None:
    phi = Cochain(z2_mod2, 1, np.array([[1], [1]]))
    assert (phi + phi).is_zero()
    assert phi - phi == zero_cochain(z2_mod2, 1)
    assert -phi == phi
    assert phi.scale(3) == phi
    with pytest.raises(ModuleMismatch):
        phi + zero_cochain(z2_mod2, 2)


@pytest.mark.parametrize("group_name", WIDE_GROUPS)
@pytest.mark.parametrize("coefficient_name", COEFFICIENTS)
def test_coboundary_squares_to_zero(group_name: str, coefficient_name: str, rng) -> None:
    group = WIDE_GROUPS[group_name]
    module = GModule(group, COEFFICIENTS[coefficient_name])
    # 8 cochains per degree, 1248 in all
    for degree in range(4 if group.order <= 6 else 3):
        for _ in range(8):
            assert coboundary(coboundary(random_cochain(module, degree, rng))).is_zero()


def test_coboundary_with_action(sign_module: GModule, rng) -> None:
    for degree in range(3):
        phi = random_cochain(sign_module, degree, rng)
        assert coboundary(coboundary(phi)).is_zero()
    # degree 0: (d a)(g) = T^g a - a
    a = Cochain(sign_module, 0, np.array([[5]]))
    assert coboundary(a).values.reshape(-1).tolist() == [0, -10, -10, 0, 0, -10]


def test_carry_is_a_cocycle(z2_mod2: GModule) -> None:
    carry = carry_cocycle(z2_mod2)
    assert carry.values.reshape(-1).tolist() == [0, 0, 0, 1]
    assert is_cocycle(carry)
    require_cocycle(carry)


def test_first_cocycle_failure(z2_mod2: GModule) -> None:
    bad = Cochain(z2_mod2, 2, np.array([[0], [1], [0], [0]]))
    assert first_cocycle_failure(bad) == (0, 0, 1)
    with pytest.raises(NotACocycle, match=r"first failing tuple \(0, 0, 1\)") as error:
        require_cocycle(bad)
    assert error.value.failing == (0, 0, 1)


def test_sparse_failure_search_agrees_with_full_coboundary() -> None:
    module = GModule(make_cyclic(16), CoefficientGroup.finite([2]))
    for tuple_ in [(3, 5), (0, 0), (15, 1)]:
        phi = indicator_cochain(module, 2, tuple_, 1)
        full = np.flatnonzero(np.any(coboundary(phi).values != 0, axis=1))
        expected = None if not len(full) else tuple(int(x) for x in np.unravel_index(full[0], (16,) * 3))
        assert first_cocycle_failure(phi) == expected


@pytest.mark.parametrize(
    ("group", "coefficients"),
    [
        (make_cyclic(2), CoefficientGroup.finite([2])),
        (make_cyclic(3), CoefficientGroup.finite([3])),
        (make_product(make_cyclic(2), make_cyclic(2)), CoefficientGroup.free()),
        (make_symmetric(3), CoefficientGroup.finite([2])),
        (make_symmetric(3), CoefficientGroup.free()),
    ],
    ids=["Z2-Z/2", "Z3-Z/3", "V4-Z", "S3-Z/2", "S3-Z"],
)
def test_dimension_shift_contracts(group: FiniteGroup, coefficients: CoefficientGroup, rng) -> None:
    module = GModule(group, coefficients)
    for degree in (1, 2, 3):
        for generator in cohomology(module, degree).generators:
            psi = generator + coboundary(random_cochain(module, degree - 1, rng))
            constants = np.concatenate([embed_constants(v, module) for v in psi.values])
            assert coboundary(dimension_shift_Q(psi)) == Cochain(InducedModule(module), degree, constants)


def test_dimension_shift_with_action(sign_module: GModule, rng) -> None:
    psi = random_cocycle(sign_module, 2, rng)
    shifted = dimension_shift_Q(psi)
    constants = np.concatenate([embed_constants(v, sign_module) for v in psi.values])
    assert coboundary(shifted).values.tolist() == constants.tolist()
    assert coboundary_at_identity(shifted) == psi


def test_dimension_shift_needs_cocycle(z2_mod2: GModule) -> None:
    with pytest.raises(NotACocycle):
        dimension_shift_Q(Cochain(z2_mod2, 2, np.array([[0], [1], [0], [0]])))
    with pytest.raises(UnsupportedDegree):
        dimension_shift_Q(zero_cochain(z2_mod2, 0))


@pytest.mark.parametrize("group_name", ["Z2", "Z3", "Z4", "S3"])
@pytest.mark.parametrize("dimension", [1, 2])
def test_average_kappa(group_name: str, dimension: int, rng) -> None:
    module = GModule(WIDE_GROUPS[group_name], CoefficientGroup.rational(dimension))
    # 9 cocycles per degree, 216 in all
    for degree in (1, 2, 3):
        h = cohomology(module, degree)
        assert h.rank == 0
        for _ in range(9):
            psi = random_coboundary(module, degree, rng)
            assert coboundary(average_kappa(psi)) == psi


def test_average_kappa_needs_rational(z2_mod2: GModule) -> None:
    with pytest.raises(WrongCoefficientKind):
        average_kappa(carry_cocycle(z2_mod2))


def test_smallness() -> None:
    module = GModule(make_cyclic(4), CoefficientGroup.finite([2]))
    phi = indicator_cochain(module, 1, (2,), 1)
    assert rho0(phi) == Fraction(1, 4)
    assert rho_inf(phi) == 1
    assert is_eps_small(phi, Fraction(1, 3))
    assert not is_eps_small(phi, Fraction(1, 4))
    assert rho0(zero_cochain(module, 2)) == 0


def test_smallness_in_torus() -> None:
    module = GModule(make_cyclic(2), CoefficientGroup.torus())
    phi = Cochain(module, 1, as_fractions([[Fraction(1, 10)], [Fraction(9, 10)]]))
    assert rho_inf(phi) == Fraction(1, 10)
    assert rho0(phi) == Fraction(1, 10)


def test_sqrt_smallness() -> None:
    induced = InducedModule(GModule(make_cyclic(4), CoefficientGroup.finite([2])))
    values = np.zeros((4, 4), dtype=np.int64)
    values[0] = 1
    phi = Cochain(induced, 1, values)
    # one row of norm 1 out of four: mass 1/4, so sqrt-small exactly when 1/16 < eps
    assert is_sqrt_small(phi, Fraction(1, 10))
    assert not is_sqrt_small(phi, Fraction(1, 16))
