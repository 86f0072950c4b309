import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from cocycle_lab.cochains import Cochain, coboundary, is_cocycle, random_cochain, zero_cochain
from cocycle_lab.cohomology import (
    brute_force_cohomology,
    class_of,
    coboundary_matrix,
    cohomology,
    combination,
    elements,
    enumerate_cocycles,
    induced_hom,
    inflate,
    is_coboundary,
    random_cocycle,
)
from cocycle_lab.errors import CapacityExceeded, ModuleMismatch, NotACocycle, UnsupportedDegree
from cocycle_lab.groups import FiniteGroup, make_cyclic, make_product, make_quotient_hom, make_symmetric
from cocycle_lab.modules import CoefficientGroup, GModule, as_fractions, truncate_torus

from .helper import carry_cocycle

KLEIN = make_product(make_cyclic(2), make_cyclic(2))


@pytest.mark.parametrize(
    ("group", "coefficients", "degree", "factors"),
    [
        (make_cyclic(2), CoefficientGroup.finite([2]), 0, (2,)),
        (make_cyclic(2), CoefficientGroup.finite([2]), 1, (2,)),
        (make_cyclic(2), CoefficientGroup.finite([2]), 2, (2,)),
        (make_cyclic(4), CoefficientGroup.finite([2]), 2, (2,)),
        (make_cyclic(6), CoefficientGroup.finite([4]), 1, (2,)),
        (make_cyclic(3), CoefficientGroup.free(), 0, (0,)),
        (make_cyclic(3), CoefficientGroup.free(), 1, ()),
        (make_cyclic(3), CoefficientGroup.free(), 2, (3,)),
        (KLEIN, CoefficientGroup.finite([2]), 1, (2, 2)),
        (KLEIN, CoefficientGroup.finite([2]), 2, (2, 2, 2)),
        (make_symmetric(3), CoefficientGroup.free(), 2, (2,)),
        (make_symmetric(3), CoefficientGroup.finite([3]), 1, ()),
    ],
    ids=[
        "Z2-0",
        "Z2-1",
        "Z2-2",
        "Z4-Z/2-2",
        "Z6-Z/4-1",
        "Z3-Z-0",
        "Z3-Z-1",
        "Z3-Z-2",
        "V4-1",
        "V4-2",
        "S3-Z-2",
        "S3-Z/3-1",
    ],
)
def test_known_groups(group: FiniteGroup, coefficients: CoefficientGroup, degree: int, factors) -> None:
    assert cohomology(GModule(group, coefficients), degree).factors == factors


def test_sign_module(sign_module: GModule) -> None:
    assert cohomology(sign_module, 0).factors == ()
    h1 = cohomology(sign_module, 1)
    assert h1.factors == (2,)
    assert all(is_cocycle(g) for g in h1.generators)


SMALL_GROUPS = {"Z2": make_cyclic(2), "Z3": make_cyclic(3), "Z4": make_cyclic(4), "V4": KLEIN}
SMALL_COEFFICIENTS = {"Z/2": [2], "Z/3": [3], "Z/4": [4], "(Z/2)^2": [2, 2]}


def automorphisms(moduli: list[int]) -> list[np.ndarray]:
    """Aut(A) as integer matrices, for A cyclic or (Z/2)^2."""
    if len(moduli) == 1:
        m = moduli[0]
        return [np.array([[u]]) for u in range(1, m) if math.gcd(u, m) == 1]
    entries = itertools.product(range(2), repeat=4)
    return [np.array(e).reshape(2, 2) for e in entries if (e[0] * e[3] - e[1] * e[2]) % 2]


def actions(group: FiniteGroup, moduli: list[int]) -> list[np.ndarray]:
    """Every homomorphism G -> Aut(A), as the stacked matrices of all elements."""
    m, n = moduli[0], group.order
    found = []
    for choice in itertools.product(automorphisms(moduli), repeat=n):
        pairs = itertools.product(range(n), repeat=2)
        if all(((choice[g] @ choice[h] - choice[group.mul[g, h]]) % m == 0).all() for g, h in pairs):
            found.append(np.stack(choice))
    return found


def small_modules():
    for group_name, group in SMALL_GROUPS.items():
        for coefficient_name, moduli in SMALL_COEFFICIENTS.items():
            for k, matrices in enumerate(actions(group, moduli)):
                module = GModule(group, CoefficientGroup.finite(moduli), matrices)
                yield pytest.param(module, id=f"{group_name}-{coefficient_name}-action{k}")
    yield pytest.param(GModule(make_symmetric(3), CoefficientGroup.finite([2])), id="S3-Z/2-action0")


@pytest.mark.parametrize("degree", [0, 1, 2])
@pytest.mark.parametrize("module", list(small_modules()))
def test_agrees_with_brute_force(module: GModule, degree: int) -> None:
    computed = cohomology(module, degree)
    oracle = brute_force_cohomology(module, degree, 2_000_000)
    assert oracle.order == computed.order
    assert oracle.factors == tuple(f for f in computed.factors if f != 1)


def test_every_action_is_enumerated() -> None:
    # Aut(Z/4) = {1, 3}; Aut((Z/2)^2) = GL_2(F_2) = S3, which holds no Klein four-group
    assert len(actions(make_cyclic(4), [4])) == 2
    assert len(actions(KLEIN, [3])) == 4
    assert len(actions(KLEIN, [2, 2])) == 10
    assert len(actions(make_cyclic(3), [2, 2])) == 3


def test_brute_force_limits(z2_mod2: GModule) -> None:
    with pytest.raises(CapacityExceeded):
        brute_force_cohomology(GModule(make_cyclic(4), CoefficientGroup.finite([2])), 2, 10)
    assert brute_force_cohomology(z2_mod2, 0, 100).factors == (2,)


def test_coboundary_matrix_matches_coboundary(sign_module: GModule, rng) -> None:
    for degree in range(3):
        phi = random_cochain(sign_module, degree, rng)
        matrix = coboundary_matrix(sign_module, degree)
        assert (matrix.nrows, matrix.ncols) == (6 ** (degree + 1), 6**degree)
        assert matrix.matvec(phi.values.reshape(-1).tolist()) == coboundary(phi).values.reshape(-1).tolist()
    with pytest.raises(UnsupportedDegree):
        coboundary_matrix(sign_module, -2)


def test_carry_class(z2_mod2: GModule, rng) -> None:
    h2 = cohomology(z2_mod2, 2)
    carry = carry_cocycle(z2_mod2)
    assert class_of(carry, h2) == (1,)
    shifted = carry + coboundary(random_cochain(z2_mod2, 1, rng))
    assert class_of(shifted, h2) == (1,)
    assert not is_coboundary(carry, h2).member


def test_coboundary_witness(rng) -> None:
    module = GModule(make_symmetric(3), CoefficientGroup.finite([2, 3]))
    h2 = cohomology(module, 2)
    psi = coboundary(random_cochain(module, 1, rng))
    membership = is_coboundary(psi, h2)
    assert membership.member
    assert coboundary(membership.witness) == psi


def test_class_of_checks(z2_mod2: GModule) -> None:
    h2 = cohomology(z2_mod2, 2)
    with pytest.raises(NotACocycle):
        class_of(Cochain(z2_mod2, 2, np.array([[0], [1], [0], [0]])), h2)
    with pytest.raises(ModuleMismatch):
        class_of(zero_cochain(z2_mod2, 1), h2)
    with pytest.raises(UnsupportedDegree):
        cohomology(z2_mod2, -1)


def test_degree_zero_membership(z2_mod2: GModule) -> None:
    h0 = cohomology(z2_mod2, 0)
    assert is_coboundary(zero_cochain(z2_mod2, 0), h0).member
    assert not is_coboundary(Cochain(z2_mod2, 0, np.array([[1]])), h0).member


def test_elements_and_combination() -> None:
    module = GModule(KLEIN, CoefficientGroup.finite([2]))
    h1 = cohomology(module, 1)
    listed = elements(h1)
    assert len(listed) == 4
    for coordinates, representative in listed:
        assert class_of(representative, h1) == coordinates
    assert combination(h1, (0, 0)).is_zero()


def test_random_cocycle_and_enumeration(z2_mod2: GModule, rng) -> None:
    assert is_cocycle(random_cocycle(z2_mod2, 2, rng))
    cocycles = enumerate_cocycles(z2_mod2, 2, 100)
    # |Z^2| = |H^2| * |B^2| = 2 * 2
    assert len(cocycles) == 4
    assert all(is_cocycle(psi) for psi in cocycles)
    with pytest.raises(CapacityExceeded):
        enumerate_cocycles(z2_mod2, 2, 2)


@pytest.mark.parametrize("n", [2, 3, 4, 6])
def test_torus_first_cohomology(n: int) -> None:
    module = GModule(make_cyclic(n), CoefficientGroup.torus())
    h1 = cohomology(module, 1)
    assert h1.order == n
    generator = h1.generators[0]
    assert is_cocycle(generator)
    assert class_of(generator, h1) == (1,)
    # Hom(Z/n, Q/Z) is the characters g -> kg/n, all valued in (1/n)Z/Z
    assert len(enumerate_cocycles(truncate_torus(module, n), 1, 1000)) == n
    characters = [
        Cochain(module, 1, as_fractions(np.arange(n).reshape(n, 1) * k % n) / n) for k in range(n)
    ]
    assert all(is_cocycle(chi) for chi in characters)
    assert len({class_of(chi, h1) for chi in characters}) == n


def test_torus_switchback_witness(rng) -> None:
    module = GModule(make_cyclic(3), CoefficientGroup.torus())
    h2 = cohomology(module, 2)
    assert h2.factors == ()
    psi = coboundary(random_cochain(module, 1, rng))
    membership = is_coboundary(psi, h2)
    assert membership.member
    assert coboundary(membership.witness) == psi


def test_torus_degree_zero(z2: FiniteGroup) -> None:
    module = GModule(z2, CoefficientGroup.torus())
    h0 = cohomology(module, 0, denominator_multiplier=3)
    assert h0.truncation == 6
    assert h0.factors == (6,)
    assert h0.generators[0].values[0, 0].denominator == 6
    assert class_of(Cochain(module, 0, as_fractions([[Fraction(1, 2)]])), h0) == (3,)
    with pytest.raises(ModuleMismatch, match="truncation"):
        class_of(Cochain(module, 0, as_fractions([[Fraction(1, 7)]])), h0)


@pytest.mark.parametrize("degree", [1, 2, 3])
def test_rational_cohomology_vanishes(degree: int, rng) -> None:
    module = GModule(make_symmetric(3), CoefficientGroup.rational())
    group = cohomology(module, degree)
    assert group.rank == 0
    psi = random_cocycle(module, degree, rng)
    membership = is_coboundary(psi, group)
    assert membership.member
    assert coboundary(membership.witness) == psi


def test_rational_degree_zero() -> None:
    module = GModule(make_cyclic(2), CoefficientGroup.rational(2), np.array([np.eye(2), [[0, 1], [1, 0]]]))
    h0 = cohomology(module, 0)
    # fixed vectors of the swap
    assert h0.rank == 1
    assert h0.order is None


def test_inflation_in_degree_one_and_two(z2_mod2: GModule) -> None:
    hom = make_quotient_hom(4, 2)
    z4_mod2 = GModule(make_cyclic(4), CoefficientGroup.finite([2]))
    for degree, injective in [(1, True), (2, False)]:
        source, target = cohomology(z2_mod2, degree), cohomology(z4_mod2, degree)
        images = [inflate(hom, g) for g in source.generators]
        assert induced_hom(source, target, images).injective is injective
