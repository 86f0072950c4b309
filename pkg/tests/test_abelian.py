import math

import pytest

from cocycle_lab.abelian import AbelianGroup, AbelianHom, factors_from_torsion_counts
from cocycle_lab.errors import ModuleMismatch

Z2, Z4, Z3, Z = AbelianGroup((2,)), AbelianGroup((4,)), AbelianGroup((3,)), AbelianGroup((0,))


def test_abelian_group() -> None:
    mixed = AbelianGroup((2, 0))
    assert mixed.rank == 1
    assert mixed.order is None
    assert mixed.reduce((3, -1)) == (1, -1)
    assert AbelianGroup((2, 3)).order == 6
    assert len(list(AbelianGroup((2, 2)).elements())) == 4
    assert AbelianGroup(()).order == 1
    with pytest.raises(ValueError):
        mixed.elements()
    with pytest.raises(AssertionError, match="invalid invariant factors"):
        AbelianGroup((-2,))


def test_surjection() -> None:
    hom = AbelianHom(Z4, Z2, ((1,),))
    assert hom((3,)) == (1,)
    assert hom.surjective
    assert not hom.injective
    assert hom.cokernel_factors == []
    assert hom.image_factors == [2]
    assert hom(hom.preimage((1,))) == (1,)


def test_injection() -> None:
    hom = AbelianHom(Z2, Z4, ((2,),))
    assert hom.injective
    assert not hom.surjective
    assert hom.cokernel_factors == [2]
    assert hom.image_factors == [2]
    assert hom.in_image((2,))
    assert not hom.in_image((1,))
    assert hom.preimage((1,)) is None


def test_free_source() -> None:
    hom = AbelianHom(Z, Z3, ((1,),))
    assert hom.surjective
    assert not hom.injective
    assert hom.image_factors == [3]
    assert hom((5,)) == (2,)


def test_invalid_homs() -> None:
    with pytest.raises(ModuleMismatch, match="other order"):
        AbelianHom(Z2, Z4, ((1,),))
    with pytest.raises(ModuleMismatch, match="shape"):
        AbelianHom(Z2, Z4, ((2, 0),))


def test_compose() -> None:
    first = AbelianHom(Z2, Z4, ((2,),))
    second = AbelianHom(Z4, Z2, ((1,),))
    assert second.compose(first).matrix == ((0,),)
    assert first.compose(second).matrix == ((2,),)
    with pytest.raises(ModuleMismatch, match="not composable"):
        first.compose(first)


@pytest.mark.parametrize(
    "factors",
    [(), (2,), (6,), (2, 4), (2, 2, 2), (3, 9), (2, 12)],
    ids=["trivial", "Z2", "Z6", "Z2xZ4", "Z2^3", "Z3xZ9", "Z2xZ12"],
)
def test_factors_from_torsion_counts(factors: tuple[int, ...]) -> None:
    def torsion(k: int) -> int:
        return math.prod(math.gcd(k, f) for f in factors)

    assert factors_from_torsion_counts(math.prod(factors), torsion) == list(factors)
