import numpy as np
import pytest

from cocycle_lab.errors import DivisibilityError, GroupAxiomError
from cocycle_lab.groups import (
    FiniteGroup,
    GroupHom,
    Tower,
    associativity_failure,
    compose,
    identity_hom,
    make_cyclic,
    make_product,
    make_quotient_hom,
    make_symmetric,
    make_tower,
    tuple_digits,
    tuple_index,
)


@pytest.mark.parametrize(
    ("table", "message"),
    [
        ([[0, 1], [1, 1]], "no two-sided inverse"),
        ([[0, 1, 2], [1, 2, 0]], "shape"),
        ([[1, 0], [0, 1]], "not a two-sided identity"),
        ([[0, 1], [1, 2]], "not closed"),
    ],
    ids=["inverse", "shape", "identity", "closure"],
)
def test_invalid_table(table: list[list[int]], message: str) -> None:
    with pytest.raises(GroupAxiomError, match=message):
        FiniteGroup(np.array(table))


def test_non_associative_loop() -> None:
    # a Latin square with identity 0 that is not a group
    table = np.array(
        [
            [0, 1, 2, 3, 4],
            [1, 0, 3, 4, 2],
            [2, 4, 0, 1, 3],
            [3, 2, 4, 0, 1],
            [4, 3, 1, 2, 0],
        ]
    )
    assert associativity_failure(table) is not None
    with pytest.raises(GroupAxiomError, match="associativity fails"):
        FiniteGroup(table)


def test_cyclic_group() -> None:
    group = make_cyclic(6)
    assert group.order == 6
    assert group.exponent == 6
    assert group.is_abelian
    assert [group.element_order(g) for g in range(6)] == [1, 6, 3, 2, 3, 6]
    assert group.inv.tolist() == [0, 5, 4, 3, 2, 1]
    assert group.product([1, 2, 5]) == 2


def test_symmetric_group(s3: FiniteGroup) -> None:
    assert s3.order == 6
    assert not s3.is_abelian
    assert s3.exponent == 6
    assert sorted(s3.element_order(g) for g in range(6)) == [1, 2, 2, 2, 3, 3]


def test_product(klein: FiniteGroup) -> None:
    assert klein.order == 4
    assert klein.exponent == 2
    assert klein.is_abelian
    assert klein == make_product(make_cyclic(2), make_cyclic(2))
    assert klein != make_cyclic(4)


def test_hom_checks(z4: FiniteGroup, z2: FiniteGroup) -> None:
    hom = make_quotient_hom(4, 2)
    assert hom.surjective
    assert not hom.injective
    with pytest.raises(GroupAxiomError, match="not multiplicative"):
        GroupHom(z2, z4, np.array([0, 1]))
    with pytest.raises(GroupAxiomError, match="identity"):
        GroupHom(z2, z2, np.array([1, 0]))
    with pytest.raises(DivisibilityError):
        make_quotient_hom(4, 3)


def test_compose_and_identity() -> None:
    first, second = make_quotient_hom(8, 4), make_quotient_hom(4, 2)
    composite = compose(second, first)
    assert composite == make_quotient_hom(8, 2)
    assert compose(composite, identity_hom(first.source)) == composite
    with pytest.raises(GroupAxiomError, match="not composable"):
        compose(first, second)


def test_tower() -> None:
    tower = make_tower([2, 4, 8])
    assert [level.order for level in tower.levels] == [2, 4, 8]
    assert tower.composite(2, 0).map.tolist() == [0, 1, 0, 1, 0, 1, 0, 1]
    assert tower.composite(1, 1) == identity_hom(tower.levels[1])
    with pytest.raises(ValueError):
        tower.composite(0, 1)


def test_tower_rejects_non_surjective_step(z2: FiniteGroup, z4: FiniteGroup) -> None:
    trivial = GroupHom(z4, z2, np.zeros(4, dtype=np.int64))
    with pytest.raises(GroupAxiomError, match="not surjective"):
        Tower((z2, z4), (trivial,))


def test_tuple_indexing() -> None:
    digits = tuple_digits(3, 2)
    assert [d.tolist() for d in digits] == [[0, 0, 0, 1, 1, 1, 2, 2, 2], [0, 1, 2] * 3]
    assert tuple_index(3, digits).tolist() == list(range(9))
    assert tuple_index(3, ()).tolist() == [0]


def test_symmetric_composition_order() -> None:
    s3 = make_symmetric(3)
    # g = (0, 2, 1) and h = (1, 0, 2) as image tuples; g(h(x)) = (2, 0, 1)
    g, h = 1, 2
    assert s3.mul[g, h] == 4
