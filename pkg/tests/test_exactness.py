import numpy as np
import pytest

from cocycle_lab.config import SesFamily
from cocycle_lab.errors import WrongCoefficientKind
from cocycle_lab.exactness import les_check
from cocycle_lab.groups import FiniteGroup, make_cyclic, make_symmetric
from cocycle_lab.modules import CoefficientGroup, GModule
from cocycle_lab.sequences import CanonicalSection, ModuleMap, ModuleSES, multiplication_ses, rational_ses


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("m", [2, 3])
def test_multiplication_sequence_is_exact(n: int, m: int) -> None:
    report = les_check(multiplication_ses(make_cyclic(n), m), 2)
    assert report.exact, [slot for slot in report.slots if not slot.exact]
    assert report.family == SesFamily.multiplication
    assert len(report.slots) == 9


def test_symmetric_section_is_exact(z2: FiniteGroup) -> None:
    assert les_check(multiplication_ses(z2, 4, section="symmetric"), 2).exact


def test_twisted_sequence_is_exact() -> None:
    signs = np.array([1, -1, -1, 1, 1, -1]).reshape(6, 1, 1)
    assert les_check(multiplication_ses(make_symmetric(3), 3, matrices=signs), 1).exact


@pytest.mark.parametrize("n", [2, 3])
def test_rational_sequence_is_exact(n: int) -> None:
    report = les_check(rational_ses(make_cyclic(n)), 2, denominator_multiplier=2)
    assert report.exact, [slot for slot in report.slots if not slot.exact]
    assert report.family == SesFamily.rational
    assert len(report.slots) == 9
    assert f"denominator {2 * n}" in report.slots[2].detail


def test_broken_sequence_is_reported(z2: FiniteGroup) -> None:
    # image 2Z is not the kernel 4Z
    free = GModule(z2, CoefficientGroup.free())
    quotient = GModule(z2, CoefficientGroup.finite([4]))
    ses = ModuleSES(ModuleMap(free, free, [[2]]), ModuleMap(free, quotient, [[1]]), CanonicalSection(free))
    report = les_check(ses, 1)
    assert not report.exact
    failing = next(slot for slot in report.slots if not slot.exact)
    assert failing.position == "H^0(B)"
    assert failing.detail == "composite is not zero"


def test_torus_in_generic_check_is_rejected(z2: FiniteGroup) -> None:
    ses = rational_ses(z2)
    plain = ModuleSES(ses.i, ses.j, ses.section)
    with pytest.raises(WrongCoefficientKind):
        les_check(plain, 1)
