"""Quick invariant suites over small groups, run by `cocycle-lab selftest`."""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from cocycle_lab.cochains import (
    Cochain,
    average_kappa,
    coboundary,
    dimension_shift_Q,
    indicator_cochain,
    is_cocycle,
    random_cochain,
)
from cocycle_lab.cohomology import (
    brute_force_cohomology,
    cohomology,
    random_cocycle,
)
from cocycle_lab.errors import CocycleLabError, NotACocycle
from cocycle_lab.exactness import les_check
from cocycle_lab.extensions import extension_from_cocycle
from cocycle_lab.groups import FiniteGroup, make_cyclic, make_product, make_symmetric
from cocycle_lab.modules import CoefficientGroup, GModule, InducedModule, embed_constants
from cocycle_lab.regularization import crossed_hom_bound_check, regularize
from cocycle_lab.sequences import multiplication_ses

ASSOCIATIVITY_SAMPLES = 500


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    detail: str = ""


def _groups() -> list[FiniteGroup]:
    z2 = make_cyclic(2)
    return [z2, make_cyclic(3), make_product(z2, z2), make_symmetric(3)]


def _coefficients() -> list[CoefficientGroup]:
    return [
        CoefficientGroup.finite([2]),
        CoefficientGroup.finite([3]),
        CoefficientGroup.free(),
        CoefficientGroup.rational(),
        CoefficientGroup.torus(),
    ]


def coboundary_squares_to_zero(rng: np.random.Generator) -> str:
    checked = 0
    for group in _groups():
        for coefficients in _coefficients():
            module = GModule(group, coefficients)
            for degree in range(3):
                phi = random_cochain(module, degree, rng)
                assert coboundary(coboundary(phi)).is_zero(), f"d o d != 0 over {module!r} in degree {degree}"
                checked += 1
    return f"{checked} cochains"


def shift_contracts(rng: np.random.Generator) -> str:
    checked = 0
    for group in _groups():
        for coefficients in (CoefficientGroup.finite([2]), CoefficientGroup.free()):
            module = GModule(group, coefficients)
            for degree in (1, 2):
                psi = random_cocycle(module, degree, rng)
                shifted = dimension_shift_Q(psi)
                constants = np.concatenate([embed_constants(v, module) for v in psi.values])
                expected = Cochain(InducedModule(module), degree, constants)
                assert coboundary(shifted) == expected, f"d(Q psi) != iota(psi) over {module!r}"
                checked += 1
    return f"{checked} cocycles"


def averaging_contracts(rng: np.random.Generator) -> str:
    for group in _groups():
        module = GModule(group, CoefficientGroup.rational())
        for degree in (1, 2):
            psi = random_cocycle(module, degree, rng)
            assert coboundary(average_kappa(psi)) == psi, f"d(kappa) != psi over {group.label}"
            assert cohomology(module, degree).rank == 0, f"rational H^{degree} does not vanish"
    return "rational cohomology vanishes"


def oracle_agrees(rng: np.random.Generator) -> str:
    for group in (make_cyclic(2), make_cyclic(3), make_cyclic(4)):
        for modulus in (2, 3):
            module = GModule(group, CoefficientGroup.finite([modulus]))
            for degree in (1, 2):
                fast, slow = cohomology(module, degree), brute_force_cohomology(module, degree, 10**6)
                assert fast.factors == slow.factors, f"{fast.factors} != {slow.factors} for {group.label}"
    return "cyclic groups up to order 4"


def long_sequence_exact(rng: np.random.Generator) -> str:
    for group in (make_cyclic(2), make_cyclic(3)):
        for m in (2, 3):
            report = les_check(multiplication_ses(group, m), 1)
            assert report.exact, f"sequence Z -> Z -> Z/{m} over {group.label} is not exact"
    return "Z -x m-> Z -> Z/m"


def switchback_orders(rng: np.random.Generator) -> str:
    for n in (2, 3, 4, 6):
        group = cohomology(GModule(make_cyclic(n), CoefficientGroup.torus()), 1)
        assert group.order == n, f"H^1(Z/{n}, Q/Z) has order {group.order}"
    return "H^1(Z/n, Q/Z) = Z/n"


def crossed_hom_bound(rng: np.random.Generator) -> str:
    for group in (make_cyclic(4), make_product(make_cyclic(2), make_cyclic(2))):
        report = crossed_hom_bound_check(GModule(group, CoefficientGroup.finite([2])))
        assert report.holds, f"rho_inf > 2 rho0 for a crossed homomorphism over {group.label}"
    return "order 4 groups"


def regularization_identity(rng: np.random.Generator) -> str:
    module = GModule(make_cyclic(8), CoefficientGroup.finite([2]))
    psi = coboundary(indicator_cochain(module, 1, (3,), 1))
    result = regularize(psi, threshold_override=Fraction(1, 2))
    assert result.phi + coboundary(result.lam) == psi, "psi != phi + d(lambda)"
    return f"rho0(psi) = {result.rho0_psi}"


def extension_associativity(rng: np.random.Generator) -> str:
    module = GModule(make_cyclic(2), CoefficientGroup.finite([2]))
    for _ in range(ASSOCIATIVITY_SAMPLES):
        psi = random_cochain(module, 2, rng)
        try:
            extension_from_cocycle(psi, diagnostic=True)
            associative = True
        except NotACocycle:
            associative = False
        assert associative == is_cocycle(psi), "associativity and the cocycle identity disagree"
    return f"{ASSOCIATIVITY_SAMPLES} random 2-cochains"


SUITES: dict[str, Callable[[np.random.Generator], str]] = {
    "coboundary": coboundary_squares_to_zero,
    "shift": shift_contracts,
    "averaging": averaging_contracts,
    "oracle": oracle_agrees,
    "les": long_sequence_exact,
    "switchback": switchback_orders,
    "crossed-hom": crossed_hom_bound,
    "regularization": regularization_identity,
    "extensions": extension_associativity,
}


def run_selftest(seed: int = 0, names: list[str] | None = None) -> list[SuiteResult]:
    results = []
    for name, suite in SUITES.items():
        if names and name not in names:
            continue
        rng = np.random.default_rng(seed)
        try:
            results.append(SuiteResult(name, True, suite(rng)))
        except (AssertionError, CocycleLabError) as e:
            logging.error(f"Suite {name} failed: {e}")
            results.append(SuiteResult(name, False, str(e)))
    return results
