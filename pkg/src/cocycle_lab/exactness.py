"""Exactness of the long cohomology sequence attached to a ModuleSES.

0 -> H^0(A) -> H^0(B) -> H^0(C) -> H^1(A) -> ... -> H^p(C) -> H^(p+1)(A)
"""

import logging
from dataclasses import dataclass

import numpy as np

from cocycle_lab.abelian import AbelianHom
from cocycle_lab.cochains import Cochain, coboundary
from cocycle_lab.cohomology import (
    CohomologyGroup,
    cohomology,
    combination,
    induced_hom,
    is_coboundary,
)
from cocycle_lab.config import SesFamily
from cocycle_lab.errors import WrongCoefficientKind
from cocycle_lab.sequences import ModuleSES, connecting_map


@dataclass(frozen=True)
class SlotCheck:
    position: str
    degree: int
    exact: bool
    detail: str = ""
    coordinates: tuple | None = None
    counterexample: Cochain | None = None


@dataclass(frozen=True)
class ExactnessReport:
    family: SesFamily
    max_degree: int
    slots: tuple[SlotCheck, ...]

    @property
    def exact(self) -> bool:
        return all(slot.exact for slot in self.slots)


def _check_slot(
    position: str,
    degree: int,
    middle: CohomologyGroup,
    incoming: AbelianHom | None,
    outgoing: AbelianHom,
) -> SlotCheck:
    """image(incoming) == kernel(outgoing) inside middle."""
    if incoming is not None:
        for k, _ in enumerate(incoming.source.factors):
            unit = [int(i == k) for i in range(len(incoming.source.factors))]
            if any(outgoing(incoming(unit))):
                return SlotCheck(position, degree, False, "composite is not zero", tuple(unit))
    for x in outgoing.kernel_generators:
        x = middle.group.reduce(x)
        if not any(x):
            continue
        if incoming is None or not incoming.in_image(x):
            return SlotCheck(
                position, degree, False, "kernel element outside the image", x, combination(middle, x)
            )
    return SlotCheck(position, degree, True)


def _discrete_check(ses: ModuleSES, max_degree: int) -> list[SlotCheck]:
    for module in (ses.A, ses.B, ses.C):
        if not module.is_discrete:
            raise WrongCoefficientKind("the generic exactness check needs discrete coefficients")
    h_a = [cohomology(ses.A, p) for p in range(max_degree + 2)]
    h_b = [cohomology(ses.B, p) for p in range(max_degree + 1)]
    h_c = [cohomology(ses.C, p) for p in range(max_degree + 1)]
    i_star = [
        induced_hom(h_a[p], h_b[p], [ses.i.push_cochain(g) for g in h_a[p].generators])
        for p in range(max_degree + 1)
    ]
    j_star = [
        induced_hom(h_b[p], h_c[p], [ses.j.push_cochain(g) for g in h_b[p].generators])
        for p in range(max_degree + 1)
    ]
    delta = [
        induced_hom(h_c[p], h_a[p + 1], [connecting_map(ses, g) for g in h_c[p].generators])
        for p in range(max_degree + 1)
    ]
    slots = []
    for p in range(max_degree + 1):
        slots.append(_check_slot(f"H^{p}(A)", p, h_a[p], delta[p - 1] if p else None, i_star[p]))
        slots.append(_check_slot(f"H^{p}(B)", p, h_b[p], i_star[p], j_star[p]))
        slots.append(_check_slot(f"H^{p}(C)", p, h_c[p], j_star[p], delta[p]))
    return slots


def _rational_check(ses: ModuleSES, max_degree: int, denominator_multiplier: int) -> list[SlotCheck]:
    """Z^d -> Q^d -> (Q/Z)^d, where H^p(Q^d) = 0 for p >= 1.

    Torus fixed points are taken at the truncation denominator exp(G) * k.
    """
    integral, rational, torus = ses.A, ses.B, ses.C
    h_z0, h_q0 = cohomology(integral, 0), cohomology(rational, 0)
    slots = [
        SlotCheck(
            "H^0(A)",
            0,
            all(f == 0 for f in h_z0.factors) and len(h_z0.factors) == h_q0.rank,
            f"Z-rank {len(h_z0.factors)}, Q-rank {h_q0.rank}",
        )
    ]
    # the rational fixed points are spanned by integral ones, which j kills
    integral_fixed = [
        Cochain(integral, 0, b.values.astype(np.int64))
        for b in h_q0.generators
        if all(x.denominator == 1 for x in b.values.reshape(-1))
    ]
    slots.append(
        SlotCheck(
            "H^0(B)",
            0,
            len(integral_fixed) == h_q0.rank
            and all(coboundary(b).is_zero() for b in integral_fixed),
            "rational fixed points have an integral basis",
        )
    )
    h_t0 = cohomology(torus, 0, denominator_multiplier=denominator_multiplier)
    h_z1 = cohomology(integral, 1)
    deltas = [induced_hom(h_t0, h_z1, [connecting_map(ses, g) for g in h_t0.generators])]
    # every c with delta(c) = 0 lifts to the rational fixed point s(c) - mu
    failure = None
    for x in deltas[0].kernel_generators:
        c = combination(h_t0, h_t0.group.reduce(x))
        membership = is_coboundary(connecting_map(ses, c), h_z1)
        if not membership.member:
            failure = c
            break
        lifted = Cochain(rational, 0, ses.section(c.values)) - ses.i.push_cochain(membership.witness)
        if not coboundary(lifted).is_zero() or ses.j.push_cochain(lifted) != c:
            failure = c
            break
    slots.append(
        SlotCheck(
            "H^0(C)",
            0,
            failure is None,
            f"truncated at denominator {h_t0.truncation}",
            counterexample=failure,
        )
    )
    for p in range(1, max_degree + 1):
        h_t = cohomology(torus, p, denominator_multiplier=denominator_multiplier)
        h_z = cohomology(integral, p + 1)
        deltas.append(induced_hom(h_t, h_z, [connecting_map(ses, g) for g in h_t.generators]))
        h_q = cohomology(rational, p)
        slots.append(SlotCheck(f"H^{p}(A)", p, deltas[p - 1].surjective, "delta onto H^p(Z^d)"))
        slots.append(SlotCheck(f"H^{p}(B)", p, h_q.rank == 0, f"Q-rank {h_q.rank}"))
        slots.append(
            SlotCheck(
                f"H^{p}(C)", p, deltas[p].injective, f"switchback onto factors {list(h_z.factors)}"
            )
        )
    return slots


def les_check(ses: ModuleSES, max_degree: int, *, denominator_multiplier: int = 1) -> ExactnessReport:
    if ses.family == SesFamily.rational:
        slots = _rational_check(ses, max_degree, denominator_multiplier)
    else:
        slots = _discrete_check(ses, max_degree)
    report = ExactnessReport(ses.family, max_degree, tuple(slots))
    logging.info(f"Long exact sequence up to degree {max_degree}: exact={report.exact}")
    return report
