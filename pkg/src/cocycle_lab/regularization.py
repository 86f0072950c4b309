"""Smallness-driven decomposition psi = phi + d(lambda) of small cocycles.

The recursion lowers the degree through the dimension shift Q into the quotient
module F(A) = C(G, A) / iota(A), solves there, and reads the answer back inside
the constant maps iota(A).
"""

import json
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from cocycle_lab.cochains import (
    Cochain,
    coboundary,
    coboundary_at_identity,
    dimension_shift_Q,
    is_sqrt_small,
    require_cocycle,
    rho0,
    rho0_profile,
    rho_inf,
    zero_cochain,
)
from cocycle_lab.cohomology import coboundary_matrix, enumerate_cocycles
from cocycle_lab.errors import (
    NonIsometricModule,
    NotSmallEnough,
    RegularityBreach,
    UnsupportedDegree,
    WrongCoefficientKind,
)
from cocycle_lab.modules import (
    CoefficientKind,
    GModule,
    InducedModule,
    as_fractions,
    is_constant,
    quotient_of,
    truncate_torus,
)
from cocycle_lab.snf import smith_normal_form


def eta(p: int, eta_scale: int = 100) -> Fraction:
    return Fraction(1, eta_scale * math.factorial(p) ** 2)


@dataclass(frozen=True)
class LevelRecord:
    """Achieved norms at one level of the recursion; eps_prime is None when rho0 >= 1."""

    degree: int
    rho0_psi: Fraction
    eps_prime: Fraction | None
    sqrt_small: bool | None
    rho0_lambda: Fraction
    rho_inf_phi: Fraction


@dataclass(frozen=True, eq=False)
class RegularizationResult:
    psi: Cochain
    phi: Cochain
    lam: Cochain
    levels: tuple[LevelRecord, ...]
    threshold: Fraction
    guaranteed: bool

    @property
    def degree(self) -> int:
        return self.psi.degree

    @property
    def rho0_psi(self) -> Fraction:
        return self.levels[0].rho0_psi

    @property
    def rho0_lambda(self) -> Fraction:
        return self.levels[0].rho0_lambda

    @property
    def rho_inf_phi(self) -> Fraction:
        return self.levels[0].rho_inf_phi


def _smallness_point(psi: Cochain) -> Fraction | None:
    """A point eps' in (rho0, 1) at which psi is eps'-small."""
    r0, following = rho0_profile(psi)
    if r0 >= 1:
        return None
    upper = Fraction(1) if following is None else min(following, Fraction(1))
    return (r0 + upper) / 2


def _regularize(psi: Cochain, levels: list[LevelRecord], guaranteed: bool) -> tuple[Cochain, Cochain]:
    module, p = psi.module, psi.degree
    r0 = rho0(psi)
    if p == 1:
        levels.append(LevelRecord(1, r0, _smallness_point(psi), None, Fraction(0), rho_inf(psi)))
        return psi, zero_cochain(module, 0)

    shifted = dimension_shift_Q(psi, checked=False)
    eps_prime = _smallness_point(psi)
    sqrt_small = None if eps_prime is None else is_sqrt_small(shifted, eps_prime)
    if sqrt_small is False and guaranteed:
        raise RegularityBreach(f"Q psi is not sqrt-small at level {p} (eps' = {eps_prime})")

    induced = InducedModule(module)
    projected = Cochain(quotient_of(module), p - 1, shifted.values)
    logging.info(f"Regularizing degree {p}: rho0 = {r0}, recursing into F(A) of width {induced.width}")
    phi_bar, alpha_bar = _regularize(projected, levels, guaranteed)

    kappa = Cochain(induced, p - 1, phi_bar.values)
    alpha = Cochain(induced, p - 2, alpha_bar.values)
    lam_c = shifted - kappa - coboundary(alpha)
    if not np.all(is_constant(induced, lam_c.values)):
        raise RegularityBreach(f"Q psi - kappa - d(alpha) is not constant-valued at level {p}")
    lam = Cochain(module, p - 1, induced.blocks(lam_c.values)[:, 0, :])
    phi = coboundary_at_identity(kappa)
    if phi + coboundary(lam) != psi:
        raise RegularityBreach(f"psi != phi + d(lambda) at level {p}")
    levels.append(LevelRecord(p, r0, eps_prime, sqrt_small, rho0(lam), rho_inf(phi)))
    return phi, lam


def regularize(
    psi: Cochain, *, threshold_override: Fraction | None = None, eta_scale: int = 100
) -> RegularizationResult:
    """psi = phi + d(lambda) with phi uniformly small, for a cocycle with small rho0."""
    if psi.degree < 1:
        raise UnsupportedDegree("regularization needs a cocycle of degree at least 1")
    if not psi.module.is_isometric:
        raise NonIsometricModule("regularization needs an action by isometries")
    if threshold_override is None:
        threshold, guaranteed = eta(psi.degree, eta_scale), True
    else:
        threshold, guaranteed = Fraction(threshold_override), False
        logging.warning(f"Threshold override {threshold} in use; bounds are not guaranteed")
    if (r0 := rho0(psi)) > threshold:
        require_cocycle(psi)
        raise NotSmallEnough(r0, threshold)
    levels: list[LevelRecord] = []
    try:
        phi, lam = _regularize(psi, levels, guaranteed)
    except RegularityBreach:
        require_cocycle(psi)
        raise
    # psi = phi + d(lambda) holds exactly here, so d(psi) = d(phi) and phi is the sparse one
    require_cocycle(phi)
    return RegularizationResult(psi, phi, lam, tuple(reversed(levels)), threshold, guaranteed)


def trivialize_small_discrete(
    psi: Cochain, *, threshold_override: Fraction | None = None, eta_scale: int = 100
) -> Cochain:
    """lambda with d(lambda) = psi for a small cocycle in a discrete module."""
    if not psi.module.is_discrete:
        raise WrongCoefficientKind("trivialization needs a discrete metric")
    result = regularize(psi, threshold_override=threshold_override, eta_scale=eta_scale)
    if not result.phi.is_zero():
        # rho_inf(phi) < 1 forces phi = 0 in a discrete metric
        if result.guaranteed:
            raise RegularityBreach(f"phi is nonzero with rho_inf = {result.rho_inf_phi}")
        raise NotSmallEnough(result.rho0_psi, result.threshold)
    return result.lam


@dataclass(frozen=True)
class CrossedHomReport:
    tested: int
    small: int
    extremal_ratio: Fraction | None
    violations: tuple[Cochain, ...] = ()
    sampled: bool = False

    @property
    def vacuous(self) -> bool:
        return self.extremal_ratio is None

    @property
    def holds(self) -> bool:
        return not self.violations


def _sampled_cocycles(module: GModule, samples: int, rng: np.random.Generator) -> list[Cochain]:
    """Random integer combinations of a Z-basis of Z^1, divided by small denominators over Q."""
    smith = smith_normal_form(coboundary_matrix(module, 1), track_cols=True, divisibility=False)
    basis = smith.kernel_basis()
    n, w = module.group.order, module.width
    out = [zero_cochain(module, 1)]
    if not basis:
        return out
    for _ in range(samples):
        flat = np.zeros(n * w, dtype=np.int64)
        for vector, c in zip(basis, rng.integers(-2, 3, size=len(basis))):
            for k, v in vector.items():
                flat[k] += int(c) * v
        values = flat.reshape(n, w)
        if module.coefficients.kind == CoefficientKind.rational:
            values = as_fractions(values) / int(rng.integers(1, 5))
        out.append(Cochain(module, 1, values))
    return out


def _cocycles(module: GModule, *, limit: int, samples: int, rng) -> tuple[list[Cochain], bool]:
    match module.coefficients.kind:
        case CoefficientKind.finite:
            return enumerate_cocycles(module, 1, limit), False
        case CoefficientKind.torus:
            denominator = module.group.exponent
            truncated = enumerate_cocycles(truncate_torus(module, denominator), 1, limit)
            return [
                Cochain(module, 1, as_fractions(z.values) / denominator) for z in truncated
            ], False
        case _:
            return _sampled_cocycles(module, samples, rng or np.random.default_rng(0)), True


def crossed_hom_bound_check(
    module: GModule, *, limit: int = 100_000, samples: int = 200, rng: np.random.Generator | None = None
) -> CrossedHomReport:
    """rho_inf(alpha) <= 2 rho0(alpha) for every tested 1-cocycle with rho0(alpha) < 1/2."""
    if not module.is_isometric:
        raise NonIsometricModule("the crossed homomorphism bound needs an action by isometries")
    cocycles, sampled = _cocycles(module, limit=limit, samples=samples, rng=rng)
    small, ratio, violations = 0, None, []
    for alpha in cocycles:
        eps = rho0(alpha)
        if eps >= Fraction(1, 2):
            continue
        small += 1
        top = rho_inf(alpha)
        if top > 2 * eps:
            violations.append(alpha)
        if eps:
            ratio = top / eps if ratio is None else max(ratio, top / eps)
    logging.info(f"Crossed homomorphism bound: {len(cocycles)} tested, {small} small, ratio {ratio}")
    return CrossedHomReport(len(cocycles), small, ratio, tuple(violations), sampled)


@dataclass
class ConstantsTable:
    eta: dict[int, Fraction]
    k_powers: dict[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        degrees = sorted(self.eta)
        assert all(self.eta[p] > 0 for p in degrees), "invalid eta"
        assert all(self.eta[a] > self.eta[b] for a, b in zip(degrees, degrees[1:])), "invalid eta"
        assert all(k >= 0 for k in self.k_powers.values()), "invalid k_powers"

    @classmethod
    def default(cls, max_degree: int, eta_scale: int = 100) -> "ConstantsTable":
        return cls({p: eta(p, eta_scale) for p in range(1, max_degree + 1)})


def fit_constants(results: list[RegularizationResult], eta_scale: int = 100) -> ConstantsTable:
    """K_p^(2^p) = max over runs of max(rho_inf(phi), rho0(lambda))^(2^p) / rho0(psi)."""
    k_powers: dict[int, Fraction] = {}
    for result in results:
        if not result.rho0_psi:
            continue
        achieved = max(result.rho_inf_phi, result.rho0_lambda) ** (2**result.degree)
        value = achieved / result.rho0_psi
        k_powers[result.degree] = max(value, k_powers.get(result.degree, Fraction(0)))
    max_degree = max((r.degree for r in results), default=1)
    table = ConstantsTable.default(max_degree, eta_scale)
    table.k_powers = k_powers
    return table


def save_constants(table: ConstantsTable, path: str | Path) -> None:
    document = {
        "eta": {str(p): str(v) for p, v in sorted(table.eta.items())},
        "k_powers": {str(p): str(v) for p, v in sorted(table.k_powers.items())},
    }
    Path(path).write_text(json.dumps(document, indent=2) + "\n")
    logging.info(f"Saved regularization constants to {path}")


def load_constants(path: str | Path) -> ConstantsTable:
    document = json.loads(Path(path).read_text())
    return ConstantsTable(
        {int(p): Fraction(v) for p, v in document["eta"].items()},
        {int(p): Fraction(v) for p, v in document["k_powers"].items()},
    )


def unstable_degrees(fitted: ConstantsTable, persisted: ConstantsTable) -> list[int]:
    return [
        p
        for p, value in sorted(fitted.k_powers.items())
        if value > persisted.k_powers.get(p, Fraction(0))
    ]


def profile_points(results: list[RegularizationResult]) -> list[tuple[int, float, float, float]]:
    """(degree, rho0(psi)^(2^-p), rho_inf(phi), rho0(lambda)) as floats for drawing."""
    return [
        (r.degree, float(r.rho0_psi) ** (2.0**-r.degree), float(r.rho_inf_phi), float(r.rho0_lambda))
        for r in results
    ]
