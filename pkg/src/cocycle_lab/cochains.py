import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np
from numpy.typing import NDArray

from cocycle_lab.config import check_capacity
from cocycle_lab.errors import ModuleMismatch, NotACocycle, UnsupportedDegree, WrongCoefficientKind
from cocycle_lab.groups import tuple_digits, tuple_index
from cocycle_lab.modules import (
    CoefficientKind,
    GModule,
    InducedModule,
    Module,
    as_fractions,
    mass_above,
    smallness_profile,
)

CANDIDATE_CHUNK = 2**22


@dataclass(frozen=True, eq=False)
class Cochain:
    """A map G^p -> A stored as an (|G|^p, width) table in row-major tuple order."""

    module: Module
    degree: int
    values: NDArray

    def __post_init__(self):
        if self.degree < 0:
            raise UnsupportedDegree(f"cochains of negative degree {self.degree} are zero")
        rows = self.module.group.order**self.degree
        check_capacity(rows * self.module.width, f"degree {self.degree} cochain")
        values = np.asarray(self.values, dtype=self.module.dtype)
        if values.shape != (rows, self.module.width):
            raise ModuleMismatch(
                f"cochain table has shape {values.shape}, expected {(rows, self.module.width)}"
            )
        object.__setattr__(self, "values", self.module.reduce(values))

    @property
    def group(self):
        return self.module.group

    def is_zero(self) -> bool:
        return not np.any(self.values != 0)

    def _check_same(self, other: "Cochain") -> None:
        if other.module != self.module or other.degree != self.degree:
            raise ModuleMismatch("cochains live in different groups or degrees")

    def __add__(self, other: "Cochain") -> "Cochain":
        self._check_same(other)
        return Cochain(self.module, self.degree, self.values + other.values)

    def __sub__(self, other: "Cochain") -> "Cochain":
        self._check_same(other)
        return Cochain(self.module, self.degree, self.values - other.values)

    def __neg__(self) -> "Cochain":
        return Cochain(self.module, self.degree, -self.values)

    def scale(self, k: int) -> "Cochain":
        return Cochain(self.module, self.degree, self.values * k)

    def __eq__(self, other):
        if not isinstance(other, Cochain):
            return NotImplemented
        return (
            self.module == other.module
            and self.degree == other.degree
            and bool(np.all(self.values == other.values))
        )

    __hash__ = None

    def __repr__(self):
        return f"Cochain(degree={self.degree}, module={self.module!r})"


def zero_cochain(module: Module, degree: int) -> Cochain:
    return Cochain(module, degree, module.zeros(module.group.order**degree))


def _act_grouped(module: Module, g_digits: NDArray, values: NDArray) -> NDArray:
    if module.is_trivial:
        return values
    out = np.empty_like(values)
    order = np.argsort(g_digits, kind="stable")
    groups, starts = np.unique(g_digits[order], return_index=True)
    for g, rows in zip(groups, np.split(order, starts[1:])):
        out[rows] = module.act(int(g), values[rows])
    return out


def _coboundary_at(phi: Cochain, digits: tuple) -> NDArray:
    module, p = phi.module, phi.degree
    n, mul = module.group.order, module.group.mul
    values = phi.values
    out = _act_grouped(module, digits[0], values[tuple_index(n, digits[1:]) if p else 0 * digits[0]])
    for i in range(1, p + 1):
        merged = digits[: i - 1] + (mul[digits[i - 1], digits[i]],) + digits[i + 1 :]
        term = values[tuple_index(n, merged)]
        out = out + term if i % 2 == 0 else out - term
    last = values[tuple_index(n, digits[:p]) if p else 0 * digits[0]]
    out = out + last if (p + 1) % 2 == 0 else out - last
    return module.reduce(out)


def coboundary(phi: Cochain) -> Cochain:
    """dphi(g_1..g_{p+1}) = T^{g_1} phi(g_2..) + sum_i (-1)^i phi(.., g_i g_{i+1}, ..)
    + (-1)^{p+1} phi(g_1..g_p).
    """
    n, p = phi.group.order, phi.degree
    check_capacity(n ** (p + 1) * phi.module.width, f"degree {p + 1} coboundary")
    digits = tuple(np.asarray(d) for d in tuple_digits(n, p + 1))
    return Cochain(phi.module, p + 1, _coboundary_at(phi, digits))


def _support_candidates(phi: Cochain) -> Iterator[tuple]:
    """Every (p+1)-tuple at which some term of d(phi) reads a nonzero value of phi."""
    n, p, mul, inv = phi.group.order, phi.degree, phi.group.mul, phi.group.inv
    support = np.flatnonzero(np.any(phi.values != 0, axis=1))
    for start in range(0, len(support), max(1, CANDIDATE_CHUNK // n)):
        rows = support[start : start + CANDIDATE_CHUNK // n]
        chunk = tuple(np.asarray(d) for d in tuple_digits(n, p, rows))
        s = tuple(np.repeat(d, n) for d in chunk)
        free = np.tile(np.arange(n), len(chunk[0]))
        yield (free,) + s
        yield s + (free,)
        for i in range(p):
            yield s[:i] + (free, mul[inv[free], s[i]]) + s[i + 1 :]


def first_cocycle_failure(phi: Cochain) -> tuple[int, ...] | None:
    """Lexicographically first tuple where d(phi) is nonzero, or None for a cocycle."""
    n, p = phi.group.order, phi.degree
    total = n ** (p + 1)
    support = int(np.count_nonzero(np.any(phi.values != 0, axis=1)))
    if p and (p + 2) * support * n < total:
        failing = []
        for digits in _support_candidates(phi):
            bad = np.any(_coboundary_at(phi, digits) != 0, axis=1)
            if np.any(bad):
                failing.append(int(tuple_index(n, tuple(d[bad] for d in digits)).min()))
        first = min(failing, default=None)
    else:
        rows = np.flatnonzero(np.any(coboundary(phi).values != 0, axis=1))
        first = int(rows[0]) if len(rows) else None
    if first is None:
        return None
    return tuple(int(d[0]) for d in tuple_digits(n, p + 1, np.array([first])))


def is_cocycle(phi: Cochain) -> bool:
    return first_cocycle_failure(phi) is None


def require_cocycle(phi: Cochain) -> None:
    if (failing := first_cocycle_failure(phi)) is not None:
        raise NotACocycle(f"degree {phi.degree} cochain is not a cocycle", failing)


def rho0(phi: Cochain) -> Fraction:
    """inf{eps > 0 : phi is eps-small}, exact."""
    return smallness_profile(phi.module.norm_counts(phi.values), len(phi.values))[0]


def rho0_profile(phi: Cochain) -> tuple[Fraction, Fraction | None]:
    return smallness_profile(phi.module.norm_counts(phi.values), len(phi.values))


def rho_inf(phi: Cochain) -> Fraction:
    counts = phi.module.norm_counts(phi.values)
    return max((v for v, c in counts.items() if c), default=Fraction(0))


def is_eps_small(phi: Cochain, eps: Fraction) -> bool:
    eps = Fraction(eps)
    return mass_above(phi.module.norm_counts(phi.values), len(phi.values), eps) < eps


def is_sqrt_small(phi: Cochain, eps: Fraction) -> bool:
    """mass{rho(0, phi) >= sqrt(eps)} < sqrt(eps), decided on squares."""
    eps = Fraction(eps)
    counts = phi.module.norm_counts(phi.values)
    heavy = Fraction(sum(c for v, c in counts.items() if v * v >= eps), len(phi.values))
    return heavy * heavy < eps


def dimension_shift_Q(psi: Cochain, *, checked: bool = True) -> Cochain:
    """Q psi (g_1..g_{p-1})(h) = (-1)^p psi(g_1..g_{p-1}, (g_1...g_{p-1})^{-1} h).

    The result takes values in C(G, A) and d(Q psi) is the constant map psi.
    """
    p = psi.degree
    if p < 1:
        raise UnsupportedDegree("Q needs a cocycle of degree at least 1")
    if checked:
        require_cocycle(psi)
    group = psi.group
    n = group.order
    induced = InducedModule(psi.module)
    check_capacity(n**p * psi.module.width, "dimension shift")
    prefixes = np.arange(n ** (p - 1), dtype=np.int64)
    products = np.zeros(len(prefixes), dtype=np.int64)
    for digit in tuple_digits(n, p - 1, prefixes):
        products = group.mul[products, digit]
    columns = group.mul[group.inv[products]]
    gathered = psi.values[prefixes[:, None] * n + columns]
    if p % 2:
        gathered = -gathered
    return Cochain(induced, p - 1, gathered.reshape(len(prefixes), induced.width))


def average_kappa(psi: Cochain) -> Cochain:
    """kappa(g_1..g_{p-1}) = (-1)^p / |G| sum_h psi(g_1..g_{p-1}, h), with d kappa = psi."""
    module = psi.module
    if not isinstance(module, GModule) or module.coefficients.kind != CoefficientKind.rational:
        raise WrongCoefficientKind("averaging needs rational vector coefficients")
    if psi.degree < 1:
        raise UnsupportedDegree("averaging needs a cocycle of degree at least 1")
    require_cocycle(psi)
    n = psi.group.order
    sums = psi.values.reshape(n ** (psi.degree - 1), n, module.width).sum(axis=1)
    sign = 1 if psi.degree % 2 == 0 else -1
    return Cochain(module, psi.degree - 1, sums * Fraction(sign, n))


def coboundary_at_identity(kappa: Cochain) -> Cochain:
    """The h = e component of d(kappa) for a cochain valued in C(G, A)."""
    induced = kappa.module
    if not isinstance(induced, InducedModule):
        raise ModuleMismatch("coboundary_at_identity needs values in an induced module")
    base, group, q = induced.base, kappa.group, kappa.degree
    n = group.order
    check_capacity(n ** (q + 1) * base.width, f"degree {q + 1} coboundary")
    blocks = induced.blocks(kappa.values)
    at_e = blocks[:, 0, :]
    # (R^{g_1} F)(e) = T^{g_1} F(g_1^{-1})
    out = np.concatenate([base.act(g, blocks[:, group.inv[g], :]) for g in range(n)])
    if q:
        digits = tuple(np.asarray(d) for d in tuple_digits(n, q + 1))
        for i in range(1, q + 1):
            merged = digits[: i - 1] + (group.mul[digits[i - 1], digits[i]],) + digits[i + 1 :]
            term = at_e[tuple_index(n, merged)]
            out = out + term if i % 2 == 0 else out - term
        last = at_e[tuple_index(n, digits[:q])]
    else:
        last = np.repeat(at_e, n, axis=0)
    out = out + last if (q + 1) % 2 == 0 else out - last
    return Cochain(base, q + 1, base.reduce(out))


def random_cochain(module: GModule, degree: int, rng: np.random.Generator) -> Cochain:
    rows = module.group.order**degree
    shape = (rows, module.width)
    coefficients = module.coefficients
    match coefficients.kind:
        case CoefficientKind.finite:
            values = rng.integers(0, np.array(coefficients.moduli), size=shape)
        case CoefficientKind.free:
            values = rng.integers(-3, 4, size=shape)
        case CoefficientKind.rational:
            values = as_fractions(rng.integers(-6, 7, size=shape)) / as_fractions(
                rng.integers(1, 5, size=shape)
            )
        case CoefficientKind.torus:
            values = as_fractions(rng.integers(0, 12, size=shape)) / 12
        case _:
            raise ValueError(f"Invalid {coefficients.kind=}")
    return Cochain(module, degree, values)


def random_coboundary(module: GModule, degree: int, rng: np.random.Generator) -> Cochain:
    if degree == 0:
        return zero_cochain(module, 0)
    return coboundary(random_cochain(module, degree - 1, rng))


def indicator_cochain(module: GModule, degree: int, tuple_: tuple[int, ...], value) -> Cochain:
    values = module.zeros(module.group.order**degree)
    values[int(tuple_index(module.group.order, [np.array([g]) for g in tuple_])[0])] = value
    logging.debug(f"Indicator cochain at {tuple_}")
    return Cochain(module, degree, values)
