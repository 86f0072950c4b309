"""H^p(G, A) from the Smith normal form of the bar-resolution coboundary matrices.

Cochains are vectorized as index = tuple_index * width + coordinate. Discrete
coefficients are handled over Z: a cochain with values in Z/m is an integer
vector x, it is a cocycle when d_p x lies in the relation lattice, and the
coboundaries are the columns of d_(p-1) together with the relations.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from cocycle_lab.abelian import AbelianGroup, AbelianHom, factors_from_torsion_counts
from cocycle_lab.cochains import (
    Cochain,
    average_kappa,
    coboundary,
    random_coboundary,
    require_cocycle,
    zero_cochain,
)
from cocycle_lab.config import check_capacity
from cocycle_lab.errors import (
    CapacityExceeded,
    InternalBreach,
    ModuleMismatch,
    UnsupportedDegree,
    WrongCoefficientKind,
)
from cocycle_lab.groups import FiniteGroup, GroupHom, tuple_digits, tuple_index
from cocycle_lab.modules import (
    CoefficientKind,
    GModule,
    as_fractions,
    integral_module,
    rational_module,
    truncate_torus,
)
from cocycle_lab.snf import IntegerMatrix, add_scaled, smith_normal_form


def _coboundary_terms(group: FiniteGroup, p: int):
    """(sign, acting element per row or None, column tuple per row) for each term of d on C^p."""
    n, mul = group.order, group.mul
    rows = n ** (p + 1)
    digits = tuple(np.asarray(d) for d in tuple_digits(n, p + 1))
    constant = np.zeros(rows, dtype=np.int64)
    terms = [(1, digits[0], tuple_index(n, digits[1:]) if p else constant)]
    for i in range(1, p + 1):
        merged = digits[: i - 1] + (mul[digits[i - 1], digits[i]],) + digits[i + 1 :]
        terms.append(((-1) ** i, None, tuple_index(n, merged)))
    terms.append(((-1) ** (p + 1), None, tuple_index(n, digits[:p]) if p else constant))
    return terms


def _add_entries(matrix: IntegerMatrix, rows, cols, values) -> None:
    values = np.broadcast_to(np.asarray(values, dtype=object), np.shape(rows))
    for i, j, v in zip(np.asarray(rows).tolist(), np.asarray(cols).tolist(), values.tolist()):
        matrix.add(i, j, v)


def coboundary_matrix(module: GModule, p: int) -> IntegerMatrix:
    """Matrix of d: C^p -> C^(p+1) on the standard basis, over Z.

    For finite coefficients the product with a vectorized cochain agrees with
    the coboundary after reduction. Rows over Q^d with non-integral action
    are scaled to clear denominators, which keeps kernel and rank.
    """
    if p < -1:
        raise UnsupportedDegree(f"no coboundary out of degree {p}")
    group, w = module.group, module.width
    n = group.order
    if p == -1:
        return IntegerMatrix(w, 0)
    rows = n ** (p + 1)
    check_capacity(rows * w, f"degree {p} coboundary matrix")
    matrix = IntegerMatrix(rows * w, n**p * w)
    row_ids = np.arange(rows, dtype=np.int64)
    for sign, acting, columns in _coboundary_terms(group, p):
        if acting is None or module.is_trivial:
            for a in range(w):
                _add_entries(matrix, row_ids * w + a, columns * w + a, sign)
            continue
        for a, b in itertools.product(range(w), repeat=2):
            values = module.matrices[acting, a, b]
            nonzero = np.flatnonzero(values != 0)
            _add_entries(
                matrix, row_ids[nonzero] * w + a, columns[nonzero] * w + b, sign * values[nonzero]
            )
    if module.coefficients.kind == CoefficientKind.rational:
        for i, row in enumerate(matrix.rows):
            scale = math.lcm(*(Fraction(v).denominator for v in row.values()))
            matrix.rows[i] = {j: int(Fraction(v) * scale) for j, v in row.items()}
    if rows * w > 10**4:
        logging.info(f"Assembled {matrix.nrows}x{matrix.ncols} coboundary matrix, {matrix.nnz()} nonzeros")
    return matrix


def _sparse_vector(phi: Cochain) -> dict[int, int]:
    flat = phi.values.reshape(-1)
    return {int(k): int(flat[k]) for k in np.flatnonzero(flat != 0)}


def _cochain_from_sparse(module: GModule, degree: int, vector: dict[int, int]) -> Cochain:
    w, moduli = module.width, module.coefficients.moduli
    flat = module.zeros(module.group.order**degree).reshape(-1)
    for k, v in vector.items():
        flat[k] = v % moduli[k % w] if moduli[k % w] else v
    return Cochain(module, degree, flat.reshape(-1, w))


def _columns_of(rows: list[dict[int, int]], ncols: int) -> list[dict[int, int]]:
    columns = [{} for _ in range(ncols)]
    for i, row in enumerate(rows):
        for j, v in row.items():
            columns[j][i] = v
    return columns


class _UniformCycles:
    """Z^p / mZ^N for one modulus m over every coordinate (m = 0 for free coefficients).

    With U d_p V = diag(s), x is a cocycle iff y = V^-1 x has s_j y_j = 0 mod m,
    so y_j = t_j c_j with c_j in Z/g_j, t_j = m / gcd(s_j, m), g_j = gcd(s_j, m).
    Free columns have t = 1 and g = m. Coordinates with g = 1 are dropped.
    """

    def __init__(self, d_p: IntegerMatrix, modulus: int):
        smith = smith_normal_form(d_p, track_cols=True, divisibility=False)
        self.v_cols = smith.v_cols
        self.vinv_cols = _columns_of(smith.vinv_rows, d_p.ncols)
        scales = {}
        if modulus:
            for _, j, s in smith.pivots:
                g = math.gcd(s, modulus)
                scales[j] = (modulus // g, g)
        for j in smith.free_cols():
            scales[j] = (1, modulus)
        self.kept = [(j, t, g) for j, (t, g) in sorted(scales.items()) if g != 1]
        self.position = {j: k for k, (j, _, _) in enumerate(self.kept)}

    @property
    def size(self) -> int:
        return len(self.kept)

    def coordinates(self, x: dict[int, int]) -> dict[int, int]:
        y: dict[int, int] = {}
        for k, value in x.items():
            for j, v in self.vinv_cols[k].items():
                if j in self.position:
                    y[j] = y.get(j, 0) + v * value
        out = {}
        for j, value in y.items():
            k = self.position[j]
            t = self.kept[k][1]
            if value % t:
                raise InternalBreach(f"cocycle coordinate {value} not divisible by {t}")
            if value:
                out[k] = value // t
        return out

    def lift(self, c: dict[int, int]) -> dict[int, int]:
        x: dict[int, int] = {}
        for k, value in c.items():
            j, t, _ = self.kept[k]
            add_scaled(x, self.v_cols[j], value * t)
        return x

    def relation_columns(self) -> list[dict[int, int]]:
        return [{k: g} for k, (_, _, g) in enumerate(self.kept) if g]


class _GeneralCycles:
    """The cocycle lattice for mixed moduli, from the kernel of [d_p | relations]."""

    def __init__(self, d_p: IntegerMatrix, next_moduli: list[int], moduli: list[int]):
        width = d_p.ncols
        relations = [{r: m} for r, m in enumerate(next_moduli)]
        augmented = IntegerMatrix.from_columns(d_p.nrows, d_p.columns() + relations)
        kernel = smith_normal_form(augmented, track_cols=True, divisibility=False).kernel_basis()
        generators = [{k: v for k, v in vector.items() if k < width} for vector in kernel]
        smith = smith_normal_form(
            IntegerMatrix.from_columns(width, generators), track_rows=True, divisibility=False
        )
        # lattice basis b_k = s_k * Uinv[:, i_k], coordinates (U x)_(i_k) / s_k
        self.basis = [(i, s) for i, _, s in smith.pivots]
        self.position = {i: k for k, (i, _) in enumerate(self.basis)}
        self.u_cols = _columns_of(smith.u_rows, width)
        self.uinv_cols = smith.uinv_cols
        self.moduli = moduli

    @property
    def size(self) -> int:
        return len(self.basis)

    def coordinates(self, x: dict[int, int]) -> dict[int, int]:
        z: dict[int, int] = {}
        for k, value in x.items():
            for i, v in self.u_cols[k].items():
                if i in self.position:
                    z[i] = z.get(i, 0) + v * value
        out = {}
        for i, value in z.items():
            k = self.position[i]
            s = self.basis[k][1]
            if value % s:
                raise InternalBreach(f"vector outside the cocycle lattice at row {i}")
            if value:
                out[k] = value // s
        return out

    def lift(self, c: dict[int, int]) -> dict[int, int]:
        x: dict[int, int] = {}
        for k, value in c.items():
            i, s = self.basis[k]
            add_scaled(x, self.uinv_cols[i], value * s)
        return x

    def relation_columns(self) -> list[dict[int, int]]:
        return [self.coordinates({r: m}) for r, m in enumerate(self.moduli) if m]


def _cycles(module: GModule, degree: int, d_p: IntegerMatrix):
    moduli = module.coefficients.moduli
    if len(set(moduli)) == 1:
        return _UniformCycles(d_p, moduli[0])
    n = module.group.order
    return _GeneralCycles(d_p, list(moduli) * n ** (degree + 1), list(moduli) * n**degree)


def _canonical(module: GModule, degree: int, x: dict[int, int]) -> tuple[Cochain, int]:
    """The generator x or -x, whichever table has the earlier first nonzero, then the smaller table."""
    candidates = []
    for sign in (1, -1):
        cochain = _cochain_from_sparse(module, degree, {k: sign * v for k, v in x.items()})
        flat = cochain.values.reshape(-1).tolist()
        first = next((k for k, v in enumerate(flat) if v), len(flat))
        candidates.append(((first, flat), sign, cochain))
    _, sign, cochain = min(candidates, key=lambda candidate: candidate[0])
    return cochain, sign


class _LatticeSolver:
    """H^p = cocycle coordinates modulo the coordinates of coboundaries and relations."""

    def __init__(self, module: GModule, degree: int, cycles, previous: IntegerMatrix):
        self.module, self.degree, self.cycles = module, degree, cycles
        self.boundary_columns = previous.ncols
        columns = [cycles.coordinates(column) for column in previous.columns()]
        columns += cycles.relation_columns()
        self.smith = smith_normal_form(
            IntegerMatrix.from_columns(cycles.size, columns), track_rows=True, track_cols=True
        )
        self.factor_rows = [(i, d) for i, _, d in self.smith.pivots if d != 1]
        self.factor_rows += [(i, 0) for i in self.smith.free_rows()]
        self.generators, self.signs = [], []
        for i, _ in self.factor_rows:
            cochain, sign = _canonical(module, degree, cycles.lift(self.smith.uinv_cols[i]))
            self.generators.append(cochain)
            self.signs.append(sign)

    @property
    def factors(self) -> list[int]:
        return [d for _, d in self.factor_rows]

    def _rotated(self, psi: Cochain) -> list[int]:
        c = self.cycles.coordinates(_sparse_vector(psi))
        return [sum(v * c.get(k, 0) for k, v in row.items()) for row in self.smith.u_rows]

    def coordinates(self, psi: Cochain) -> tuple[int, ...]:
        z = self._rotated(psi)
        return tuple(
            (sign * z[i]) % d if d else sign * z[i]
            for (i, d), sign in zip(self.factor_rows, self.signs)
        )

    def witness(self, psi: Cochain) -> Cochain | None:
        if self.degree == 0:
            return None
        z = self._rotated(psi)
        w: dict[int, int] = {}
        for i, j, d in self.smith.pivots:
            if z[i] % d:
                return None
            w[j] = z[i] // d
        if any(z[i] for i in self.smith.free_rows()):
            return None
        v: dict[int, int] = {}
        for j, value in w.items():
            add_scaled(v, self.smith.v_cols[j], value)
        lam = {k: value for k, value in v.items() if k < self.boundary_columns}
        return _cochain_from_sparse(self.module, self.degree - 1, lam)


class _RationalSolver:
    """Q^d coefficients: ranks over Q; fixed-point coordinates in degree 0, averaging above."""

    def __init__(self, module: GModule, degree: int, smith=None):
        self.module, self.degree, self.smith = module, degree, smith
        self.generators, self.signs = [], []
        if degree == 0:
            self.free = smith.free_cols()
            self.vinv_cols = _columns_of(smith.vinv_rows, smith.ncols)
            for j in self.free:
                column = smith.v_cols[j]
                values = as_fractions([[column.get(k, 0) for k in range(module.width)]])
                flat = values.reshape(-1).tolist()
                first = next(k for k, v in enumerate(flat) if v)
                sign = 1 if flat[first] > 0 else -1
                self.generators.append(Cochain(module, 0, values * sign))
                self.signs.append(sign)

    def coordinates(self, psi: Cochain) -> tuple:
        if self.degree:
            return ()
        flat = psi.values.reshape(-1).tolist()
        y = {j: Fraction(0) for j in self.free}
        for k, value in enumerate(flat):
            if value:
                for j, v in self.vinv_cols[k].items():
                    if j in y:
                        y[j] += v * value
        return tuple(sign * y[j] for j, sign in zip(self.free, self.signs))

    def witness(self, psi: Cochain) -> Cochain | None:
        return average_kappa(psi) if self.degree else None


class _TruncatedSolver:
    """Torus fixed points inside (1/N)Z^d / Z^d, delegated to (Z/N)^d."""

    def __init__(self, inner: "CohomologyGroup", denominator: int):
        self.inner, self.denominator = inner, denominator

    def _scaled(self, psi: Cochain) -> Cochain:
        scaled = as_fractions(psi.values) * self.denominator
        if any(x.denominator != 1 for x in scaled.reshape(-1)):
            raise ModuleMismatch(
                f"values outside the truncation at denominator {self.denominator}"
            )
        return Cochain(self.inner.module, psi.degree, scaled.astype(np.int64))

    def coordinates(self, psi: Cochain) -> tuple:
        return self.inner._solver.coordinates(self._scaled(psi))

    def witness(self, psi: Cochain) -> Cochain | None:
        return None


class _SwitchbackSolver:
    """H^p(G, (Q/Z)^d) = H^(p+1)(G, Z^d) for p >= 1, through Z^d -> Q^d -> (Q/Z)^d.

    A torus cocycle psi lifts to a rational cochain whose coboundary is an
    integer cocycle; its class is the class of psi.
    """

    def __init__(self, module: GModule, inner: "CohomologyGroup"):
        self.module, self.inner = module, inner
        self.rational = rational_module(module)

    def integer_boundary(self, psi: Cochain) -> Cochain:
        lifted = coboundary(Cochain(self.rational, psi.degree, psi.values))
        values = lifted.values
        if any(Fraction(x).denominator != 1 for x in values.reshape(-1)):
            raise InternalBreach("boundary of a lifted torus cocycle is not integral")
        return Cochain(self.inner.module, psi.degree + 1, values.astype(np.int64))

    def coordinates(self, psi: Cochain) -> tuple:
        return self.inner._solver.coordinates(self.integer_boundary(psi))

    def witness(self, psi: Cochain) -> Cochain | None:
        mu = self.inner._solver.witness(self.integer_boundary(psi))
        if mu is None:
            return None
        rational = Cochain(self.rational, psi.degree, psi.values - as_fractions(mu.values))
        nu = average_kappa(rational)
        return Cochain(self.module, psi.degree - 1, nu.values)


@dataclass(frozen=True, eq=False)
class CohomologyGroup:
    """H^p(G, A) with generator cocycles and the data to solve class membership.

    factors follow the divisibility chain, 0 for each copy of Z. Rational
    coefficients report a rank instead; torus degree 0 records the
    truncation denominator it was computed at.
    """

    module: GModule
    degree: int
    factors: tuple[int, ...]
    generators: tuple[Cochain, ...]
    rank: int | None = None
    truncation: int | None = None
    _solver: object = field(default=None, repr=False)

    @property
    def group(self) -> AbelianGroup:
        return AbelianGroup(self.factors)

    @property
    def order(self) -> int | None:
        if self.rank:
            return None
        return self.group.order


@dataclass(frozen=True)
class Membership:
    member: bool
    coordinates: tuple
    witness: Cochain | None = None


def _discrete_cohomology(module: GModule, degree: int) -> CohomologyGroup:
    d_p = coboundary_matrix(module, degree)
    previous = coboundary_matrix(module, degree - 1)
    solver = _LatticeSolver(module, degree, _cycles(module, degree, d_p), previous)
    return CohomologyGroup(
        module, degree, tuple(solver.factors), tuple(solver.generators), _solver=solver
    )


def _rational_cohomology(module: GModule, degree: int) -> CohomologyGroup:
    d_p = coboundary_matrix(module, degree)
    smith = smith_normal_form(d_p, track_cols=degree == 0, divisibility=False)
    previous_rank = 0
    if degree:
        previous_rank = smith_normal_form(coboundary_matrix(module, degree - 1), divisibility=False).rank
    rank = d_p.ncols - smith.rank - previous_rank
    if degree and rank:
        raise InternalBreach(f"rational H^{degree} of a finite group has rank {rank}")
    solver = _RationalSolver(module, degree, smith)
    return CohomologyGroup(
        module, degree, (), tuple(solver.generators), rank=rank, _solver=solver
    )


def _torus_cohomology(module: GModule, degree: int, denominator_multiplier: int) -> CohomologyGroup:
    if degree == 0:
        denominator = module.group.exponent * denominator_multiplier
        inner = _discrete_cohomology(truncate_torus(module, denominator), 0)
        generators = tuple(
            Cochain(module, 0, as_fractions(g.values) / denominator) for g in inner.generators
        )
        return CohomologyGroup(
            module,
            0,
            inner.factors,
            generators,
            truncation=denominator,
            _solver=_TruncatedSolver(inner, denominator),
        )
    inner = _discrete_cohomology(integral_module(module), degree + 1)
    rational = rational_module(module)
    generators = []
    for zeta in inner.generators:
        kappa = average_kappa(Cochain(rational, degree + 1, as_fractions(zeta.values)))
        generators.append(Cochain(module, degree, kappa.values))
    return CohomologyGroup(
        module, degree, inner.factors, tuple(generators), _solver=_SwitchbackSolver(module, inner)
    )


def cohomology(module: GModule, degree: int, *, denominator_multiplier: int = 1) -> CohomologyGroup:
    if degree < 0:
        raise UnsupportedDegree(f"H^{degree} is zero by convention; ask for p >= 0")
    match module.coefficients.kind:
        case CoefficientKind.free | CoefficientKind.finite:
            result = _discrete_cohomology(module, degree)
        case CoefficientKind.rational:
            result = _rational_cohomology(module, degree)
        case CoefficientKind.torus:
            result = _torus_cohomology(module, degree, denominator_multiplier)
        case _:
            raise ValueError(f"Invalid {module.coefficients.kind=}")
    summary = f"rank {result.rank}" if result.rank is not None else f"factors {list(result.factors)}"
    name = module.group.label or module.group.order
    logging.info(f"H^{degree}({name}, {module.coefficients.kind}): {summary}")
    return result


def _check_context(psi: Cochain, group: CohomologyGroup) -> None:
    if psi.module != group.module or psi.degree != group.degree:
        raise ModuleMismatch("cochain and cohomology group have different modules or degrees")


def class_of(psi: Cochain, group: CohomologyGroup) -> tuple:
    _check_context(psi, group)
    require_cocycle(psi)
    return group._solver.coordinates(psi)


def is_coboundary(psi: Cochain, group: CohomologyGroup) -> Membership:
    """Membership in B^p, with a witness lambda satisfying d(lambda) = psi when p >= 1."""
    coordinates = class_of(psi, group)
    if any(coordinates):
        return Membership(False, coordinates)
    if group.degree == 0:
        return Membership(psi.is_zero(), coordinates)
    witness = group._solver.witness(psi)
    if witness is None:
        raise InternalBreach("zero class without a coboundary witness")
    if coboundary(witness) != psi:
        raise InternalBreach("coboundary witness does not reproduce the cocycle")
    return Membership(True, coordinates, witness)


def induced_hom(
    source: CohomologyGroup, target: CohomologyGroup, images: list[Cochain]
) -> AbelianHom:
    """The map on cohomology sending generator k of source to the class of images[k]."""
    columns = [class_of(image, target) for image in images]
    rows = tuple(
        tuple(int(column[i]) for column in columns) for i in range(len(target.factors))
    )
    return AbelianHom(source.group, target.group, rows)


def combination(group: CohomologyGroup, coordinates) -> Cochain:
    total = zero_cochain(group.module, group.degree)
    for c, generator in zip(coordinates, group.generators):
        if c:
            total = total + generator.scale(int(c))
    return total


def elements(group: CohomologyGroup) -> list[tuple[tuple[int, ...], Cochain]]:
    if group.order is None:
        raise WrongCoefficientKind("only finite cohomology groups can be listed")
    return [(c, combination(group, c)) for c in group.group.elements()]


def random_cocycle(module: GModule, degree: int, rng: np.random.Generator) -> Cochain:
    group = cohomology(module, degree)
    coordinates = [int(rng.integers(0, f)) if f else int(rng.integers(-2, 3)) for f in group.factors]
    return combination(group, coordinates) + random_coboundary(module, degree, rng)


def inflate(hom: GroupHom, psi: Cochain) -> Cochain:
    """(psi o hom^p) over hom.source, with the action pulled back through hom."""
    module = psi.module
    if not isinstance(module, GModule) or hom.target != module.group:
        raise ModuleMismatch("inflation needs a cochain over the homomorphism's target")
    p = psi.degree
    if p:
        digits = tuple_digits(hom.source.order, p)
        rows = tuple_index(hom.target.order, tuple(hom.map[d] for d in digits))
    else:
        rows = np.zeros(1, dtype=np.int64)
    return Cochain(module.pullback(hom), p, psi.values[rows])


@dataclass(frozen=True)
class BruteForceResult:
    order: int
    factors: tuple[int, ...]
    cocycles: int
    coboundaries: int


class _CodeTables:
    def __init__(self, module: GModule):
        coefficients = module.coefficients
        elements = coefficients.elements()
        self.size, self.width = len(elements), coefficients.width
        self.elements, self.coefficients = elements, coefficients
        summed = coefficients.reduce(elements[:, None, :] + elements[None, :, :])
        self.add = coefficients.codes(summed.reshape(-1, self.width)).reshape(self.size, -1).tolist()
        self.neg = coefficients.codes(coefficients.reduce(-elements)).tolist()
        self.act = [
            coefficients.codes(module.act(g, elements)).tolist() for g in range(module.group.order)
        ]

    def times(self, k: int) -> list[int]:
        return self.coefficients.codes(self.coefficients.reduce(k * self.elements)).tolist()


def _identities(group: FiniteGroup, p: int) -> list[list[tuple[int, int, int | None]]]:
    terms = _coboundary_terms(group, p)
    rows = group.order ** (p + 1)
    return [
        [
            (int(columns[r]), sign, None if acting is None else int(acting[r]))
            for sign, acting, columns in terms
        ]
        for r in range(rows)
    ]


def _evaluate(identity, values, tables: _CodeTables) -> int:
    total = 0
    for cell, sign, acting in identity:
        v = values[cell]
        if acting is not None:
            v = tables.act[acting][v]
        if sign < 0:
            v = tables.neg[v]
        total = tables.add[total][v]
    return total


def _search_cocycles(module: GModule, p: int, tables: _CodeTables, limit: int) -> list[tuple[int, ...]]:
    """All p-cocycles as code tuples, by backtracking over cells in index order.

    Each identity is checked as soon as the highest cell it reads is assigned.
    """
    cells = module.group.order**p
    buckets: list[list] = [[] for _ in range(cells)]
    for identity in _identities(module.group, p):
        buckets[max(cell for cell, _, _ in identity)].append(identity)
    values = [0] * cells
    found: list[tuple[int, ...]] = []
    nodes = 0

    def assign(cell: int) -> None:
        nonlocal nodes
        if cell == cells:
            found.append(tuple(values))
            return
        for code in range(tables.size):
            nodes += 1
            if nodes > limit:
                raise CapacityExceeded(f"brute-force search exceeded {limit} nodes")
            values[cell] = code
            if all(_evaluate(identity, values, tables) == 0 for identity in buckets[cell]):
                assign(cell + 1)
        values[cell] = 0

    assign(0)
    return found


def _all_coboundaries(module: GModule, p: int, tables: _CodeTables, limit: int) -> set[tuple[int, ...]]:
    if p == 0:
        return {(0,)}
    cells = module.group.order ** (p - 1)
    if tables.size**cells > limit:
        raise CapacityExceeded(f"{tables.size}^{cells} cochains of degree {p - 1} exceed the limit {limit}")
    identities = _identities(module.group, p - 1)
    return {
        tuple(_evaluate(identity, lam, tables) for identity in identities)
        for lam in itertools.product(range(tables.size), repeat=cells)
    }


def brute_force_cohomology(module: GModule, p: int, limit: int) -> BruteForceResult:
    if not module.is_finite:
        raise WrongCoefficientKind("brute force needs finite coefficients")
    if p < 0:
        raise UnsupportedDegree(f"no cochains of degree {p}")
    check_capacity(module.group.order ** (p + 1) * module.width, "brute-force identities")
    tables = _CodeTables(module)
    cocycles = _search_cocycles(module, p, tables, limit)
    boundaries = _all_coboundaries(module, p, tables, limit)
    order = len(cocycles) // len(boundaries)

    def torsion(k: int) -> int:
        scale = tables.times(k)
        hits = sum(1 for z in cocycles if tuple(scale[v] for v in z) in boundaries)
        return hits // len(boundaries)

    factors = factors_from_torsion_counts(order, torsion)
    logging.info(f"Brute force H^{p}: {len(cocycles)} cocycles, {len(boundaries)} coboundaries")
    return BruteForceResult(order, tuple(factors), len(cocycles), len(boundaries))


def enumerate_cocycles(module: GModule, degree: int, limit: int) -> list[Cochain]:
    """Z^p(G, A) for finite A, by closing the lattice generators under addition."""
    if not module.is_finite:
        raise WrongCoefficientKind("only finite coefficients have finitely many cocycles")
    cycles = _cycles(module, degree, coboundary_matrix(module, degree))
    w = module.width
    moduli = np.tile(np.array(module.coefficients.moduli, dtype=np.int64), module.group.order**degree)
    generators = [
        _cochain_from_sparse(module, degree, cycles.lift({k: 1})).values.reshape(-1)
        for k in range(cycles.size)
    ]
    zero = np.zeros(len(moduli), dtype=np.int64)
    seen, frontier = {zero.tobytes(): zero}, [zero]
    while frontier:
        following = []
        for x in frontier:
            for generator in generators:
                y = (x + generator) % moduli
                if (key := y.tobytes()) not in seen:
                    if len(seen) >= limit:
                        raise CapacityExceeded(f"more than {limit} cocycles of degree {degree}")
                    seen[key] = y
                    following.append(y)
        frontier = following
    ordered = sorted(seen.values(), key=lambda x: x.tolist())
    return [Cochain(module, degree, x.reshape(-1, w)) for x in ordered]
