"""Hypothesis checks of the algebraic identities the engine relies on."""

import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from cocycle_lab.cochains import coboundary, random_cochain
from cocycle_lab.cohomology import class_of, cohomology, random_cocycle
from cocycle_lab.extensions import cocycle_from_extension, extension_from_cocycle
from cocycle_lab.groups import make_cyclic
from cocycle_lab.modules import CoefficientGroup, GModule
from cocycle_lab.snf import IntegerMatrix, smith_normal_form

Seeds = st.integers(min_value=0, max_value=2**32 - 1)
Matrices = st.integers(1, 4).flatmap(
    lambda cols: st.lists(
        st.lists(st.integers(-12, 12), min_size=cols, max_size=cols), min_size=1, max_size=4
    )
)


def trivial_module(n: int, m: int) -> GModule:
    return GModule(make_cyclic(n), CoefficientGroup.finite([m]))


@settings(max_examples=50, deadline=None)
@given(Matrices)
def test_smith_normal_form(rows: list[list[int]]) -> None:
    smith = smith_normal_form(IntegerMatrix.from_dense(rows), track_rows=True, track_cols=True)
    u, d, v = smith.dense()
    assert (u.dot(np.array(rows, dtype=object)).dot(v) == d).all()
    diagonal = smith.diagonal
    assert all(x > 0 for x in diagonal)
    assert all(b % a == 0 for a, b in zip(diagonal, diagonal[1:]))


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 5), st.integers(2, 6), st.integers(0, 2), Seeds)
def test_coboundary_squares_to_zero(n: int, m: int, degree: int, seed: int) -> None:
    phi = random_cochain(trivial_module(n, m), degree, np.random.default_rng(seed))
    assert coboundary(coboundary(phi)).is_zero()


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 6), st.integers(2, 6), st.integers(1, 2))
def test_cyclic_cohomology_is_gcd(n: int, m: int, degree: int) -> None:
    g = math.gcd(n, m)
    assert cohomology(trivial_module(n, m), degree).factors == (() if g == 1 else (g,))


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 4), st.integers(2, 4), Seeds)
def test_class_ignores_coboundaries(n: int, m: int, seed: int) -> None:
    rng = np.random.default_rng(seed)
    module = trivial_module(n, m)
    group = cohomology(module, 2)
    psi = random_cocycle(module, 2, rng)
    assert class_of(psi + coboundary(random_cochain(module, 1, rng)), group) == class_of(psi, group)


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 4), st.integers(2, 3), Seeds)
def test_factor_set_recovers_class(n: int, m: int, seed: int) -> None:
    module = trivial_module(n, m)
    group = cohomology(module, 2)
    psi = random_cocycle(module, 2, np.random.default_rng(seed))
    extension = extension_from_cocycle(psi)
    assert extension.group.order == n * m
    assert class_of(cocycle_from_extension(extension), group) == class_of(psi, group)
