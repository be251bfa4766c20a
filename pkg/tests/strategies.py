"""Shared random generators for the test-suite."""

from __future__ import annotations

import random
from fractions import Fraction

from hypothesis import strategies as st

from qcontract.algebra import LinearlyDependentInput, constants_from_matrices
from qcontract.coeffring import CoeffExpr, gauss
from qcontract.phasespace import PolySymbol

PARAMS = ("a", "b")

small_int = st.integers(min_value=-4, max_value=4)
gauss_ints = st.tuples(small_int, small_int, st.integers(min_value=1, max_value=3))


@st.composite
def gauss_rationals(draw):
    re_, im, den = draw(gauss_ints)
    return gauss(complex(re_, im)) / den


def _leaf():
    return st.one_of(
        gauss_rationals().map(lambda g: CoeffExpr.const(g, PARAMS)),
        st.sampled_from(PARAMS).map(lambda p: CoeffExpr.param(p, PARAMS)),
    )


def _combine(children):
    return st.one_of(
        st.tuples(children, children).map(lambda t: t[0] + t[1]),
        st.tuples(children, children).map(lambda t: t[0] * t[1]),
        st.tuples(children, children).map(lambda t: t[0] - t[1]),
        st.tuples(children, children).filter(lambda t: bool(t[1])).map(lambda t: t[0] / t[1]),
    )


coeff_exprs = st.recursive(_leaf(), _combine, max_leaves=6)


def random_gauss(rng: random.Random, span: int = 3) -> complex:
    return complex(rng.randint(-span, span), rng.randint(-span, span))


def _rand_fraction(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-5, 5), rng.randint(1, 3))


def matrix_units(n: int) -> list:
    out = []
    for i in range(n):
        for j in range(n):
            out.append([[1 if (r, c) == (i, j) else 0 for c in range(n)] for r in range(n)])
    return out


def _algebra_basis(rng: random.Random, kind: str) -> list:
    """A basis (as exact matrices) of a small associative matrix algebra."""
    if kind == "full2":
        return matrix_units(2)
    if kind == "upper2":
        return [[[1, 0], [0, 0]], [[0, 1], [0, 0]], [[0, 0], [0, 1]]]
    if kind.startswith("diag"):
        n = int(kind[4:])
        return [[[1 if r == c == k else 0 for c in range(n)] for r in range(n)] for k in range(n)]
    if kind == "pauli":
        return [[[1, 0], [0, 1]], [[0, 1], [1, 0]], [[0, "-i"], ["i", 0]], [[1, 0], [0, -1]]]
    if kind == "dual":
        # dual numbers inside 2x2 matrices
        return [[[1, 0], [0, 1]], [[0, 1], [0, 0]]]
    raise ValueError(kind)


KINDS = ("full2", "upper2", "diag1", "diag2", "diag3", "diag4", "pauli", "dual")


def random_associative_tensor(rng: random.Random):
    """Structure constants of a matrix algebra in a random exact basis."""
    from qcontract.coeffring import as_coeff

    kind = rng.choice(KINDS)
    base = _algebra_basis(rng, kind)
    d = len(base)
    while True:
        T = [[random_gauss(rng, 2) for _ in range(d)] for _ in range(d)]
        mats = []
        size = len(base[0])
        for k in range(d):
            M = [[as_coeff(0) for _ in range(size)] for _ in range(size)]
            for j in range(d):
                if T[k][j]:
                    for r in range(size):
                        for c in range(size):
                            M[r][c] = M[r][c] + as_coeff(base[j][r][c]) * gauss(T[k][j])
            mats.append(M)
        try:
            return constants_from_matrices(mats), kind
        except LinearlyDependentInput:
            continue


def random_poly(rng: random.Random, degree: int, dofs: int = 1, terms: int = 4) -> PolySymbol:
    out = {}
    for _ in range(terms):
        e = [0] * (3 * dofs)
        budget = rng.randint(0, degree)
        for _ in range(budget):
            e[rng.randrange(2 * dofs)] += 1
        out[tuple(e)] = gauss(random_gauss(rng)) / rng.randint(1, 3)
    return PolySymbol(dofs, out)


@st.composite
def polys(draw, degree: int = 4, dofs: int = 1):
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    return random_poly(random.Random(seed), degree, dofs)
