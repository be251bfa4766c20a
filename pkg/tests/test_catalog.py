import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcontract import catalog
from qcontract.algebra import StructureTensor, check_associativity
from qcontract.catalog import (
    BIANCHI_X_INSTANCES,
    BianchiType,
    JacobiFails,
    MissingParameter,
    NotThreeDimensional,
    UnknownFixture,
    bianchi_classify,
    eta_orders,
    eta_staged_limit,
    fixture,
)
from qcontract.coeffring import CoeffExpr, UndeclaredParameter, as_coeff, gauss, gauss_to_complex

SIGMA = [
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]]),
    np.array([[1, 0], [0, -1]], dtype=complex),
]

I = gauss(1j)


def numeric(T):
    d = T.dim
    return np.array(
        [[[gauss_to_complex(T[m, n, l].value()) for l in range(d)] for n in range(d)] for m in range(d)]
    )


def products(T):
    """Nonzero basis products as {(m, n): {l: coeff}}."""
    out = {}
    for m, n in itertools.product(range(T.dim), repeat=2):
        row = {l: T[m, n, l] for l in range(T.dim) if T[m, n, l]}
        if row:
            out[(m, n)] = row
    return out


# fixtures


def test_fixture_names_and_unknown():
    assert {"u2", "eta", "pauli_kstar", "bianchi_L_K", "bianchi_X_K"} <= set(catalog.fixture_names())
    with pytest.raises(UnknownFixture):
        fixture("nope")


def test_strict_missing_parameter():
    with pytest.raises(MissingParameter):
        fixture("eta", {"mu1": 1}, strict=True)
    with pytest.raises(UndeclaredParameter):
        fixture("eta", {"lambda": 1})


def test_u2_printed_is_not_associative():
    rep = check_associativity(fixture("u2_printed"))
    assert not rep.holds and rep.violations


def test_eta_at_unit_parameters():
    T = fixture("eta", {"mu1": 1, "mu2": 1, "mu3": 1})
    assert T.params == ()
    assert T.basis_product(1, 2) == T.basis_vector(3).scale(I)
    assert T.basis_product(1, 1) == T.basis_vector(0)
    U = catalog.u2()
    assert all(T[t] == U[t] for t in itertools.product(range(4), repeat=3))


def test_eta_matches_matrix_realization():
    rng = random.Random(2)
    for _ in range(5):
        mu = [Fraction(rng.randint(1, 9), rng.randint(1, 4)) for _ in range(3)]
        T = fixture("eta", dict(zip(catalog.ETA_PARAMS, mu)), strict=True)
        m1, m2, m3 = (float(x) for x in mu)
        eta = [SIGMA[0], np.sqrt(m1 * m3) * SIGMA[1], np.sqrt(m1 * m2) * SIGMA[2], np.sqrt(m2 * m3) * SIGMA[3]]
        basis = np.array([e.ravel() for e in eta]).T
        N = numeric(T)
        for a, b in itertools.product(range(4), repeat=2):
            coords = np.linalg.solve(basis, (eta[a] @ eta[b]).ravel())
            assert np.allclose(N[a, b], coords)


def test_eta_random_assignments_associative():
    rng = random.Random(10)
    for _ in range(10):
        mu = {p: Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for p in catalog.ETA_PARAMS}
        assert check_associativity(fixture("eta", mu)).holds


# staged limits


def test_eta_staged_blocks():
    s1, s2, s3 = eta_staged_limit(("mu1", "mu2", "mu3"))
    p = s1.params
    mu2, mu3 = (CoeffExpr.param(n, p) for n in ("mu2", "mu3"))
    unit = {(0, 0): {0: as_coeff(1)}} | {(0, j): {j: as_coeff(1)} for j in (1, 2, 3)} | {(j, 0): {j: as_coeff(1)} for j in (1, 2, 3)}
    assert products(s1) == unit | {
        (3, 3): {0: mu2 * mu3},
        (2, 3): {1: I * mu2},
        (3, 2): {1: -I * mu2},
        (3, 1): {2: I * mu3},
        (1, 3): {2: -I * mu3},
    }
    assert products(s2) == unit | {(3, 1): {2: I * mu3}, (1, 3): {2: -I * mu3}}
    assert products(s3) == unit
    assert all(check_associativity(s).holds for s in (s1, s2, s3))


@pytest.mark.parametrize("order", eta_orders())
def test_eta_all_orders_end_at_unit_only(order):
    stages = eta_staged_limit(order)
    assert len(stages) == 3
    assert all(check_associativity(s).holds for s in stages)
    last = stages[-1]
    for (m, n), row in products(last).items():
        assert 0 in (m, n)
        assert row == {max(m, n): as_coeff(1)}


def test_eta_reverse_order_first_stage():
    (s1, *_) = eta_staged_limit(("mu3", "mu2", "mu1"))
    mu1 = CoeffExpr.param("mu1", s1.params)
    assert s1.basis_product(3, 1).is_zero()
    assert s1.basis_product(1, 2) == s1.basis_vector(3).scale(I * mu1)


def test_u2_contraction_demo():
    out = catalog.u2_contraction_demo()
    assert out["associative"].holds
    assert out["after"].is_commutative()
    assert check_associativity(out["before"]).holds


# Pauli K-star


def test_pauli_kstar_matrix_oracle():
    C = catalog.pauli_kstar()
    rng = random.Random(4)
    for _ in range(10):
        s = [complex(rng.randint(-3, 3), rng.randint(-3, 3)) for _ in range(4)]
        T = C.subs(dict(zip(catalog.S_PARAMS, s)))
        assert check_associativity(T).holds
        K = sum(c * m for c, m in zip(s, SIGMA))
        N = numeric(T)
        for a, b in itertools.product(range(4), repeat=2):
            prod = SIGMA[a] @ K @ SIGMA[b]
            assert np.allclose([np.trace(m.conj().T @ prod) / 2 for m in SIGMA], N[a, b])


# Bianchi


def sign_oracle(eps):
    nz = [e for e in eps if e]
    if not nz:
        return "I"
    if len(nz) == 1:
        return "II"
    same = len(set(nz)) == 1
    if len(nz) == 2:
        return "VII_0" if same else "VI_0"
    return "IX" if same else "VIII"


def test_bianchi_sweep():
    sweep = catalog.bianchi_L_sweep()
    assert len(sweep) == 27
    for eps, t in sweep.items():
        assert t.label == sign_oracle(eps)
    assert {t.label for t in sweep.values()} == {"I", "II", "VI_0", "VII_0", "VIII", "IX"}


def test_bianchi_IX_from_identity_k():
    L = fixture("bianchi_L_K", {"lambda1": 1, "lambda2": 1, "lambda3": 1, "mu1": 0, "mu2": 0, "mu3": 0})
    assert str(bianchi_classify(L)) == "Bianchi IX"


def test_bianchi_zero_is_I():
    assert bianchi_classify(StructureTensor.zeros(3)) == BianchiType("I")


def ad_oracle(M):
    """Type of the solvable algebra R^2 x| R with ad(X3) restricted to the ideal equal to M."""
    (a, b), (c, d) = M
    t, det = Fraction(a + d), Fraction(a * d - b * c)
    if not any((a, b, c, d)):
        return "I", None
    if t == 0:
        return ("II" if det == 0 else "VI_0" if det < 0 else "VII_0"), None
    if b == c == 0 and a == d:
        return "V", None
    if t * t == 4 * det:
        return "IV", None
    if det == 0:
        return "III", None
    h = t * t / (4 * det - t * t)
    return ("VI_h" if h < 0 else "VII_h"), h


def x_brackets(M):
    # [X_a, X3] = sum_b M[b][a] X_b, [X1, X2] = 0
    entries = {}
    for a in range(2):
        for b in range(2):
            if M[b][a]:
                entries[(a, 2, b)] = M[b][a]
                entries[(2, a, b)] = -M[b][a]
    return StructureTensor.from_entries(3, entries)


@pytest.mark.parametrize("label", sorted(BIANCHI_X_INSTANCES))
def test_bianchi_X_instances(label):
    L = fixture("bianchi_X_K", BIANCHI_X_INSTANCES[label])
    L = L.subs({p: 0 for p in L.params})
    got = bianchi_classify(L)
    assert got.label == label
    M = [[L[a, 2, b].value() for a in range(2)] for b in range(2)]
    M = [[int(x.x) if x.x.denominator == 1 else Fraction(int(x.x.numerator), int(x.x.denominator)) for x in row] for row in M]
    assert ad_oracle(M) == (got.label, got.h)


def test_bianchi_X_type_V_with_h_alpha():
    L = fixture("bianchi_X_K", {"nu": -1, "h": 2, "alpha": 3, "mu": 6, "rho": -6})
    L = L.subs({p: 0 for p in L.params})
    assert bianchi_classify(L).label == "V"


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(min_value=-3, max_value=3), min_size=4, max_size=4))
def test_classifier_against_ad_oracle(xs):
    M = [xs[:2], xs[2:]]
    got = bianchi_classify(x_brackets(M))
    assert (got.label, got.h) == ad_oracle(M)


def test_bianchi_L_from_matrices_matches_table():
    assert catalog.bianchi_L_matrices() == catalog.bianchi_L_K().with_params(catalog.bianchi_L_matrices().params)


def test_bianchi_X_matrices_differ_from_table():
    A = catalog.bianchi_X_from_matrices()
    B = catalog.bianchi_X_K().with_params(A.params)
    assert A != B
    h, alpha, mu, nu, eta, rho = (CoeffExpr.param(n, A.params) for n in ("h", "alpha", "mu", "nu", "eta", "rho"))
    assert A.basis_product(0, 2) == A.element([mu - h * alpha, -nu, 0])
    assert A.basis_product(1, 2) == A.element([eta, -(h * alpha + rho), 0])


def test_classify_rejects_bad_input():
    with pytest.raises(NotThreeDimensional):
        bianchi_classify(StructureTensor.zeros(2))
    bad = {}
    for (a, b, c) in ((0, 1, 2), (1, 2, 0), (2, 0, 0)):
        bad[(a, b, c)], bad[(b, a, c)] = 1, -1
    with pytest.raises(JacobiFails):
        bianchi_classify(StructureTensor.from_entries(3, bad))
