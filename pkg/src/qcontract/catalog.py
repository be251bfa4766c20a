"""Worked algebras: u(2)/Pauli, the K-star product, eta-basis, Bianchi brackets.

Every fixture is a plain function returning exact structure constants (or
matrices, for ``so3_adjoint``).  Use :func:`fixture` for name-based access.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Callable, Mapping, Sequence

from .algebra import (
    StructureTensor,
    check_jacobi,
    commutator_constants_from_matrices,
    constants_from_matrices,
    is_antisymmetric,
)
from .coeffring import CoeffExpr, UndeclaredParameter, parse_expr
from .contraction import TransformFamily, contract_limit, tensor_limit


class UnknownFixture(KeyError):
    pass


class MissingParameter(KeyError):
    pass


class NotThreeDimensional(ValueError):
    pass


class JacobiFails(ValueError):
    pass


def _eps(i: int, j: int, k: int) -> int:
    # Levi-Civita on {0,1,2}
    return (i - j) * (j - k) * (k - i) // 2


PAULI = [
    [[1, 0], [0, 1]],
    [[0, 1], [1, 0]],
    [[0, "-i"], ["i", 0]],
    [[1, 0], [0, -1]],
]

SO3_ADJOINT = [
    [[0, 0, 0], [0, 0, -1], [0, 1, 0]],
    [[0, 0, 1], [0, 0, 0], [-1, 0, 0]],
    [[0, -1, 0], [1, 0, 0], [0, 0, 0]],
]

U2_BASIS = ("e0", "e1", "e2", "e3")
ETA_PARAMS = ("mu1", "mu2", "mu3")
L_PARAMS = ("lambda1", "lambda2", "lambda3", "mu1", "mu2", "mu3")
X_PARAMS = ("h", "alpha", "beta", "gamma", "eta", "rho", "mu", "nu")
S_PARAMS = ("s0", "s1", "s2", "s3")


def so3_adjoint() -> list:
    """Adjoint matrices L1, L2, L3 of the cross-product bracket."""
    return [[row[:] for row in M] for M in SO3_ADJOINT]


def cross_product() -> StructureTensor:
    """``e_j e_k = sum_l eps_jkl e_l`` used as a (non-associative) product."""
    entries = {}
    for j in range(3):
        for k in range(3):
            for l in range(3):
                if _eps(j, k, l):
                    entries[(j, k, l)] = _eps(j, k, l)
    return StructureTensor.from_entries(3, entries, ("e1", "e2", "e3"))


def _u2_entries(unit) -> dict:
    entries = {(0, 0, 0): 1}
    for j in range(1, 4):
        entries[(0, j, j)] = 1
        entries[(j, 0, j)] = 1
        entries[(j, j, 0)] = 1
        for k in range(1, 4):
            for l in range(1, 4):
                e = _eps(j - 1, k - 1, l - 1)
                if e:
                    entries[(j, k, l)] = f"{e}*{unit}"
    return entries


def u2() -> StructureTensor:
    """u(2) associative product in the Pauli convention (with the imaginary unit)."""
    return StructureTensor.from_entries(4, _u2_entries("i"), U2_BASIS)


def u2_printed() -> StructureTensor:
    """The u(2) table with the imaginary unit dropped; not associative."""
    return StructureTensor.from_entries(4, _u2_entries("1"), U2_BASIS)


def pauli_matrices() -> list:
    return [[row[:] for row in M] for M in PAULI]


def pauli_kstar() -> StructureTensor:
    """Closed-form constants of ``a o b = a K b`` with ``K = sum_a s^a sigma_a``.

    Built directly from the index formula, independently of any matrix product.
    """
    s = [CoeffExpr.param(n, S_PARAMS) for n in S_PARAMS]
    zero = CoeffExpr.zero(S_PARAMS)
    I = CoeffExpr.const("i", S_PARAMS)
    C = [[[zero] * 4 for _ in range(4)] for _ in range(4)]
    for a in range(4):
        C[0][0][a] = s[a]
    for j in range(1, 4):
        for a in range(4):
            x = zero
            if a == 0:
                x += s[j]
            if a == j:
                x += s[0]
            if a >= 1:
                x += sum((I * s[n] * _eps(n - 1, j - 1, a - 1) for n in range(1, 4)), zero)
            C[0][j][a] = x
            C[j][0][a] = x.conjugate()
        for m in range(1, 4):
            djm = 1 if j == m else 0
            for a in range(4):
                x = zero
                if a == 0:
                    x += s[0] * djm + sum(
                        (I * s[n] * _eps(n - 1, m - 1, j - 1) for n in range(1, 4)), zero
                    )
                if a == j:
                    x += s[m]
                if a == m:
                    x += s[j]
                if a >= 1:
                    x += I * s[0] * _eps(j - 1, m - 1, a - 1) - s[a] * djm
                C[j][m][a] = x
    return StructureTensor(C, U2_BASIS, S_PARAMS)


def eta() -> StructureTensor:
    """eta-basis products with symbolic mu1, mu2, mu3.

    All three cyclic products carry the imaginary unit, as the realization
    eta_1 = sqrt(mu1 mu3) sigma_1, ... forces.
    """
    m1, m2, m3 = (f"mu{k}" for k in (1, 2, 3))
    entries = {(0, 0, 0): 1}
    for j in range(1, 4):
        entries[(0, j, j)] = 1
        entries[(j, 0, j)] = 1
    entries[(1, 1, 0)] = f"{m1}*{m3}"
    entries[(2, 2, 0)] = f"{m1}*{m2}"
    entries[(3, 3, 0)] = f"{m2}*{m3}"
    for (a, b, c, mu) in ((1, 2, 3, m1), (2, 3, 1, m2), (3, 1, 2, m3)):
        entries[(a, b, c)] = f"i*{mu}"
        entries[(b, a, c)] = f"-i*{mu}"
    return StructureTensor.from_entries(4, entries, ("eta0", "eta1", "eta2", "eta3"), ETA_PARAMS)


def bianchi_L_K() -> StructureTensor:
    """K-brackets on L1, L2, L3 with symmetric K of lambda_i / mu_i entries."""
    P = L_PARAMS
    entries = {}

    def put(a, b, coeffs):
        for l, c in enumerate(coeffs):
            entries[(a, b, l)] = c
            entries[(b, a, l)] = f"-({c})"

    put(0, 1, ("mu3", "mu2", "lambda3"))
    put(1, 2, ("lambda1", "mu1", "mu3"))
    put(2, 0, ("mu1", "lambda2", "mu2"))
    return StructureTensor.from_entries(3, entries, ("L1", "L2", "L3"), P)


def bianchi_L_matrix_K() -> list:
    return [
        ["lambda1", "mu1", "mu3"],
        ["mu1", "lambda2", "mu2"],
        ["mu3", "mu2", "lambda3"],
    ]


def _parse_matrix(M, params):
    return [[parse_expr(str(x), params) for x in row] for row in M]


def bianchi_L_matrices() -> StructureTensor:
    """The same brackets computed from the adjoint matrices and the K matrix."""
    return commutator_constants_from_matrices(
        so3_adjoint(), ("L1", "L2", "L3"), _parse_matrix(bianchi_L_matrix_K(), L_PARAMS)
    )


def bianchi_X_K() -> StructureTensor:
    """X-basis K-brackets as tabulated: [X1,X2] = 0, [X1,X3] = -nu X1 + (mu - h alpha) X2,
    [X2,X3] = (rho + h alpha) X1 - nu X2."""
    entries = {}

    def put(a, b, coeffs):
        for l, c in enumerate(coeffs):
            entries[(a, b, l)] = c
            entries[(b, a, l)] = f"-({c})"

    put(0, 2, ("-nu", "mu - h*alpha", "0"))
    put(1, 2, ("rho + h*alpha", "-nu", "0"))
    return StructureTensor.from_entries(3, entries, ("X1", "X2", "X3"), X_PARAMS)


def bianchi_X_matrices() -> list:
    return [
        [[0, 0, 1], [0, 0, 0], [0, 0, 0]],
        [[0, 1, 0], [0, 0, 0], [0, 0, 0]],
        [["h", 0, 0], [0, 0, 1], [0, -1, 0]],
    ]


def bianchi_X_matrix_K() -> list:
    return [["alpha", "beta", "gamma"], [0, "eta", "rho"], [0, "mu", "nu"]]


def bianchi_X_from_matrices() -> StructureTensor:
    """X-basis K-brackets recomputed from the X matrices; differs from :func:`bianchi_X_K`."""
    return commutator_constants_from_matrices(
        [_parse_matrix(M, X_PARAMS) for M in bianchi_X_matrices()],
        ("X1", "X2", "X3"),
        _parse_matrix(bianchi_X_matrix_K(), X_PARAMS),
    )


# Spot instances of the tabulated X-basis family, with h = 0.
BIANCHI_X_INSTANCES: dict[str, dict[str, int]] = {
    "III": {"h": 0, "alpha": 0, "nu": 1, "mu": 1, "rho": 1},
    "IV": {"h": 0, "alpha": 0, "nu": -1, "mu": 1, "rho": 0},
    "V": {"h": 0, "alpha": 0, "nu": -1, "mu": 0, "rho": 0},
    "VI_h": {"h": 0, "alpha": 0, "nu": 1, "mu": 2, "rho": 2},
    "VII_h": {"h": 0, "alpha": 0, "nu": 1, "mu": -1, "rho": 1},
}


FIXTURES: dict[str, Callable[[], object]] = {
    "so3_adjoint": so3_adjoint,
    "bianchi_L_K": bianchi_L_K,
    "bianchi_X_K": bianchi_X_K,
    "u2": u2,
    "pauli_kstar": pauli_kstar,
    "eta": eta,
    "u2_printed": u2_printed,
    "cross_product": cross_product,
    "bianchi_L_matrices": bianchi_L_matrices,
    "bianchi_X_from_matrices": bianchi_X_from_matrices,
}


def fixture_names() -> list[str]:
    return list(FIXTURES)


def fixture_params(name: str) -> tuple[str, ...]:
    obj = _build(name)
    return obj.params if isinstance(obj, StructureTensor) else ()


def _build(name: str):
    try:
        return FIXTURES[name]()
    except KeyError:
        raise UnknownFixture(name) from None


def fixture(name: str, params: Mapping[str, object] | None = None, strict: bool = False):
    """Fixture ``name`` with ``params`` substituted.

    With ``strict=True`` every parameter of the fixture must be assigned,
    otherwise :class:`MissingParameter` is raised.  Unknown parameter names
    raise :class:`UndeclaredParameter`.
    """
    obj = _build(name)
    params = dict(params or {})
    if not isinstance(obj, StructureTensor):
        if params:
            raise UndeclaredParameter(next(iter(params)), ())
        return obj
    for p in params:
        if p not in obj.params:
            raise UndeclaredParameter(p, obj.params)
    if strict:
        missing = [p for p in obj.params if p not in params]
        if missing:
            raise MissingParameter(f"fixture {name!r} needs values for {missing}")
    return obj.subs(params) if params else obj


def eta_staged_limit(order: Sequence[str] = ETA_PARAMS) -> list[StructureTensor]:
    """Successive tensors after sending each parameter of ``order`` to 0."""
    order = [o if o.startswith("mu") else f"mu{o}" for o in map(str, order)]
    if sorted(order) != sorted(ETA_PARAMS):
        raise ValueError(f"order must be a permutation of {ETA_PARAMS}, got {order}")
    T = eta()
    stages = []
    for p in order:
        T = tensor_limit(T, p, 0)
        stages.append(T)
    return stages


def u2_contraction_demo() -> dict[str, StructureTensor]:
    before = u2()
    T = TransformFamily.diagonal([1, "lambda", "lambda", "lambda"], "lambda")
    res = contract_limit(before, T, 0)
    return {"before": before, "after": res.tensor, "associative": res.associative}


# --- Bianchi classification ---------------------------------------------------


@dataclass(frozen=True)
class BianchiType:
    label: str
    h: Fraction | None = None

    def __post_init__(self):
        if (self.h is not None) != (self.label in ("VI_h", "VII_h")):
            raise ValueError(f"class parameter h is required exactly for VI_h/VII_h, got {self}")

    def __str__(self) -> str:
        return f"Bianchi {self.label}" + (f" (h = {self.h})" if self.h is not None else "")


BIANCHI_LABELS = ("I", "II", "III", "IV", "V", "VI_0", "VI_h", "VII_0", "VII_h", "VIII", "IX")
UNIMODULAR = frozenset({"I", "II", "VI_0", "VII_0", "VIII", "IX"})


def _real_fraction(x: CoeffExpr) -> Fraction:
    if x.free_params():
        raise ValueError(f"bracket constant {x} is not parameter-free")
    v = x.value()
    if v.y != 0:
        raise ValueError(f"bracket constant {x} is not real")
    return Fraction(int(v.x.numerator), int(v.x.denominator))


def _rank(M: list[list[Fraction]]) -> int:
    A = [row[:] for row in M]
    r = 0
    for c in range(3):
        p = next((i for i in range(r, 3) if A[i][c]), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        for i in range(3):
            if i != r and A[i][c]:
                f = A[i][c] / A[r][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        r += 1
    return r


def _definite(n: list[list[Fraction]]) -> bool:
    """Nonzero eigenvalues of the symmetric matrix ``n`` all share one sign.

    Uses the characteristic polynomial and Descartes' rule, which is exact
    for real-rooted polynomials.
    """
    tr = n[0][0] + n[1][1] + n[2][2]
    minors = (
        n[0][0] * n[1][1] - n[0][1] * n[1][0]
        + n[0][0] * n[2][2] - n[0][2] * n[2][0]
        + n[1][1] * n[2][2] - n[1][2] * n[2][1]
    )
    det = (
        n[0][0] * (n[1][1] * n[2][2] - n[1][2] * n[2][1])
        - n[0][1] * (n[1][0] * n[2][2] - n[1][2] * n[2][0])
        + n[0][2] * (n[1][0] * n[2][1] - n[1][1] * n[2][0])
    )
    coeffs = [c for c in (Fraction(1), -tr, minors, -det) if c]
    changes = sum(1 for a, b in zip(coeffs, coeffs[1:]) if (a > 0) != (b > 0))
    nonzero = _rank(n)
    # changes = number of positive roots
    return changes == 0 or changes == nonzero


def behr_decomposition(L: StructureTensor) -> tuple[list[list[Fraction]], list[Fraction]]:
    """Return ``(n, a)`` with ``C^k_ij = eps_ijl n^lk + delta^k_j a_i - delta^k_i a_j``."""
    C = [[[_real_fraction(L[i][j][k]) for k in range(3)] for j in range(3)] for i in range(3)]
    a = [sum((C[i][k][k] for k in range(3)), Fraction(0)) / 2 for i in range(3)]
    n = [[Fraction(0)] * 3 for _ in range(3)]
    for m in range(3):
        for k in range(3):
            s = sum(
                (_eps(m, i, j) * C[i][j][k] for i in range(3) for j in range(3)), Fraction(0)
            ) / 2
            s -= sum((_eps(m, i, k) * a[i] for i in range(3)), Fraction(0))
            n[m][k] = s
    return n, a


def bianchi_classify(L: StructureTensor) -> BianchiType:
    """Bianchi type of a real three-dimensional Lie bracket."""
    if L.dim != 3:
        raise NotThreeDimensional(f"Bianchi classification needs dim 3, got {L.dim}")
    if not is_antisymmetric(L) or not check_jacobi(L).holds:
        raise JacobiFails("constants do not define a Lie bracket")
    n, a = behr_decomposition(L)
    rank = _rank(n)
    if not any(a):
        if rank == 0:
            return BianchiType("I")
        if rank == 1:
            return BianchiType("II")
        definite = _definite(n)
        if rank == 2:
            return BianchiType("VII_0" if definite else "VI_0")
        return BianchiType("IX" if definite else "VIII")
    if rank == 0:
        return BianchiType("V")
    if rank == 1:
        return BianchiType("IV")
    # rank 2: a lies in the kernel of n, the trace of adj(n) is the product
    # of the two nonzero eigenvalues
    adj_tr = (
        n[1][1] * n[2][2] - n[1][2] * n[2][1]
        + n[0][0] * n[2][2] - n[0][2] * n[2][0]
        + n[0][0] * n[1][1] - n[0][1] * n[1][0]
    )
    h = sum((x * x for x in a), Fraction(0)) / adj_tr
    if h == -1:
        return BianchiType("III")
    return BianchiType("VI_h" if h < 0 else "VII_h", h)


def bianchi_L_sweep() -> dict[tuple[int, int, int], BianchiType]:
    """Classify the L-basis brackets for ``K = diag(e1, e2, e3)``, ``e_i in {-1, 0, 1}``."""
    base = bianchi_L_K()
    out = {}
    for e1 in (-1, 0, 1):
        for e2 in (-1, 0, 1):
            for e3 in (-1, 0, 1):
                T = base.subs(
                    {"lambda1": e1, "lambda2": e2, "lambda3": e3, "mu1": 0, "mu2": 0, "mu3": 0}
                )
                out[(e1, e2, e3)] = bianchi_classify(T)
    return out


def eta_orders() -> list[tuple[str, ...]]:
    return list(permutations(ETA_PARAMS))
