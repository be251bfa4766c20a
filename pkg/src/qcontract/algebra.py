"""Finite-dimensional algebras given by structure constants.

``C[m][n][l]`` is the coefficient of ``e_l`` in ``e_m * e_n`` (0-based).
Everything here is exact; the entries are :class:`CoeffExpr` sharing one
parameter tuple.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .coeffring import CoeffExpr, as_coeff, gauss
from . import linalg

MAX_DIM = 16


class AlgebraError(ValueError):
    pass


class DimensionMismatch(AlgebraError):
    pass


class DimensionTooLarge(AlgebraError):
    pass


class NotAntisymmetric(AlgebraError):
    pass


class NotClosed(AlgebraError):
    def __init__(self, message: str, pairs: Sequence[tuple[int, int]] = ()):
        super().__init__(message)
        self.pairs = list(pairs)


class LinearlyDependentInput(AlgebraError):
    pass


def _common_params(values: Iterable[CoeffExpr], params: Sequence[str] = ()) -> tuple[str, ...]:
    out = list(params)
    seen = set(out)
    for v in values:
        for p in v.params:
            if p not in seen:
                seen.add(p)
                out.append(p)
    return tuple(out)


class StructureTensor:
    """Immutable ``dim x dim x dim`` array of structure constants."""

    __slots__ = ("dim", "basis", "params", "_C")

    def __init__(self, C, basis: Sequence[str] | None = None, params: Sequence[str] = ()):
        dim = len(C)
        if dim == 0:
            raise AlgebraError("dimension must be positive")
        if dim > MAX_DIM:
            raise DimensionTooLarge(f"dim {dim} exceeds the supported maximum {MAX_DIM}")
        raw = []
        for m in range(dim):
            if len(C[m]) != dim or any(len(C[m][n]) != dim for n in range(dim)):
                raise DimensionMismatch(f"structure constants must have shape {dim}^3")
            raw.append([[as_coeff(x) for x in C[m][n]] for n in range(dim)])
        params = _common_params((x for a in raw for b in a for x in b), params)
        self.dim = dim
        self.basis = tuple(basis) if basis is not None else tuple(f"e{k}" for k in range(dim))
        if len(self.basis) != dim:
            raise DimensionMismatch(f"{len(self.basis)} basis names for dim {dim}")
        self.params = params
        self._C = tuple(
            tuple(tuple(x.with_params(params) for x in b) for b in a) for a in raw
        )

    # constructors

    @classmethod
    def zeros(cls, dim: int, basis=None, params: Sequence[str] = ()) -> StructureTensor:
        z = CoeffExpr.zero(params)
        return cls([[[z] * dim for _ in range(dim)] for _ in range(dim)], basis, params)

    @classmethod
    def from_entries(
        cls,
        dim: int,
        entries: Mapping[tuple[int, int, int], object],
        basis=None,
        params: Sequence[str] = (),
    ) -> StructureTensor:
        """Build from a sparse ``{(m, n, l): coeff}`` map; strings are parsed."""
        params = tuple(params)
        z = CoeffExpr.zero(params)
        C = [[[z] * dim for _ in range(dim)] for _ in range(dim)]
        for (m, n, l), v in entries.items():
            if not all(0 <= k < dim for k in (m, n, l)):
                raise DimensionMismatch(f"index ({m},{n},{l}) out of range for dim {dim}")
            C[m][n][l] = C[m][n][l] + as_coeff(v, params)
        return cls(C, basis, params)

    # access

    def __getitem__(self, idx):
        if isinstance(idx, tuple):
            m, n, l = idx
            return self._C[m][n][l]
        return self._C[idx]

    def entry(self, m: int, n: int, l: int) -> CoeffExpr:
        return self._C[m][n][l]

    def basis_product(self, m: int, n: int) -> AlgebraElement:
        return AlgebraElement(self._C[m][n])

    def nonzero_entries(self) -> Iterator[tuple[int, int, int, CoeffExpr]]:
        for m in range(self.dim):
            for n in range(self.dim):
                for l in range(self.dim):
                    x = self._C[m][n][l]
                    if x:
                        yield m, n, l, x

    def map(self, fn) -> StructureTensor:
        C = [[[fn(x) for x in b] for b in a] for a in self._C]
        return StructureTensor(C, self.basis)

    def subs(self, assignment: Mapping[str, object]) -> StructureTensor:
        """Substitute values for parameters; substituted names are dropped."""
        keep = tuple(p for p in self.params if p not in assignment)
        out = self.map(lambda x: x.subs(assignment))
        return StructureTensor(
            [[[x.with_params(keep) for x in b] for b in a] for a in out._C], self.basis, keep
        )

    def with_params(self, params: Sequence[str]) -> StructureTensor:
        return StructureTensor(self._C, self.basis, params)

    def zero(self) -> CoeffExpr:
        return CoeffExpr.zero(self.params)

    def one(self) -> CoeffExpr:
        return CoeffExpr.one(self.params)

    def basis_vector(self, k: int) -> AlgebraElement:
        z, o = self.zero(), self.one()
        return AlgebraElement([o if j == k else z for j in range(self.dim)])

    def element(self, coords: Sequence) -> AlgebraElement:
        if len(coords) != self.dim:
            raise DimensionMismatch(f"expected {self.dim} coordinates, got {len(coords)}")
        return AlgebraElement([as_coeff(c, self.params) for c in coords])

    def is_commutative(self) -> bool:
        return all(
            self._C[m][n] == self._C[n][m] for m in range(self.dim) for n in range(m + 1, self.dim)
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, StructureTensor):
            return NotImplemented
        return self.dim == other.dim and self._C == other._C

    def __hash__(self):
        return hash(self._C)

    def __repr__(self) -> str:
        nz = sum(1 for _ in self.nonzero_entries())
        return f"StructureTensor(dim={self.dim}, basis={list(self.basis)}, params={list(self.params)}, nonzero={nz})"

    def table(self) -> dict[tuple[str, str], str]:
        """Human-readable product table ``{(a, b): "c*e_l + ..."}`` for nonzero products."""
        out = {}
        for m in range(self.dim):
            for n in range(self.dim):
                s = self.basis_product(m, n).format(self.basis)
                if s != "0":
                    out[(self.basis[m], self.basis[n])] = s
        return out

    # serialization

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "basis": list(self.basis),
            "params": list(self.params),
            "constants": [
                {"m": m, "n": n, "l": l, "coeff": str(x)} for m, n, l, x in self.nonzero_entries()
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> StructureTensor:
        dim = int(data["dim"])
        params = tuple(data.get("params", ()))
        entries: dict[tuple[int, int, int], object] = {}
        for c in data.get("constants", ()):
            key = (int(c["m"]), int(c["n"]), int(c["l"]))
            if key in entries:
                raise AlgebraError(f"duplicate entry {key}")
            entries[key] = str(c["coeff"])
        return cls.from_entries(dim, entries, data.get("basis"), params)


@dataclass(frozen=True)
class AlgebraElement:
    coords: tuple

    def __init__(self, coords: Sequence):
        object.__setattr__(self, "coords", tuple(as_coeff(c) for c in coords))

    def __len__(self) -> int:
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, k):
        return self.coords[k]

    def __add__(self, other: AlgebraElement) -> AlgebraElement:
        _conform(len(self), other)
        return AlgebraElement([a + b for a, b in zip(self.coords, other.coords)])

    def __sub__(self, other: AlgebraElement) -> AlgebraElement:
        _conform(len(self), other)
        return AlgebraElement([a - b for a, b in zip(self.coords, other.coords)])

    def scale(self, c) -> AlgebraElement:
        return AlgebraElement([c * a for a in self.coords])

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __eq__(self, other) -> bool:
        if isinstance(other, AlgebraElement):
            return self.coords == other.coords
        if isinstance(other, (list, tuple)):
            return len(other) == len(self) and all(a == as_coeff(b) for a, b in zip(self.coords, other))
        return NotImplemented

    def __hash__(self):
        return hash(self.coords)

    def __repr__(self) -> str:
        return f"AlgebraElement([{', '.join(str(c) for c in self.coords)}])"

    def format(self, basis: Sequence[str]) -> str:
        out = ""
        for name, c in zip(basis, self.coords):
            if not c:
                continue
            s = str(c)
            neg = s.startswith("-") and not any(ch in s[1:] for ch in " +-/")
            body = s[1:] if neg else s
            if body == "1":
                term = name
            elif any(ch in body for ch in " +-/"):
                term = f"({body})*{name}"
            else:
                term = f"{body}*{name}"
            if not out:
                out = ("-" if neg else "") + term
            else:
                out += (" - " if neg else " + ") + term
        return out or "0"


def _conform(dim: int, *elts) -> None:
    for e in elts:
        if len(e) != dim:
            raise DimensionMismatch(f"element of length {len(e)} does not conform to dim {dim}")


def _as_element(C: StructureTensor, u) -> AlgebraElement:
    if isinstance(u, AlgebraElement):
        _conform(C.dim, u)
        return u
    return C.element(list(u))


def multiply(C: StructureTensor, u, v) -> AlgebraElement:
    """Exact product ``(u v)_l = sum_{m,n} u_m v_n C[m][n][l]``."""
    u, v = _as_element(C, u), _as_element(C, v)
    d = C.dim
    acc = [C.zero()] * d
    for m in range(d):
        if not u[m]:
            continue
        for n in range(d):
            if not v[n]:
                continue
            w = u[m] * v[n]
            row = C[m][n]
            for l in range(d):
                if row[l]:
                    acc[l] = acc[l] + w * row[l]
    return AlgebraElement(acc)


def associator(C: StructureTensor, u, v, w) -> AlgebraElement:
    """``(u v) w - u (v w)``."""
    return multiply(C, multiply(C, u, v), w) - multiply(C, u, multiply(C, v, w))


@dataclass
class CheckReport:
    holds: bool
    violations: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.holds


def check_associativity(C: StructureTensor) -> CheckReport:
    """Exhaustive exact check of the quadratic associativity equations.

    For every ``(m, n, l, k)`` compares ``sum_j C[m][n][j] C[j][l][k]`` with
    ``sum_j C[n][l][j] C[m][j][k]``; each mismatching tuple is reported.
    """
    d = C.dim
    basis = [C.basis_vector(k) for k in range(d)]
    prods = [[C.basis_product(m, n) for n in range(d)] for m in range(d)]
    violations = []
    for m in range(d):
        for n in range(d):
            mn = prods[m][n]
            for l in range(d):
                left = multiply(C, mn, basis[l])
                right = multiply(C, basis[m], prods[n][l])
                for k in range(d):
                    if left[k] != right[k]:
                        violations.append((m, n, l, k))
    return CheckReport(not violations, violations)


def antisymmetrize(C: StructureTensor) -> StructureTensor:
    d = C.dim
    return StructureTensor(
        [[[C[m][n][l] - C[n][m][l] for l in range(d)] for n in range(d)] for m in range(d)],
        C.basis,
        C.params,
    )


def symmetrize(C: StructureTensor) -> StructureTensor:
    """Jordan constants ``C[m][n][l] + C[n][m][l]``, deliberately without a 1/2."""
    d = C.dim
    return StructureTensor(
        [[[C[m][n][l] + C[n][m][l] for l in range(d)] for n in range(d)] for m in range(d)],
        C.basis,
        C.params,
    )


def is_antisymmetric(L: StructureTensor) -> bool:
    d = L.dim
    return all(
        L[m][n][l] == -L[n][m][l] for m in range(d) for n in range(m, d) for l in range(d)
    )


def check_jacobi(L: StructureTensor) -> CheckReport:
    """Exact Jacobi identity on all basis triples; violations are ``(m, n, l, k)``."""
    if not is_antisymmetric(L):
        raise NotAntisymmetric("bracket constants are not antisymmetric")
    d = L.dim
    basis = [L.basis_vector(k) for k in range(d)]
    violations = []
    for m in range(d):
        for n in range(m + 1, d):
            for l in range(n + 1, d):
                total = (
                    multiply(L, L.basis_product(m, n), basis[l])
                    + multiply(L, L.basis_product(n, l), basis[m])
                    + multiply(L, L.basis_product(l, m), basis[n])
                )
                violations.extend((m, n, l, k) for k in range(d) if total[k])
    return CheckReport(not violations, violations)


def _matrix_coeffs(mats) -> list[list[list[CoeffExpr]]]:
    out = []
    for M in mats:
        out.append([[as_coeff(x) if isinstance(x, (CoeffExpr, str)) else CoeffExpr.const(gauss(x)) for x in row] for row in M])
    params = _common_params(x for M in out for row in M for x in row)
    return [[[x.with_params(params) for x in row] for row in M] for M in out]


def _span_coordinates(mats, targets, what: str, basis) -> StructureTensor:
    # express each target matrix (one per ordered pair) in the span of mats
    d = len(mats)
    size = len(mats[0])
    zero = mats[0][0][0] - mats[0][0][0]
    flat = [[M[i][j] for i in range(size) for j in range(size)] for M in mats]
    pairs = [(m, n) for m in range(d) for n in range(d)]
    rows = [
        [flat[k][r] for k in range(d)] + [P[r // size][r % size] for P in targets]
        for r in range(size * size)
    ]
    pivots = linalg.rref(rows, d)
    if len(pivots) < d:
        raise LinearlyDependentInput(f"{d} matrices span only {len(pivots)} dimensions")
    bad = [
        pairs[c]
        for c in range(len(pairs))
        if any(rows[r][d + c] for r in range(len(pivots), len(rows)))
    ]
    if bad:
        raise NotClosed(f"{what} {bad} leave the span of the matrices", bad)
    C = [[[zero] * d for _ in range(d)] for _ in range(d)]
    for c, (m, n) in enumerate(pairs):
        for r, p in enumerate(pivots):
            C[m][n][p] = rows[r][d + c]
    return StructureTensor(C, basis)


def _checked_matrices(mats):
    mats = _matrix_coeffs(mats)
    if not mats:
        raise AlgebraError("need at least one matrix")
    size = len(mats[0])
    if any(len(M) != size or any(len(r) != size for r in M) for M in mats):
        raise DimensionMismatch("matrices must all be square of the same size")
    return mats, mats[0][0][0] - mats[0][0][0]


def constants_from_matrices(mats, basis: Sequence[str] | None = None) -> StructureTensor:
    """Solve ``M_m M_n = sum_l C[m][n][l] M_l`` exactly.

    Raises :class:`LinearlyDependentInput` if the matrices are dependent and
    :class:`NotClosed` (listing offending ``(m, n)``) if some product leaves
    their span.
    """
    mats, zero = _checked_matrices(mats)
    d = len(mats)
    prods = [linalg.matmul(mats[m], mats[n], zero) for m in range(d) for n in range(d)]
    return _span_coordinates(mats, prods, "products", basis)


def commutator_constants_from_matrices(mats, basis=None, K=None) -> StructureTensor:
    """Lie constants of ``[M_m, M_n]_K = M_m K M_n - M_n K M_m`` in the span of ``mats``.

    ``K`` defaults to the identity, giving the ordinary commutator.
    """
    mats, zero = _checked_matrices(mats)
    d = len(mats)
    if K is not None:
        Kc = _matrix_coeffs([K])[0]
        left = [linalg.matmul(M, Kc, zero) for M in mats]
    else:
        left = mats
    brs = []
    for m in range(d):
        for n in range(d):
            a = linalg.matmul(left[m], mats[n], zero)
            b = linalg.matmul(left[n], mats[m], zero)
            brs.append([[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)])
    return _span_coordinates(mats, brs, "brackets", basis)
