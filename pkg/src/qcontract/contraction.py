"""Families of products: conjugation by ``T(lambda)``, contraction limits and K-deformations."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from . import linalg
from .algebra import (
    AlgebraElement,
    CheckReport,
    DimensionMismatch,
    StructureTensor,
    check_associativity,
    multiply,
)
from .coeffring import CoeffExpr, DoesNotExist, as_coeff, gauss, partial_limit


class SingularFamily(ArithmeticError):
    pass


class LimitDoesNotExist(ArithmeticError):
    """Some conjugated entries have a pole at the critical value.

    ``entries`` holds ``(j, k, l, expr)`` for each divergent ``C[j][k][l]``.
    """

    def __init__(self, param: str, critical, entries):
        self.param = param
        self.critical = critical
        self.entries = list(entries)
        listed = ", ".join(f"C[{j}][{k}][{l}] = {x}" for j, k, l, x in self.entries)
        super().__init__(f"limit {param} -> {critical} does not exist for {listed}")


class TransformFamily:
    """Square matrix of CoeffExpr in one parameter, invertible generically."""

    def __init__(self, matrix, param: str, params: Sequence[str] = ()):
        self.param = param
        params = tuple(params) or (param,)
        if param not in params:
            params = params + (param,)
        rows = [[as_coeff(x, params) for x in row] for row in matrix]
        self.dim = len(rows)
        if any(len(r) != self.dim for r in rows):
            raise DimensionMismatch("transform matrix must be square")
        allp = list(params)
        for r in rows:
            for x in r:
                allp.extend(p for p in x.params if p not in allp)
        self.params = tuple(allp)
        self.matrix = [[x.with_params(self.params) for x in r] for r in rows]
        one = CoeffExpr.one(self.params)
        self.det = linalg.determinant(self.matrix, one)
        if not self.det:
            raise SingularFamily("transform determinant is identically zero")
        self._inv = None

    @classmethod
    def diagonal(cls, entries, param: str) -> TransformFamily:
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)], param)

    @property
    def inverse(self):
        if self._inv is None:
            self._inv = linalg.inverse(self.matrix, CoeffExpr.one(self.params))
        return self._inv

    def column(self, j: int) -> list:
        return [row[j] for row in self.matrix]

    def to_json(self, critical=None) -> dict:
        out = {"param": self.param, "matrix": [[str(x) for x in r] for r in self.matrix]}
        if critical is not None:
            out["critical"] = str(as_coeff(critical))
        return out


def _lift(C: StructureTensor, params) -> StructureTensor:
    merged = list(C.params)
    for p in params:
        if p not in merged:
            merged.append(p)
    return C.with_params(merged) if tuple(merged) != C.params else C


def conjugate_family(C: StructureTensor, T: TransformFamily) -> StructureTensor:
    """Constants of ``u *_lambda v = T^{-1}(T u * T v)`` as rational functions."""
    if T.dim != C.dim:
        raise DimensionMismatch(f"transform of dim {T.dim} for an algebra of dim {C.dim}")
    C = _lift(C, T.params)
    zero = C.zero()
    cols = [AlgebraElement(T.column(j)) for j in range(C.dim)]
    Tinv = T.inverse if C.params == T.params else [[x.with_params(C.params) for x in r] for r in T.inverse]
    out = []
    for j in range(C.dim):
        row = []
        for k in range(C.dim):
            prod = multiply(C, cols[j], cols[k])
            row.append(linalg.matvec(Tinv, list(prod.coords), zero))
        out.append(row)
    return StructureTensor(out, C.basis, C.params)


def tensor_limit(C: StructureTensor, param: str, value) -> StructureTensor:
    """Entrywise ``param -> value``; other parameters are kept as generic symbols.

    Raises :class:`LimitDoesNotExist` listing every divergent entry.
    """
    bad = []
    out = []
    for j in range(C.dim):
        rj = []
        for k in range(C.dim):
            rk = []
            for l in range(C.dim):
                x = C[j][k][l]
                try:
                    rk.append(partial_limit(x, param, value) if x else x)
                except DoesNotExist:
                    bad.append((j, k, l, x))
                    rk.append(x)
            rj.append(rk)
        out.append(rj)
    if bad:
        raise LimitDoesNotExist(param, value, bad)
    keep = tuple(p for p in C.params if p != param)
    return StructureTensor(
        [[[x.with_params(keep) for x in b] for b in a] for a in out], C.basis, keep
    )


@dataclass
class ContractionResult:
    tensor: StructureTensor
    associative: CheckReport
    family: StructureTensor = field(repr=False, default=None)


def contract_limit(C: StructureTensor, T: TransformFamily, critical) -> ContractionResult:
    """Conjugate by ``T``, take the entrywise limit, then re-check associativity."""
    fam = conjugate_family(C, T)
    tensor = tensor_limit(fam, T.param, gauss(critical))
    return ContractionResult(tensor, check_associativity(tensor), fam)


def _vector(C: StructureTensor, K) -> AlgebraElement:
    if len(K) != C.dim:
        raise DimensionMismatch(f"K has {len(K)} entries, algebra has dim {C.dim}")
    return K if isinstance(K, AlgebraElement) else AlgebraElement([as_coeff(x) for x in K])


def k_deform(C: StructureTensor, K) -> StructureTensor:
    """Constants of ``u *_K v = (u K) v``: ``C_K[m][n][j] = sum C[m][p][s] K_p C[s][n][j]``."""
    K = _vector(C, K)
    C = _lift(C, [p for x in K for p in x.params])
    d = C.dim
    zero = C.zero()
    out = []
    for m in range(d):
        mk = multiply(C, C.basis_vector(m), K)  # (e_m K)_s
        row = []
        for n in range(d):
            acc = [zero] * d
            for s in range(d):
                a = mk[s]
                if not a:
                    continue
                cs = C[s][n]
                for j in range(d):
                    if cs[j]:
                        acc[j] = acc[j] + a * cs[j]
            row.append(acc)
        out.append(row)
    return StructureTensor(out, C.basis, C.params)


@dataclass
class DeformationSequence:
    vectors: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.vectors)

    def __len__(self):
        return len(self.vectors)


def iterate_deform(C: StructureTensor, seq) -> StructureTensor:
    """``S0 = C``; ``S_r = k_deform(S_{r-1}, K_r)``."""
    vectors = seq.vectors if isinstance(seq, DeformationSequence) else list(seq)
    for K in vectors:
        if len(K) != C.dim:
            raise DimensionMismatch(f"deformation vector of length {len(K)} for dim {C.dim}")
    S = C
    for K in vectors:
        S = k_deform(S, K)
    return S
