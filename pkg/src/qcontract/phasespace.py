"""Polynomial symbols, the Moyal product and the Groenewold kernel.

A :class:`PolySymbol` with ``d`` degrees of freedom is a polynomial in
``q1, p1, ..., qd, pd`` and formal deformation parameters ``h1, ..., hd``
(``h_k`` plays the role of hbar/m_k).  Exponent tuples are laid out as
``(q1, p1, q2, p2, ..., h1, ..., hd)``.  Degrees of freedom are 1-based in
the public API, matching the variable names.
"""

from __future__ import annotations

import cmath
import math
import re
from functools import lru_cache
from math import comb
from typing import Callable, Iterable, Mapping

import numpy as np
from sympy import QQ_I

from .coeffring import GaussRational, format_gauss, gauss, gauss_to_complex, parse_expr
from .quadrature import GridTooCoarse, PhaseGrid

_ZERO = QQ_I(0, 0)


class DofMismatch(ValueError):
    pass


class NonpositiveHbar(ValueError):
    pass


def _varnames(dofs: int) -> tuple[str, ...]:
    names = []
    for k in range(1, dofs + 1):
        names += [f"q{k}", f"p{k}"]
    return tuple(names) + tuple(f"h{k}" for k in range(1, dofs + 1))


class PolySymbol:
    """Immutable polynomial with Gaussian-rational coefficients."""

    __slots__ = ("dofs", "terms")

    def __init__(self, dofs: int, terms: Mapping[tuple[int, ...], object] | None = None):
        if dofs < 1:
            raise ValueError("need at least one degree of freedom")
        self.dofs = dofs
        width = 3 * dofs
        clean = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != width or min(exps, default=0) < 0:
                raise ValueError(f"bad exponent tuple {exps} for {dofs} dof(s)")
            c = gauss(c)
            if c:
                clean[exps] = clean.get(exps, _ZERO) + c
                if not clean[exps]:
                    del clean[exps]
        self.terms = clean

    # constructors

    @classmethod
    def const(cls, value, dofs: int = 1) -> PolySymbol:
        return cls(dofs, {(0,) * (3 * dofs): value})

    @classmethod
    def _var(cls, slot: int, dofs: int) -> PolySymbol:
        e = [0] * (3 * dofs)
        e[slot] = 1
        return cls(dofs, {tuple(e): 1})

    @classmethod
    def q(cls, k: int = 1, dofs: int = 1) -> PolySymbol:
        return cls._var(2 * (k - 1), dofs)

    @classmethod
    def p(cls, k: int = 1, dofs: int = 1) -> PolySymbol:
        return cls._var(2 * (k - 1) + 1, dofs)

    @classmethod
    def hbar(cls, k: int = 1, dofs: int = 1) -> PolySymbol:
        return cls._var(2 * dofs + k - 1, dofs)

    @classmethod
    def parse(cls, text: str, dofs: int = 1) -> PolySymbol:
        """Parse ``c * q1^a p1^b h1^c`` sums; juxtaposition means multiplication."""
        names = _varnames(dofs)
        # juxtaposed factors: insert explicit '*'
        explicit = re.sub(r"(?<=[\w)])\s+(?=[\w(])", "*", text.strip())
        x = parse_expr(explicit, names)
        if not x.is_polynomial():
            raise ValueError(f"{text!r} is not a polynomial")
        return cls(dofs, {tuple(m): c for m, c in x._num.items()})

    # structure

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, PolySymbol):
            return self.dofs == other.dofs and self.terms == other.terms
        try:
            return self == PolySymbol.const(other, self.dofs)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash((self.dofs, frozenset(self.terms.items())))

    def _check(self, other: PolySymbol) -> None:
        if not isinstance(other, PolySymbol):
            raise TypeError(f"expected PolySymbol, got {type(other).__name__}")
        if other.dofs != self.dofs:
            raise DofMismatch(f"{self.dofs} vs {other.dofs} degrees of freedom")

    def _lift(self, other) -> PolySymbol:
        if isinstance(other, PolySymbol):
            self._check(other)
            return other
        return PolySymbol.const(other, self.dofs)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, _ZERO) + c
        return PolySymbol(self.dofs, out)

    __radd__ = __add__

    def __neg__(self):
        return PolySymbol(self.dofs, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        """Pointwise (commutative) product."""
        other = self._lift(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, _ZERO) + c1 * c2
        return PolySymbol(self.dofs, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = PolySymbol.const(1, self.dofs)
        for _ in range(n):
            out = out * self
        return out

    def degree(self) -> int:
        """Total degree in the phase-space variables (formal parameters excluded)."""
        w = 2 * self.dofs
        return max((sum(e[:w]) for e in self.terms), default=-1)

    def diff(self, slot: int) -> PolySymbol:
        out = {}
        for e, c in self.terms.items():
            if e[slot]:
                e2 = list(e)
                e2[slot] -= 1
                out[tuple(e2)] = c * e[slot]
        return PolySymbol(self.dofs, out)

    def dq(self, k: int = 1) -> PolySymbol:
        return self.diff(2 * (k - 1))

    def dp(self, k: int = 1) -> PolySymbol:
        return self.diff(2 * (k - 1) + 1)

    def __call__(self, *coords, hbar=None) -> complex:
        """Numerical value at ``(q1, p1, ...)``; ``hbar`` gives the h_k values (default 0)."""
        if len(coords) != 2 * self.dofs:
            raise DofMismatch(f"need {2 * self.dofs} coordinates")
        hs = [0.0] * self.dofs if hbar is None else list(np.broadcast_to(hbar, (self.dofs,)))
        vals = list(coords) + hs
        total = 0j
        for e, c in self.terms.items():
            term = gauss_to_complex(c)
            for v, k in zip(vals, e):
                if k:
                    term = term * v**k
            total = total + term
        return total

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        names = _varnames(self.dofs)
        parts = []
        for e in sorted(self.terms, key=lambda e: (sum(e), e)):
            mono = " ".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k)
            c = format_gauss(self.terms[e])
            if mono and c == "1":
                parts.append(mono)
            else:
                parts.append(f"{c} * {mono}" if mono else c)
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"PolySymbol({str(self)!r}, dofs={self.dofs})"


def _falling(n: int, k: int) -> int:
    out = 1
    for j in range(k):
        out *= n - j
    return out


@lru_cache(maxsize=None)
def _moyal_monomial(a: int, b: int, c: int, d: int) -> tuple[tuple[int, GaussRational], ...]:
    """One-dof ``q^a p^b * q^c p^d``: returns ``(n, coeff)`` for the term
    ``coeff * h^n * q^(a+c-n) p^(b+d-n)``."""
    out = []
    half_i = QQ_I(0, 1) / 2
    for n in range(0, min(a + c, b + d) + 1):
        s = 0
        for j in range(n + 1):
            s += (
                comb(n, j)
                * (-1) ** j
                * _falling(a, n - j)
                * _falling(b, j)
                * _falling(d, n - j)
                * _falling(c, j)
            )
        if s:
            out.append((n, half_i**n * QQ_I(s, 0) / math.factorial(n)))
    return tuple(out)


def moyal_product(f: PolySymbol, g: PolySymbol) -> PolySymbol:
    """Exact Moyal product, one formal parameter ``h_k`` per degree of freedom."""
    f._check(g)
    d = f.dofs
    out: dict = {}
    for e1, c1 in f.terms.items():
        for e2, c2 in g.terms.items():
            # tensor product over dofs of the one-dof expansions
            partial = [(tuple(e1[2 * d + k] + e2[2 * d + k] for k in range(d)), [], c1 * c2)]
            for k in range(d):
                a, b = e1[2 * k], e1[2 * k + 1]
                c, dd = e2[2 * k], e2[2 * k + 1]
                nxt = []
                for hpow, qp, coeff in partial:
                    for n, w in _moyal_monomial(a, b, c, dd):
                        h2 = list(hpow)
                        h2[k] += n
                        nxt.append((tuple(h2), qp + [a + c - n, b + dd - n], coeff * w))
                partial = nxt
            for hpow, qp, coeff in partial:
                e = tuple(qp) + hpow
                out[e] = out.get(e, _ZERO) + coeff
    return PolySymbol(d, out)


def star_commutator(f: PolySymbol, g: PolySymbol) -> PolySymbol:
    return moyal_product(f, g) - moyal_product(g, f)


def _dof_index(key, dofs: int) -> int:
    if isinstance(key, str):
        if not re.fullmatch(r"h\d+", key):
            raise KeyError(f"unknown deformation parameter {key!r}")
        key = int(key[1:])
    if not 1 <= key <= dofs:
        raise KeyError(f"degree of freedom {key} out of range 1..{dofs}")
    return key


def set_hbar(f: PolySymbol, assignment: Mapping) -> PolySymbol:
    """Substitute values for ``h_k``; keys are dof indices (1-based) or names ``"h1"``."""
    d = f.dofs
    vals = {_dof_index(k, d): gauss(v) for k, v in assignment.items()}
    out: dict = {}
    for e, c in f.terms.items():
        e2 = list(e)
        for k, v in vals.items():
            slot = 2 * d + k - 1
            if e2[slot]:
                c = c * v ** e2[slot]
                e2[slot] = 0
        if c:
            key = tuple(e2)
            out[key] = out.get(key, _ZERO) + c
    return PolySymbol(d, out)


def hbar_coefficient(f: PolySymbol, k: int, order: int) -> PolySymbol:
    """Coefficient of ``h_k^order``."""
    if order < 0:
        raise ValueError("order must be non-negative")
    k = _dof_index(k, f.dofs)
    slot = 2 * f.dofs + k - 1
    out = {}
    for e, c in f.terms.items():
        if e[slot] == order:
            e2 = list(e)
            e2[slot] = 0
            out[tuple(e2)] = c
    return PolySymbol(f.dofs, out)


def poisson_bracket(f: PolySymbol, g: PolySymbol, dofs: Iterable[int] | None = None) -> PolySymbol:
    """Canonical bracket, summed over ``dofs`` (all by default)."""
    f._check(g)
    ks = range(1, f.dofs + 1) if dofs is None else dofs
    out = PolySymbol(f.dofs)
    for k in ks:
        out = out + f.dq(k) * g.dp(k) - f.dp(k) * g.dq(k)
    return out


# --- kernels ------------------------------------------------------------------


def _check_hbar(hbar: float) -> None:
    if not hbar > 0:
        raise NonpositiveHbar(f"hbar must be positive, got {hbar}")


def triangle_phase(x1, x2, x3) -> float:
    """``q1 p2 - q2 p1 + q2 p3 - q3 p2 + q3 p1 - q1 p3`` (twice the signed area)."""
    (q1, p1), (q2, p2), (q3, p3) = x1, x2, x3
    return q1 * p2 - q2 * p1 + q2 * p3 - q3 * p2 + q3 * p1 - q1 * p3


def groenewold_eval(x1, x2, x3, hbar: float) -> complex:
    """Closed-form one-dof Moyal kernel ``exp(2i area/hbar) / (pi hbar)^2``."""
    _check_hbar(hbar)
    return cmath.exp(2j * triangle_phase(x1, x2, x3) / hbar) / (math.pi * hbar) ** 2


# signs of the four diagonal quadratic terms after the rotation that
# turns 2(q1 p2 - q2 p1) into x1^2 - x2^2 - x3^2 + x4^2
FRESNEL_SIGNS = (1, -1, -1, 1)


def fresnel_factor(sign: int, hbar: float, width: float) -> complex:
    """``int exp(i s x^2/hbar) exp(-x^2/w^2) dx / sqrt(i s pi hbar) = 1/sqrt(1 + i s hbar/w^2)``."""
    return 1 / cmath.sqrt(1 + 1j * sign * hbar / width**2)


def fresnel_weak_limit(hbar: float, width: float = 1.0) -> complex:
    """Kernel paired with a product Gaussian test function, via four Fresnel factors.

    Tends to the test function's central value 1 as hbar -> 0.
    """
    _check_hbar(hbar)
    if not width > 0:
        raise ValueError("width must be positive")
    out = 1 + 0j
    for s in FRESNEL_SIGNS:
        out *= fresnel_factor(s, hbar, width)
    return out


def fresnel_factor_quad(sign: int, hbar: float, width: float) -> complex:
    """Same factor by adaptive quadrature (only reliable for moderate hbar)."""
    from scipy.integrate import quad

    # the Gaussian decays by ~e^-64 at 8 widths
    L = 8 * width
    re_ = quad(lambda x: math.cos(sign * x * x / hbar) * math.exp(-(x / width) ** 2), -L, L, limit=400)[0]
    im = quad(lambda x: math.sin(sign * x * x / hbar) * math.exp(-(x / width) ** 2), -L, L, limit=400)[0]
    return (re_ + 1j * im) / cmath.sqrt(1j * sign * math.pi * hbar)


def _sample(f, Q: np.ndarray, P: np.ndarray) -> np.ndarray:
    if callable(f):
        return np.asarray(f(Q, P), dtype=complex) * np.ones_like(Q, dtype=complex)
    return np.broadcast_to(np.asarray(f, dtype=complex), Q.shape)


def _s1_integral(f, g, x3, grid: PhaseGrid, hbar: float) -> complex:
    Q, P = grid.mesh()
    q3, p3 = x3
    fv = _sample(f, Q, P)
    gv = _sample(g, q3 - Q, p3 - P)
    phase = np.exp(2j * (q3 * P - p3 * Q) / hbar)
    return grid.integrate(fv * gv * phase) / (math.pi * hbar) ** 2


def twisted_convolution_s1(
    f: Callable | np.ndarray,
    g: Callable[[np.ndarray, np.ndarray], np.ndarray],
    x3,
    grid: PhaseGrid,
    hbar: float = 1.0,
    tolerance: float | None = None,
) -> complex:
    """Kernel S1 applied to ``f, g`` at ``x3``, as a twisted convolution.

    ``(1/(pi hbar)^2) int f(x1) g(x3 - x1) exp(2i (q3 p1 - p3 q1)/hbar) dx1``.
    ``f`` may be an array sampled on ``grid``; ``g`` must be callable because
    it is evaluated at shifted points.  With ``tolerance`` the result is
    compared against the coarsened grid and :class:`GridTooCoarse` raised if
    they disagree by more.
    """
    _check_hbar(hbar)
    val = _s1_integral(f, g, x3, grid, hbar)
    if tolerance is not None:
        coarse = grid.coarsen()
        fc = f if callable(f) else grid.subsample(f)
        est = abs(val - _s1_integral(fc, g, x3, coarse, hbar))
        if est > tolerance:
            raise GridTooCoarse(est, tolerance)
    return val
