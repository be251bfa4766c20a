"""Truncated Fock space: Weyl operators, quantizer/dequantizer, kernel traces.

Operators are plain ``N x N`` complex numpy arrays.  Phase-space points use
``z = (q + i p)/sqrt(2 hbar)``, so that ``U(x) = 2 W(2z) P`` and
``D(x) = U(x)/(2 pi hbar)``.

Traces of products of displaced parities are not absolutely convergent, and
the hard truncation at ``N`` leaves an edge error of order one.  The
``regularized`` traces insert a smooth flat-top window ``Phi`` (identity on
``n <= N/4``, zero beyond ``3N/4``) between all factors,
``Tr(Phi X1 Phi X2 ... Phi Xk)``, which is cyclic in the factors and leaves
low-lying operators untouched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np

from .phasespace import NonpositiveHbar
from .quadrature import GridTooCoarse, PhaseGrid


class DimensionMismatch(ValueError):
    pass


def _check_hbar(hbar: float) -> None:
    if not hbar > 0:
        raise NonpositiveHbar(f"hbar must be positive, got {hbar}")


def smooth_window(N: int, lo: float = 0.25, hi: float = 0.75) -> np.ndarray:
    """C-infinity step: 1 for ``n <= lo N``, 0 for ``n >= hi N``."""
    n = np.arange(N, dtype=float)
    a, b = lo * N, hi * N
    t = np.clip((n - a) / (b - a), 0.0, 1.0)

    def bump(x):
        out = np.zeros_like(x)
        pos = x > 0
        out[pos] = np.exp(-1.0 / x[pos])
        return out

    up, down = bump(1.0 - t), bump(t)
    return up / (up + down)


@dataclass(frozen=True)
class FockSpace:
    """Ladder operators truncated to ``span{|0>, ..., |N-1>}``."""

    N: int

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("truncation dimension must be at least 2")

    @cached_property
    def a(self) -> np.ndarray:
        return np.diag(np.sqrt(np.arange(1, self.N, dtype=float)), 1).astype(complex)

    @cached_property
    def adag(self) -> np.ndarray:
        return self.a.conj().T

    @cached_property
    def qhat(self) -> np.ndarray:
        return (self.a + self.adag) / math.sqrt(2)

    @cached_property
    def phat(self) -> np.ndarray:
        return (self.a - self.adag) / (1j * math.sqrt(2))

    @cached_property
    def number(self) -> np.ndarray:
        return np.diag(np.arange(self.N, dtype=float)).astype(complex)

    @cached_property
    def parity(self) -> np.ndarray:
        return np.diag((-1.0) ** np.arange(self.N)).astype(complex)

    @cached_property
    def window(self) -> np.ndarray:
        return smooth_window(self.N)

    @cached_property
    def _generator_eig(self):
        # i(a^dag - a) is Hermitian; a^dag - a = -i V diag(w) V^dag
        return np.linalg.eigh(1j * (self.adag - self.a))

    def ket(self, n: int) -> np.ndarray:
        v = np.zeros(self.N, dtype=complex)
        v[n] = 1
        return v

    def projector(self, n: int = 0) -> np.ndarray:
        v = self.ket(n)
        return np.outer(v, v.conj())

    def coherent(self, alpha: complex) -> np.ndarray:
        """Closed-form coefficients ``exp(-|alpha|^2/2) alpha^n / sqrt(n!)`` (not renormalized)."""
        c = np.empty(self.N, dtype=complex)
        c[0] = math.exp(-abs(alpha) ** 2 / 2)
        for n in range(1, self.N):
            c[n] = c[n - 1] * alpha / math.sqrt(n)
        return c

    def trusted_box(self) -> float:
        return math.sqrt(self.N) / 4


def weyl_displacement(space: FockSpace, z: complex) -> np.ndarray:
    """``exp(z a^dag - conj(z) a)`` on the truncated space.

    The truncated generator is anti-Hermitian, so the exponential is taken
    spectrally: with ``z = r exp(i theta)``,
    ``W = R exp(r (a^dag - a)) R^dag`` and ``R = exp(i theta n)``.
    """
    z = complex(z)
    if z == 0:
        return np.eye(space.N, dtype=complex)
    r, theta = abs(z), np.angle(z)
    w, V = space._generator_eig
    core = (V * np.exp(-1j * r * w)) @ V.conj().T
    ph = np.exp(1j * theta * np.arange(space.N))
    return ph[:, None] * core * ph.conj()[None, :]


@dataclass
class QuantizerPair:
    U: np.ndarray
    D: np.ndarray


def _z(x, hbar: float) -> complex:
    q, p = x
    return (q + 1j * p) / math.sqrt(2 * hbar)


def dequantizer_U(space: FockSpace, x, hbar: float = 1.0) -> np.ndarray:
    _check_hbar(hbar)
    return 2 * weyl_displacement(space, 2 * _z(x, hbar)) @ space.parity


def quantizer_pair(space: FockSpace, x, hbar: float = 1.0) -> QuantizerPair:
    """``U = 2 W(2z) P`` and ``D = U/(2 pi hbar)``."""
    U = dequantizer_U(space, x, hbar)
    return QuantizerPair(U, U / (2 * math.pi * hbar))


def regularized_trace(space: FockSpace, *factors: np.ndarray) -> complex:
    """``Tr(Phi X1 Phi X2 ... Phi Xk)`` with the smooth window ``Phi``."""
    phi = space.window
    acc = np.eye(space.N, dtype=complex)
    for X in factors:
        acc = (acc * phi[None, :]) @ X
    return complex(np.trace(acc))


def _points(grid) -> tuple[list, tuple]:
    if isinstance(grid, PhaseGrid):
        Q, P = grid.mesh()
        return list(zip(Q.ravel(), P.ravel())), Q.shape
    pts = [tuple(x) for x in grid]
    return pts, (len(pts),)


def symbol_of(A: np.ndarray, grid, hbar: float = 1.0, space: FockSpace | None = None,
              regularized: bool = False) -> np.ndarray:
    """``f(x) = Tr(A U(x))`` at each grid point (plain trace by default)."""
    _check_hbar(hbar)
    space = space or FockSpace(A.shape[0])
    if A.shape != (space.N, space.N):
        raise DimensionMismatch(f"operator of shape {A.shape} in a space of dim {space.N}")
    pts, shape = _points(grid)
    out = np.empty(len(pts), dtype=complex)
    for i, x in enumerate(pts):
        U = dequantizer_U(space, x, hbar)
        if regularized:
            out[i] = regularized_trace(space, A, U)
        else:
            # Tr(A U) without forming the product
            out[i] = np.sum(A * U.T)
    return out.reshape(shape)


def _operator_sum(space: FockSpace, values: np.ndarray, grid: PhaseGrid, hbar: float) -> np.ndarray:
    Q, P = grid.mesh()
    W = grid.weights()
    out = np.zeros((space.N, space.N), dtype=complex)
    for i in range(grid.n):
        for j in range(grid.n):
            c = values[i, j] * W[i, j]
            if c != 0:
                out += c * dequantizer_U(space, (Q[i, j], P[i, j]), hbar)
    return out / (2 * math.pi * hbar)


def operator_of(
    f: np.ndarray | Callable,
    grid: PhaseGrid,
    hbar: float = 1.0,
    space: FockSpace | None = None,
    tolerance: float | None = None,
    block: int | None = None,
) -> np.ndarray:
    """``sum_x D(x) f(x) dx`` by the trapezoid rule.

    With ``tolerance``, the result is compared with the coarsened grid on the
    leading ``block`` (default ``N/4``, where the coarse grid still resolves
    the oscillation of ``D(x)``) and :class:`GridTooCoarse` raised when the
    max-norm difference is larger.
    """
    _check_hbar(hbar)
    space = space or FockSpace(64)
    Q, P = grid.mesh()
    values = np.asarray(f(Q, P) if callable(f) else f, dtype=complex)
    if values.shape != Q.shape:
        raise DimensionMismatch(f"symbol of shape {values.shape} on a {Q.shape} grid")
    out = _operator_sum(space, values, grid, hbar)
    if tolerance is not None:
        coarse = _operator_sum(space, grid.subsample(values), grid.coarsen(), hbar)
        b = block or space.N // 4
        est = float(np.max(np.abs(out[:b, :b] - coarse[:b, :b])))
        if est > tolerance:
            raise GridTooCoarse(est, tolerance)
    return out


def kappa1_operator(space: FockSpace, hbar: float = 1.0) -> np.ndarray:
    """Operator of ``delta(q) delta(p)``: the delta collapses the integral to ``D(0)``."""
    _check_hbar(hbar)
    return space.parity / (math.pi * hbar)


def kappa2_symbol(Q, P):
    return np.exp(-(Q**2) - P**2) / math.pi


def kappa2_operator_exact(space: FockSpace) -> np.ndarray:
    """Operator of ``exp(-q^2 - p^2)/pi`` at hbar = 1, i.e. ``|0><0|/(2 pi)``."""
    return space.projector(0) / (2 * math.pi)


def kernel_trace(space: FockSpace, x1, x2, x3, hbar: float = 1.0, regularized: bool = True) -> complex:
    """``Tr(D(x1) D(x2) U(x3))``; regularized with the smooth window by default."""
    _check_hbar(hbar)
    D1 = quantizer_pair(space, x1, hbar).D
    D2 = quantizer_pair(space, x2, hbar).D
    U3 = dequantizer_U(space, x3, hbar)
    if regularized:
        return regularized_trace(space, D1, D2, U3)
    return complex(np.trace(D1 @ D2 @ U3))


def kappa_deformed_product(A: np.ndarray, B: np.ndarray, kappa_op: np.ndarray, grid,
                           hbar: float = 1.0, space: FockSpace | None = None) -> np.ndarray:
    """Symbol of ``A K B``."""
    if not (A.shape == B.shape == kappa_op.shape):
        raise DimensionMismatch(f"shapes {A.shape}, {kappa_op.shape}, {B.shape}")
    return symbol_of(A @ kappa_op @ B, grid, hbar, space)


def coherent_dyad(space: FockSpace, alpha: complex, beta: complex) -> np.ndarray:
    """``|alpha><beta|`` from closed-form coefficients."""
    return np.outer(space.coherent(alpha), space.coherent(beta).conj())


def coherent_dyad_symbol(alpha: complex, beta: complex, hbar: float = 1.0) -> Callable:
    """Closed-form Weyl symbol ``Tr(|alpha><beta| U(q, p))`` in the untruncated space.

    Uses ``W(a)|b> = exp((a conj(b) - conj(a) b)/2)|a + b>`` and the overlap
    of coherent states.
    """

    def f(Q, P):
        z2 = 2 * (np.asarray(Q) + 1j * np.asarray(P)) / math.sqrt(2 * hbar)
        b = -alpha
        g = z2 + b
        phase = np.exp((z2 * np.conj(b) - np.conj(z2) * b) / 2)
        overlap = np.exp(-abs(beta) ** 2 / 2 - np.abs(g) ** 2 / 2 + np.conj(beta) * g)
        return 2 * phase * overlap

    return f


def literal_exponential_quantizer(space: FockSpace, x, hbar: float = 1.0) -> np.ndarray:
    """``(1/(pi hbar)) exp(-(i/hbar)(q p^ - p q^)) exp((i/hbar)((q^2 + p^2)/2 - hbar/2))``,
    with hbar-scaled ``q^, p^``, taken literally.

    The first factor is ``W(z)`` and the second ``exp(i n)``; compare
    :func:`quantizer_pair`, whose ``D`` is ``W(2z) P/(pi hbar)`` with ``P = exp(i pi n)``.
    """
    _check_hbar(hbar)
    osc = np.diag(np.exp(1j * np.arange(space.N))).astype(complex)
    return weyl_displacement(space, _z(x, hbar)) @ osc / (math.pi * hbar)


def best_phase_distance(A: np.ndarray, B: np.ndarray) -> float:
    """``min_c |A - c B|_F / |A|_F`` over unit complex ``c``."""
    inner = np.vdot(B, A)
    c = inner / abs(inner) if abs(inner) > 0 else 1.0
    return float(np.linalg.norm(A - c * B) / np.linalg.norm(A))


@dataclass
class CheckResult:
    name: str
    passed: bool
    max_error: float
    detail: dict = field(default_factory=dict)


def biorthogonality_check(space: FockSpace, grid: PhaseGrid, hbar: float, probe: Callable,
                          points: Iterable, regularized: bool = True) -> tuple[float, dict]:
    """Smear ``Tr(U(x) D(x'))`` against ``probe(x')`` and compare with ``probe(x)``.

    Returns the max abs error over ``points`` and the worst point.
    """
    B = operator_of(probe, grid, hbar, space)
    worst = (0.0, None)
    for x in points:
        U = dequantizer_U(space, x, hbar)
        val = regularized_trace(space, U, B) if regularized else complex(np.sum(U * B.T))
        err = abs(val - probe(np.asarray(x[0]), np.asarray(x[1])))
        if err > worst[0] or worst[1] is None:
            worst = (float(err), tuple(float(c) for c in x))
    return worst[0], {"worst_point": worst[1]}
