"""Tensor-product trapezoid rule on a symmetric phase-space box."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class GridTooCoarse(RuntimeError):
    def __init__(self, estimate: float, tolerance: float):
        super().__init__(
            f"refinement estimate {estimate:.3e} exceeds tolerance {tolerance:.3e}"
        )
        self.estimate = estimate
        self.tolerance = tolerance


@dataclass(frozen=True)
class PhaseGrid:
    """``n x n`` nodes on ``[-box, box]^2`` (one degree of freedom).

    ``n`` should be odd so that :meth:`coarsen` keeps every other node.
    """

    box: float
    n: int

    def __post_init__(self):
        if self.box <= 0 or self.n < 2:
            raise ValueError(f"bad grid box={self.box} n={self.n}")

    @property
    def axis(self) -> np.ndarray:
        return np.linspace(-self.box, self.box, self.n)

    @property
    def step(self) -> float:
        return 2 * self.box / (self.n - 1)

    def axis_weights(self) -> np.ndarray:
        w = np.full(self.n, self.step)
        w[0] = w[-1] = self.step / 2
        return w

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """``(Q, P)`` with ``Q[i, j] = axis[i]``, ``P[i, j] = axis[j]``."""
        return np.meshgrid(self.axis, self.axis, indexing="ij")

    def weights(self) -> np.ndarray:
        w = self.axis_weights()
        return np.outer(w, w)

    def points(self) -> list[tuple[float, float]]:
        Q, P = self.mesh()
        return list(zip(Q.ravel().tolist(), P.ravel().tolist()))

    def integrate(self, values: np.ndarray) -> complex:
        # fixed-order sums: first over p, then over q
        v = np.asarray(values) * self.axis_weights()[None, :]
        inner = np.array([sum(row) for row in v])
        return sum(inner * self.axis_weights())

    def coarsen(self) -> PhaseGrid:
        if self.n % 2 == 0:
            raise ValueError("coarsening needs an odd number of nodes")
        return PhaseGrid(self.box, (self.n + 1) // 2)

    def subsample(self, values: np.ndarray) -> np.ndarray:
        return np.asarray(values)[::2, ::2]
