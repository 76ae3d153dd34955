"""Frame operator, Gram matrix, frame bounds and canonical transforms."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .measures import (
    RANK_RTOL,
    DiscreteMeasure,
    GaussianMixtureMeasure,
    Measure,
    fourth_moment,
    mean,
    second_moment,
    support_rank,
)

TIGHT_RTOL = 1e-8


def symmetric_eig(a):
    """Eigen-decomposition of a symmetric matrix, eigenvalues descending.

    The input is symmetrized as ``(a + a.T) / 2`` before factorization.
    """
    a = np.asarray(a, dtype=float)
    lam, vec = np.linalg.eigh(0.5 * (a + a.T))
    return lam[::-1].copy(), vec[:, ::-1].copy()


def matrix_power_sym(a, power):
    """``a**power`` for symmetric positive definite ``a`` via its eigenbasis."""
    lam, vec = symmetric_eig(a)
    if lam[-1] <= RANK_RTOL * max(lam[0], 0.0) or lam[-1] <= 0.0:
        raise PreconditionError("matrix is not positive definite")
    return (vec * lam ** power) @ vec.T


@dataclass(frozen=True, eq=False)
class FrameOperator:
    """Second-moment matrix S with its spectral decomposition.

    ``eigenvalues`` are sorted descending and ``eigenvectors[:, k]`` pairs
    with ``eigenvalues[k]``.
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @classmethod
    def from_matrix(cls, s):
        s = np.asarray(s, dtype=float)
        s = 0.5 * (s + s.T)
        lam, vec = symmetric_eig(s)
        for a in (s, lam, vec):
            a.setflags(write=False)
        return cls(s, lam, vec)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def quadratic_form(self, x):
        """``x' S x``, the integral of ``<x, y>^2`` against the measure."""
        x = np.asarray(x, dtype=float)
        return np.einsum("...i,ij,...j->...", x, self.matrix, x)

    def rank(self, rtol=RANK_RTOL) -> int:
        top = self.eigenvalues[0]
        if top <= 0:
            return 0
        return int(np.count_nonzero(self.eigenvalues > rtol * top))

    def inverse(self):
        return matrix_power_sym(self.matrix, -1.0)

    def inverse_sqrt(self):
        return matrix_power_sym(self.matrix, -0.5)


@dataclass(frozen=True)
class FrameBounds:
    """Optimal lower/upper frame bounds A <= B."""

    lower: float
    upper: float
    tight: bool
    tolerance: float


@dataclass(frozen=True, eq=False)
class GramMatrix:
    """Weighted Gram matrix ``sqrt(w_i w_j) <x_i, x_j>`` of a discrete measure."""

    matrix: np.ndarray

    def eigenvalues(self):
        return symmetric_eig(self.matrix)[0]

    def apply(self, f):
        """Action of the Grammian on coefficients ``f`` indexed by support points."""
        return self.matrix @ np.asarray(f, dtype=float)


def frame_operator(m: Measure) -> FrameOperator:
    if isinstance(m, DiscreteMeasure):
        p = m.points
        s = (p * m.weights[:, None]).T @ p
    elif isinstance(m, GaussianMixtureMeasure):
        s = np.einsum("k,kij->ij", m.weights, m.covs)
        s = s + (m.means * m.weights[:, None]).T @ m.means
    else:
        raise TypeError(f"expected a measure, got {type(m).__name__}")
    return FrameOperator.from_matrix(s)


def frame_bounds(m: Measure, tolerance: float = TIGHT_RTOL) -> FrameBounds:
    """Optimal constants A, B with ``A|x|^2 <= int <x,y>^2 dm(y) <= B|x|^2``.

    These are the extreme eigenvalues of the frame operator. ``A == 0``
    means ``m`` is not a probabilistic frame. The measure is reported
    tight when ``B - A <= tolerance * max(B, 1)``.
    """
    op = m if isinstance(m, FrameOperator) else frame_operator(m)
    upper = max(float(op.eigenvalues[0]), 0.0)
    lower = min(max(float(op.eigenvalues[-1]), 0.0), upper)
    tight = (upper - lower) <= tolerance * max(upper, 1.0)
    return FrameBounds(lower, upper, bool(tight), float(tolerance))


def is_probabilistic_frame(m: Measure) -> bool:
    """True iff the support spans R^N (second moments are always finite here)."""
    return support_rank(m) == m.dim


def _require_frame(m: DiscreteMeasure) -> FrameOperator:
    if not isinstance(m, DiscreteMeasure):
        raise TypeError("canonical transforms are defined for discrete measures only")
    op = frame_operator(m)
    if op.rank() < m.dim:
        raise PreconditionError(
            "frame operator is rank deficient; the measure is not a probabilistic frame")
    return op


def canonical_dual(m: DiscreteMeasure) -> DiscreteMeasure:
    """Canonical dual: points ``S^{-1} x_i`` with the original weights.

    For every x, ``sum_i w_i <x, S^{-1} x_i> x_i == x``.
    """
    op = _require_frame(m)
    return DiscreteMeasure(m.points @ op.inverse(), m.weights)


def canonical_tight(m: DiscreteMeasure) -> DiscreteMeasure:
    """Points ``S^{-1/2} x_i``; the result has frame operator I."""
    op = _require_frame(m)
    return DiscreteMeasure(m.points @ op.inverse_sqrt(), m.weights)


def gram_matrix(m: DiscreteMeasure) -> GramMatrix:
    if not isinstance(m, DiscreteMeasure):
        raise TypeError("the Gram matrix is defined for discrete measures only")
    r = np.sqrt(m.weights)[:, None] * m.points
    g = r @ r.T
    g = 0.5 * (g + g.T)
    g.setflags(write=False)
    return GramMatrix(g)


def reconstruction_residual(m: DiscreteMeasure, xs) -> np.ndarray:
    """Per-row error of reconstructing ``xs`` from the canonical dual.

    Evaluates ``|sum_i w_i <x, d_i> S d_i - x|`` where ``d_i`` are the dual
    points, i.e. the integral form of the reconstruction identity.
    """
    dual = canonical_dual(m)
    s = frame_operator(m).matrix
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    coeffs = (xs @ dual.points.T) * dual.weights
    rec = coeffs @ (dual.points @ s)
    return np.linalg.norm(rec - xs, axis=1)


def analysis_report(m: Measure, tolerance: float = TIGHT_RTOL) -> dict:
    """Summary used by the ``analyze`` command."""
    op = frame_operator(m)
    b = frame_bounds(op, tolerance)
    return {
        "dim": m.dim,
        "type": "discrete" if isinstance(m, DiscreteMeasure) else "mixture",
        "bounds": [b.lower, b.upper],
        "tight": b.tight,
        "tolerance": b.tolerance,
        "is_frame": is_probabilistic_frame(m),
        "support_rank": support_rank(m),
        "second_moment": second_moment(m),
        "fourth_moment": fourth_moment(m),
        "mean": mean(m).tolist(),
        "frame_operator": op.matrix.tolist(),
        "eigenvalues": op.eigenvalues.tolist(),
    }
