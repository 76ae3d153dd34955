"""Finite representations of probability measures with finite second moment.

Two concrete classes cover everything the library needs:

* :class:`DiscreteMeasure` -- weighted point masses ``sum_i w_i delta_{x_i}``.
* :class:`GaussianMixtureMeasure` -- weighted Gaussian components, possibly
  degenerate (a zero covariance component is a point mass).

Both are immutable; the arrays they hold are flagged read-only.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import InvalidMeasureError

WEIGHT_TOL = 1e-12
RENORMALIZE_TOL = 1e-6
RANK_RTOL = 1e-10
SYMMETRY_TOL = 1e-12
PSD_TOL = 1e-10


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _normalize_weights(weights):
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise InvalidMeasureError("weights must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(w)):
        raise InvalidMeasureError("weights must be finite")
    if np.any(w < 0):
        raise InvalidMeasureError("weights must be nonnegative")
    s = w.sum()
    if abs(s - 1.0) > RENORMALIZE_TOL:
        raise InvalidMeasureError(f"weights sum to {s!r}, not 1")
    # leave already-normalized weights untouched so files round-trip exactly
    return w / s if abs(s - 1.0) > WEIGHT_TOL else w


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Weighted point masses in R^N.

    Parameters
    ----------
    points : array-like of shape (M, N)
    weights : array-like of shape (M,)
        Nonnegative; a sum within 1e-6 of one is renormalized, anything
        else is rejected. Duplicate points are allowed.
    """

    points: np.ndarray
    weights: np.ndarray

    def __init__(self, points, weights=None):
        p = np.asarray(points, dtype=float)
        if p.ndim == 1:
            p = p[None, :]
        if p.ndim != 2 or p.shape[0] == 0 or p.shape[1] == 0:
            raise InvalidMeasureError("points must have shape (M, N) with M, N >= 1")
        if not np.all(np.isfinite(p)):
            raise InvalidMeasureError("points must be finite")
        if weights is None:
            weights = np.full(p.shape[0], 1.0 / p.shape[0])
        w = _normalize_weights(weights)
        if w.shape[0] != p.shape[0]:
            raise InvalidMeasureError(
                f"{p.shape[0]} points but {w.shape[0]} weights")
        object.__setattr__(self, "points", _frozen(p))
        object.__setattr__(self, "weights", _frozen(w))

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @classmethod
    def dirac(cls, x):
        return cls(np.atleast_2d(np.asarray(x, dtype=float)), [1.0])

    def support(self):
        """Points carrying positive mass (rows of ``points``)."""
        return self.points[self.weights > 0]

    def __repr__(self):
        return f"DiscreteMeasure(dim={self.dim}, size={self.size})"


@dataclass(frozen=True, eq=False)
class GaussianMixtureMeasure:
    """Finite mixture of (possibly degenerate) Gaussians in R^N.

    Parameters
    ----------
    weights : array-like of shape (K,)
    means : array-like of shape (K, N)
    covs : array-like of shape (K, N, N)
        Symmetric within 1e-12 and PSD (smallest eigenvalue >= -1e-10).
    """

    weights: np.ndarray
    means: np.ndarray
    covs: np.ndarray

    def __init__(self, weights, means, covs):
        w = _normalize_weights(weights)
        m = np.asarray(means, dtype=float)
        c = np.asarray(covs, dtype=float)
        if m.ndim == 1:
            m = m[None, :]
        if c.ndim == 2:
            c = c[None, :, :]
        k, n = m.shape
        if n == 0 or w.shape[0] != k or c.shape != (k, n, n):
            raise InvalidMeasureError(
                f"inconsistent shapes: weights {w.shape}, means {m.shape}, covs {c.shape}")
        if not (np.all(np.isfinite(m)) and np.all(np.isfinite(c))):
            raise InvalidMeasureError("means and covariances must be finite")
        for i in range(k):
            asym = np.abs(c[i] - c[i].T).max()
            if asym > SYMMETRY_TOL * max(1.0, np.abs(c[i]).max()):
                raise InvalidMeasureError(f"covariance {i} is not symmetric")
            if np.linalg.eigvalsh(c[i]).min() < -PSD_TOL:
                raise InvalidMeasureError(f"covariance {i} is not positive semidefinite")
        c = 0.5 * (c + np.transpose(c, (0, 2, 1)))
        object.__setattr__(self, "weights", _frozen(w))
        object.__setattr__(self, "means", _frozen(m))
        object.__setattr__(self, "covs", _frozen(c))

    @property
    def dim(self) -> int:
        return self.means.shape[1]

    @property
    def size(self) -> int:
        return self.means.shape[0]

    @classmethod
    def gaussian(cls, mean, cov):
        mean = np.asarray(mean, dtype=float)
        return cls([1.0], mean[None, :], np.asarray(cov, dtype=float)[None])

    @classmethod
    def from_discrete(cls, m: DiscreteMeasure):
        """View point masses as zero-covariance components."""
        k, n = m.points.shape
        return cls(m.weights, m.points, np.zeros((k, n, n)))

    @property
    def components(self):
        return list(zip(self.weights, self.means, self.covs))

    def __repr__(self):
        return f"GaussianMixtureMeasure(dim={self.dim}, components={self.size})"


Measure = Union[DiscreteMeasure, GaussianMixtureMeasure]


def _check_measure(m):
    if not isinstance(m, (DiscreteMeasure, GaussianMixtureMeasure)):
        raise TypeError(f"expected a measure, got {type(m).__name__}")


def second_moment(m: Measure) -> float:
    """M_2^2, the integral of ``||x||^2``."""
    _check_measure(m)
    if isinstance(m, DiscreteMeasure):
        return float(m.weights @ np.einsum("ij,ij->i", m.points, m.points))
    traces = np.trace(m.covs, axis1=1, axis2=2)
    return float(m.weights @ (traces + np.einsum("ij,ij->i", m.means, m.means)))


def _gaussian_fourth_moments(means, covs):
    # E||y||^4 for y ~ N(m, S) is (tr S + |m|^2)^2 + 2 tr(S^2) + 4 m'Sm.
    tr = np.trace(covs, axis1=1, axis2=2)
    mm = np.einsum("ij,ij->i", means, means)
    tr_sq = np.einsum("kij,kji->k", covs, covs)
    msm = np.einsum("ki,kij,kj->k", means, covs, means)
    return (tr + mm) ** 2 + 2.0 * tr_sq + 4.0 * msm


def fourth_moment(m: Measure) -> float:
    """M_4^4, the integral of ``||x||^4``.

    Exact for both variants; mixtures use the closed-form Gaussian fourth
    moment per component. :func:`fourth_moment_mc` gives an independent
    sampling estimate.
    """
    _check_measure(m)
    if isinstance(m, DiscreteMeasure):
        sq = np.einsum("ij,ij->i", m.points, m.points)
        return float(m.weights @ sq ** 2)
    return float(m.weights @ _gaussian_fourth_moments(m.means, m.covs))


def fourth_moment_mc(m: Measure, count: int = 100_000, seed: int = 0):
    """Monte Carlo estimate of M_4^4 as ``(estimate, standard_error)``."""
    x = sample(m, count, seed)
    v = np.einsum("ij,ij->i", x, x) ** 2
    return float(v.mean()), float(v.std(ddof=1) / np.sqrt(count))


def mean(m: Measure) -> np.ndarray:
    _check_measure(m)
    if isinstance(m, DiscreteMeasure):
        return m.weights @ m.points
    return m.weights @ m.means


def numerical_rank(a, rtol=RANK_RTOL) -> int:
    """Count of singular values above ``rtol`` times the largest one."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rtol * s[0]))


def support_rank(m: Measure) -> int:
    """Dimension of the linear span of the support.

    For a mixture the span is generated by every component mean together
    with the range of its covariance. Each generator is normalized first
    so that the relative threshold does not depend on the scale of a
    single component.
    """
    _check_measure(m)
    if isinstance(m, DiscreteMeasure):
        return numerical_rank(m.support())
    gens = []
    for w, mu, cov in m.components:
        if w <= 0:
            continue
        nrm = np.linalg.norm(mu)
        if nrm > 0:
            gens.append(mu / nrm)
        lam, vec = np.linalg.eigh(cov)
        if lam[-1] > 0:
            gens.extend(vec[:, lam > RANK_RTOL * lam[-1]].T)
    if not gens:
        return 0
    return numerical_rank(np.array(gens))


def _pick(weights, u):
    idx = np.searchsorted(np.cumsum(weights), u, side="right")
    return np.minimum(idx, len(weights) - 1)


def _psd_sqrt(cov):
    lam, vec = np.linalg.eigh(cov)
    return vec * np.sqrt(np.clip(lam, 0.0, None))


def sample(m: Measure, count: int, seed: int) -> np.ndarray:
    """Draw ``count`` points; the output is a function of (m, count, seed).

    Discrete measures are sampled by inverse CDF over the weights.
    Mixtures choose a component the same way and then apply its affine
    map to standard normal draws.
    """
    _check_measure(m)
    if count < 1:
        raise ValueError("count must be at least 1")
    rng = np.random.default_rng(seed)
    u = rng.random(count)
    idx = _pick(m.weights, u)
    if isinstance(m, DiscreteMeasure):
        return m.points[idx].copy()
    z = rng.standard_normal((count, m.dim))
    out = np.empty((count, m.dim))
    for k in range(m.size):
        sel = idx == k
        if np.any(sel):
            out[sel] = m.means[k] + z[sel] @ _psd_sqrt(m.covs[k]).T
    return out
