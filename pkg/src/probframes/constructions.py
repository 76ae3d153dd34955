"""New probabilistic frames from old ones: convolution, products, mixing with delta_0."""
from __future__ import annotations

import numpy as np

from .errors import InvalidMeasureError, PreconditionError
from .measures import DiscreteMeasure, GaussianMixtureMeasure, Measure, mean
from .operators import frame_operator

MAX_CONVOLUTION_POINTS = 1_000_000
ZERO_MEAN_TOL = 1e-10


def _as_mixture(m: Measure) -> GaussianMixtureMeasure:
    if isinstance(m, GaussianMixtureMeasure):
        return m
    return GaussianMixtureMeasure.from_discrete(m)


def _check_dims(a, b):
    if a.dim != b.dim:
        raise InvalidMeasureError(f"dimension mismatch: {a.dim} vs {b.dim}")


def convolve(a: Measure, b: Measure) -> Measure:
    """Distribution of ``X + Y`` for independent ``X ~ a``, ``Y ~ b``.

    Two discrete measures give all pairwise sums with product weights.
    If either factor is a mixture the result is a mixture whose means and
    covariances add. The frame operator of the result is checked against
    ``S_a + S_b + m_a m_b' + m_b m_a'``.
    """
    _check_dims(a, b)
    if isinstance(a, DiscreteMeasure) and isinstance(b, DiscreteMeasure):
        if a.size * b.size > MAX_CONVOLUTION_POINTS:
            raise PreconditionError(
                f"convolution would have {a.size * b.size} points "
                f"(limit {MAX_CONVOLUTION_POINTS})")
        pts = (a.points[:, None, :] + b.points[None, :, :]).reshape(-1, a.dim)
        w = np.outer(a.weights, b.weights).ravel()
        out = DiscreteMeasure(pts, w)
    else:
        ma, mb = _as_mixture(a), _as_mixture(b)
        n = a.dim
        means = (ma.means[:, None, :] + mb.means[None, :, :]).reshape(-1, n)
        covs = (ma.covs[:, None] + mb.covs[None, :]).reshape(-1, n, n)
        w = np.outer(ma.weights, mb.weights).ravel()
        out = GaussianMixtureMeasure(w, means, covs)

    ea, eb = mean(a), mean(b)
    expected = (frame_operator(a).matrix + frame_operator(b).matrix
                + np.outer(ea, eb) + np.outer(eb, ea))
    got = frame_operator(out).matrix
    if np.abs(got - expected).max() > 1e-9 * max(1.0, np.abs(expected).max()):
        raise RuntimeError("frame operator of the convolution failed its identity check")
    return out


def mix_with_delta0(a: Measure, eps: float) -> Measure:
    """``(1 - eps) a + eps delta_0``; frame bounds scale by ``1 - eps``."""
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps!r}")
    if isinstance(a, DiscreteMeasure):
        pts = np.vstack([a.points, np.zeros((1, a.dim))])
        w = np.append((1.0 - eps) * a.weights, eps)
        return DiscreteMeasure(pts, w)
    n = a.dim
    return GaussianMixtureMeasure(
        np.append((1.0 - eps) * a.weights, eps),
        np.vstack([a.means, np.zeros((1, n))]),
        np.concatenate([a.covs, np.zeros((1, n, n))]),
    )


def product_measure(a: Measure, b: Measure) -> Measure:
    """Product measure on R^(N1+N2); at least one factor must have zero mean.

    The zero-mean requirement makes the frame operator block diagonal,
    ``diag(S_a, S_b)``, so the frame bounds are ``(min A, max B)``.
    """
    if (np.linalg.norm(mean(a)) > ZERO_MEAN_TOL
            and np.linalg.norm(mean(b)) > ZERO_MEAN_TOL):
        raise PreconditionError("neither factor has zero mean")
    if isinstance(a, DiscreteMeasure) and isinstance(b, DiscreteMeasure):
        pa = np.repeat(a.points, b.size, axis=0)
        pb = np.tile(b.points, (a.size, 1))
        return DiscreteMeasure(np.hstack([pa, pb]), np.outer(a.weights, b.weights).ravel())
    ma, mb = _as_mixture(a), _as_mixture(b)
    n1, n2 = ma.dim, mb.dim
    ka, kb = ma.size, mb.size
    means = np.hstack([np.repeat(ma.means, kb, axis=0), np.tile(mb.means, (ka, 1))])
    covs = np.zeros((ka * kb, n1 + n2, n1 + n2))
    covs[:, :n1, :n1] = np.repeat(ma.covs, kb, axis=0)
    covs[:, n1:, n1:] = np.tile(mb.covs, (ka, 1, 1))
    return GaussianMixtureMeasure(np.outer(ma.weights, mb.weights).ravel(), means, covs)


def mixture_density(m: GaussianMixtureMeasure, xs) -> np.ndarray:
    """Lebesgue density of a mixture whose covariances are all nonsingular."""
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    n = m.dim
    out = np.zeros(xs.shape[0])
    for w, mu, cov in m.components:
        sign, logdet = np.linalg.slogdet(cov)
        if sign <= 0:
            raise PreconditionError("a component has a singular covariance; no density")
        d = xs - mu
        q = np.einsum("ij,ij->i", d, np.linalg.solve(cov, d.T).T)
        out += w * np.exp(-0.5 * q - 0.5 * logdet - 0.5 * n * np.log(2 * np.pi))
    return out


def heatmap_grid(m: Measure, grid: int = 101, extent: float = 2.0):
    """Density on a ``grid x grid`` lattice over ``[-extent, extent]^2``.

    Returns ``(xs, ys, density)`` with ``density[i, j]`` evaluated at
    ``(xs[j], ys[i])``. Only planar mixtures with nonsingular components
    have a density.
    """
    if not isinstance(m, GaussianMixtureMeasure):
        raise PreconditionError("heatmaps need a Gaussian mixture (point masses have no density)")
    if m.dim != 2:
        raise PreconditionError("heatmaps are only defined in the plane")
    if grid < 2:
        raise ValueError("grid must be at least 2")
    axis = np.linspace(-extent, extent, grid)
    gx, gy = np.meshgrid(axis, axis)
    dens = mixture_density(m, np.column_stack([gx.ravel(), gy.ravel()]))
    return axis, axis, dens.reshape(grid, grid)
