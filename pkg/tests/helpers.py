"""Shared fixtures-as-functions for building test measures."""
import numpy as np

from probframes import DiscreteMeasure, canonical_tight
from probframes.transport import embed_normalized

SQ3 = np.sqrt(3.0)
MERCEDES = np.array([[0.0, 1.0], [-SQ3 / 2, -0.5], [SQ3 / 2, -0.5]])
CROSS = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])


def onb(n=2):
    return DiscreteMeasure(np.eye(n))


def mercedes():
    return DiscreteMeasure(MERCEDES)


def cross():
    return DiscreteMeasure(CROSS)


def random_discrete(rng, n, m, uniform=False):
    pts = rng.normal(size=(m, n))
    w = None if uniform else rng.dirichlet(np.ones(m))
    return DiscreteMeasure(pts, w)


def random_frame(rng, n, m, uniform=False):
    """Random discrete measure whose support spans R^n (m >= n)."""
    while True:
        mu = random_discrete(rng, n, m, uniform)
        if np.linalg.matrix_rank(mu.points) == n and np.linalg.cond(mu.points) < 1e3:
            return mu


def random_tight(rng, n, m, scale=None):
    """Tight measure with bound scale**2 built by the canonical tight transform."""
    mu = canonical_tight(random_frame(rng, n, m))
    c = rng.uniform(0.3, 2.0) if scale is None else scale
    return DiscreteMeasure(mu.points * c, mu.weights)


def random_unit_tight(rng, n, m):
    """Unit-norm tight measure (nonuniform weights, nonzero mean in general)."""
    mu = canonical_tight(random_frame(rng, n, m, uniform=True))
    return embed_normalized(mu.points)


def harmonic_frame(n, m):
    """Real harmonic frame: m unit vectors in R^n (n even) forming a tight frame."""
    assert n % 2 == 0 and m > n
    k = np.arange(m)[:, None]
    j = np.arange(1, n // 2 + 1)[None, :]
    ang = 2 * np.pi * j * k / m
    pts = np.empty((m, n))
    pts[:, 0::2] = np.cos(ang)
    pts[:, 1::2] = np.sin(ang)
    return pts * np.sqrt(2.0 / n)
