"""Frame potential, spherical 2-design checks and symmetrization."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .measures import DiscreteMeasure, mean, second_moment
from .operators import frame_operator

SPHERE_TOL = 1e-10
EQUALITY_TOL = 1e-9
JOHN_TOL = 1e-8


@dataclass(frozen=True)
class PotentialReport:
    """Frame potential of a discrete measure and its lower bounds.

    ``lower_bound_1_over_n`` holds ``M_2^4 / n`` with ``n`` the number of
    nonzero eigenvalues of the frame operator; it equals ``1/n`` when the
    measure has unit second moment.
    """

    pfp: float
    m2_fourth_over_n: float
    nonzero_eigs: int
    lower_bound_1_over_n: float
    tight_for_span: bool


def _as_discrete(m):
    if not isinstance(m, DiscreteMeasure):
        raise TypeError("expected a DiscreteMeasure")
    return m


def potential_double_sum(m: DiscreteMeasure) -> float:
    """``sum_ij w_i w_j <x_i, x_j>^2`` evaluated term by term."""
    g = m.points @ m.points.T
    return float(m.weights @ (g ** 2) @ m.weights)


def frame_potential(m: DiscreteMeasure, tol: float = EQUALITY_TOL) -> PotentialReport:
    """Probabilistic frame potential with its eigenvalue cross-check.

    The double sum over pairs of support points must agree with the squared
    Frobenius norm of the frame operator; a disagreement beyond rounding
    raises ``RuntimeError``.
    """
    _as_discrete(m)
    pfp = potential_double_sum(m)
    op = frame_operator(m)
    lam = np.clip(op.eigenvalues, 0.0, None)
    via_eigs = float(np.sum(lam ** 2))
    if abs(pfp - via_eigs) > 1e-10 * max(1.0, pfp):
        raise RuntimeError(f"potential mismatch: {pfp!r} vs {via_eigs!r}")
    m2 = second_moment(m)
    n = op.rank()
    total = float(np.sum(lam))
    if n == 0:
        lower, tight_span = 0.0, False
    else:
        lower = m2 ** 2 / n
        tight_span = abs(pfp - total ** 2 / n) <= tol * max(1.0, pfp)
    return PotentialReport(
        pfp=pfp,
        m2_fourth_over_n=m2 ** 2 / m.dim,
        nonzero_eigs=n,
        lower_bound_1_over_n=lower,
        tight_for_span=bool(tight_span),
    )


def _on_sphere(m, tol):
    norms = np.linalg.norm(m.support(), axis=1)
    return bool(np.all(np.abs(norms - 1.0) <= tol))


def mixed_potential_ratio(m: DiscreteMeasure) -> float:
    """Ratio of the frame potential to the mean squared pairwise distance.

    Only defined for measures supported on the unit sphere. The
    denominator is ``2 M_2^2 - 2 |mean|^2``; a (numerically) vanishing
    denominator, i.e. a single atom, returns ``inf``.
    """
    _as_discrete(m)
    if not _on_sphere(m, SPHERE_TOL):
        raise PreconditionError("support is not contained in the unit sphere")
    num = potential_double_sum(m)
    mu = mean(m)
    den = 2.0 * second_moment(m) - 2.0 * float(mu @ mu)
    if den <= 1e-12:
        return float("inf")
    return num / den


def is_spherical_2design(m: DiscreteMeasure, tolerance: float = EQUALITY_TOL) -> bool:
    """Unit-norm support, zero mean and ``S = I/N``, each within ``tolerance``."""
    _as_discrete(m)
    if not _on_sphere(m, tolerance):
        return False
    if np.linalg.norm(mean(m)) > tolerance:
        return False
    s = frame_operator(m).matrix
    return bool(np.linalg.norm(s - np.eye(m.dim) / m.dim) <= tolerance)


def symmetrize(m: DiscreteMeasure) -> DiscreteMeasure:
    """The measure ``(m(A) + m(-A)) / 2`` as points ``x_i`` and ``-x_i``."""
    _as_discrete(m)
    pts = np.concatenate([m.points, -m.points])
    w = np.concatenate([m.weights, m.weights]) / 2.0
    return DiscreteMeasure(pts, w)


def john_conditions(points, weights, tol: float = JOHN_TOL) -> bool:
    """Check ``sum c_i u_i = 0`` and ``sum c_i u_i u_i' = I`` for unit vectors ``u_i``.

    These are the contact-point conditions for the unit ball to be the
    maximal-volume ellipsoid of a body touching it at the ``u_i``.
    """
    u = np.atleast_2d(np.asarray(points, dtype=float))
    c = np.asarray(weights, dtype=float)
    if c.shape != (u.shape[0],):
        raise ValueError("need one weight per point")
    if np.any(np.abs(np.linalg.norm(u, axis=1) - 1.0) > SPHERE_TOL):
        raise PreconditionError("all points must be unit vectors")
    if np.any(c <= 0):
        raise PreconditionError("all weights must be positive")
    first = np.linalg.norm(c @ u) <= tol
    second = np.linalg.norm((u * c[:, None]).T @ u - np.eye(u.shape[1])) <= tol
    return bool(first and second)


def design_report(m: DiscreteMeasure, tolerance: float = EQUALITY_TOL) -> dict:
    """Summary used by the ``design-check`` command."""
    on_sphere = _on_sphere(m, tolerance)
    report = {
        "dim": m.dim,
        "on_sphere": on_sphere,
        "mean_norm": float(np.linalg.norm(mean(m))),
        "scatter_deviation": float(
            np.linalg.norm(frame_operator(m).matrix - np.eye(m.dim) / m.dim)),
        "is_2design": is_spherical_2design(m, tolerance),
        "target_ratio": 1.0 / (2 * m.dim),
        "tolerance": tolerance,
    }
    report["mixed_potential_ratio"] = mixed_potential_ratio(m) if _on_sphere(m, SPHERE_TOL) else None
    return report

