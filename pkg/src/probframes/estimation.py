"""Directional statistics and random analysis operators.

Bingham scatter deviation, angular central Gaussian sampling, Tyler's
shape estimator and a Monte Carlo check of the expected squared
deviation of a random frame operator from its mean.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConvergenceError, InvalidMeasureError, PreconditionError
from .measures import (
    DiscreteMeasure,
    Measure,
    fourth_moment,
    numerical_rank,
    sample,
    second_moment,
)
from .operators import frame_bounds, frame_operator, matrix_power_sym

UNIT_TOL = 1e-10


def _unit_rows(points):
    x = np.atleast_2d(np.asarray(points, dtype=float))
    if x.ndim != 2 or x.shape[0] == 0:
        raise InvalidMeasureError("expected a non-empty (M, N) array of points")
    if np.any(np.abs(np.linalg.norm(x, axis=1) - 1.0) > UNIT_TOL):
        raise PreconditionError("all points must be unit vectors")
    return x


def normalize_rows(points):
    x = np.atleast_2d(np.asarray(points, dtype=float))
    norms = np.linalg.norm(x, axis=1)
    if np.any(norms == 0):
        raise PreconditionError("cannot normalize a zero vector")
    return x / norms[:, None]


def scatter_matrix(points):
    x = np.atleast_2d(np.asarray(points, dtype=float))
    return x.T @ x / x.shape[0]


def bingham_statistic(points) -> float:
    """Frobenius distance of the scatter matrix ``(1/M) sum u u'`` from ``I/N``."""
    u = _unit_rows(points)
    n = u.shape[1]
    return float(np.linalg.norm(scatter_matrix(u) - np.eye(n) / n))


def _check_spd(gamma):
    g = np.atleast_2d(np.asarray(gamma, dtype=float))
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise InvalidMeasureError("shape matrix must be square")
    if np.abs(g - g.T).max() > 1e-12 * max(1.0, np.abs(g).max()):
        raise PreconditionError("shape matrix is not symmetric")
    g = 0.5 * (g + g.T)
    if np.linalg.eigvalsh(g)[0] <= 0:
        raise PreconditionError("shape matrix is not positive definite")
    return g


def sample_acg(gamma, count: int, seed: int) -> np.ndarray:
    """Angular central Gaussian draws ``z/|z|`` with ``z ~ N(0, gamma)``."""
    g = _check_spd(gamma)
    if count < 1:
        raise ValueError("count must be at least 1")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((count, g.shape[0])) @ np.linalg.cholesky(g).T
    return z / np.linalg.norm(z, axis=1, keepdims=True)


@dataclass(frozen=True, eq=False)
class TylerResult:
    gamma_hat: np.ndarray
    iterations: int
    residual: float
    tight_frame: DiscreteMeasure
    residuals: tuple = ()


def _tyler_step(u, gamma):
    n = u.shape[1]
    q = np.einsum("ij,ij->i", u, np.linalg.solve(gamma, u.T).T)
    w = 1.0 / q
    g = (u * w[:, None]).T @ u * (n / w.sum())
    return 0.5 * (g + g.T)


def tyler_iterate(points, tol: float = 1e-10, max_iter: int = 500,
                  gamma0=None) -> TylerResult:
    """Tyler's fixed-point iteration for the shape matrix of unit vectors.

    Starting from ``gamma0`` (identity by default), repeats

        G <- N / sum_i w_i * sum_i w_i u_i u_i',   w_i = 1 / (u_i' G^{-1} u_i)

    until successive iterates differ by at most ``tol`` in Frobenius norm.
    The estimate is returned with trace N, together with the whitened unit
    vectors ``G^{-1/2} u_i / |G^{-1/2} u_i|``, which form a tight frame.

    Raises
    ------
    PreconditionError
        Fewer points than dimensions or points not spanning R^N.
    ConvergenceError
        ``max_iter`` reached; the last iterate is attached as ``result``.
    """
    u = _unit_rows(points)
    m, n = u.shape
    if m < n or numerical_rank(u) < n:
        raise PreconditionError("points must span R^N")
    gamma = np.eye(n) if gamma0 is None else _check_spd(gamma0)
    gamma = gamma * (n / np.trace(gamma))
    history = []
    converged = False
    k = 0
    residual = np.inf
    while k < max_iter:
        nxt = _tyler_step(u, gamma)
        residual = float(np.linalg.norm(nxt - gamma))
        history.append(residual)
        gamma = nxt
        k += 1
        if residual <= tol:
            converged = True
            break
    gamma = gamma * (n / np.trace(gamma))
    whitened = u @ matrix_power_sym(gamma, -0.5)
    psi = whitened / np.linalg.norm(whitened, axis=1, keepdims=True)
    result = TylerResult(gamma, k, residual, DiscreteMeasure(psi), tuple(history))
    if not converged:
        raise ConvergenceError(
            f"Tyler iteration did not reach tol={tol:g} in {max_iter} steps "
            f"(residual {residual:g})", result)
    return result


@dataclass(frozen=True)
class RowSpec:
    """Distribution of each row of a random analysis operator.

    ``kind`` is one of ``"gaussian"`` (N(0, I/N)), ``"bernoulli"`` (entries
    +-1/sqrt(N)), ``"acg"`` (angular central Gaussian with shape ``gamma``)
    or ``"discrete"`` (draws from ``measure``).
    """

    kind: str
    gamma: Optional[np.ndarray] = None
    measure: Optional[Measure] = None


ROW_KINDS = ("gaussian", "bernoulli", "acg", "discrete")


@dataclass(frozen=True)
class MCReport:
    estimate: float
    std_error: float
    theory: float
    trials: int
    seed: int

    @property
    def z_score(self) -> float:
        if self.std_error == 0:
            return 0.0 if self.estimate == self.theory else float("inf")
        return (self.estimate - self.theory) / self.std_error


def _row_moments(spec: RowSpec, n: int):
    """Second and fourth absolute moments of one row, after checking tightness."""
    if spec.kind == "gaussian":
        return 1.0, 1.0 + 2.0 / n
    if spec.kind == "bernoulli":
        return 1.0, 1.0
    if spec.kind == "acg":
        g = _check_spd(spec.gamma)
        if g.shape != (n, n):
            raise InvalidMeasureError("shape matrix does not match the dimension")
        # only the isotropic shape gives a tight (uniform) row distribution
        if np.abs(g / np.trace(g) - np.eye(n) / n).max() > 1e-12:
            raise PreconditionError(
                "angular central Gaussian rows are tight only for a multiple of I")
        return 1.0, 1.0
    if spec.kind == "discrete":
        mu = spec.measure
        if mu is None or mu.dim != n:
            raise InvalidMeasureError("discrete spec needs a measure of matching dimension")
        if not frame_bounds(mu).tight:
            raise PreconditionError("row distribution is not a tight probabilistic frame")
        return second_moment(mu), fourth_moment(mu)
    raise InvalidMeasureError(f"unknown row distribution {spec.kind!r}")


def _draw_rows(spec: RowSpec, rows: int, n: int, rng: np.random.Generator):
    if spec.kind == "gaussian":
        return rng.standard_normal((rows, n)) / np.sqrt(n)
    if spec.kind == "bernoulli":
        return rng.choice([-1.0, 1.0], size=(rows, n)) / np.sqrt(n)
    if spec.kind == "acg":
        z = rng.standard_normal((rows, n)) @ np.linalg.cholesky(_check_spd(spec.gamma)).T
        return z / np.linalg.norm(z, axis=1, keepdims=True)
    seed = int(rng.integers(0, 2 ** 63))
    return sample(spec.measure, rows, seed)


def trial_streams(seed: int, trials: int):
    """One generator per trial: child ``t`` of ``SeedSequence(seed).spawn(trials)``."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(trials)]


def random_frame_theory(m2: float, m4: float, m: int, n: int) -> float:
    """Expected squared Frobenius deviation for M i.i.d. tight rows.

    With ``L2 = M_2^4`` (squared second moment) and ``L4 = M_4^4`` this is
    ``(L4 - L2 / N) / M``.
    """
    return (m4 - m2 ** 2 / n) / m


def mc_verify_random_frame(spec, m: int, n: int, trials: int, seed: int) -> MCReport:
    """Estimate ``E |F'F/M - (L1/N) I|_F^2`` for an ``M x N`` random ``F``.

    Rows are i.i.d. from ``spec``; ``L1`` is the row second moment. The
    estimate is the mean over ``trials`` independent draws of F, each from
    its own stream (see :func:`trial_streams`).
    """
    if isinstance(spec, str):
        spec = RowSpec(spec)
    if trials < 2:
        raise ValueError("need at least two trials for a standard error")
    if m < 1 or n < 1:
        raise ValueError("M and N must be positive")
    m2, m4 = _row_moments(spec, n)
    centre = (m2 / n) * np.eye(n)
    values = np.empty(trials)
    for t, rng in enumerate(trial_streams(seed, trials)):
        f = _draw_rows(spec, m, n, rng)
        values[t] = np.sum((f.T @ f / m - centre) ** 2)
    return MCReport(
        estimate=float(values.mean()),
        std_error=float(values.std(ddof=1) / np.sqrt(trials)),
        theory=random_frame_theory(m2, m4, m, n),
        trials=int(trials),
        seed=int(seed),
    )


def tyler_report(result: TylerResult) -> dict:
    s = frame_operator(result.tight_frame).matrix
    n = s.shape[0]
    return {
        "gamma_hat": result.gamma_hat.tolist(),
        "iterations": result.iterations,
        "residual": result.residual,
        "tightness": float(np.linalg.norm(s - np.eye(n) / n)),
        "tight_frame": result.tight_frame.points.tolist(),
    }
