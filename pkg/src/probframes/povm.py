"""Positive operator valued measures induced by tight discrete frames.

A tight measure with second moment ``M_2^2`` in R^N assigns to a set A the
matrix ``(N / M_2^2) * sum_{x_i in A} w_i x_i x_i'``. Over a partition of
the support these matrices are PSD and add up to the identity.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidMeasureError, PreconditionError
from .measures import DiscreteMeasure, second_moment
from .operators import frame_bounds

PSD_TOL = 1e-10
COMPLETENESS_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class PovmAtlas:
    """Labelled POVM elements for the cells of a finite partition."""

    labels: tuple
    matrices: tuple
    dim: int

    @property
    def cells(self):
        return list(zip(self.labels, self.matrices))

    def total(self):
        return np.sum(self.matrices, axis=0) if self.matrices else np.zeros((self.dim, self.dim))


@dataclass(frozen=True)
class PovmCheck:
    valid: bool
    diagnostics: tuple = field(default_factory=tuple)

    def __bool__(self):
        return self.valid


def parse_cells(text: str):
    """``"0,1|2,3"`` -> ``[[0, 1], [2, 3]]``."""
    try:
        return [[int(tok) for tok in part.split(",") if tok.strip()]
                for part in text.split("|")]
    except ValueError as exc:
        raise InvalidMeasureError(f"bad cell specification {text!r}") from exc


def _check_partition(partition, size):
    seen = set()
    for cell in partition:
        for idx in cell:
            if not 0 <= idx < size:
                raise InvalidMeasureError(f"index {idx} outside 0..{size - 1}")
            if idx in seen:
                raise InvalidMeasureError(f"index {idx} appears in two cells")
            seen.add(idx)
    if len(seen) != size:
        missing = sorted(set(range(size)) - seen)
        raise InvalidMeasureError(f"partition does not cover indices {missing}")


def povm_element(m: DiscreteMeasure, indices, scale=None):
    """``scale * sum_{i in indices} w_i x_i x_i'`` with ``scale = N / M_2^2`` by default."""
    if scale is None:
        scale = m.dim / second_moment(m)
    idx = np.asarray(list(indices), dtype=int)
    if idx.size == 0:
        return np.zeros((m.dim, m.dim))
    p = m.points[idx]
    mat = scale * (p * m.weights[idx, None]).T @ p
    return 0.5 * (mat + mat.T)


def build_povm(m: DiscreteMeasure, partition=None) -> PovmAtlas:
    """POVM elements of a tight measure over an index partition of its points.

    ``partition`` defaults to the single cell containing every point.
    """
    if not isinstance(m, DiscreteMeasure):
        raise TypeError("expected a DiscreteMeasure")
    if partition is None:
        partition = [list(range(m.size))]
    partition = [list(cell) for cell in partition]
    _check_partition(partition, m.size)
    b = frame_bounds(m)
    if b.upper == 0 or not b.tight:
        raise PreconditionError("measure is not a tight probabilistic frame")
    scale = m.dim / second_moment(m)
    labels = tuple(",".join(str(i) for i in cell) for cell in partition)
    mats = tuple(povm_element(m, cell, scale) for cell in partition)
    return PovmAtlas(labels, mats, m.dim)


def validate_povm(atlas: PovmAtlas, refinements=None, tol: float = COMPLETENESS_TOL) -> PovmCheck:
    """Check positivity, completeness and (optionally) additivity.

    ``refinements`` maps a cell label to matrices that should add up to
    that cell's element. Problems are reported in ``diagnostics``.
    """
    problems = []
    for label, mat in atlas.cells:
        mat = np.asarray(mat, dtype=float)
        if mat.shape != (atlas.dim, atlas.dim):
            problems.append(f"cell {label}: wrong shape {mat.shape}")
            continue
        if np.abs(mat - mat.T).max() > tol:
            problems.append(f"cell {label}: not symmetric")
        if np.linalg.eigvalsh(0.5 * (mat + mat.T))[0] < -PSD_TOL:
            problems.append(f"cell {label}: cell not PSD")
    if not problems:
        err = np.linalg.norm(atlas.total() - np.eye(atlas.dim))
        if err > tol:
            problems.append(f"completeness: cells sum to identity only within {err:.3g}")
    for label, parts in (refinements or {}).items():
        if label not in atlas.labels:
            problems.append(f"additivity: unknown cell {label}")
            continue
        coarse = atlas.matrices[atlas.labels.index(label)]
        err = np.linalg.norm(np.sum(parts, axis=0) - coarse)
        if err > tol:
            problems.append(f"additivity: refinement of cell {label} is off by {err:.3g}")
    return PovmCheck(not problems, tuple(problems))


def atlas_report(atlas: PovmAtlas) -> dict:
    check = validate_povm(atlas)
    return {
        "dim": atlas.dim,
        "cells": [{"label": lab, "matrix": mat.tolist()} for lab, mat in atlas.cells],
        "valid": check.valid,
        "diagnostics": list(check.diagnostics),
    }
