"""Numerical detection of translation invariance.

A field is translation invariant when it has the form f(x) = P(<a, x> + b).
Equivalently, its gradient is everywhere parallel to the fixed direction
``a``, so f_i = c_ij f_j with constant c_ij = a_i / a_j.  The detector
normalises sampled gradients and fits the dominant eigenvector of their
averaged outer product.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .fields import GridSpec, ScalarField

DEGENERACY = 1e-10
TOL_ANALYTIC = 1e-6
TOL_FD = 1e-3


class Verdict(enum.Enum):
    INVARIANT = "Invariant"
    NOT_INVARIANT = "NotInvariant"
    DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class InvarianceFit:
    direction: Optional[np.ndarray]
    max_angular_residual: float
    proportionality: np.ndarray
    proportionality_residual: np.ndarray
    verdict: Verdict
    usable_points: int
    tol: float

    def to_dict(self) -> dict:
        def table(M):
            return [[None if not np.isfinite(v) else float(v) for v in row] for row in M]

        return {
            "verdict": self.verdict.value,
            "direction": None if self.direction is None else [float(v) for v in self.direction],
            "max_angular_residual": float(self.max_angular_residual),
            "tol": float(self.tol),
            "usable_points": self.usable_points,
            "proportionality": table(self.proportionality),
            "proportionality_residual": table(self.proportionality_residual),
        }


def canonical_sign(v: np.ndarray) -> np.ndarray:
    """Flip ``v`` so its first non-negligible component is positive."""
    scale = float(np.max(np.abs(v)))
    for comp in v:
        if abs(comp) > 1e-12 * scale:
            return v if comp > 0 else -v
    return v


def angle_to_axis(u: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Unsigned angle between each row of ``u`` and the line spanned by ``d``.

    Uses atan2 of the perpendicular and parallel parts, accurate for tiny
    angles where arccos is not.
    """
    par = u @ d
    perp = np.linalg.norm(u - np.outer(par, d), axis=1)
    return np.arctan2(perp, np.abs(par))


def proportionality_from_gradients(grads: np.ndarray, threshold: Optional[float] = None) -> tuple:
    """Least-squares c_ij with grad_i ~= c_ij grad_j over the samples.

    Returns ``(C, R)``: C[i, j] is the constant and R[i, j] the largest
    misfit relative to the largest gradient component. Pairs whose
    denominators all vanish are NaN.
    """
    grads = np.asarray(grads, dtype=float)
    n = grads.shape[1]
    scale = float(np.max(np.abs(grads))) if grads.size else 0.0
    if threshold is None:
        threshold = DEGENERACY * max(1.0, scale)
    C = np.full((n, n), np.nan)
    R = np.full((n, n), np.nan)
    for i in range(n):
        for j in range(n):
            gj = grads[:, j]
            ok = np.abs(gj) > threshold
            if not np.any(ok):
                continue
            gi = grads[ok, i]
            gj = gj[ok]
            c = float(gi @ gj / (gj @ gj))
            C[i, j] = c
            R[i, j] = float(np.max(np.abs(gi - c * gj))) / max(scale, np.finfo(float).tiny)
    return C, R


def fit_gradients(grads: np.ndarray, tol: float) -> InvarianceFit:
    """Direction fit from a stack of gradient samples (one per row)."""
    grads = np.asarray(grads, dtype=float)
    if grads.ndim != 2 or grads.shape[0] == 0:
        raise ValueError("need a non-empty (points, n) array of gradients")
    n = grads.shape[1]
    norms = np.linalg.norm(grads, axis=1)
    threshold = DEGENERACY * max(1.0, float(norms.max()))
    usable = grads[norms > threshold]
    C, R = proportionality_from_gradients(usable) if len(usable) else (
        np.full((n, n), np.nan), np.full((n, n), np.nan))
    if len(usable) < n + 1:
        return InvarianceFit(None, float("nan"), C, R, Verdict.DEGENERATE, len(usable), tol)

    units = usable / np.linalg.norm(usable, axis=1)[:, None]
    M = units.T @ units / len(units)
    _, vecs = np.linalg.eigh(M)
    d = vecs[:, -1]
    d = canonical_sign(d / np.linalg.norm(d))
    angles = angle_to_axis(units, d)
    worst = float(angles.max())
    verdict = Verdict.INVARIANT if worst <= tol else Verdict.NOT_INVARIANT
    return InvarianceFit(d, worst, C, R, verdict, len(usable), tol)


def detect_translation_invariance(f: ScalarField, grid: GridSpec, tol: Optional[float] = None) -> InvarianceFit:
    if grid.size == 0:
        raise ValueError("empty grid")
    if grid.dimension != f.dimension:
        raise ValueError(f"grid has {grid.dimension} axes, field has dimension {f.dimension}")
    if tol is None:
        tol = TOL_ANALYTIC if f.analytic else TOL_FD
    grads = np.array([f.gradient(x) for x in grid.points()])
    return fit_gradients(grads, tol)


def proportionality_constants(f: ScalarField, grid: GridSpec) -> tuple:
    grads = np.array([f.gradient(x) for x in grid.points()])
    return proportionality_from_gradients(grads)


def sampled_gradients(axes: list, values: np.ndarray) -> np.ndarray:
    """Central-difference gradients of tensor-grid samples at interior nodes.

    ``values`` has shape ``tuple(len(a) for a in axes)``.  Only nodes with
    every index strictly inside the grid are returned, so every component
    uses the same second-order stencil.
    """
    values = np.asarray(values, dtype=float)
    n = len(axes)
    if values.shape != tuple(len(a) for a in axes):
        raise ValueError("sample array does not match the axes")
    if any(len(a) < 3 for a in axes):
        raise ValueError("each axis needs at least 3 samples")
    parts = np.gradient(values, *axes) if n > 1 else [np.gradient(values, axes[0])]
    interior = tuple(slice(1, -1) for _ in range(n))
    return np.stack([p[interior].ravel() for p in parts], axis=-1)


def detect_from_samples(axes: list, values: np.ndarray, tol: float = TOL_FD) -> InvarianceFit:
    return fit_gradients(sampled_gradients(axes, values), tol)
