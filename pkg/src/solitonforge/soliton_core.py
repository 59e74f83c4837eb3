"""Residuals of the gradient Ricci soliton equation on R^n x_f F^m.

For a warped product with Euclidean base, Einstein fiber (constant lambda_F)
and potential ``h`` depending only on the base, ``Ric + Hess h = rho g`` is
equivalent to three families of scalar equations:

* off-diagonal:  f h_ij - m f_ij            = 0            (i < j)
* diagonal:      f h_ii - m f_ii - rho f    = 0
* fiber:         sum_k [-f f_kk - (m-1) f_k^2 + f f_k h_k] - rho f^2 + lambda_F = 0

:func:`residual_system` evaluates these directly; :func:`residual_direct`
assembles the same quantities from the block form of the warped-product Ricci
tensor and Hessian, and serves as an independent cross-check.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .fields import GridSpec, ScalarField

F_MIN = 1e-8


class SingularPointError(ValueError):
    """The warping function is at or below the positivity threshold."""


class SolitonClass(enum.Enum):
    SHRINKING = "shrinking"
    STEADY = "steady"
    EXPANDING = "expanding"


def classify(rho: float) -> SolitonClass:
    if not np.isfinite(rho):
        raise ValueError(f"rho must be finite, got {rho!r}")
    if rho > 0:
        return SolitonClass.SHRINKING
    if rho < 0:
        return SolitonClass.EXPANDING
    return SolitonClass.STEADY


@dataclass(frozen=True)
class ResidualBlock:
    """Pointwise residuals.

    ``offdiag`` is n x n with only the strict upper triangle populated.
    ``scale`` is max(1, |rho| f^2, |lambda_F|) at the point; the ``scaled``
    accessors divide by it.
    """

    offdiag: np.ndarray
    diag: np.ndarray
    fiber: float
    scale: float = 1.0

    def sup(self) -> dict:
        return {
            "offdiag": float(np.max(np.abs(self.offdiag))) if self.offdiag.size else 0.0,
            "diag": float(np.max(np.abs(self.diag))),
            "fiber": abs(float(self.fiber)),
        }

    def sup_scaled(self) -> dict:
        return {k: v / self.scale for k, v in self.sup().items()}

    def max_abs(self) -> float:
        return max(self.sup().values())

    def max_scaled(self) -> float:
        return self.max_abs() / self.scale


def _check_point(spec, f: ScalarField, h: ScalarField, x) -> tuple:
    if f.dimension != spec.n or h.dimension != spec.n:
        raise ValueError(
            f"field dimensions ({f.dimension}, {h.dimension}) do not match n={spec.n}"
        )
    x = np.asarray(x, dtype=float)
    fv = f(x)
    if not fv > F_MIN:
        raise SingularPointError(f"f(x)={fv!r} <= f_min={F_MIN} at x={x.tolist()}")
    return x, fv


def _scale(spec, fv: float) -> float:
    return max(1.0, abs(spec.rho) * fv * fv, abs(spec.lambda_F))


def residual_system(spec, f: ScalarField, h: ScalarField, x) -> ResidualBlock:
    x, fv = _check_point(spec, f, h, x)
    n, m, rho = spec.n, spec.m, spec.rho
    df, dh = f.gradient(x), h.gradient(x)
    Hf, Hh = f.hessian(x), h.hessian(x)

    eq = fv * Hh - m * Hf
    offdiag = np.triu(eq, k=1)
    diag = np.diagonal(eq) - rho * fv
    fiber = 0.0
    for k in range(n):
        fiber += -fv * Hf[k, k] - (m - 1) * df[k] ** 2 + fv * df[k] * dh[k]
    fiber = fiber - rho * fv * fv + spec.lambda_F
    return ResidualBlock(offdiag, np.array(diag, dtype=float), float(fiber), _scale(spec, fv))


@dataclass(frozen=True)
class WarpedBlocks:
    """Ric_g + Hess_g h - rho g split by tangent directions.

    ``base`` is the (X_i, X_j) block in the orthonormal base frame, ``mixed``
    the (X_i, Y_a) block and ``fiber`` the coefficient of g_F in the (Y_a, Y_b)
    block.
    """

    base: np.ndarray
    mixed: np.ndarray
    fiber: float


def warped_blocks(spec, f: ScalarField, h: ScalarField, x) -> WarpedBlocks:
    x, fv = _check_point(spec, f, h, x)
    n, m, rho = spec.n, spec.m, spec.rho
    df, dh = f.gradient(x), h.gradient(x)
    Hf, Hh = f.hessian(x), h.hessian(x)

    # flat base: Ric_0 = 0
    ric_base = np.zeros((n, n)) - (m / fv) * Hf
    base = ric_base + Hh - rho * np.eye(n)
    mixed = np.zeros((n, m))

    # on fiber vectors, g = f^2 g_F; work relative to g, then convert to g_F
    lap = float(np.trace(Hf))
    grad_sq = float(df @ df)
    ric_rel_g = spec.lambda_F / fv**2 - (lap / fv + (m - 1) * grad_sq / fv**2)
    hess_rel_g = float(df @ dh) / fv
    fiber = (ric_rel_g + hess_rel_g - rho) * fv**2
    return WarpedBlocks(base, mixed, float(fiber))


def residual_direct(spec, f: ScalarField, h: ScalarField, x) -> ResidualBlock:
    x, fv = _check_point(spec, f, h, x)
    blocks = warped_blocks(spec, f, h, x)
    scaled = fv * blocks.base
    return ResidualBlock(
        np.triu(scaled, k=1),
        np.array(np.diagonal(scaled), dtype=float),
        blocks.fiber,
        _scale(spec, fv),
    )


def _lambda_at(n, m, rho, f: ScalarField, h: ScalarField, x) -> float:
    fv = f(x)
    df, dh = f.gradient(x), h.gradient(x)
    Hf = f.hessian(x)
    acc = 0.0
    for k in range(n):
        acc += -fv * Hf[k, k] - (m - 1) * df[k] ** 2 + fv * df[k] * dh[k]
    return rho * fv * fv - acc


def solve_lambda_f(n, m, rho, f: ScalarField, h: ScalarField, grid: GridSpec) -> tuple:
    """Fiber Einstein constant implied by (f, h, rho) on ``grid``.

    Returns ``(mean, spread)`` where spread is the largest deviation of the
    pointwise value from the mean; near-zero spread certifies a soliton.
    """
    values = []
    for x in grid.points():
        if f(x) > F_MIN:
            values.append(_lambda_at(n, m, rho, f, h, x))
    if not values:
        raise ValueError("no grid point with f > f_min")
    values = np.array(values)
    mean = float(np.mean(values))
    return mean, float(np.max(np.abs(values - mean)))


@dataclass
class ResidualReport:
    grid: GridSpec
    tol: float
    points: np.ndarray
    per_point: np.ndarray  # max scaled |entry|; NaN where skipped
    per_point_raw: np.ndarray
    sup_raw: dict
    sup_scaled: dict
    skipped: list = field(default_factory=list)

    @property
    def evaluated(self) -> int:
        return int(np.count_nonzero(~np.isnan(self.per_point)))

    @property
    def max_scaled(self) -> float:
        return max(self.sup_scaled.values())

    @property
    def passed(self) -> bool:
        return self.max_scaled <= self.tol

    def to_dict(self) -> dict:
        grid = None
        if self.grid is not None:
            grid = {"ranges": [list(r) for r in self.grid.ranges], "counts": list(self.grid.counts)}
        return {
            "grid": grid,
            "tol": self.tol,
            "evaluated_points": self.evaluated,
            "skipped_points": [list(map(float, self.points[i])) for i in self.skipped],
            "sup_raw": dict(self.sup_raw),
            "sup_scaled": dict(self.sup_scaled),
            "max_scaled": self.max_scaled,
            "passed": self.passed,
        }


def verify_points(spec, f, h, points: np.ndarray, tol: float, grid: Optional[GridSpec] = None) -> ResidualReport:
    points = np.asarray(points, dtype=float)
    keys = ("offdiag", "diag", "fiber")
    sup_raw = dict.fromkeys(keys, 0.0)
    sup_scaled = dict.fromkeys(keys, 0.0)
    per_point = np.full(len(points), np.nan)
    per_point_raw = np.full(len(points), np.nan)
    skipped = []
    for i, x in enumerate(points):
        if not f(x) > F_MIN:
            skipped.append(i)
            continue
        block = residual_system(spec, f, h, x)
        raw, scl = block.sup(), block.sup_scaled()
        for k in keys:
            sup_raw[k] = max(sup_raw[k], raw[k])
            sup_scaled[k] = max(sup_scaled[k], scl[k])
        per_point[i] = block.max_scaled()
        per_point_raw[i] = block.max_abs()
    if len(skipped) == len(points):
        raise ValueError("every point was filtered by the f_min threshold")
    return ResidualReport(grid, tol, points, per_point, per_point_raw, sup_raw, sup_scaled, skipped)


def verify_on_grid(spec, f: ScalarField, h: ScalarField, grid: GridSpec, tol: float) -> ResidualReport:
    if grid.size == 0:
        raise ValueError("empty grid")
    return verify_points(spec, f, h, grid.points(), tol, grid)
