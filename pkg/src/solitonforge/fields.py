"""Scalar fields on Euclidean space and their first and second derivatives.

A :class:`ScalarField` either carries closed-form gradient and Hessian
callables (analytic mode) or differentiates its evaluator by central finite
differences (FD mode).  :class:`Profile` is the one-variable counterpart used
for warping profiles and reduced potentials.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

EPS = np.finfo(float).eps
FD_STEP_1 = EPS ** (1.0 / 3.0)
FD_STEP_2 = EPS ** (1.0 / 4.0)


class NonFiniteError(FloatingPointError):
    """A field returned a non-finite value at a point needed for evaluation."""


def _finite(value: float, where) -> float:
    if not np.isfinite(value):
        raise NonFiniteError(f"non-finite field value {value!r} at {where}")
    return value


def _steps(x: np.ndarray, base: float, step: Optional[float]) -> np.ndarray:
    scale = np.maximum(1.0, np.abs(x))
    return (step if step is not None else base) * scale


@dataclass(frozen=True)
class ScalarField:
    """Smooth function on R^n.

    ``grad`` and ``hess`` are optional closed forms; when both are given the
    field is in analytic mode, otherwise derivatives use finite differences
    with relative step ``step`` (default: eps^(1/3) for first derivatives,
    eps^(1/4) for second ones).
    """

    dimension: int
    func: Callable[[np.ndarray], float]
    grad: Optional[Callable[[np.ndarray], np.ndarray]] = None
    hess: Optional[Callable[[np.ndarray], np.ndarray]] = None
    step: Optional[float] = None
    name: str = ""

    def __post_init__(self):
        if int(self.dimension) < 1:
            raise ValueError(f"dimension must be positive, got {self.dimension}")
        if self.step is not None and not self.step > 0:
            raise ValueError(f"finite-difference step must be > 0, got {self.step}")

    @property
    def analytic(self) -> bool:
        return self.grad is not None and self.hess is not None

    @property
    def derivative_mode(self) -> str:
        return "analytic" if self.analytic else "fd"

    def as_fd(self, step: Optional[float] = None) -> "ScalarField":
        """Same evaluator with closed-form derivatives dropped."""
        return ScalarField(self.dimension, self.func, step=step, name=self.name)

    def _point(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dimension,):
            raise ValueError(
                f"point has shape {x.shape}, field expects ({self.dimension},)"
            )
        return x

    def __call__(self, x) -> float:
        x = self._point(x)
        return float(self.func(x))

    def _fv(self, x: np.ndarray) -> float:
        return _finite(float(self.func(x)), x)

    def gradient(self, x) -> np.ndarray:
        x = self._point(x)
        if self.grad is not None:
            return np.asarray(self.grad(x), dtype=float).reshape(self.dimension)
        h = _steps(x, FD_STEP_1, self.step)
        g = np.empty(self.dimension)
        for i in range(self.dimension):
            e = np.zeros(self.dimension)
            e[i] = h[i]
            g[i] = (self._fv(x + e) - self._fv(x - e)) / (2.0 * h[i])
        return g

    def hessian_fd_raw(self, x) -> np.ndarray:
        """FD Hessian before symmetrisation.

        Diagonal entries use the 3-point stencil, mixed entries the 4-point
        one, each (i, j) computed independently of (j, i).
        """
        x = self._point(x)
        n = self.dimension
        h = _steps(x, FD_STEP_2, self.step)
        f0 = self._fv(x)
        H = np.empty((n, n))
        for i in range(n):
            ei = np.zeros(n)
            ei[i] = h[i]
            H[i, i] = (self._fv(x + ei) - 2.0 * f0 + self._fv(x - ei)) / (h[i] * h[i])
        for i, j in itertools.permutations(range(n), 2):
            ei = np.zeros(n)
            ej = np.zeros(n)
            ei[i] = h[i]
            ej[j] = h[j]
            H[i, j] = (
                self._fv(x + ei + ej)
                - self._fv(x + ei - ej)
                - self._fv(x - ei + ej)
                + self._fv(x - ei - ej)
            ) / (4.0 * h[i] * h[j])
        return H

    def hessian(self, x) -> np.ndarray:
        if self.hess is not None:
            x = self._point(x)
            H = np.asarray(self.hess(x), dtype=float).reshape(self.dimension, self.dimension)
        else:
            H = self.hessian_fd_raw(x)
        return 0.5 * (H + H.T)

    def laplacian(self, x) -> float:
        return float(np.trace(self.hessian(x)))


def evaluate(field: ScalarField, x) -> float:
    return field(x)


def gradient(field: ScalarField, x) -> np.ndarray:
    return field.gradient(x)


def hessian(field: ScalarField, x) -> np.ndarray:
    return field.hessian(x)


def laplacian(field: ScalarField, x) -> float:
    return field.laplacian(x)


def constant_field(value: float, n: int) -> ScalarField:
    value = float(value)
    return ScalarField(
        n,
        lambda x: value,
        grad=lambda x: np.zeros(n),
        hess=lambda x: np.zeros((n, n)),
        name=f"const({value!r})",
    )


def linear_combination(alpha: float, f: ScalarField, beta: float, g: ScalarField) -> ScalarField:
    """alpha*f + beta*g; analytic iff both inputs are."""
    if f.dimension != g.dimension:
        raise ValueError("fields have different dimensions")
    grad = hess = None
    if f.analytic and g.analytic:
        grad = lambda x: alpha * f.gradient(x) + beta * g.gradient(x)  # noqa: E731
        hess = lambda x: alpha * f.hessian(x) + beta * g.hessian(x)  # noqa: E731
    return ScalarField(
        f.dimension,
        lambda x: alpha * f.func(x) + beta * g.func(x),
        grad=grad,
        hess=hess,
        step=f.step,
    )


@dataclass(frozen=True)
class Profile:
    """Smooth function of one real variable with first and second derivatives."""

    func: Callable[[float], float]
    d1: Optional[Callable[[float], float]] = None
    d2: Optional[Callable[[float], float]] = None
    step: Optional[float] = None
    name: str = ""

    def __call__(self, t: float) -> float:
        return float(self.func(float(t)))

    def _fv(self, t: float) -> float:
        return _finite(float(self.func(t)), t)

    def derivative(self, t: float) -> float:
        t = float(t)
        if self.d1 is not None:
            return float(self.d1(t))
        h = (self.step or FD_STEP_1) * max(1.0, abs(t))
        return (self._fv(t + h) - self._fv(t - h)) / (2.0 * h)

    def second_derivative(self, t: float) -> float:
        t = float(t)
        if self.d2 is not None:
            return float(self.d2(t))
        h = (self.step or FD_STEP_2) * max(1.0, abs(t))
        return (self._fv(t + h) - 2.0 * self._fv(t) + self._fv(t - h)) / (h * h)


def constant_profile(value: float) -> Profile:
    value = float(value)
    return Profile(lambda t: value, lambda t: 0.0, lambda t: 0.0, name=f"const({value!r})")


@dataclass(frozen=True)
class GridSpec:
    """Tensor grid: one ``(lo, hi)`` range and one point count per axis."""

    ranges: tuple
    counts: tuple

    def __post_init__(self):
        ranges = tuple((float(lo), float(hi)) for lo, hi in self.ranges)
        counts = tuple(int(c) for c in self.counts)
        if len(ranges) != len(counts) or not ranges:
            raise ValueError("need one point count per axis range, at least one axis")
        for (lo, hi), c in zip(ranges, counts):
            if c < 1:
                raise ValueError(f"point count must be >= 1, got {c}")
            if not (np.isfinite(lo) and np.isfinite(hi)) or lo > hi:
                raise ValueError(f"invalid axis range [{lo}, {hi}]")
        object.__setattr__(self, "ranges", ranges)
        object.__setattr__(self, "counts", counts)

    @classmethod
    def cube(cls, lo: float, hi: float, count: int, n: int) -> "GridSpec":
        return cls(((lo, hi),) * n, (count,) * n)

    @property
    def dimension(self) -> int:
        return len(self.ranges)

    @property
    def size(self) -> int:
        return int(np.prod(self.counts))

    def axes(self) -> list:
        return [np.linspace(lo, hi, c) for (lo, hi), c in zip(self.ranges, self.counts)]

    def points(self) -> np.ndarray:
        """All grid points, lexicographic order (last axis varies fastest)."""
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)


def sample_box(grid: GridSpec, count: int, seed: int = 0) -> np.ndarray:
    """Seeded uniform random points inside the grid's bounding box."""
    rng = np.random.default_rng(seed)
    lo = np.array([r[0] for r in grid.ranges])
    hi = np.array([r[1] for r in grid.ranges])
    return lo + (hi - lo) * rng.random((count, grid.dimension))


def relative_error(approx, exact, floor: float = 1.0) -> float:
    approx = np.asarray(approx, dtype=float)
    exact = np.asarray(exact, dtype=float)
    scale = max(floor, float(np.max(np.abs(exact))) if exact.size else floor)
    return float(np.max(np.abs(approx - exact))) / scale


__all__ = [
    "NonFiniteError",
    "ScalarField",
    "Profile",
    "GridSpec",
    "evaluate",
    "gradient",
    "hessian",
    "laplacian",
    "constant_field",
    "constant_profile",
    "linear_combination",
    "sample_box",
    "relative_error",
]
