"""Initial-value integration of the reduced soliton ODEs.

When the warping function depends on x1 only, the soliton equation reduces
to two ODEs for ``f`` and the x1-part ``h1`` of the potential:

    lambda_F - f f'' - (m-1) f'^2 + f f' h1' = rho f^2
    f h1'' - m f'' = rho f

The first is solved for f'' and the second then gives h1'', so the state is
``(f, f', h1')`` and no division by f' is needed.  For m = 1 (lambda_F = 0)
the system is equivalent to h1' = k f together with f'' = k f f' - rho f.

Integration is fixed-step classical RK4.  The stepping loop lives in a
compiled kernel (``_rk4``) when available and in ``_rk4_py`` otherwise;
both give identical results.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _rk4_py
from .soliton_core import F_MIN, SingularPointError

try:
    from . import _rk4 as _compiled
except ImportError:  # extension not built
    _compiled = None

# SOLITONFORGE_BACKEND=python forces the fallback even when the extension exists
if _compiled is not None and os.environ.get("SOLITONFORGE_BACKEND", "").lower() != "python":
    BACKEND = "cython"
else:
    BACKEND = "python"
OVERFLOW_GUARD = 1e12
HALT_REASONS = ("reached endpoint", "f->0", "blow-up")


def _kernel(backend: Optional[str]):
    backend = backend or BACKEND
    if backend == "cython":
        if _compiled is None:
            raise RuntimeError("compiled RK4 kernel is not available")
        return _compiled
    if backend == "python":
        return _rk4_py
    raise ValueError(f"unknown backend {backend!r}")


@dataclass(frozen=True)
class OdeParams:
    m: int
    rho: float
    lambda_F: float = 0.0
    k: Optional[float] = None

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"m must be an integer >= 1, got {self.m}")
        for name in ("rho", "lambda_F"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


@dataclass(frozen=True)
class OdeState:
    x1: float
    f: float
    fp: float
    h1p: float


@dataclass(frozen=True)
class OdeTrajectory:
    x: np.ndarray
    f: np.ndarray
    fp: np.ndarray
    h1p: np.ndarray
    step: float
    halt_reason: str
    backend: str = BACKEND

    def __len__(self):
        return len(self.x)

    def state(self, i: int) -> OdeState:
        return OdeState(float(self.x[i]), float(self.f[i]), float(self.fp[i]), float(self.h1p[i]))

    @property
    def final(self) -> OdeState:
        return self.state(len(self) - 1)


def rhs_reduced(s: OdeState, p: OdeParams) -> tuple:
    """Derivative of (f, f', h1') at ``s``."""
    if not s.f > F_MIN:
        raise SingularPointError(f"f={s.f!r} <= f_min at x1={s.x1!r}")
    return _rk4_py._rhs_reduced(
        float(s.f), float(s.fp), float(s.h1p), float(p.m), float(p.rho), float(p.lambda_F)
    )


def _step_count(x0: float, x_end: float, step: float) -> int:
    if not (math.isfinite(step) and step > 0):
        raise ValueError(f"step must be a positive finite number, got {step!r}")
    span = x_end - x0
    if not span > 0:
        raise ValueError(f"x_end={x_end!r} must exceed the initial x1={x0!r}")
    nsteps = int(round(span / step))
    if nsteps < 1 or abs(nsteps * step - span) > 1e-9 * max(1.0, span):
        raise ValueError(f"(x_end - x1) = {span!r} is not a whole number of steps {step!r}")
    return nsteps


def _check_init(init: OdeState):
    vals = (init.x1, init.f, init.fp, init.h1p)
    if not all(math.isfinite(v) for v in vals):
        raise ValueError("initial state must be finite")
    if not init.f > F_MIN:
        raise SingularPointError(f"initial f={init.f!r} <= f_min")


def integrate_reduced(init: OdeState, p: OdeParams, x_end: float, step: float,
                      backend: Optional[str] = None) -> OdeTrajectory:
    _check_init(init)
    nsteps = _step_count(init.x1, x_end, step)
    kernel = _kernel(backend)
    f, fp, h1p, halt = kernel.rk4_reduced(
        float(init.f), float(init.fp), float(init.h1p), float(p.m), float(p.rho),
        float(p.lambda_F), float(step), nsteps, F_MIN, OVERFLOW_GUARD,
    )
    x = init.x1 + step * np.arange(len(f))
    return OdeTrajectory(x, f, fp, h1p, float(step), HALT_REASONS[halt], backend or BACKEND)


def integrate_m1(init: OdeState, p: OdeParams, x_end: float, step: float,
                 variant: str = "derived", backend: Optional[str] = None) -> OdeTrajectory:
    """Integrate the m = 1 equation with h1' = k f.

    ``variant="derived"`` uses f'' = k f f' - rho f, the form equivalent to
    the reduced system.  ``variant="flipped"`` flips the sign of the rho term
    (f'' = k f f' + rho f); it exists to demonstrate that this form does not
    satisfy the system when rho != 0.
    """
    if p.m != 1:
        raise ValueError(f"m=1 path requires m = 1, got {p.m}")
    if p.lambda_F != 0:
        raise ValueError(f"m=1 path requires lambda_F = 0, got {p.lambda_F}")
    if p.k is None or p.k == 0 or not math.isfinite(p.k):
        raise ValueError(f"k must be a non-zero finite number, got {p.k!r}")
    if variant not in ("derived", "flipped"):
        raise ValueError(f"unknown variant {variant!r}")
    _check_init(init)
    k = float(p.k)
    if abs(init.h1p - k * init.f) > 1e-12 * max(1.0, abs(k * init.f)):
        raise ValueError(f"inconsistent initial state: h1'={init.h1p!r} != k f={k * init.f!r}")
    nsteps = _step_count(init.x1, x_end, step)
    rho_term = float(p.rho) if variant == "derived" else -float(p.rho)
    f, fp, halt = _kernel(backend).rk4_m1(
        float(init.f), float(init.fp), k, rho_term, float(step), nsteps, F_MIN, OVERFLOW_GUARD
    )
    x = init.x1 + step * np.arange(len(f))
    return OdeTrajectory(x, f, fp, k * f, float(step), HALT_REASONS[halt], backend or BACKEND)


def trajectory_residuals(t: OdeTrajectory, p: OdeParams) -> tuple:
    """Scaled residuals of both reduced equations at interior samples.

    f'' is the 5-point second difference of the sampled f, h1'' the 5-point
    first difference of the sampled h1'.  Returns ``(index, eq1, eq2)`` with
    ``index`` the sample positions 2..N-3.
    """
    if len(t) < 5:
        raise ValueError(f"need at least 5 samples, trajectory has {len(t)}")
    h = t.step
    f, fp, g = t.f, t.fp, t.h1p
    idx = np.arange(2, len(t) - 2)
    fc = f[idx]
    fpp = (-f[idx - 2] + 16.0 * f[idx - 1] - 30.0 * fc + 16.0 * f[idx + 1] - f[idx + 2]) / (12.0 * h * h)
    gp = (g[idx - 2] - 8.0 * g[idx - 1] + 8.0 * g[idx + 1] - g[idx + 2]) / (12.0 * h)
    m, rho, lam = p.m, p.rho, p.lambda_F
    eq1 = lam - fc * fpp - (m - 1) * fp[idx] ** 2 + fc * fp[idx] * g[idx] - rho * fc * fc
    eq2 = fc * gp - m * fpp - rho * fc
    scale = np.maximum(1.0, np.maximum(abs(rho) * fc * fc, abs(lam)))
    return idx, np.abs(eq1) / scale, np.abs(eq2) / scale


def check_trajectory(t: OdeTrajectory, p: OdeParams) -> float:
    _, r1, r2 = trajectory_residuals(t, p)
    return float(max(r1.max(), r2.max()))
