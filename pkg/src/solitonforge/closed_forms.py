"""Closed-form warped-product gradient Ricci solitons over Euclidean space.

Each family returns the warping function ``f``, the potential ``h`` and a
:class:`WarpedSolitonSpec` carrying ``(n, m, rho, lambda_F)``, all with
analytic derivatives.

The expanding one-variable family uses ``lambda_F = 4 c1 c2 (m-1) rho / m``.
That is the value obtained by substituting ``f = c1 e^{mu x} + c2 e^{-mu x}``
into the reduced system; the alternative ``(m-1)/m (c2^2 - c1^2) rho`` does
not zero the residual unless c1 c2 = 0 and c1^2 = c2^2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .fields import Profile, ScalarField, constant_field, constant_profile
from .soliton_core import F_MIN, SolitonClass, classify

INF = math.inf


@dataclass(frozen=True)
class WarpedSolitonSpec:
    n: int
    m: int
    rho: float
    lambda_F: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"base dimension n must be an integer >= 2, got {self.n}")
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"fiber dimension m must be an integer >= 1, got {self.m}")

    def with_lambda(self, lambda_F: float) -> "WarpedSolitonSpec":
        return replace(self, lambda_F=float(lambda_F))

    @property
    def soliton_class(self) -> SolitonClass:
        return classify(self.rho)


@dataclass(frozen=True)
class ExpTranslationParams:
    a: float
    a1: float
    a2: float
    c: Sequence[float]
    b: float = 0.0
    m: int = 2


@dataclass(frozen=True)
class OdeFamilyParams:
    c1: float
    c2: float
    m: int
    rho: float = 0.0


@dataclass(frozen=True)
class GaussianParams:
    A: float
    B: Optional[Sequence[float]] = None
    C: float = 0.0


@dataclass(frozen=True)
class SolitonBundle:
    """A warping function, potential and soliton constants."""

    family: str
    f: ScalarField
    h: ScalarField
    spec: WarpedSolitonSpec
    # positivity of f in the variable f actually depends on (xi or x1)
    positivity: tuple = (-INF, INF)
    coordinate: Optional[np.ndarray] = None

    @property
    def soliton_class(self) -> SolitonClass:
        return self.spec.soliton_class

    def is_admissible(self, x) -> bool:
        return self.f(x) > F_MIN

    def with_lambda(self, lambda_F: float) -> "SolitonBundle":
        return replace(self, spec=self.spec.with_lambda(lambda_F))


def gaussian_potential(p: GaussianParams, n: int) -> ScalarField:
    """h(x) = A|x|^2/2 + <x, B> + C on flat R^n."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    A, C = float(p.A), float(p.C)
    B = np.zeros(n) if p.B is None else np.asarray(p.B, dtype=float)
    if B.shape != (n,):
        raise ValueError(f"B must have length {n}")
    return ScalarField(
        n,
        lambda x: 0.5 * A * float(x @ x) + float(x @ B) + C,
        grad=lambda x: A * x + B,
        hess=lambda x: A * np.eye(n),
        name="gaussian",
    )


def gaussian_bundle(p: GaussianParams, n: int, m: int = 1) -> SolitonBundle:
    """Gaussian soliton times a fiber: f = 1, rho = lambda_F = A."""
    spec = WarpedSolitonSpec(n, m, float(p.A), float(p.A))
    return SolitonBundle("gaussian", constant_field(1.0, n), gaussian_potential(p, n), spec)


def _exp_profile(p: float, q: float, mu: float) -> Profile:
    return Profile(
        lambda t: p * math.exp(mu * t) + q * math.exp(-mu * t),
        lambda t: mu * (p * math.exp(mu * t) - q * math.exp(-mu * t)),
        lambda t: mu * mu * (p * math.exp(mu * t) + q * math.exp(-mu * t)),
        name="exp",
    )


def _exp_positivity(p: float, q: float, mu: float) -> tuple:
    """Where p e^{mu t} + q e^{-mu t} > 0 (mu > 0)."""
    if p >= 0 and q >= 0:
        if p == 0 and q == 0:
            return None
        return (-INF, INF)
    if p <= 0 and q <= 0:
        return None
    root = math.log(-q / p) / (2.0 * mu)
    return (root, INF) if p > 0 else (-INF, root)


def family_exp_translation(n: int, p: ExpTranslationParams) -> SolitonBundle:
    """f = a1 e^{mu xi} + a2 e^{-mu xi}, xi = sum x_k, mu = sqrt(a/m); rho = -n a."""
    a, a1, a2, b = float(p.a), float(p.a1), float(p.a2), float(p.b)
    m = int(p.m)
    c = np.asarray(p.c, dtype=float)
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if c.shape != (n,):
        raise ValueError(f"c must have length {n}")
    if not a > 0:
        raise ValueError(f"a must be > 0, got {a}")
    if a1 == 0 and a2 == 0:
        raise ValueError("a1 and a2 must not both vanish")
    if abs(c.sum()) > 1e-12 * max(1.0, float(np.abs(c).sum())):
        raise ValueError(f"coefficients c must sum to zero, got sum {c.sum()!r}")

    mu = math.sqrt(a / m)
    rho = -n * a
    lam = 4.0 * a1 * a2 * rho * (m - 1) / m
    ones = np.ones((n, n))

    def f(x):
        xi = float(np.sum(x))
        return a1 * math.exp(mu * xi) + a2 * math.exp(-mu * xi)

    def f_grad(x):
        xi = float(np.sum(x))
        return np.full(n, mu * (a1 * math.exp(mu * xi) - a2 * math.exp(-mu * xi)))

    def f_hess(x):
        return (a / m) * f(x) * ones

    def h(x):
        sq = float(x @ x)
        xi = float(np.sum(x))
        cross = 0.5 * (xi * xi - sq)  # sum_{k<l} x_k x_l
        return -(n - 1) * a / 2.0 * sq + a * cross + float(c @ x) + b

    def h_grad(x):
        return a * float(np.sum(x)) - n * a * x + c

    h_hess_matrix = a * ones - n * a * np.eye(n)

    spec = WarpedSolitonSpec(n, m, rho, lam)
    return SolitonBundle(
        "exp_translation",
        ScalarField(n, f, f_grad, f_hess, name="exp_translation.f"),
        ScalarField(n, h, h_grad, lambda x: h_hess_matrix.copy(), name="exp_translation.h"),
        spec,
        positivity=_exp_positivity(a1, a2, mu),
        coordinate=np.ones(n),
    )


def lift_profile(P: Profile, a, b: float = 0.0) -> ScalarField:
    """x -> P(<a, x> + b) with chain-rule derivatives."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 1 or not np.any(a != 0):
        raise ValueError("direction a must be a non-zero vector")
    n = a.size
    b = float(b)
    outer = np.outer(a, a)
    return ScalarField(
        n,
        lambda x: P(float(a @ x) + b),
        grad=lambda x: P.derivative(float(a @ x) + b) * a,
        hess=lambda x: P.second_derivative(float(a @ x) + b) * outer,
        name=f"lift({P.name})",
    )


def reduced_potential(h1: Profile, rho: float, a=None, b=None, n: int = 2) -> ScalarField:
    """h(x) = h1(x1) + sum_{k>=2} (rho/2 x_k^2 + a_k x_k + b_k).

    ``a`` and ``b`` hold the coefficients for k = 2..n (length n-1).
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    rho = float(rho)
    a = np.zeros(n - 1) if a is None else np.asarray(a, dtype=float)
    b = np.zeros(n - 1) if b is None else np.asarray(b, dtype=float)
    if a.shape != (n - 1,) or b.shape != (n - 1,):
        raise ValueError(f"a and b must have length n-1 = {n - 1}")
    b_sum = float(np.sum(b))

    def func(x):
        y = x[1:]
        return h1(x[0]) + 0.5 * rho * float(y @ y) + float(a @ y) + b_sum

    def grad(x):
        g = np.empty(n)
        g[0] = h1.derivative(x[0])
        g[1:] = rho * x[1:] + a
        return g

    def hess(x):
        H = np.diag(np.full(n, rho))
        H[0, 0] = h1.second_derivative(x[0])
        return H

    return ScalarField(n, func, grad, hess, name="reduced_potential")


@dataclass(frozen=True)
class OdeFamily:
    """One-variable warping profile f(x1) with h1' = 0."""

    family: str
    f: Profile
    m: int
    rho: float
    lambda_F: float
    positivity: tuple
    params: OdeFamilyParams = field(repr=False, default=None)

    @property
    def soliton_class(self) -> SolitonClass:
        return classify(self.rho)

    def bundle(self, n: int = 2, h1_const: float = 0.0, a=None, b=None) -> SolitonBundle:
        """Lift to R^n: f(x) = f(x1), h = reduced potential with h1 constant."""
        e1 = np.zeros(n)
        e1[0] = 1.0
        f = lift_profile(self.f, e1, 0.0)
        h = reduced_potential(constant_profile(h1_const), self.rho, a, b, n)
        spec = WarpedSolitonSpec(n, self.m, self.rho, self.lambda_F)
        return SolitonBundle(self.family, f, h, spec, positivity=self.positivity, coordinate=e1)


def _check_ode_params(p: OdeFamilyParams):
    if int(p.m) != p.m or p.m < 1:
        raise ValueError(f"m must be an integer >= 1, got {p.m}")
    if p.c1 == 0 and p.c2 == 0:
        raise ValueError("c1 and c2 must not both vanish (f would be identically 0)")


def family_ode_expanding(p: OdeFamilyParams) -> OdeFamily:
    _check_ode_params(p)
    c1, c2, m, rho = float(p.c1), float(p.c2), int(p.m), float(p.rho)
    if not rho < 0:
        raise ValueError(f"expanding family needs rho < 0, got {rho}")
    mu = math.sqrt(-rho / m)
    positivity = _exp_positivity(c1, c2, mu)
    if positivity is None:
        raise ValueError("f is nowhere positive for these coefficients")
    lam = 4.0 * c1 * c2 * (m - 1) * rho / m
    return OdeFamily("ode_expanding", _exp_profile(c1, c2, mu), m, rho, lam, positivity, p)


def family_ode_steady(p: OdeFamilyParams) -> OdeFamily:
    _check_ode_params(p)
    c1, c2, m = float(p.c1), float(p.c2), int(p.m)
    if p.rho != 0:
        raise ValueError(f"steady family needs rho = 0, got {p.rho}")
    if c2 == 0:
        if c1 <= 0:
            raise ValueError("f = c1 <= 0 has empty positivity domain")
        positivity = (-INF, INF)
    elif c2 > 0:
        positivity = (-c1 / c2, INF)
    else:
        positivity = (-INF, -c1 / c2)
    f = Profile(lambda t: c1 + c2 * t, lambda t: c2, lambda t: 0.0, name="linear")
    return OdeFamily("ode_steady", f, m, 0.0, (m - 1) * c2 * c2, positivity, p)


def family_ode_shrinking(p: OdeFamilyParams, near: float = 0.0) -> OdeFamily:
    """f = c1 sin(mu x1) + c2 cos(mu x1), mu = sqrt(rho/m).

    f is positive on a periodic union of intervals; the reported one contains
    ``near`` (or is the next one to its right).
    """
    _check_ode_params(p)
    c1, c2, m, rho = float(p.c1), float(p.c2), int(p.m), float(p.rho)
    if not rho > 0:
        raise ValueError(f"shrinking family needs rho > 0, got {rho}")
    mu = math.sqrt(rho / m)
    f = Profile(
        lambda t: c1 * math.sin(mu * t) + c2 * math.cos(mu * t),
        lambda t: mu * (c1 * math.cos(mu * t) - c2 * math.sin(mu * t)),
        lambda t: -mu * mu * (c1 * math.sin(mu * t) + c2 * math.cos(mu * t)),
        name="trig",
    )
    # f = R sin(mu t + phase); positive where mu t + phase in (2 pi k, 2 pi k + pi)
    phase = math.atan2(c2, c1)
    k = math.floor((mu * near + phase) / (2.0 * math.pi))
    lo = (2.0 * math.pi * k - phase) / mu
    hi = lo + math.pi / mu
    if near >= hi:
        lo, hi = lo + 2.0 * math.pi / mu, hi + 2.0 * math.pi / mu
    lam = (m - 1) * (c1 * c1 + c2 * c2) * rho / m
    return OdeFamily("ode_shrinking", f, m, rho, lam, (lo, hi), p)


FAMILY_NAMES = ("gaussian", "exp_translation", "ode_expanding", "ode_steady", "ode_shrinking")
