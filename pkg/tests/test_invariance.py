import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from solitonforge import closed_forms as cf
from solitonforge.fields import GridSpec, Profile, ScalarField, constant_field
from solitonforge.invariance import (
    Verdict,
    angle_to_axis,
    detect_from_samples,
    detect_translation_invariance,
    fit_gradients,
    proportionality_constants,
)

GRID2 = GridSpec.cube(-1.0, 1.0, 5, 2)


def exp_lin(coef):
    coef = np.asarray(coef, dtype=float)
    return ScalarField(
        coef.size,
        lambda x: math.exp(coef @ x),
        grad=lambda x: math.exp(coef @ x) * coef,
        hess=lambda x: math.exp(coef @ x) * np.outer(coef, coef),
    )


def radial(n=2, center=None):
    c = np.zeros(n) if center is None else np.asarray(center)
    return ScalarField(n, lambda x: float((x - c) @ (x - c)),
                       grad=lambda x: 2 * (x - c), hess=lambda x: 2 * np.eye(n))


def test_detect_exp_sum():
    fit = detect_translation_invariance(exp_lin([1.0, 1.0]), GRID2)
    assert fit.verdict is Verdict.INVARIANT
    np.testing.assert_allclose(fit.direction, [1 / math.sqrt(2)] * 2, atol=1e-15)
    assert fit.max_angular_residual <= 1e-10


def test_detect_radial_not_invariant():
    fit = detect_translation_invariance(radial(), GRID2)
    assert fit.verdict is Verdict.NOT_INVARIANT
    assert fit.max_angular_residual >= math.pi / 4
    # gradient directions on the grid span at least a right angle
    grads = np.array([radial().gradient(x) for x in GRID2.points() if np.any(x)])
    u = grads / np.linalg.norm(grads, axis=1)[:, None]
    assert np.min(u @ u.T) <= 0.0


def test_detect_example23_n3():
    b = cf.family_exp_translation(3, cf.ExpTranslationParams(1.0, 1.0, 2.0, [0.5, 0.0, -0.5], m=2))
    fit = detect_translation_invariance(b.f, GridSpec.cube(-1, 1, 5, 3))
    assert fit.verdict is Verdict.INVARIANT
    np.testing.assert_allclose(fit.direction, [1 / math.sqrt(3)] * 3, atol=1e-12)


def test_detect_degenerate_and_empty():
    fit = detect_translation_invariance(constant_field(3.0, 2), GRID2)
    assert fit.verdict is Verdict.DEGENERATE
    assert fit.direction is None
    fit = detect_translation_invariance(constant_field(3.0, 2).as_fd(), GRID2)
    assert fit.verdict is Verdict.DEGENERATE
    with pytest.raises(ValueError):
        fit_gradients(np.zeros((0, 2)), 1e-6)


def test_proportionality_examples():
    C, R = proportionality_constants(exp_lin([1.0, 2.0]), GRID2)
    assert C[0, 1] == pytest.approx(0.5, rel=1e-14)
    assert C[1, 0] == pytest.approx(2.0, rel=1e-14)
    assert np.nanmax(R) <= 1e-14
    C, _ = proportionality_constants(exp_lin([1.0, 1.0]), GRID2)
    assert C[0, 1] == pytest.approx(1.0) and C[1, 0] == pytest.approx(1.0)
    C, R = proportionality_constants(radial(), GRID2)
    assert R[0, 1] > 0.1


def test_proportionality_undefined_pair():
    # f depends on x1 only: c_12 undefined (f_2 = 0 everywhere)
    f = ScalarField(2, lambda x: math.exp(x[0]), grad=lambda x: np.array([math.exp(x[0]), 0.0]),
                    hess=lambda x: np.diag([math.exp(x[0]), 0.0]))
    C, _ = proportionality_constants(f, GRID2)
    assert np.isnan(C[0, 1])
    assert C[1, 0] == 0.0
    fit = detect_translation_invariance(f, GRID2)
    assert fit.verdict is Verdict.INVARIANT
    np.testing.assert_allclose(fit.direction, [1.0, 0.0], atol=1e-15)


def lifted(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 5))
    a = rng.normal(size=n)
    a /= np.linalg.norm(a)
    kind = ("exp", "sin", "poly")[seed % 3]
    if kind == "exp":
        s = rng.uniform(0.3, 1.5)
        P = Profile(lambda t: math.exp(s * t), lambda t: s * math.exp(s * t), lambda t: s * s * math.exp(s * t))
    elif kind == "sin":
        # monotone on the sampled range so every gradient is non-degenerate
        s = rng.uniform(0.2, 0.5)
        P = Profile(lambda t: math.sin(s * t), lambda t: s * math.cos(s * t), lambda t: -s * s * math.sin(s * t))
    else:
        c3 = rng.uniform(0.1, 1.0)
        P = Profile(lambda t: c3 * t**3 + 2.0 * t, lambda t: 3 * c3 * t**2 + 2.0, lambda t: 6 * c3 * t)
    b = rng.uniform(-0.5, 0.5)
    return cf.lift_profile(P, a, b), a, n


def non_invariant(seed):
    rng = np.random.default_rng(1000 + seed)
    center = rng.uniform(-0.3, 0.3, 2)
    if seed % 2 == 0:
        return radial(2, center)
    s = rng.uniform(0.5, 2.0)
    return ScalarField(
        2,
        lambda x: s * (x[0] - center[0]) ** 2 - (x[1] - center[1]) ** 2,
        grad=lambda x: np.array([2 * s * (x[0] - center[0]), -2 * (x[1] - center[1])]),
        hess=lambda x: np.diag([2 * s, -2.0]),
    )


@pytest.mark.parametrize("seed", range(20))
def test_soundness_on_lifted_fields(seed):
    f, a, n = lifted(seed)
    fit = detect_translation_invariance(f, GridSpec.cube(-1, 1, 4, n))
    assert fit.verdict is Verdict.INVARIANT
    assert abs(fit.direction @ a) >= 1 - 1e-10
    # reciprocity and a_i = c_ij a_j on defined pairs
    C = fit.proportionality
    for i in range(n):
        for j in range(n):
            if i != j and np.isfinite(C[i, j]) and np.isfinite(C[j, i]):
                assert abs(C[i, j] * C[j, i] - 1.0) <= 1e-8
                assert fit.direction[i] == pytest.approx(C[i, j] * fit.direction[j], abs=1e-8)


@pytest.mark.parametrize("seed", range(10))
def test_non_invariant_fields(seed):
    fit = detect_translation_invariance(non_invariant(seed), GridSpec.cube(-1, 1, 5, 2))
    assert fit.verdict is Verdict.NOT_INVARIANT


@settings(max_examples=30, deadline=None)
@given(alpha=st.floats(0.01, 100.0) | st.floats(-100.0, -0.01), seed=st.integers(0, 50))
def test_scale_invariance(alpha, seed):
    f, _, n = lifted(seed)
    g = ScalarField(n, lambda x: alpha * f.func(x), grad=lambda x: alpha * f.gradient(x),
                    hess=lambda x: alpha * f.hessian(x))
    grid = GridSpec.cube(-1, 1, 3, n)
    a = detect_translation_invariance(f, grid)
    b = detect_translation_invariance(g, grid)
    assert a.verdict is b.verdict
    np.testing.assert_allclose(a.direction, b.direction, atol=1e-12)


def test_direction_sign_canonical():
    fit = detect_translation_invariance(exp_lin([-1.0, 2.0]), GRID2)
    assert fit.direction[0] > 0
    np.testing.assert_allclose(abs(fit.direction @ np.array([-1, 2]) / math.sqrt(5)), 1.0, rtol=1e-14)


def test_fd_mode_tolerance():
    b = cf.family_exp_translation(2, cf.ExpTranslationParams(0.5, 1.0, 0.0, [0.0, 0.0], m=1))
    fit = detect_translation_invariance(b.f.as_fd(), GRID2)
    assert fit.tol == 1e-3
    assert fit.verdict is Verdict.INVARIANT


def test_detect_from_samples():
    axes = [np.linspace(-1, 1, 21)] * 2
    X, Y = np.meshgrid(*axes, indexing="ij")
    fit = detect_from_samples(axes, np.exp(0.6 * X + 0.3 * Y))
    assert fit.verdict is Verdict.INVARIANT
    np.testing.assert_allclose(fit.direction, np.array([2.0, 1.0]) / math.sqrt(5), atol=1e-3)
    assert detect_from_samples(axes, X**2 + Y**2).verdict is Verdict.NOT_INVARIANT


def test_angle_small():
    d = np.array([1.0, 0.0])
    u = np.array([[math.cos(1e-9), math.sin(1e-9)]])
    assert angle_to_axis(u, d)[0] == pytest.approx(1e-9, rel=1e-6)
