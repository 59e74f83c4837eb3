import math
import os
import subprocess
import sys

import numpy as np
import pytest

from solitonforge import ode_reduction as od
from solitonforge.ode_reduction import (
    OdeParams,
    OdeState,
    check_trajectory,
    integrate_m1,
    integrate_reduced,
    rhs_reduced,
    trajectory_residuals,
)
from solitonforge.soliton_core import SingularPointError

COSH2 = math.e + 1 / math.e
EXPANDING = OdeParams(2, -2.0, -4.0)
SHRINKING = OdeParams(2, 2.0, 1.0)
STEADY = OdeParams(3, 0.0, 2.0)

BACKENDS = ["python"] + (["cython"] if od._compiled is not None else [])


def test_rhs_examples():
    fp, fpp, h1pp = rhs_reduced(OdeState(0.0, 2.0, 0.0, 0.0), EXPANDING)
    assert (fp, fpp, h1pp) == (0.0, 2.0, 0.0)
    c, rho = 1.5, 0.7
    _, fpp, h1pp = rhs_reduced(OdeState(0.0, c, 0.0, 0.0), OdeParams(2, rho, rho * c * c))
    assert fpp == pytest.approx(0.0, abs=1e-15) and h1pp == pytest.approx(rho)
    _, fpp, _ = rhs_reduced(OdeState(0.0, 1.0, 1.0, 0.0), STEADY)
    assert fpp == 0.0
    with pytest.raises(SingularPointError):
        rhs_reduced(OdeState(0.0, 0.0, 1.0, 0.0), STEADY)


@pytest.mark.parametrize("backend", BACKENDS)
def test_integrate_expanding(backend):
    t = integrate_reduced(OdeState(0.0, 2.0, 0.0, 0.0), EXPANDING, 1.0, 1e-3, backend=backend)
    assert t.halt_reason == "reached endpoint"
    assert len(t) == 1001
    assert abs(t.final.f - COSH2) <= 1e-8
    assert t.final.x1 == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.diff(t.x) > 0)
    np.testing.assert_allclose(np.diff(t.x), 1e-3, rtol=1e-9)


@pytest.mark.parametrize("backend", BACKENDS)
def test_integrate_steady_linear(backend):
    t = integrate_reduced(OdeState(0.0, 1.0, 1.0, 0.0), STEADY, 2.0, 0.01, backend=backend)
    np.testing.assert_allclose(t.f, 1.0 + t.x, atol=1e-12)
    np.testing.assert_allclose(t.h1p, 0.0, atol=1e-12)


@pytest.mark.parametrize("backend", BACKENDS)
def test_integrate_shrinking(backend):
    t = integrate_reduced(OdeState(0.0, 1.0, 0.0, 0.0), SHRINKING, 1.0, 1e-3, backend=backend)
    assert abs(t.final.f - math.cos(1.0)) <= 1e-8


def test_step_validation():
    init = OdeState(0.0, 1.0, 0.0, 0.0)
    for step in (0.0, -0.1, float("nan")):
        with pytest.raises(ValueError):
            integrate_reduced(init, SHRINKING, 1.0, step)
    with pytest.raises(ValueError):
        integrate_reduced(init, SHRINKING, 1.0, 0.3)
    with pytest.raises(ValueError):
        integrate_reduced(init, SHRINKING, -1.0, 0.1)
    with pytest.raises(SingularPointError):
        integrate_reduced(OdeState(0.0, 0.0, 0.0, 0.0), SHRINKING, 1.0, 0.1)


def test_convergence_order():
    errs = []
    for h in (0.1, 0.05, 0.025):
        t = integrate_reduced(OdeState(0.0, 2.0, 0.0, 0.0), EXPANDING, 1.0, h)
        errs.append(abs(t.final.f - COSH2))
    for coarse, fine in zip(errs, errs[1:]):
        assert 12.0 <= coarse / fine <= 20.0


@pytest.mark.parametrize("backend", BACKENDS)
def test_halts_when_f_reaches_zero(backend):
    # f = cos(x) reaches 0 at pi/2
    t = integrate_reduced(OdeState(0.0, 1.0, 0.0, 0.0), SHRINKING, 3.0, 1e-3, backend=backend)
    assert t.halt_reason == "f->0"
    assert np.all(t.f > 0)
    assert t.final.x1 < math.pi / 2


@pytest.mark.parametrize("backend", BACKENDS)
def test_halts_on_blowup(backend):
    # m=1, k=1: f'' = f f' blows up in finite time from f=1, f'=1 (f' = f^2/2 + 1/2)
    t = integrate_m1(OdeState(0.0, 1.0, 1.0, 1.0), OdeParams(1, 0.0, 0.0, k=1.0), 5.0, 1e-3, backend=backend)
    assert t.halt_reason == "blow-up"
    assert np.all(np.abs(t.f) + np.abs(t.fp) <= od.OVERFLOW_GUARD)


def test_backends_bitwise_identical():
    if len(BACKENDS) < 2:
        pytest.skip("compiled kernel not built")
    for init, p in [
        (OdeState(0.0, 2.0, 0.0, 0.0), EXPANDING),
        (OdeState(0.0, 1.0, 0.3, -0.5), OdeParams(3, 0.4, 1.1)),
        (OdeState(0.0, 1.0, 0.0, 0.0), SHRINKING),
    ]:
        a = integrate_reduced(init, p, 3.0, 1e-3, backend="python")
        b = integrate_reduced(init, p, 3.0, 1e-3, backend="cython")
        assert a.halt_reason == b.halt_reason
        for col in ("f", "fp", "h1p"):
            assert np.array_equal(getattr(a, col), getattr(b, col))
    for variant in ("derived", "flipped"):
        p = OdeParams(1, -1.0, 0.0, k=0.7)
        init = OdeState(0.0, 1.0, 0.5, 0.7)
        a = integrate_m1(init, p, 2.0, 1e-3, variant, backend="python")
        b = integrate_m1(init, p, 2.0, 1e-3, variant, backend="cython")
        assert np.array_equal(a.f, b.f) and np.array_equal(a.fp, b.fp)


def test_unknown_backend():
    with pytest.raises(ValueError):
        integrate_reduced(OdeState(0.0, 1.0, 0.0, 0.0), SHRINKING, 1.0, 0.1, backend="fortran")


# ---------------------------------------------------------------- m = 1

M1 = OdeParams(1, 0.0, 0.0, k=1.0)


def test_m1_equilibrium():
    t = integrate_m1(OdeState(0.0, 1.0, 0.0, 1.0), M1, 1.0, 1e-2)
    np.testing.assert_array_equal(t.f, 1.0)
    np.testing.assert_array_equal(t.fp, 0.0)


def test_m1_resubstitution():
    t = integrate_m1(OdeState(0.0, 1.0, 0.5, 1.0), M1, 0.5, 1e-3)
    assert check_trajectory(t, M1) <= 1e-7
    assert np.max(np.abs(t.h1p - M1.k * t.f)) <= 1e-10


def test_m1_matches_reduced_system():
    # the m=1 equation is the reduced system restricted to h1' = k f
    p = OdeParams(1, -0.5, 0.0, k=0.8)
    init = OdeState(0.0, 1.2, -0.3, 0.8 * 1.2)
    a = integrate_m1(init, p, 1.0, 1e-3)
    b = integrate_reduced(init, p, 1.0, 1e-3)
    np.testing.assert_allclose(a.f, b.f, rtol=1e-10)
    np.testing.assert_allclose(a.h1p, b.h1p, rtol=1e-10)


@pytest.mark.parametrize(
    "params,init",
    [
        (OdeParams(1, 0.0, 0.5, k=1.0), OdeState(0.0, 1.0, 0.0, 1.0)),
        (OdeParams(2, 0.0, 0.0, k=1.0), OdeState(0.0, 1.0, 0.0, 1.0)),
        (OdeParams(1, 0.0, 0.0, k=0.0), OdeState(0.0, 1.0, 0.0, 0.0)),
        (OdeParams(1, 0.0, 0.0, k=1.0), OdeState(0.0, 1.0, 0.0, 2.0)),
    ],
)
def test_m1_rejects(params, init):
    with pytest.raises(ValueError):
        integrate_m1(init, params, 1.0, 0.1)


def test_m1_negative_k_accepted():
    p = OdeParams(1, 0.3, 0.0, k=-2.0)
    t = integrate_m1(OdeState(0.0, 1.0, 0.1, -2.0), p, 0.5, 1e-3)
    assert check_trajectory(t, p) <= 1e-6


# --------------------------------------------------------- certificate

def test_check_trajectory_examples():
    t = integrate_reduced(OdeState(0.0, 2.0, 0.0, 0.0), EXPANDING, 1.0, 1e-3)
    assert check_trajectory(t, EXPANDING) <= 1e-6
    c, rho = 1.0, 0.0
    const = integrate_reduced(OdeState(0.0, c, 0.0, 0.0), OdeParams(2, rho, rho * c * c), 1.0, 1e-2)
    assert check_trajectory(const, OdeParams(2, rho, 0.0)) <= 1e-12


def test_check_trajectory_detects_corruption():
    step = 1e-3
    t = integrate_reduced(OdeState(0.0, 2.0, 0.0, 0.0), EXPANDING, 1.0, step)
    j = 500
    f = t.f.copy()
    f[j] += 0.1
    bad = od.OdeTrajectory(t.x, f, t.fp, t.h1p, t.step, t.halt_reason)
    idx, r1, r2 = trajectory_residuals(bad, EXPANDING)
    at = int(np.where(idx == j)[0][0])
    # the 5-point second difference puts 30/12 of the jump on f'' at the
    # sample; residuals are divided by max(1, |rho| f^2, |lambda_F|) ~ 10 here
    assert max(r1[at], r2[at]) >= 0.01 * step**-2
    assert check_trajectory(bad, EXPANDING) >= 0.01 * step**-2
    clean = trajectory_residuals(t, EXPANDING)
    assert max(clean[1].max(), clean[2].max()) <= 1e-6


def test_check_trajectory_too_short():
    t = integrate_reduced(OdeState(0.0, 2.0, 0.0, 0.0), EXPANDING, 0.3, 0.1)
    with pytest.raises(ValueError):
        check_trajectory(t, EXPANDING)


def test_eq2_consistency_scales_with_step_squared():
    # eq2 residual with FD derivatives is bounded by C * step^2
    for step in (1e-2, 5e-3):
        t = integrate_reduced(OdeState(0.0, 1.0, 0.3, -0.5), OdeParams(3, 0.4, 1.1), 1.0, step)
        _, _, r2 = trajectory_residuals(t, OdeParams(3, 0.4, 1.1))
        assert r2.max() <= 10.0 * step**2


def test_backend_override_at_import():
    code = "from solitonforge import ode_reduction as od; print(od.BACKEND)"
    env = dict(os.environ, SOLITONFORGE_BACKEND="python")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
    env.pop("SOLITONFORGE_BACKEND")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == ("cython" if od._compiled is not None else "python")
