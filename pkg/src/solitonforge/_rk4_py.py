"""Pure-Python RK4 kernels; reference implementation for ``_rk4.pyx``.

Both files must perform the same floating-point operations in the same
order so the two backends produce bitwise-identical trajectories.

Halt codes: 0 reached endpoint, 1 f fell to f_min, 2 blow-up / non-finite.
"""
import math

import numpy as np


def _rhs_reduced(f, fp, h1p, m, rho, lam):
    fpp = (lam - (m - 1.0) * fp * fp + f * fp * h1p - rho * f * f) / f
    h1pp = m * fpp / f + rho
    return fp, fpp, h1pp


def rk4_reduced(f, fp, h1p, m, rho, lam, step, nsteps, fmin, guard):
    fs = [f]
    fps = [fp]
    h1ps = [h1p]
    half = 0.5 * step
    sixth = step / 6.0
    halt = 0
    for _ in range(nsteps):
        a1, b1, c1 = _rhs_reduced(f, fp, h1p, m, rho, lam)
        f2 = f + half * a1
        if not f2 > fmin:
            halt = 1
            break
        a2, b2, c2 = _rhs_reduced(f2, fp + half * b1, h1p + half * c1, m, rho, lam)
        f3 = f + half * a2
        if not f3 > fmin:
            halt = 1
            break
        a3, b3, c3 = _rhs_reduced(f3, fp + half * b2, h1p + half * c2, m, rho, lam)
        f4 = f + step * a3
        if not f4 > fmin:
            halt = 1
            break
        a4, b4, c4 = _rhs_reduced(f4, fp + step * b3, h1p + step * c3, m, rho, lam)
        nf = f + sixth * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        nfp = fp + sixth * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
        nh = h1p + sixth * (c1 + 2.0 * c2 + 2.0 * c3 + c4)
        if not (math.isfinite(nf) and math.isfinite(nfp) and math.isfinite(nh)):
            halt = 2
            break
        if abs(nf) + abs(nfp) > guard:
            halt = 2
            break
        if not nf > fmin:
            halt = 1
            break
        f, fp, h1p = nf, nfp, nh
        fs.append(f)
        fps.append(fp)
        h1ps.append(h1p)
    return np.array(fs), np.array(fps), np.array(h1ps), halt


def _rhs_m1(f, fp, k, rho_term):
    return fp, k * f * fp - rho_term * f


def rk4_m1(f, fp, k, rho_term, step, nsteps, fmin, guard):
    """f'' = k f f' - rho_term f."""
    fs = [f]
    fps = [fp]
    half = 0.5 * step
    sixth = step / 6.0
    halt = 0
    for _ in range(nsteps):
        a1, b1 = _rhs_m1(f, fp, k, rho_term)
        a2, b2 = _rhs_m1(f + half * a1, fp + half * b1, k, rho_term)
        a3, b3 = _rhs_m1(f + half * a2, fp + half * b2, k, rho_term)
        a4, b4 = _rhs_m1(f + step * a3, fp + step * b3, k, rho_term)
        nf = f + sixth * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        nfp = fp + sixth * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
        if not (math.isfinite(nf) and math.isfinite(nfp)):
            halt = 2
            break
        if abs(nf) + abs(nfp) > guard:
            halt = 2
            break
        if not nf > fmin:
            halt = 1
            break
        f, fp = nf, nfp
        fs.append(f)
        fps.append(fp)
    return np.array(fs), np.array(fps), halt
