"""Numba-compiled twins of the NumPy kernels.

Same per-element expression trees as :mod:`crossdiff.kernels.numpy_backend`
(no fastmath, no reassociation), so trajectories agree bit for bit with the
reference backend. Loops are written stencil-style; scratch arrays are hoisted
out of the time loops.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

NAME = "numba"

STATUS_OK = 0
STATUS_NEGATIVE = 1
STATUS_NONFINITE = 2

FIELD_NAMES = ("rho_a", "rho_b", "g_a", "g_b")

_jit = njit(cache=True)


@_jit
def face_gradient_1d(u, h):
    n = u.shape[0]
    g = np.zeros(n + 1)
    for j in range(1, n):
        g[j] = (u[j] - u[j - 1]) / h
    return g


@_jit
def face_gradient_2d_x(u, hx):
    nx, ny = u.shape
    g = np.zeros((nx + 1, ny))
    for i in range(1, nx):
        for j in range(ny):
            g[i, j] = (u[i, j] - u[i - 1, j]) / hx
    return g


@_jit
def face_gradient_2d_y(u, hy):
    nx, ny = u.shape
    g = np.zeros((nx, ny + 1))
    for i in range(nx):
        for j in range(1, ny):
            g[i, j] = (u[i, j] - u[i, j - 1]) / hy
    return g


@_jit
def divergence_1d(f, h):
    n = f.shape[0] - 1
    out = np.empty(n)
    for i in range(n):
        out[i] = (f[i + 1] - f[i]) / h
    return out


@_jit
def divergence_2d(fx, fy, hx, hy):
    nx = fx.shape[0] - 1
    ny = fy.shape[1] - 1
    out = np.empty((nx, ny))
    for i in range(nx):
        for j in range(ny):
            out[i, j] = (fx[i + 1, j] - fx[i, j]) / hx + (fy[i, j + 1] - fy[i, j]) / hy
    return out


@_jit
def laplacian_1d(u, h):
    return divergence_1d(face_gradient_1d(u, h), h)


@_jit
def laplacian_2d(u, hx, hy):
    return divergence_2d(face_gradient_2d_x(u, hx), face_gradient_2d_y(u, hy), hx, hy)


@_jit
def _fill_cross_flux_1d(f, rs, rd, h, d0, kappa):
    n = rs.shape[0]
    for j in range(1, n):
        f[j] = -d0 * ((rs[j] - rs[j - 1]) / h
                      + kappa * (0.5 * (rs[j - 1] + rs[j])) * ((rd[j] - rd[j - 1]) / h))


@_jit
def cross_flux_1d(rs, rd, h, d0, kappa):
    f = np.zeros(rs.shape[0] + 1)
    _fill_cross_flux_1d(f, rs, rd, h, d0, kappa)
    return f


@_jit
def _fill_cross_flux_2d_x(f, rs, rd, hx, d0, kappa):
    nx, ny = rs.shape
    for i in range(1, nx):
        for j in range(ny):
            f[i, j] = -d0 * ((rs[i, j] - rs[i - 1, j]) / hx
                             + kappa * (0.5 * (rs[i - 1, j] + rs[i, j]))
                             * ((rd[i, j] - rd[i - 1, j]) / hx))


@_jit
def cross_flux_2d_x(rs, rd, hx, d0, kappa):
    nx, ny = rs.shape
    f = np.zeros((nx + 1, ny))
    _fill_cross_flux_2d_x(f, rs, rd, hx, d0, kappa)
    return f


@_jit
def _fill_cross_flux_2d_y(f, rs, rd, hy, d0, kappa):
    nx, ny = rs.shape
    for i in range(nx):
        for j in range(1, ny):
            f[i, j] = -d0 * ((rs[i, j] - rs[i, j - 1]) / hy
                             + kappa * (0.5 * (rs[i, j - 1] + rs[i, j]))
                             * ((rd[i, j] - rd[i, j - 1]) / hy))


@_jit
def cross_flux_2d_y(rs, rd, hy, d0, kappa):
    nx, ny = rs.shape
    f = np.zeros((nx, ny + 1))
    _fill_cross_flux_2d_y(f, rs, rd, hy, d0, kappa)
    return f


@_jit
def cross_only_flux_1d(rs, rd, h, d0, kappa):
    n = rs.shape[0]
    f = np.zeros(n + 1)
    for j in range(1, n):
        f[j] = -d0 * (kappa * (0.5 * (rs[j - 1] + rs[j])) * ((rd[j] - rd[j - 1]) / h))
    return f


@_jit
def cross_only_flux_2d_x(rs, rd, hx, d0, kappa):
    nx, ny = rs.shape
    f = np.zeros((nx + 1, ny))
    for i in range(1, nx):
        for j in range(ny):
            f[i, j] = -d0 * (kappa * (0.5 * (rs[i - 1, j] + rs[i, j]))
                             * ((rd[i, j] - rd[i - 1, j]) / hx))
    return f


@_jit
def cross_only_flux_2d_y(rs, rd, hy, d0, kappa):
    nx, ny = rs.shape
    f = np.zeros((nx, ny + 1))
    for i in range(nx):
        for j in range(1, ny):
            f[i, j] = -d0 * (kappa * (0.5 * (rs[i, j - 1] + rs[i, j]))
                             * ((rd[i, j] - rd[i, j - 1]) / hy))
    return f


@_jit
def rhs_pair_1d(ra, rb, h, d0, kappa):
    n = ra.shape[0]
    fa = cross_flux_1d(ra, rb, h, d0, kappa)
    fb = cross_flux_1d(rb, ra, h, d0, kappa)
    ta = np.empty(n)
    tb = np.empty(n)
    for i in range(n):
        ta[i] = (fa[i] - fa[i + 1]) / h
        tb[i] = (fb[i] - fb[i + 1]) / h
    return ta, tb


@_jit
def rhs_pair_2d(ra, rb, hx, hy, d0, kappa):
    nx, ny = ra.shape
    fax = cross_flux_2d_x(ra, rb, hx, d0, kappa)
    fay = cross_flux_2d_y(ra, rb, hy, d0, kappa)
    fbx = cross_flux_2d_x(rb, ra, hx, d0, kappa)
    fby = cross_flux_2d_y(rb, ra, hy, d0, kappa)
    ta = np.empty((nx, ny))
    tb = np.empty((nx, ny))
    for i in range(nx):
        for j in range(ny):
            ta[i, j] = (fax[i, j] - fax[i + 1, j]) / hx + (fay[i, j] - fay[i, j + 1]) / hy
            tb[i, j] = (fbx[i, j] - fbx[i + 1, j]) / hx + (fby[i, j] - fby[i, j + 1]) / hy
    return ta, tb


@_jit
def cross_only_rhs_1d(rs, rd, h, d0, kappa):
    n = rs.shape[0]
    f = cross_only_flux_1d(rs, rd, h, d0, kappa)
    out = np.empty(n)
    for i in range(n):
        out[i] = (f[i] - f[i + 1]) / h
    return out


@_jit
def cross_only_rhs_2d(rs, rd, hx, hy, d0, kappa):
    nx, ny = rs.shape
    fx = cross_only_flux_2d_x(rs, rd, hx, d0, kappa)
    fy = cross_only_flux_2d_y(rs, rd, hy, d0, kappa)
    out = np.empty((nx, ny))
    for i in range(nx):
        for j in range(ny):
            out[i, j] = (fx[i, j] - fx[i + 1, j]) / hx + (fy[i, j] - fy[i, j + 1]) / hy
    return out


@_jit
def full_density_rhs_1d(ra, rb, ga, gb, h, d0, two_beta):
    n = ra.shape[0]
    fa = cross_flux_1d(ra, gb, h, d0, two_beta)
    fb = cross_flux_1d(rb, ga, h, d0, two_beta)
    ta = np.empty(n)
    tb = np.empty(n)
    for i in range(n):
        ta[i] = (fa[i] - fa[i + 1]) / h
        tb[i] = (fb[i] - fb[i + 1]) / h
    return ta, tb


@_jit
def full_density_rhs_2d(ra, rb, ga, gb, hx, hy, d0, two_beta):
    nx, ny = ra.shape
    fax = cross_flux_2d_x(ra, gb, hx, d0, two_beta)
    fay = cross_flux_2d_y(ra, gb, hy, d0, two_beta)
    fbx = cross_flux_2d_x(rb, ga, hx, d0, two_beta)
    fby = cross_flux_2d_y(rb, ga, hy, d0, two_beta)
    ta = np.empty((nx, ny))
    tb = np.empty((nx, ny))
    for i in range(nx):
        for j in range(ny):
            ta[i, j] = (fax[i, j] - fax[i + 1, j]) / hx + (fay[i, j] - fay[i, j + 1]) / hy
            tb[i, j] = (fbx[i, j] - fbx[i + 1, j]) / hx + (fby[i, j] - fby[i, j + 1]) / hy
    return ta, tb


@_jit
def thomas_helmholtz_1d(b, alpha, h):
    n = b.shape[0]
    r = alpha / (h * h)
    cp = np.empty(n - 1)
    dp = np.empty(n)
    bet = 1.0 + r
    cp[0] = -r / bet
    dp[0] = b[0] / bet
    for i in range(1, n - 1):
        bet = (1.0 + 2.0 * r) + r * cp[i - 1]
        cp[i] = -r / bet
        dp[i] = (b[i] + r * dp[i - 1]) / bet
    bet = (1.0 + r) + r * cp[n - 2]
    dp[n - 1] = (b[n - 1] + r * dp[n - 2]) / bet
    x = np.empty(n)
    x[n - 1] = dp[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return x


# ---------------------------------------------------------------------------
# per-field state checks (first non-finite wins, then first argmin below -tol)
# ---------------------------------------------------------------------------

@_jit
def _scan_field_1d(arr, tol_neg):
    n = arr.shape[0]
    mn = np.inf
    mi = -1
    for i in range(n):
        v = arr[i]
        if math.isnan(v) or math.isinf(v):
            return STATUS_NONFINITE, i
        if v < mn:
            mn = v
            mi = i
    if mn < -tol_neg:
        return STATUS_NEGATIVE, mi
    return STATUS_OK, -1


@_jit
def _scan_field_2d(arr, tol_neg):
    nx, ny = arr.shape
    mn = np.inf
    mi = -1
    for i in range(nx):
        for j in range(ny):
            v = arr[i, j]
            if math.isnan(v) or math.isinf(v):
                return STATUS_NONFINITE, i * ny + j
            if v < mn:
                mn = v
                mi = i * ny + j
    if mn < -tol_neg:
        return STATUS_NEGATIVE, mi
    return STATUS_OK, -1


@_jit
def _max_1d(arr):
    m = arr[0]
    for i in range(1, arr.shape[0]):
        if arr[i] > m:
            m = arr[i]
    return m


@_jit
def _max_2d(arr):
    nx, ny = arr.shape
    m = arr[0, 0]
    for i in range(nx):
        for j in range(ny):
            if arr[i, j] > m:
                m = arr[i, j]
    return m


# ---------------------------------------------------------------------------
# fused explicit advance loops
# ---------------------------------------------------------------------------

@_jit
def advance_explicit_1d(ra, rb, h, d0, kappa, t, t_stop, safety, dt_max, dt_first,
                        tol_neg):
    n = ra.shape[0]
    fa = np.zeros(n + 1)
    fb = np.zeros(n + 1)
    steps = 0
    while t < t_stop:
        ma = _max_1d(ra)
        mb = _max_1d(rb)
        lam = 1.0 + kappa * (ma if ma > mb else mb)
        dt = safety * h * h / (2.0 * 1.0 * d0 * lam)
        if dt > dt_max:
            dt = dt_max
        if steps == 0 and dt > dt_first:
            dt = dt_first
        clamped = dt >= t_stop - t
        if clamped:
            dt = t_stop - t
        _fill_cross_flux_1d(fa, ra, rb, h, d0, kappa)
        _fill_cross_flux_1d(fb, rb, ra, h, d0, kappa)
        for i in range(n):
            ra[i] = ra[i] + dt * ((fa[i] - fa[i + 1]) / h)
            rb[i] = rb[i] + dt * ((fb[i] - fb[i + 1]) / h)
        t = t_stop if clamped else t + dt
        steps += 1
        status, idx = _scan_field_1d(ra, tol_neg)
        if status != STATUS_OK:
            return t, steps, status, 0, idx, t
        status, idx = _scan_field_1d(rb, tol_neg)
        if status != STATUS_OK:
            return t, steps, status, 1, idx, t
    return t, steps, STATUS_OK, -1, -1, t


@_jit
def advance_explicit_2d(ra, rb, hx, hy, d0, kappa, t, t_stop, safety, dt_max,
                        dt_first, tol_neg):
    nx, ny = ra.shape
    hmin = hx if hx < hy else hy
    fax = np.zeros((nx + 1, ny))
    fay = np.zeros((nx, ny + 1))
    fbx = np.zeros((nx + 1, ny))
    fby = np.zeros((nx, ny + 1))
    steps = 0
    while t < t_stop:
        ma = _max_2d(ra)
        mb = _max_2d(rb)
        lam = 1.0 + kappa * (ma if ma > mb else mb)
        dt = safety * hmin * hmin / (2.0 * 2.0 * d0 * lam)
        if dt > dt_max:
            dt = dt_max
        if steps == 0 and dt > dt_first:
            dt = dt_first
        clamped = dt >= t_stop - t
        if clamped:
            dt = t_stop - t
        _fill_cross_flux_2d_x(fax, ra, rb, hx, d0, kappa)
        _fill_cross_flux_2d_y(fay, ra, rb, hy, d0, kappa)
        _fill_cross_flux_2d_x(fbx, rb, ra, hx, d0, kappa)
        _fill_cross_flux_2d_y(fby, rb, ra, hy, d0, kappa)
        for i in range(nx):
            for j in range(ny):
                ra[i, j] = ra[i, j] + dt * ((fax[i, j] - fax[i + 1, j]) / hx
                                            + (fay[i, j] - fay[i, j + 1]) / hy)
                rb[i, j] = rb[i, j] + dt * ((fbx[i, j] - fbx[i + 1, j]) / hx
                                            + (fby[i, j] - fby[i, j + 1]) / hy)
        t = t_stop if clamped else t + dt
        steps += 1
        status, idx = _scan_field_2d(ra, tol_neg)
        if status != STATUS_OK:
            return t, steps, status, 0, idx, t
        status, idx = _scan_field_2d(rb, tol_neg)
        if status != STATUS_OK:
            return t, steps, status, 1, idx, t
    return t, steps, STATUS_OK, -1, -1, t


@_jit
def advance_full_1d(ra, rb, ga, gb, h, d0, kappa, two_beta, c, eps, t, t_stop,
                    safety, dt_max, dt_first, tol_neg):
    n = ra.shape[0]
    fa = np.zeros(n + 1)
    fb = np.zeros(n + 1)
    steps = 0
    while t < t_stop:
        mra = _max_1d(ra)
        mrb = _max_1d(rb)
        mr = mra if mra > mrb else mrb
        mga = _max_1d(ga)
        mgb = _max_1d(gb)
        mg = mga if mga > mgb else mgb
        ca = kappa * mr
        cb = two_beta * mg
        lam = 1.0 + (ca if ca > cb else cb)
        dt = safety * h * h / (2.0 * 1.0 * d0 * lam)
        if dt > dt_max:
            dt = dt_max
        if steps == 0 and dt > dt_first:
            dt = dt_first
        clamped = dt >= t_stop - t
        if clamped:
            dt = t_stop - t
        _fill_cross_flux_1d(fa, ra, gb, h, d0, two_beta)
        _fill_cross_flux_1d(fb, rb, ga, h, d0, two_beta)
        decay = math.exp(-dt / eps)
        for i in range(n):
            cr = c * ra[i]
            ga[i] = cr + (ga[i] - cr) * decay
            cr = c * rb[i]
            gb[i] = cr + (gb[i] - cr) * decay
        for i in range(n):
            ra[i] = ra[i] + dt * ((fa[i] - fa[i + 1]) / h)
            rb[i] = rb[i] + dt * ((fb[i] - fb[i + 1]) / h)
        t = t_stop if clamped else t + dt
        steps += 1
        status, idx = _scan_field_1d(ra, tol_neg)
        if status != STATUS_OK:
            return t, steps, status, 0, idx, t
        status, idx = _scan_field_1d(rb, tol_neg)
        if status != STATUS_OK:
            return t, steps, status, 1, idx, t
        status, idx = _scan_field_1d(ga, tol_neg)
        if status != STATUS_OK:
            return t, steps, status, 2, idx, t
        status, idx = _scan_field_1d(gb, tol_neg)
        if status != STATUS_OK:
            return t, steps, status, 3, idx, t
    return t, steps, STATUS_OK, -1, -1, t


@_jit
def advance_full_2d(ra, rb, ga, gb, hx, hy, d0, kappa, two_beta, c, eps, t, t_stop,
                    safety, dt_max, dt_first, tol_neg):
    nx, ny = ra.shape
    hmin = hx if hx < hy else hy
    fax = np.zeros((nx + 1, ny))
    fay = np.zeros((nx, ny + 1))
    fbx = np.zeros((nx + 1, ny))
    fby = np.zeros((nx, ny + 1))
    steps = 0
    while t < t_stop:
        mra = _max_2d(ra)
        mrb = _max_2d(rb)
        mr = mra if mra > mrb else mrb
        mga = _max_2d(ga)
        mgb = _max_2d(gb)
        mg = mga if mga > mgb else mgb
        ca = kappa * mr
        cb = two_beta * mg
        lam = 1.0 + (ca if ca > cb else cb)
        dt = safety * hmin * hmin / (2.0 * 2.0 * d0 * lam)
        if dt > dt_max:
            dt = dt_max
        if steps == 0 and dt > dt_first:
            dt = dt_first
        clamped = dt >= t_stop - t
        if clamped:
            dt = t_stop - t
        _fill_cross_flux_2d_x(fax, ra, gb, hx, d0, two_beta)
        _fill_cross_flux_2d_y(fay, ra, gb, hy, d0, two_beta)
        _fill_cross_flux_2d_x(fbx, rb, ga, hx, d0, two_beta)
        _fill_cross_flux_2d_y(fby, rb, ga, hy, d0, two_beta)
        decay = math.exp(-dt / eps)
        for i in range(nx):
            for j in range(ny):
                cr = c * ra[i, j]
                ga[i, j] = cr + (ga[i, j] - cr) * decay
                cr = c * rb[i, j]
                gb[i, j] = cr + (gb[i, j] - cr) * decay
        for i in range(nx):
            for j in range(ny):
                ra[i, j] = ra[i, j] + dt * ((fax[i, j] - fax[i + 1, j]) / hx
                                            + (fay[i, j] - fay[i, j + 1]) / hy)
                rb[i, j] = rb[i, j] + dt * ((fbx[i, j] - fbx[i + 1, j]) / hx
                                            + (fby[i, j] - fby[i, j + 1]) / hy)
        t = t_stop if clamped else t + dt
        steps += 1
        status, idx = _scan_field_2d(ra, tol_neg)
        if status != STATUS_OK:
            return t, steps, status, 0, idx, t
        status, idx = _scan_field_2d(rb, tol_neg)
        if status != STATUS_OK:
            return t, steps, status, 1, idx, t
        status, idx = _scan_field_2d(ga, tol_neg)
        if status != STATUS_OK:
            return t, steps, status, 2, idx, t
        status, idx = _scan_field_2d(gb, tol_neg)
        if status != STATUS_OK:
            return t, steps, status, 3, idx, t
    return t, steps, STATUS_OK, -1, -1, t
