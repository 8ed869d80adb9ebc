"""Vectorized NumPy stencil and stepping kernels (reference backend).

Every function here has a numba twin in :mod:`crossdiff.kernels.numba_backend`
built from the same per-element expression trees, so both backends produce
bit-identical trajectories (IEEE-754 ops in the same order). Keep the two
files in sync when touching any arithmetic.

Conventions:
  * face arrays include the boundary faces, which are identically zero
    (homogeneous Neumann as exact zero flux);
  * fluxes are transport fluxes, so density equations advance with the
    divergence of the negated flux;
  * advance_* functions mutate the density/marking arrays in place and
    return ``(t, steps, status, field_id, flat_index, bad_time)``.
"""

from __future__ import annotations

import functools
import math

import numpy as np

NAME = "numpy"

STATUS_OK = 0
STATUS_NEGATIVE = 1
STATUS_NONFINITE = 2

FIELD_NAMES = ("rho_a", "rho_b", "g_a", "g_b")


# ---------------------------------------------------------------------------
# stencil operators
# ---------------------------------------------------------------------------

def face_gradient_1d(u, h):
    g = np.zeros(u.shape[0] + 1)
    g[1:-1] = (u[1:] - u[:-1]) / h
    return g


def face_gradient_2d_x(u, hx):
    nx, ny = u.shape
    g = np.zeros((nx + 1, ny))
    g[1:-1, :] = (u[1:, :] - u[:-1, :]) / hx
    return g


def face_gradient_2d_y(u, hy):
    nx, ny = u.shape
    g = np.zeros((nx, ny + 1))
    g[:, 1:-1] = (u[:, 1:] - u[:, :-1]) / hy
    return g


def divergence_1d(f, h):
    return (f[1:] - f[:-1]) / h


def divergence_2d(fx, fy, hx, hy):
    return (fx[1:, :] - fx[:-1, :]) / hx + (fy[:, 1:] - fy[:, :-1]) / hy


def laplacian_1d(u, h):
    return divergence_1d(face_gradient_1d(u, h), h)


def laplacian_2d(u, hx, hy):
    return divergence_2d(face_gradient_2d_x(u, hx), face_gradient_2d_y(u, hy), hx, hy)


def cross_flux_1d(rs, rd, h, d0, kappa):
    """Transport flux -d0*(grad rs + kappa * iface(rs) * grad rd), zero at walls."""
    f = np.zeros(rs.shape[0] + 1)
    f[1:-1] = -d0 * ((rs[1:] - rs[:-1]) / h
                     + kappa * (0.5 * (rs[:-1] + rs[1:])) * ((rd[1:] - rd[:-1]) / h))
    return f


def cross_flux_2d_x(rs, rd, hx, d0, kappa):
    nx, ny = rs.shape
    f = np.zeros((nx + 1, ny))
    f[1:-1, :] = -d0 * ((rs[1:, :] - rs[:-1, :]) / hx
                        + kappa * (0.5 * (rs[:-1, :] + rs[1:, :]))
                        * ((rd[1:, :] - rd[:-1, :]) / hx))
    return f


def cross_flux_2d_y(rs, rd, hy, d0, kappa):
    nx, ny = rs.shape
    f = np.zeros((nx, ny + 1))
    f[:, 1:-1] = -d0 * ((rs[:, 1:] - rs[:, :-1]) / hy
                        + kappa * (0.5 * (rs[:, :-1] + rs[:, 1:]))
                        * ((rd[:, 1:] - rd[:, :-1]) / hy))
    return f


def cross_only_flux_1d(rs, rd, h, d0, kappa):
    """Just the cross part -d0*kappa*iface(rs)*grad rd (IMEX explicit piece)."""
    f = np.zeros(rs.shape[0] + 1)
    f[1:-1] = -d0 * (kappa * (0.5 * (rs[:-1] + rs[1:])) * ((rd[1:] - rd[:-1]) / h))
    return f


def cross_only_flux_2d_x(rs, rd, hx, d0, kappa):
    nx, ny = rs.shape
    f = np.zeros((nx + 1, ny))
    f[1:-1, :] = -d0 * (kappa * (0.5 * (rs[:-1, :] + rs[1:, :]))
                        * ((rd[1:, :] - rd[:-1, :]) / hx))
    return f


def cross_only_flux_2d_y(rs, rd, hy, d0, kappa):
    nx, ny = rs.shape
    f = np.zeros((nx, ny + 1))
    f[:, 1:-1] = -d0 * (kappa * (0.5 * (rs[:, :-1] + rs[:, 1:]))
                        * ((rd[:, 1:] - rd[:, :-1]) / hy))
    return f


def rhs_pair_1d(ra, rb, h, d0, kappa):
    """Density tendencies: divergence of the negated cross fluxes."""
    fa = cross_flux_1d(ra, rb, h, d0, kappa)
    fb = cross_flux_1d(rb, ra, h, d0, kappa)
    return (fa[:-1] - fa[1:]) / h, (fb[:-1] - fb[1:]) / h


def rhs_pair_2d(ra, rb, hx, hy, d0, kappa):
    fax = cross_flux_2d_x(ra, rb, hx, d0, kappa)
    fay = cross_flux_2d_y(ra, rb, hy, d0, kappa)
    fbx = cross_flux_2d_x(rb, ra, hx, d0, kappa)
    fby = cross_flux_2d_y(rb, ra, hy, d0, kappa)
    ta = (fax[:-1, :] - fax[1:, :]) / hx + (fay[:, :-1] - fay[:, 1:]) / hy
    tb = (fbx[:-1, :] - fbx[1:, :]) / hx + (fby[:, :-1] - fby[:, 1:]) / hy
    return ta, tb


def cross_only_rhs_1d(rs, rd, h, d0, kappa):
    f = cross_only_flux_1d(rs, rd, h, d0, kappa)
    return (f[:-1] - f[1:]) / h


def cross_only_rhs_2d(rs, rd, hx, hy, d0, kappa):
    fx = cross_only_flux_2d_x(rs, rd, hx, d0, kappa)
    fy = cross_only_flux_2d_y(rs, rd, hy, d0, kappa)
    return (fx[:-1, :] - fx[1:, :]) / hx + (fy[:, :-1] - fy[:, 1:]) / hy


def full_density_rhs_1d(ra, rb, ga, gb, h, d0, two_beta):
    """Density tendencies of the four-field system: drive is the rival marking."""
    fa = cross_flux_1d(ra, gb, h, d0, two_beta)
    fb = cross_flux_1d(rb, ga, h, d0, two_beta)
    return (fa[:-1] - fa[1:]) / h, (fb[:-1] - fb[1:]) / h


def full_density_rhs_2d(ra, rb, ga, gb, hx, hy, d0, two_beta):
    fax = cross_flux_2d_x(ra, gb, hx, d0, two_beta)
    fay = cross_flux_2d_y(ra, gb, hy, d0, two_beta)
    fbx = cross_flux_2d_x(rb, ga, hx, d0, two_beta)
    fby = cross_flux_2d_y(rb, ga, hy, d0, two_beta)
    ta = (fax[:-1, :] - fax[1:, :]) / hx + (fay[:, :-1] - fay[:, 1:]) / hy
    tb = (fbx[:-1, :] - fbx[1:, :]) / hx + (fby[:, :-1] - fby[:, 1:]) / hy
    return ta, tb


# ---------------------------------------------------------------------------
# tridiagonal Helmholtz solve,  (I - alpha*Lap) x = b  with Neumann Lap
# ---------------------------------------------------------------------------

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
# fused explicit advance loops
# ---------------------------------------------------------------------------

def _quiet_overflow(fn):
    """Blow-ups overflow to inf by design; the per-step scan reports them."""
    @functools.wraps(fn)
    def wrapper(*args):
        with np.errstate(over="ignore", invalid="ignore"):
            return fn(*args)
    return wrapper


def _scan_field(arr, tol_neg):
    """(status, flat_index) for one field; non-finite outranks negative.

    NaN poisons min, -inf shows in min, +inf in max, so two reductions cover
    the finiteness check; the offending index is located only on failure.
    """
    flat = arr.ravel()
    mn = float(flat.min())
    mx = float(flat.max())
    if math.isnan(mn) or math.isinf(mn) or math.isinf(mx):
        bad = np.flatnonzero(~np.isfinite(flat))
        return STATUS_NONFINITE, int(bad[0])
    if mn < -tol_neg:
        return STATUS_NEGATIVE, int(flat.argmin())
    return STATUS_OK, -1


def _scan_pair(ra, rb, tol_neg):
    st, idx = _scan_field(ra, tol_neg)
    if st != STATUS_OK:
        return st, 0, idx
    st, idx = _scan_field(rb, tol_neg)
    if st != STATUS_OK:
        return st, 1, idx
    return STATUS_OK, -1, -1


@_quiet_overflow
def advance_explicit_1d(ra, rb, h, d0, kappa, t, t_stop, safety, dt_max, dt_first,
                        tol_neg):
    steps = 0
    while t < t_stop:
        lam = 1.0 + kappa * max(float(ra.max()), float(rb.max()))
        dt = safety * h * h / (2.0 * 1.0 * d0 * lam)
        if dt > dt_max:
            dt = dt_max
        if steps == 0 and dt > dt_first:
            dt = dt_first
        clamped = dt >= t_stop - t
        if clamped:
            dt = t_stop - t
        fa = cross_flux_1d(ra, rb, h, d0, kappa)
        fb = cross_flux_1d(rb, ra, h, d0, kappa)
        ra += dt * ((fa[:-1] - fa[1:]) / h)
        rb += dt * ((fb[:-1] - fb[1:]) / h)
        t = t_stop if clamped else t + dt
        steps += 1
        status, fid, idx = _scan_pair(ra, rb, tol_neg)
        if status != STATUS_OK:
            return t, steps, status, fid, idx, t
    return t, steps, STATUS_OK, -1, -1, t


@_quiet_overflow
def advance_explicit_2d(ra, rb, hx, hy, d0, kappa, t, t_stop, safety, dt_max,
                        dt_first, tol_neg):
    hmin = hx if hx < hy else hy
    steps = 0
    while t < t_stop:
        lam = 1.0 + kappa * max(float(ra.max()), float(rb.max()))
        dt = safety * hmin * hmin / (2.0 * 2.0 * d0 * lam)
        if dt > dt_max:
            dt = dt_max
        if steps == 0 and dt > dt_first:
            dt = dt_first
        clamped = dt >= t_stop - t
        if clamped:
            dt = t_stop - t
        fax = cross_flux_2d_x(ra, rb, hx, d0, kappa)
        fay = cross_flux_2d_y(ra, rb, hy, d0, kappa)
        fbx = cross_flux_2d_x(rb, ra, hx, d0, kappa)
        fby = cross_flux_2d_y(rb, ra, hy, d0, kappa)
        ra += dt * ((fax[:-1, :] - fax[1:, :]) / hx + (fay[:, :-1] - fay[:, 1:]) / hy)
        rb += dt * ((fbx[:-1, :] - fbx[1:, :]) / hx + (fby[:, :-1] - fby[:, 1:]) / hy)
        t = t_stop if clamped else t + dt
        steps += 1
        status, fid, idx = _scan_pair(ra, rb, tol_neg)
        if status != STATUS_OK:
            return t, steps, status, fid, idx, t
    return t, steps, STATUS_OK, -1, -1, t


def _scan_four(ra, rb, ga, gb, tol_neg):
    for fid, arr in enumerate((ra, rb, ga, gb)):
        st, idx = _scan_field(arr, tol_neg)
        if st != STATUS_OK:
            return st, fid, idx
    return STATUS_OK, -1, -1


@_quiet_overflow
def advance_full_1d(ra, rb, ga, gb, h, d0, kappa, two_beta, c, eps, t, t_stop,
                    safety, dt_max, dt_first, tol_neg):
    steps = 0
    while t < t_stop:
        mr = max(float(ra.max()), float(rb.max()))
        mg = max(float(ga.max()), float(gb.max()))
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
        fa = cross_flux_1d(ra, gb, h, d0, two_beta)
        fb = cross_flux_1d(rb, ga, h, d0, two_beta)
        decay = math.exp(-dt / eps)
        ga[:] = (c * ra) + (ga - (c * ra)) * decay
        gb[:] = (c * rb) + (gb - (c * rb)) * decay
        ra += dt * ((fa[:-1] - fa[1:]) / h)
        rb += dt * ((fb[:-1] - fb[1:]) / h)
        t = t_stop if clamped else t + dt
        steps += 1
        status, fid, idx = _scan_four(ra, rb, ga, gb, tol_neg)
        if status != STATUS_OK:
            return t, steps, status, fid, idx, t
    return t, steps, STATUS_OK, -1, -1, t


@_quiet_overflow
def advance_full_2d(ra, rb, ga, gb, hx, hy, d0, kappa, two_beta, c, eps, t, t_stop,
                    safety, dt_max, dt_first, tol_neg):
    hmin = hx if hx < hy else hy
    steps = 0
    while t < t_stop:
        mr = max(float(ra.max()), float(rb.max()))
        mg = max(float(ga.max()), float(gb.max()))
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
        fax = cross_flux_2d_x(ra, gb, hx, d0, two_beta)
        fay = cross_flux_2d_y(ra, gb, hy, d0, two_beta)
        fbx = cross_flux_2d_x(rb, ga, hx, d0, two_beta)
        fby = cross_flux_2d_y(rb, ga, hy, d0, two_beta)
        decay = math.exp(-dt / eps)
        ga[:] = (c * ra) + (ga - (c * ra)) * decay
        gb[:] = (c * rb) + (gb - (c * rb)) * decay
        ra += dt * ((fax[:-1, :] - fax[1:, :]) / hx + (fay[:, :-1] - fay[:, 1:]) / hy)
        rb += dt * ((fbx[:-1, :] - fbx[1:, :]) / hx + (fby[:, :-1] - fby[:, 1:]) / hy)
        t = t_stop if clamped else t + dt
        steps += 1
        status, fid, idx = _scan_four(ra, rb, ga, gb, tol_neg)
        if status != STATUS_OK:
            return t, steps, status, fid, idx, t
    return t, steps, STATUS_OK, -1, -1, t
