"""Nopython kernels for trajectory integration and field sampling.

Everything here is pure-function on scalars and arrays so batches can run
under prange with bitwise-reproducible results for any thread count: each
trajectory draws from its own counter-based stream (see rng.py) and writes
only to its own output slot.

Field convention: values[i, j] = f(x = i*h, y = j*h), both axes periodic.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit, prange

from .rng import normal_pair

#: gradients below this magnitude are treated as zero in V = phi(chi|g|) g/|g|
G_FLOOR = 1e-14


@njit(cache=True, inline="always")
def wrap1(v, L):
    w = v % L
    if w >= L:
        w -= L
    elif w < 0.0:
        w += L
    return w


@njit(cache=True, inline="always")
def shear_vel(y, A, L, cutoff):
    s = A * math.sin(2.0 * math.pi * (y - L / 2.0) / L)
    if s > cutoff:
        return cutoff
    if s < -cutoff:
        return -cutoff
    return s


@njit(cache=True, inline="always")
def phi_cut(r, vmax):
    # identity below 0.9*vmax, saturated above 1.1*vmax, C^2 monotone
    # quintic-Hermite blend in between (the degree-5 coefficient vanishes
    # for this symmetric window)
    a = 0.9 * vmax
    if r <= a:
        return r
    if r >= 1.1 * vmax:
        return vmax
    t = (r - a) / (0.2 * vmax)
    return a + vmax * (0.2 * t - 0.2 * t * t * t + 0.1 * t * t * t * t)


@njit(cache=True, inline="always")
def _bspline_w(t):
    # cubic B-spline weights for the four nodes around a point with
    # fractional offset t in [0, 1); complement keeps the sum exactly 1
    s = 1.0 - t
    w0 = s * s * s / 6.0
    w3 = t * t * t / 6.0
    w1 = (4.0 - 6.0 * t * t + 3.0 * t * t * t) / 6.0
    return w0, w1, 1.0 - w0 - w1 - w3, w3


@njit(cache=True, inline="always")
def spline_value(coef, n, u, v):
    """Periodic bicubic B-spline at (u, v) in grid-index units."""
    iu = int(math.floor(u))
    iv = int(math.floor(v))
    wu0, wu1, wu2, wu3 = _bspline_w(u - iu)
    wv0, wv1, wv2, wv3 = _bspline_w(v - iv)
    i0 = (iu - 1) % n
    i1 = iu % n
    i2 = (iu + 1) % n
    i3 = (iu + 2) % n
    j0 = (iv - 1) % n
    j1 = iv % n
    j2 = (iv + 1) % n
    j3 = (iv + 2) % n
    r0 = wv0 * coef[i0, j0] + wv1 * coef[i0, j1] + wv2 * coef[i0, j2] + wv3 * coef[i0, j3]
    r1 = wv0 * coef[i1, j0] + wv1 * coef[i1, j1] + wv2 * coef[i1, j2] + wv3 * coef[i1, j3]
    r2 = wv0 * coef[i2, j0] + wv1 * coef[i2, j1] + wv2 * coef[i2, j2] + wv3 * coef[i2, j3]
    r3 = wv0 * coef[i3, j0] + wv1 * coef[i3, j1] + wv2 * coef[i3, j2] + wv3 * coef[i3, j3]
    return wu0 * r0 + wu1 * r1 + wu2 * r2 + wu3 * r3


@njit(cache=True, inline="always")
def spline_gradient(coef, n, h, x, y):
    """Centered differences of the interpolant with step h/2."""
    u = x / h
    v = y / h
    gx = (spline_value(coef, n, u + 0.5, v) - spline_value(coef, n, u - 0.5, v)) / h
    gy = (spline_value(coef, n, u, v + 0.5) - spline_value(coef, n, u, v - 0.5)) / h
    return gx, gy


@njit(cache=True, inline="always")
def chemo_vel(gx, gy, chi, vmax):
    gn = math.sqrt(gx * gx + gy * gy)
    if gn <= G_FLOOR:
        return 0.0, 0.0
    s = phi_cut(chi * gn, vmax) / gn
    return s * gx, s * gy


@njit(cache=True, inline="always")
def drift_at(x, y, L, A, cutoff, chi, vmax, has_chem, coef, n, h):
    vx = shear_vel(y, A, L, cutoff)
    vy = 0.0
    if has_chem and chi > 0.0 and vmax > 0.0:
        gx, gy = spline_gradient(coef, n, h, x, y)
        cvx, cvy = chemo_vel(gx, gy, chi, vmax)
        vx += cvx
        vy += cvy
    return vx, vy


@njit(cache=True, nogil=True)
def run_single(x0, y0, key, n_max, L, A, nu, chi, vmax, cutoff, delta, dt,
               substep_on, stochastic, has_chem, coef, grid_n, h,
               record, path_x, path_y):
    """One trajectory; returns (hit, steps, x, y).

    Hit test is against the disk of radius delta at (L/2, L/2) after every
    (sub)step. When |drift|*dt exceeds delta/2 the step is split into m
    equal substeps, each with fresh sqrt(dt/m)-scaled noise, so a saturated
    shear cannot carry the agent across the target unseen. A hit during a
    substep is attributed to the enclosing dt step.
    """
    cx = L / 2.0
    cy = L / 2.0
    x = wrap1(x0, L)
    y = wrap1(y0, L)
    if record:
        path_x[0] = x
        path_y[0] = y
    ddx = x - cx
    ddy = y - cy
    if ddx * ddx + ddy * ddy <= delta * delta:
        return 1, 0, x, y
    half = 0.5 * delta
    k = 0
    hit = 0
    step = 0
    for step in range(1, n_max + 1):
        dvx, dvy = drift_at(x, y, L, A, cutoff, chi, vmax, has_chem, coef, grid_n, h)
        m = 1
        if substep_on:
            move = math.sqrt(dvx * dvx + dvy * dvy) * dt
            if move > half:
                m = int(math.ceil(move / half))
        dti = dt / m
        sq = math.sqrt(nu * dti)
        for j in range(m):
            if j > 0:
                dvx, dvy = drift_at(x, y, L, A, cutoff, chi, vmax, has_chem,
                                    coef, grid_n, h)
            z1 = 0.0
            z2 = 0.0
            if stochastic:
                z1, z2 = normal_pair(key, k)
                k += 1
            x = wrap1(x + dvx * dti + sq * z1, L)
            y = wrap1(y + dvy * dti + sq * z2, L)
            ddx = x - cx
            ddy = y - cy
            if ddx * ddx + ddy * ddy <= delta * delta:
                hit = 1
                break
        if record:
            path_x[step] = x
            path_y[step] = y
        if hit:
            break
    return hit, step, x, y


@njit(cache=True, nogil=True, parallel=True)
def run_batch(xs, ys, keys, n_max, L, A, nu, chi, vmax, cutoff, delta, dt,
              substep_on, stochastic, has_chem, coef, grid_n, h,
              out_hit, out_steps, out_x, out_y):
    dummy = np.empty(1)
    for i in prange(xs.shape[0]):
        hit, steps, x, y = run_single(
            xs[i], ys[i], keys[i], n_max, L, A, nu, chi, vmax, cutoff, delta,
            dt, substep_on, stochastic, has_chem, coef, grid_n, h,
            False, dummy, dummy)
        out_hit[i] = hit
        out_steps[i] = steps
        out_x[i] = x
        out_y[i] = y


@njit(cache=True, inline="always")
def _profile_at(prof, n, h, y):
    u = y / h
    i0 = int(math.floor(u))
    t = u - i0
    return prof[i0 % n] * (1.0 - t) + prof[(i0 + 1) % n] * t


@njit(cache=True, nogil=True)
def run_single_1d(y0, key, n_max, L, nu, delta, dt, prof, h):
    """1D trajectory on the torus with drift linearly interpolated from prof."""
    c = L / 2.0
    y = wrap1(y0, L)
    if abs(y - c) <= delta:
        return 1, 0, y
    n = prof.shape[0]
    sq = math.sqrt(nu * dt)
    hit = 0
    step = 0
    for step in range(1, n_max + 1):
        v = _profile_at(prof, n, h, y)
        z1, z2 = normal_pair(key, step - 1)
        y = wrap1(y + v * dt + sq * z1, L)
        if abs(y - c) <= delta:
            hit = 1
            break
    return hit, step, y


@njit(cache=True, nogil=True, parallel=True)
def run_batch_1d(y0s, keys, n_max, L, nu, delta, dt, prof, h,
                 out_hit, out_steps, out_y):
    for i in prange(y0s.shape[0]):
        hit, steps, y = run_single_1d(y0s[i], keys[i], n_max, L, nu, delta,
                                      dt, prof, h)
        out_hit[i] = hit
        out_steps[i] = steps
        out_y[i] = y
