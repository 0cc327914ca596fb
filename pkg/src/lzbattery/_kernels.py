"""Compiled inner loops for Chebyshev propagation over a CSR off-diagonal part."""
from __future__ import annotations

import math

import numpy as np
from numba import njit

BESSEL_CUTOFF = 1e-18

DRIVE_NONE = 0
DRIVE_LINEAR = 1
DRIVE_SIN = 2


@njit(cache=True)
def bessel_j_orders(z, out):
    """Fill ``out[:K]`` with J_0(z) .. J_{K-1}(z) by Miller's backward recurrence.

    ``K`` is the first order past ``|z|`` whose magnitude drops below
    ``BESSEL_CUTOFF``; it is returned. ``out`` must hold at least
    ``|z| + 15 |z|**(1/3) + 32`` entries.
    """
    az = abs(z)
    start = int(az + 15.0 * az ** (1.0 / 3.0) + 30)
    if start % 2 == 1:
        start += 1
    if az == 0.0:
        out[0] = 1.0
        return 1
    if az < 1e-9:
        # the recurrence ratio 2k/z overflows; J_2 is already below the cutoff
        out[0] = 1.0 - 0.25 * z * z
        out[1] = 0.5 * z
        return 2
    f_next = 0.0
    f_cur = 1e-300
    norm = 0.0
    for k in range(start, -1, -1):
        if k < out.shape[0]:
            out[k] = f_cur
        if k == 0:
            norm += f_cur
        elif k % 2 == 0:
            norm += 2.0 * f_cur
        if k == 0:
            break
        f_prev = (2.0 * k / az) * f_cur - f_next
        f_next = f_cur
        f_cur = f_prev
        if abs(f_cur) > 1e200:
            # rescale everything already stored to stay in range
            for j in range(k - 1, min(start, out.shape[0] - 1) + 1):
                out[j] *= 1e-200
            f_cur *= 1e-200
            f_next *= 1e-200
            norm *= 1e-200
    n_used = min(start + 1, out.shape[0])
    count = n_used
    for k in range(n_used):
        out[k] /= norm
        if z < 0.0 and k % 2 == 1:
            out[k] = -out[k]
    for k in range(n_used):
        if k > az and abs(out[k]) < BESSEL_CUTOFF:
            count = k
            break
    return count


def bessel_buffer_size(z_max: float) -> int:
    return int(z_max + 15.0 * z_max ** (1.0 / 3.0) + 34)


@njit(cache=True)
def _scaled_apply(indptr, indices, data, shifted, inv_half, x, y):
    """y = ((O x) / half) + shifted * x."""
    n = x.shape[0]
    for r in range(n):
        acc = 0j
        for p in range(indptr[r], indptr[r + 1]):
            acc += data[p] * x[indices[p]]
        y[r] = acc * inv_half + shifted[r] * x[r]


@njit(cache=True)
def chebyshev_apply(indptr, indices, data, radius, diag, v, t, out, work, shifted):
    """out = exp(-i t (O + diag(diag))) v with O given in CSR form.

    ``radius`` holds the off-diagonal absolute row sums (Gershgorin radii).
    ``work`` is a (3, n) complex scratch array, ``shifted`` a length-n float one.
    """
    n = v.shape[0]
    lo = np.inf
    hi = -np.inf
    for r in range(n):
        a = diag[r] - radius[r]
        b = diag[r] + radius[r]
        if a < lo:
            lo = a
        if b > hi:
            hi = b
    if indptr[n] == 0:
        # purely diagonal operator: exact phases
        for r in range(n):
            out[r] = complex(math.cos(t * diag[r]), -math.sin(t * diag[r])) * v[r]
        return
    center = 0.5 * (hi + lo)
    half = 0.5 * (hi - lo)
    phase = complex(math.cos(t * center), -math.sin(t * center))
    if half * abs(t) < 1e-300:
        for r in range(n):
            out[r] = phase * v[r]
        return
    z = t * half
    coeffs = np.empty(int(abs(z) + 15.0 * abs(z) ** (1.0 / 3.0) + 34))
    k_max = bessel_j_orders(z, coeffs)
    for r in range(n):
        shifted[r] = (diag[r] - center) / half
    inv_half = 1.0 / half
    t_prev = work[0]
    t_cur = work[1]
    t_next = work[2]
    for r in range(n):
        t_prev[r] = v[r]
        out[r] = coeffs[0] * v[r]
    if k_max > 1:
        _scaled_apply(indptr, indices, data, shifted, inv_half, t_prev, t_cur)
        c = -2j * coeffs[1]
        for r in range(n):
            out[r] += c * t_cur[r]
    for k in range(2, k_max):
        _scaled_apply(indptr, indices, data, shifted, inv_half, t_cur, t_next)
        m = k % 4
        if m == 0:
            c = 2.0 * coeffs[k] + 0j
        elif m == 1:
            c = -2j * coeffs[k]
        elif m == 2:
            c = -2.0 * coeffs[k] + 0j
        else:
            c = 2j * coeffs[k]
        for r in range(n):
            val = 2.0 * t_next[r] - t_prev[r]
            t_next[r] = val
            out[r] += c * val
        tmp = t_prev
        t_prev = t_cur
        t_cur = t_next
        t_next = tmp
    for r in range(n):
        out[r] *= phase


@njit(cache=True)
def drive_field(kind, p1, p2, t):
    if kind == DRIVE_LINEAR:
        return p1 * t
    if kind == DRIVE_SIN:
        return p1 * math.sin(p2 * t)
    return 0.0


@njit(cache=True)
def midpoint_run(indptr, indices, data, radius, base_diag, generator, kind, p1, p2,
                 psi0, n_samples, steps_per_sample, dt, states):
    """Midpoint-rule propagation; fills ``states[s]`` at times ``s * steps_per_sample * dt``."""
    n = psi0.shape[0]
    work = np.empty((3, n), dtype=np.complex128)
    shifted = np.empty(n)
    psi = psi0.copy()
    nxt = np.empty(n, dtype=np.complex128)
    diag = np.empty(n)
    for r in range(n):
        states[0, r] = psi0[r]
    for s in range(1, n_samples):
        base = (s - 1) * steps_per_sample
        for k in range(steps_per_sample):
            h = drive_field(kind, p1, p2, (base + k + 0.5) * dt)
            for r in range(n):
                diag[r] = base_diag[r] + h * generator[r]
            chebyshev_apply(indptr, indices, data, radius, diag, psi, dt, nxt, work, shifted)
            tmp = psi
            psi = nxt
            nxt = tmp
        for r in range(n):
            states[s, r] = psi[r]
