"""Compiled inner loops: integrator step blocks and Gray-code enumeration.

All integrators take the symmetric Hamiltonian coupling matrix ``jmat`` for
the energy ``offset + h.z + sum_{i<j} J_ij z_i z_j`` (minimised).  The
coupling force therefore enters with a minus sign: the drive on spin ``i``
is ``-d/dx_i`` of the coupling energy, i.e. ``-(J x)_i`` up to gain
factors.

Each block kernel advances the state arrays in place for ``nsteps`` Euler
steps of size ``dt`` and returns ``(t_end, fail)`` where ``fail`` is the
0-based offset of the first step that produced a non-finite value, or -1
when the whole block stayed finite.  Updates are simultaneous: all
derivatives are evaluated at the step-start state before any component is
written.  Time is advanced by repeated ``t += dt`` so an N-step block is
bit-identical to N single-step calls.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def cim_cac(x, e, jmat, zeta, p_end, alpha, beta, dt, t0, t_total, nsteps, clamp, e_lo, e_hi, noise):
    n = x.shape[0]
    t = t0
    dx = np.empty(n)
    de = np.empty(n)
    for k in range(nsteps):
        p = p_end * (t / t_total)
        for i in range(n):
            g = 0.0
            for j in range(n):
                g += jmat[i, j] * x[j]
            dx[i] = -x[i] ** 3 + (p - 1.0) * x[i] - e[i] * zeta * g
            de[i] = -beta * e[i] * (x[i] * x[i] - alpha)
        for i in range(n):
            x[i] += dt * dx[i]
            e[i] += dt * de[i]
        if noise.shape[0] > 0:
            for i in range(n):
                x[i] += noise[k, i]
        for i in range(n):
            if not (np.isfinite(x[i]) and np.isfinite(e[i])):
                return t, k
        for i in range(n):
            if x[i] > clamp:
                x[i] = clamp
            elif x[i] < -clamp:
                x[i] = -clamp
            if e[i] != 0.0:
                if e[i] < e_lo:
                    e[i] = e_lo
                elif e[i] > e_hi:
                    e[i] = e_hi
        t += dt
    return t, -1


@njit(cache=True, nogil=True)
def cim_cfc(x, e, jmat, zeta, p_end, alpha, beta, dt, t0, t_total, nsteps, clamp, e_lo, e_hi, noise):
    n = x.shape[0]
    t = t0
    dx = np.empty(n)
    de = np.empty(n)
    for k in range(nsteps):
        p = p_end * (t / t_total)
        for i in range(n):
            g = 0.0
            for j in range(n):
                g += jmat[i, j] * x[j]
            z = e[i] * zeta * g
            dx[i] = -x[i] ** 3 + (p - 1.0) * x[i] - z
            de[i] = -beta * e[i] * (z * z - alpha)
        for i in range(n):
            x[i] += dt * dx[i]
            e[i] += dt * de[i]
        if noise.shape[0] > 0:
            for i in range(n):
                x[i] += noise[k, i]
        for i in range(n):
            if not (np.isfinite(x[i]) and np.isfinite(e[i])):
                return t, k
        for i in range(n):
            if x[i] > clamp:
                x[i] = clamp
            elif x[i] < -clamp:
                x[i] = -clamp
            if e[i] != 0.0:
                if e[i] < e_lo:
                    e[i] = e_lo
                elif e[i] > e_hi:
                    e[i] = e_hi
        t += dt
    return t, -1


@njit(cache=True, nogil=True)
def cim_sfc(x, e, jmat, zeta, p_end, beta, c, k_fb, dt, t0, t_total, nsteps, clamp, noise):
    n = x.shape[0]
    t = t0
    dx = np.empty(n)
    de = np.empty(n)
    for k in range(nsteps):
        p = p_end * (t / t_total)
        for i in range(n):
            g = 0.0
            for j in range(n):
                g += jmat[i, j] * x[j]
            z = zeta * g
            dx[i] = -x[i] ** 3 + (p - 1.0) * x[i] - np.tanh(c * z) - k_fb * (z - e[i])
            de[i] = -beta * (e[i] - z)
        for i in range(n):
            x[i] += dt * dx[i]
            e[i] += dt * de[i]
        if noise.shape[0] > 0:
            for i in range(n):
                x[i] += noise[k, i]
        for i in range(n):
            if not (np.isfinite(x[i]) and np.isfinite(e[i])):
                return t, k
        for i in range(n):
            if x[i] > clamp:
                x[i] = clamp
            elif x[i] < -clamp:
                x[i] = -clamp
        t += dt
    return t, -1


@njit(cache=True, nogil=True)
def dsb(x, mom, jmat, a0, c0, dt, t0, t_total, nsteps):
    n = x.shape[0]
    t = t0
    kick = np.empty(n)
    for k in range(nsteps):
        a = a0 * (t / t_total)
        for i in range(n):
            g = 0.0
            for j in range(n):
                s = 1.0 if x[j] >= 0.0 else -1.0
                g += jmat[i, j] * s
            kick[i] = -(a0 - a) * x[i] - c0 * g
        for i in range(n):
            mom[i] += dt * kick[i]
            x[i] += dt * a0 * mom[i]
        for i in range(n):
            if not (np.isfinite(x[i]) and np.isfinite(mom[i])):
                return t, k
        # inelastic walls: pin the particle and drop its momentum
        for i in range(n):
            if x[i] >= 1.0:
                x[i] = 1.0
                mom[i] = 0.0
            elif x[i] <= -1.0:
                x[i] = -1.0
                mom[i] = 0.0
        t += dt
    return t, -1


@njit(cache=True, nogil=True)
def gray_best(h, jmat, offset):
    """Minimum energy over all 2**n configurations (Gray-code scan)."""
    n = h.shape[0]
    z = np.empty(n)
    for i in range(n):
        z[i] = -1.0
    e = offset
    for i in range(n):
        e += h[i] * z[i]
        for j in range(i + 1, n):
            e += jmat[i, j] * z[i] * z[j]
    best = e
    total = np.int64(1) << n
    for m in range(1, total):
        v = 0
        mm = m
        while mm & 1 == 0:
            mm >>= 1
            v += 1
        z[v] = -z[v]
        g = 0.0
        for u in range(n):
            g += jmat[v, u] * z[u]
        e += 2.0 * z[v] * (h[v] + g)
        if e < best:
            best = e
    return best


@njit(cache=True, nogil=True)
def gray_filter(h, jmat, offset, thresh, out):
    """Count configurations with energy <= thresh; fill ``out`` with their codes.

    A code is the bitmask with bit v set iff spin v is +1.  Codes are
    written in scan order up to ``out``'s capacity; the total count is
    returned either way, so a first call with an empty ``out`` sizes the
    buffer for a second call.
    """
    n = h.shape[0]
    z = np.empty(n)
    for i in range(n):
        z[i] = -1.0
    e = offset
    for i in range(n):
        e += h[i] * z[i]
        for j in range(i + 1, n):
            e += jmat[i, j] * z[i] * z[j]
    cnt = 0
    if e <= thresh:
        if cnt < out.shape[0]:
            out[cnt] = 0
        cnt += 1
    total = np.int64(1) << n
    for m in range(1, total):
        v = 0
        mm = m
        while mm & 1 == 0:
            mm >>= 1
            v += 1
        z[v] = -z[v]
        g = 0.0
        for u in range(n):
            g += jmat[v, u] * z[u]
        e += 2.0 * z[v] * (h[v] + g)
        if e <= thresh:
            if cnt < out.shape[0]:
                out[cnt] = np.uint64(m ^ (m >> 1))
            cnt += 1
    return cnt
