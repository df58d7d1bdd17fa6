"""Compiled pairwise kernels for the particle drift ratios.

Each kernel evaluates, for every particle, a weighted ratio over the whole
bank with a running max-rescale so no exponential ever overflows; weights
that are bounded above (the heavy-tailed 1-D case) are accumulated directly
and normalized by their maximum, which is the same computation without the
log/exp round trip.

Parallelism is across particles only: every particle's reduction runs
serially inside one thread, so results are bit-identical for any thread
count. ``ok`` flags signal particles whose weights all vanished.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange


@njit(parallel=True, fastmath=True, cache=True)
def cauchy_bank_mean_1d(x, bank, sigma, beta):
    """Weighted bank mean with weights 1/(1 + ((x - beta*eta)/sigma)^2)."""
    n_particles = x.shape[0]
    n_bank = bank.shape[0]
    out = np.empty(n_particles)
    ok = np.ones(n_particles, dtype=np.uint8)
    inv_sigma = 1.0 / sigma
    for i in prange(n_particles):
        xi = x[i]
        s0 = 0.0
        s1 = 0.0
        for j in range(n_bank):
            z = (xi - beta * bank[j]) * inv_sigma
            w = 1.0 / (1.0 + z * z)
            s0 += w
            s1 += w * bank[j]
        if s0 > 0.0:
            out[i] = s1 / s0
        else:
            out[i] = 0.0
            ok[i] = 0
    return out, ok


@njit(parallel=True, fastmath=True, cache=True)
def zero_order_bank_mean(x, bank, beta, inv_two_ls):
    """Weighted bank mean, log-weights -(|x - beta*eta|^2)/(2 l sigma).

    The per-particle constant |x|^2 term is dropped (ratio invariance), so the
    log-weight is (2 beta <x, eta> - beta^2 |eta|^2) * inv_two_ls.
    """
    n_particles, d = x.shape
    n_bank = bank.shape[0]
    out = np.empty((n_particles, d))
    ok = np.ones(n_particles, dtype=np.uint8)
    bank_sq = np.empty(n_bank)
    for j in range(n_bank):
        acc = 0.0
        for k in range(d):
            acc += bank[j, k] * bank[j, k]
        bank_sq[j] = acc
    for i in prange(n_particles):
        num = np.zeros(d)
        den = 0.0
        m = 0.0
        started = False
        for j in range(n_bank):
            dot = 0.0
            for k in range(d):
                dot += x[i, k] * bank[j, k]
            lw = (2.0 * beta * dot - beta * beta * bank_sq[j]) * inv_two_ls
            if not started:
                m = lw
                w = 1.0
                started = True
            elif lw > m:
                scale = np.exp(m - lw)
                den *= scale
                for k in range(d):
                    num[k] *= scale
                m = lw
                w = 1.0
            else:
                w = np.exp(lw - m)
            den += w
            for k in range(d):
                num[k] += w * bank[j, k]
        if den > 0.0:
            for k in range(d):
                out[i, k] = num[k] / den
        else:
            for k in range(d):
                out[i, k] = 0.0
            ok[i] = 0
    return out, ok


@njit(parallel=True, fastmath=True, cache=True)
def first_order_funnel_ratio(
    x, xi, xi1, xi_sq, xi_star_sq, exp_2as_xi1, s, c1, half_lmb, alpha, dm1
):
    """Probe-weighted mean of the auxiliary draws for the funnel target.

    Log-weight per pair (constants per particle dropped):
        c1*(-2 s <x, xi> + s^2 |xi|^2) + half_lmb*|xi|^2
        - p1^2/2 - dm1*alpha*p1 - 0.5*e^{-2 alpha p1}*|p*|^2
    with probe first coordinate p1 = x1 - s*xi1 and tail square norm
    |p*|^2 = |x*|^2 - 2 s <x*, xi*> + s^2 |xi*|^2. The factor e^{-2 alpha p1}
    splits into e^{-2 alpha x1} (per particle) times exp_2as_xi1 (per draw).
    """
    n_particles, d = x.shape
    n_bank = xi.shape[0]
    out = np.empty((n_particles, d))
    ok = np.ones(n_particles, dtype=np.uint8)
    s2 = s * s
    for i in prange(n_particles):
        x1 = x[i, 0]
        xstar_sq = 0.0
        for k in range(1, d):
            xstar_sq += x[i, k] * x[i, k]
        e_part = np.exp(-2.0 * alpha * x1)
        num = np.zeros(d)
        den = 0.0
        m = 0.0
        started = False
        for j in range(n_bank):
            dot = 0.0
            for k in range(d):
                dot += x[i, k] * xi[j, k]
            dot_star = dot - x1 * xi1[j]
            p1 = x1 - s * xi1[j]
            tail_sq = xstar_sq - 2.0 * s * dot_star + s2 * xi_star_sq[j]
            lw = (
                c1 * (s2 * xi_sq[j] - 2.0 * s * dot)
                + half_lmb * xi_sq[j]
                - 0.5 * p1 * p1
                - dm1 * alpha * p1
                - 0.5 * (e_part * exp_2as_xi1[j]) * tail_sq
            )
            if not started:
                m = lw
                w = 1.0
                started = True
            elif lw > m:
                scale = np.exp(m - lw)
                den *= scale
                for k in range(d):
                    num[k] *= scale
                m = lw
                w = 1.0
            else:
                w = np.exp(lw - m)
            den += w
            for k in range(d):
                num[k] += w * xi[j, k]
        if den > 0.0:
            for k in range(d):
                out[i, k] = num[k] / den
        else:
            for k in range(d):
                out[i, k] = 0.0
            ok[i] = 0
    return out, ok


@njit(parallel=True, fastmath=True, cache=True)
def first_order_sin1d_ratio(x, xi, s, c1, half_lmb):
    """Probe-weighted mean of the auxiliary draws for the sinusoid target.

    Probes outside [0, 1] carry zero weight. All-outside particles get ok = 0.
    """
    n_particles = x.shape[0]
    n_bank = xi.shape[0]
    out = np.empty(n_particles)
    ok = np.ones(n_particles, dtype=np.uint8)
    s2 = s * s
    two_pi = 2.0 * np.pi
    four_pi = 4.0 * np.pi
    for i in prange(n_particles):
        xv = x[i]
        num = 0.0
        den = 0.0
        m = 0.0
        started = False
        for j in range(n_bank):
            p = xv - s * xi[j]
            if p < 0.0 or p > 1.0:
                continue
            lw = (
                c1 * (s2 * xi[j] * xi[j] - 2.0 * s * xv * xi[j])
                + half_lmb * xi[j] * xi[j]
                + np.log1p(0.5 * (np.sin(two_pi * p) + np.sin(four_pi * p)))
            )
            if not started:
                m = lw
                w = 1.0
                started = True
            elif lw > m:
                scale = np.exp(m - lw)
                den *= scale
                num *= scale
                m = lw
                w = 1.0
            else:
                w = np.exp(lw - m)
            den += w
            num += w * xi[j]
        if den > 0.0:
            out[i] = num / den
        else:
            out[i] = 0.0
            ok[i] = 0
    return out, ok


@njit(parallel=True, fastmath=True, cache=True)
def funnel_reduced_ratio(x1, xstar_sq, xi, exp_2a_xi, ls, beta, ell_t, dm1):
    """Semi-analytic funnel drift ratios over a 1-D auxiliary bank.

    Returns per particle the weighted means R1 of (x1 - xi_j) and G of
    (ell - beta e^{2 alpha xi_j}) / V_j with V_j = l sigma + beta^2 e^{2 alpha
    xi_j}; the tail drift is G * x_star by the rank-one structure.
    """
    n_particles = x1.shape[0]
    n_bank = xi.shape[0]
    r1 = np.empty(n_particles)
    g = np.empty(n_particles)
    ok = np.ones(n_particles, dtype=np.uint8)
    v = np.empty(n_bank)
    log_v = np.empty(n_bank)
    gain = np.empty(n_bank)
    for j in range(n_bank):
        vj = ls + beta * beta * exp_2a_xi[j]
        v[j] = vj
        log_v[j] = np.log(vj)
        gain[j] = (ell_t - beta * exp_2a_xi[j]) / vj
    inv_two_ls = 0.5 / ls
    for i in prange(n_particles):
        xv = x1[i]
        tail = xstar_sq[i]
        num1 = 0.0
        numg = 0.0
        den = 0.0
        m = 0.0
        started = False
        for j in range(n_bank):
            z = xv - beta * xi[j]
            lw = -z * z * inv_two_ls - 0.5 * tail / v[j] - 0.5 * dm1 * log_v[j]
            if not started:
                m = lw
                w = 1.0
                started = True
            elif lw > m:
                scale = np.exp(m - lw)
                den *= scale
                num1 *= scale
                numg *= scale
                m = lw
                w = 1.0
            else:
                w = np.exp(lw - m)
            den += w
            num1 += w * (xv - xi[j])
            numg += w * gain[j]
        if den > 0.0:
            r1[i] = num1 / den
            g[i] = numg / den
        else:
            r1[i] = 0.0
            g[i] = 0.0
            ok[i] = 0
    return r1, g, ok
