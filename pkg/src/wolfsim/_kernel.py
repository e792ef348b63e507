"""Compiled time loop for one coupled simulation.

This is the production path behind :func:`wolfsim.simulator.run_simulation`.
Every arithmetic expression is written in the same order as the numpy
reference steppers (``string_fdtd``, ``plate_fdtd``, ``coupling``,
``excitation``) so that both engines agree to the last bit; the test suite
checks this. Do not reassociate terms here without changing the reference.
"""

from __future__ import annotations

import math

import numba
import numpy as np

G = 2  # ghost depth, mirrors params.GHOSTS
RUNAWAY = 1.0e3
CHECK_EVERY = 256

PLUCK = 0
BOW = 1


@numba.njit(cache=True)
def _string_bcs(u, hi):
    u[G] = 0.0
    u[hi] = 0.0
    for g in range(1, G + 1):
        u[G - g] = -u[G + g]
        u[hi + g] = -u[hi - g]


@numba.njit(cache=True)
def _plate_bcs(w, hi):
    m = w.shape[0]
    for k in range(m):
        w[G, k] = 0.0
        w[hi, k] = 0.0
    for k in range(m):
        w[k, G] = 0.0
        w[k, hi] = 0.0
    for g in range(1, G + 1):
        for k in range(m):
            w[G - g, k] = -w[G + g, k]
            w[hi + g, k] = -w[hi - g, k]
    for g in range(1, G + 1):
        for k in range(m):
            w[k, G - g] = -w[k, G + g]
            w[k, hi + g] = -w[k, hi - g]


@numba.njit(cache=True)
def _string_rhs_at(u, up, j, lam, mu, tau, centre):
    return (
        centre * u[j]
        + lam * (u[j + 1] + u[j - 1])
        - mu * (u[j + 2] - 4.0 * u[j + 1] - 4.0 * u[j - 1] + u[j - 2])
        + (tau - 1.0) * up[j]
    )


@numba.njit(cache=True)
def _finite_and_bounded(a):
    for v in a.ravel():
        if not (abs(v) <= RUNAWAY):
            return False
    return True


@numba.njit(cache=True)
def run_kernel(
    n_steps,
    dt,
    # string
    s_intervals, s_lam, s_mu, s_tau, s_gain, i_br, i_exc,
    # plate
    p_intervals, p_lam, p_mu, p_tau, p_gain, foot_l, foot_r, rec,
    # bridge
    k_up, k_left, k_right, m_br,
    # suppressors
    su_nodes, su_weights, su_k, su_zeta, su_m,
    # excitation
    kind, pl_amp, pl_dur, bow_v, bow_fn, bow_fmax, bow_mus, bow_mud, bow_eps, bow_wc,
):
    ns_arr = s_intervals + 1 + 2 * G
    s_hi = ns_arr - 1 - G
    u0 = np.zeros(ns_arr)
    u1 = np.zeros(ns_arr)
    u2 = np.zeros(ns_arr)
    fs = np.zeros(ns_arr)

    np_arr = p_intervals + 1 + 2 * G
    p_hi = np_arr - 1 - G
    w0 = np.zeros((np_arr, np_arr))
    w1 = np.zeros((np_arr, np_arr))
    w2 = np.zeros((np_arr, np_arr))
    fp = np.zeros((np_arr, np_arr))

    nsu = su_k.shape[0]
    zs_prev2 = np.zeros(nsu)
    zs_prev = np.zeros(nsu)
    zs_curr = np.zeros(nsu)
    ws_prev2 = np.zeros(nsu)
    ws_prev = np.zeros(nsu)
    ws_now = np.zeros(nsu)
    f_su = np.zeros(nsu)

    zb_prev = 0.0
    zb_curr = 0.0

    body = np.zeros(n_steps)
    string = np.zeros(n_steps)
    force = np.zeros(n_steps)
    stick = np.zeros(n_steps, dtype=np.int8)

    s_centre = 2.0 - 2.0 * s_lam - 6.0 * s_mu
    s_den = 1.0 + s_tau
    p_den = 1.0 + p_tau
    jb = i_br + G
    je = i_exc + G
    fli, flj = foot_l[0] + G, foot_l[1] + G
    fri, frj = foot_r[0] + G, foot_r[1] + G
    ri, rj = rec[0] + G, rec[1] + G

    for n in range(n_steps):
        # coupling forces from level-n states
        f_sb = k_up * (zb_curr - u1[jb])
        f_l = k_left * (zb_curr - w1[fli, flj])
        f_r = k_right * (zb_curr - w1[fri, frj])
        for s in range(nsu):
            wv = 0.0
            for q in range(4):
                wv += su_weights[s, q] * w1[su_nodes[s, q, 0] + G, su_nodes[s, q, 1] + G]
            ws_now[s] = wv
            vz = (zs_curr[s] - zs_prev2[s]) / (2.0 * dt)
            vw = (wv - ws_prev2[s]) / (2.0 * dt)
            f_su[s] = su_k[s] * (zs_curr[s] - wv) + su_zeta[s] * (vz - vw)

        # excitation
        if kind == PLUCK:
            t = n * dt
            if t < 0 or t > pl_dur:
                f_exc = 0.0
            else:
                f_exc = pl_amp * math.sin(math.pi * t / pl_dur) ** 2
            fs[je] += f_exc
        else:
            other = f_sb if jb == je else 0.0
            target = (1.0 + s_tau) * (u1[je] + bow_v * dt)
            free = _string_rhs_at(u1, u0, je, s_lam, s_mu, s_tau, s_centre) + s_gain * other
            f_star = (target - free) / (s_gain * bow_wc)
            v_rel = (u1[je] - u0[je]) / dt - bow_v
            if v_rel > bow_eps:
                sign = 1.0
            elif v_rel < -bow_eps:
                sign = -1.0
            else:
                sign = 0.0
            if abs(f_star) < bow_fmax:
                f_exc = -bow_fn * bow_mus * sign
                stick[n] = 1
            else:
                f_exc = -bow_fn * bow_mud * sign
            fs[je - 1] += 0.25 * f_exc
            fs[je] += 0.5 * f_exc
            fs[je + 1] += 0.25 * f_exc
        force[n] = f_exc
        fs[jb] += f_sb

        # string
        for j in range(G + 1, s_hi):
            rhs = (
                s_centre * u1[j]
                + s_lam * (u1[j + 1] + u1[j - 1])
                - s_mu * (u1[j + 2] - 4.0 * u1[j + 1] - 4.0 * u1[j - 1] + u1[j - 2])
                + (s_tau - 1.0) * u0[j]
            )
            u2[j] = (rhs + s_gain * fs[j]) / s_den
        _string_bcs(u2, s_hi)
        for j in range(ns_arr):
            fs[j] = 0.0

        # plate loads
        fp[fli, flj] += f_l
        fp[fri, frj] += f_r
        for s in range(nsu):
            for q in range(4):
                fp[su_nodes[s, q, 0] + G, su_nodes[s, q, 1] + G] += su_weights[s, q] * f_su[s]

        # plate
        for i in range(G + 1, p_hi):
            for j in range(G + 1, p_hi):
                c = w1[i, j]
                e = w1[i + 1, j]
                ww = w1[i - 1, j]
                no = w1[i, j + 1]
                so = w1[i, j - 1]
                rhs = (
                    2.0 * c
                    - w0[i, j]
                    + p_lam * (e - 2.0 * c + ww + no - 2.0 * c + so)
                    - 20.0 * p_mu * c
                    + 8.0 * p_mu * (e + ww + no + so)
                    - 2.0 * p_mu * (w1[i + 1, j + 1] + w1[i + 1, j - 1] + w1[i - 1, j + 1] + w1[i - 1, j - 1])
                    - p_mu * (w1[i + 2, j] + w1[i - 2, j] + w1[i, j + 2] + w1[i, j - 2])
                    + p_tau * w0[i, j]
                )
                w2[i, j] = (rhs + p_gain * fp[i, j]) / p_den
        _plate_bcs(w2, p_hi)
        fp[fli, flj] = 0.0
        fp[fri, frj] = 0.0
        for s in range(nsu):
            for q in range(4):
                fp[su_nodes[s, q, 0] + G, su_nodes[s, q, 1] + G] = 0.0

        # lumped masses
        zb_next = 2.0 * zb_curr - zb_prev - (dt * dt / m_br) * (f_sb + f_l + f_r)
        zb_prev = zb_curr
        zb_curr = zb_next
        for s in range(nsu):
            z_next = 2.0 * zs_curr[s] - zs_prev[s] - (dt * dt / su_m[s]) * f_su[s]
            zs_prev2[s] = zs_prev[s]
            zs_prev[s] = zs_curr[s]
            zs_curr[s] = z_next
            ws_prev2[s] = ws_prev[s]
            ws_prev[s] = ws_now[s]

        tmp = u0
        u0 = u1
        u1 = u2
        u2 = tmp
        tmp2 = w0
        w0 = w1
        w1 = w2
        w2 = tmp2

        body[n] = w1[ri, rj]
        string[n] = u1[je]

        if not (abs(body[n]) <= RUNAWAY and abs(string[n]) <= RUNAWAY and abs(zb_curr) <= RUNAWAY):
            return body, string, force, stick, n + 1
        if n % CHECK_EVERY == 0 or n == n_steps - 1:
            if not (_finite_and_bounded(u1) and _finite_and_bounded(w1) and _finite_and_bounded(zs_curr)):
                return body, string, force, stick, n + 1
    return body, string, force, stick, -1
