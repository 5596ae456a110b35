"""Numba kernels for the hot inner loops.

Array layout inside the kernels is (n_axial, n_circ) so the innermost
circumferential loop walks contiguous memory.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def gauss_seidel_run(p, theta, c1, c2, c3, c4, c5n, c5s, src, sqz,
                     tol, max_sweeps, relax0, adaptive):
    """Run Gauss-Seidel sweeps with the cavitation switch until converged.

    Each sweep visits cells lexicographically in (axial, circumferential)
    order and applies the pressure/oil-fraction switch immediately per
    cell: the full-film branch (theta = 1) is tried first and kept if the
    resulting pressure is non-negative, otherwise the cell is cavitated
    (p = 0) and the oil fraction is updated from the flux balance.
    Under-relaxation (if active) applies to the cavitated theta update
    only; repressurized cells snap to theta = 1 so complementarity holds
    exactly on the pressurized set.

    Returns (sweeps_done, residual, relaxation_used, converged).
    The residual is max(dp_max / p_peak, dtheta_max) of the last sweep.
    """
    nz, nx = p.shape
    relax = relax0
    prev_dtheta = 1.0e300
    res = 1.0e300
    for sweep in range(1, max_sweeps + 1):
        dp_max = 0.0
        dth_max = 0.0
        p_max = 0.0
        for j in range(nz):
            for i in range(nx):
                ie = i + 1 if i + 1 < nx else 0
                iw = i - 1 if i - 1 >= 0 else nx - 1
                pe = p[j, ie]
                pw = p[j, iw]
                pn = p[j + 1, i] if j + 1 < nz else 0.0
                ps = p[j - 1, i] if j - 1 >= 0 else 0.0
                th_old = theta[j, i]
                p_old = p[j, i]

                rhs = (c2[j, i] * theta[j, iw] + c3[j, i] * pe
                       + c4[j, i] * pw + c5n[j, i] * pn + c5s[j, i] * ps
                       + src[j, i] - sqz[j, i] * th_old)
                ap = c3[j, i] + c4[j, i] + c5n[j, i] + c5s[j, i]

                p_new = (rhs - c1[j, i]) / ap
                if p_new >= 0.0:
                    th_new = 1.0
                else:
                    p_new = 0.0
                    th_new = rhs / c1[j, i]
                    if th_new < 0.0:
                        th_new = 0.0
                    if relax != 1.0:
                        th_new = th_old + relax * (th_new - th_old)

                p[j, i] = p_new
                theta[j, i] = th_new

                dp = abs(p_new - p_old)
                if dp > dp_max:
                    dp_max = dp
                dth = abs(th_new - th_old)
                if dth > dth_max:
                    dth_max = dth
                if p_new > p_max:
                    p_max = p_new

        denom = p_max if p_max > 0.0 else 1.0
        res = dp_max / denom
        if dth_max > res:
            res = dth_max
        if res < tol:
            return sweep, res, relax, True

        # Stalled theta progress over a 100-sweep window signals the
        # cavitation boundary flip-flopping; damp the theta update.
        if adaptive and relax > 0.5 and sweep % 100 == 0:
            if dth_max > 0.99 * prev_dtheta and dth_max > tol:
                relax = 0.5
            prev_dtheta = dth_max

    return max_sweeps, res, relax, False


@njit(cache=True)
def newmark_run(inv_keff, m_mat, c_mat, f_const, f_unb_x, f_unb_y,
                ix, iy, u0, v0, a0_vec, dt, n_steps,
                a0, a1, a2, a3, a4, a5, a6, a7, out_u):
    """Constant-average-acceleration Newmark time march for a linear system.

    inv_keff is the inverse of the effective stiffness K + a0*M + a1*C.
    The harmonic force acts on the two translational DOFs (ix, iy) of the
    unbalance node; f_const holds all speed-independent loads. Records the
    displacement history of every DOF into out_u (n_steps+1, ndof).
    """
    ndof = u0.shape[0]
    u = u0.copy()
    v = v0.copy()
    a = a0_vec.copy()
    fe = np.empty(ndof)
    mu_part = np.empty(ndof)
    cu_part = np.empty(ndof)
    for k in range(ndof):
        out_u[0, k] = u[k]
    for step in range(1, n_steps + 1):
        for k in range(ndof):
            mu_part[k] = a0 * u[k] + a2 * v[k] + a3 * a[k]
            cu_part[k] = a1 * u[k] + a4 * v[k] + a5 * a[k]
        for k in range(ndof):
            s = f_const[k]
            for m in range(ndof):
                s += m_mat[k, m] * mu_part[m] + c_mat[k, m] * cu_part[m]
            fe[k] = s
        fe[ix] += f_unb_x[step]
        fe[iy] += f_unb_y[step]
        for k in range(ndof):
            s = 0.0
            for m in range(ndof):
                s += inv_keff[k, m] * fe[m]
            mu_part[k] = s  # reuse as u_new
        for k in range(ndof):
            u_new = mu_part[k]
            a_new = a0 * (u_new - u[k]) - a2 * v[k] - a3 * a[k]
            v[k] = v[k] + a6 * a[k] + a7 * a_new
            a[k] = a_new
            u[k] = u_new
            out_u[step, k] = u_new
    return 0
