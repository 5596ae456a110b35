"""Independent reference solvers used only by the test-suite.

These deliberately avoid the iterative sweep machinery of the package:
the film oracle solves the same discrete complementarity system by
dense direct factorization with active-set pivoting, and the beam
oracles use closed-form textbook matrices.
"""

import numpy as np

from rotorlube.lubrication import _assembly_arrays


def dense_film_solve(geometry, state, grid, supply_flowrate, max_pivots=500):
    """Solve the discrete p-theta complementarity system exactly.

    Guess a pressurized/cavitated partition, solve the resulting linear
    system densely, and flip any cell violating its branch condition
    (p >= 0 on pressurized cells, theta <= 1 on cavitated ones) until the
    partition is self-consistent. Returns (pressure, oil_fraction) arrays
    shaped (n_circ, n_axial) like FilmSolution fields.
    """
    c1, c2, c3, c4, c5n, c5s, src, sqz = _assembly_arrays(
        geometry, state, grid, supply_flowrate)
    nz, nx = c1.shape
    n = nz * nx

    def cell(j, i):
        return j * nx + i

    # At the fixed point the explicit squeeze evaluation is
    # self-consistent, so it carries an implicit theta_P coefficient.
    th_coeff = c1 + sqz
    ap = c3 + c4 + c5n + c5s

    pressurized = np.ones(n, dtype=bool)
    for _ in range(max_pivots):
        a_mat = np.zeros((n, n))
        b = np.zeros(n)
        for j in range(nz):
            for i in range(nx):
                row = cell(j, i)
                b[row] += src[j, i]
                # own cell: unknown is p if pressurized else theta
                if pressurized[row]:
                    a_mat[row, row] += ap[j, i]
                    b[row] -= th_coeff[j, i]  # theta_P = 1
                else:
                    a_mat[row, row] += th_coeff[j, i]
                # west neighbor theta (upwind donor)
                iw = (i - 1) % nx
                col = cell(j, iw)
                if pressurized[col]:
                    b[row] += c2[j, i]
                else:
                    a_mat[row, col] -= c2[j, i]
                # pressure neighbors; cavitated or ghost cells carry p = 0
                for coeff, jj, ii in (
                        (c3[j, i], j, (i + 1) % nx),
                        (c4[j, i], j, iw),
                        (c5n[j, i], j + 1, i),
                        (c5s[j, i], j - 1, i)):
                    if 0 <= jj < nz and pressurized[cell(jj, ii)]:
                        a_mat[row, cell(jj, ii)] -= coeff
        x = np.linalg.solve(a_mat, b)

        flips = 0
        for row in range(n):
            if pressurized[row] and x[row] < 0.0:
                pressurized[row] = False
                flips += 1
            elif not pressurized[row] and x[row] > 1.0:
                pressurized[row] = True
                flips += 1
        if flips == 0:
            p = np.where(pressurized, x, 0.0).reshape(nz, nx)
            theta = np.where(pressurized, 1.0, x).reshape(nz, nx)
            if theta.min() < -1e-12:
                raise AssertionError("oracle produced negative oil fraction; "
                                     "pick a milder test state")
            return p.T.copy(), theta.T.copy()
    raise AssertionError("dense oracle did not settle on an active set")


def timoshenko_plane_matrices(length, e_mod, inertia, shear_phi):
    """Closed-form 4x4 bending stiffness for DOFs (u0, slope0, u1, slope1)."""
    ell, phi = length, shear_phi
    k = e_mod * inertia / ((1.0 + phi) * ell ** 3)
    return k * np.array([
        [12.0, 6.0 * ell, -12.0, 6.0 * ell],
        [6.0 * ell, (4.0 + phi) * ell ** 2, -6.0 * ell, (2.0 - phi) * ell ** 2],
        [-12.0, -6.0 * ell, 12.0, -6.0 * ell],
        [6.0 * ell, (2.0 - phi) * ell ** 2, -6.0 * ell, (4.0 + phi) * ell ** 2],
    ])


def consistent_mass_plane(length, rho_a):
    """Euler-Bernoulli consistent translational mass, same DOF order."""
    ell = length
    m = rho_a * ell / 420.0
    return m * np.array([
        [156.0, 22.0 * ell, 54.0, -13.0 * ell],
        [22.0 * ell, 4.0 * ell ** 2, 13.0 * ell, -3.0 * ell ** 2],
        [54.0, 13.0 * ell, 156.0, -22.0 * ell],
        [-13.0 * ell, -3.0 * ell ** 2, -22.0 * ell, 4.0 * ell ** 2],
    ])
