"""Mass-conserving finite-volume solver for the journal bearing oil film.

The film is governed by a pressure / oil-fraction formulation of the
Reynolds equation on the unwrapped bearing surface (circumferential
coordinate x = R*alpha, axial coordinate z). Integrating the equation
over each control volume turns every term into a volumetric flux
balance, which is what lets the groove supply flowrate enter as a plain
source term Q_s/N_g on the groove cells. The discrete cell equation is

    C1*th_P + (C3 + C4 + C5n + C5s)*p_P =
        C2*th_W + C3*p_E + C4*p_W + C5n*p_N + C5s*p_S + source

with central differences on the pressure (Poiseuille) fluxes, upwind
donor cells on the shear-driven (Couette) transport and an explicit,
previous-iterate evaluation of the squeeze term. See
docs/finite_volume_scheme.md for the full derivation of C1..C5.

Boundary conditions: periodic in x; p = 0 and full film (theta = 1) on
both axial edges, imposed through half-cell fluxes on the edge rows.
Every converged cell satisfies the cavitation switch: pressurized cells
carry theta = 1, cavitated cells carry p = 0 and theta < 1.
"""

import csv
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._kernels import gauss_seidel_run
from .errors import ContactError, DivergenceError, ValidationError


@dataclass(frozen=True)
class BearingGeometry:
    """Plain cylindrical journal bearing with one axial supply groove.

    Lengths in meters, viscosity in Pa.s, angles in radians. The groove
    is a rectangle centered at ``groove_angular_position`` spanning
    ``groove_circumferential_length`` along the surface and
    ``groove_axial_width`` centered across the bearing width.
    """

    radius: float
    width: float
    radial_clearance: float
    groove_angular_position: float
    groove_circumferential_length: float
    groove_axial_width: float
    oil_viscosity: float

    def __post_init__(self):
        if self.radius <= 0 or self.width <= 0:
            raise ValidationError("radius and width must be positive")
        if self.radial_clearance <= 0:
            raise ValidationError("radial clearance must be positive")
        if self.oil_viscosity <= 0:
            raise ValidationError("oil viscosity must be positive")
        if not 0 < self.groove_circumferential_length < 2 * math.pi * self.radius:
            raise ValidationError(
                "groove circumferential length must lie in (0, 2*pi*R)")
        if not 0 < self.groove_axial_width <= self.width:
            raise ValidationError("groove axial width must lie in (0, L]")


@dataclass(frozen=True)
class ShaftState:
    """Journal kinematics: eccentricity [m], its rate [m/s], speed [rad/s]."""

    eccentricity_x: float
    eccentricity_y: float
    eccentricity_rate_x: float = 0.0
    eccentricity_rate_y: float = 0.0
    rotational_speed: float = 0.0

    @property
    def eccentricity(self):
        return math.hypot(self.eccentricity_x, self.eccentricity_y)

    def check_clearance(self, geometry):
        """Raise ContactError if the journal touches the bearing wall."""
        if self.eccentricity >= geometry.radial_clearance:
            raise ContactError(
                f"eccentricity {self.eccentricity:.3e} m reaches the radial "
                f"clearance {geometry.radial_clearance:.3e} m")


@dataclass(frozen=True)
class FilmGrid:
    """Finite-volume grid over the unwrapped film, with the groove cells.

    Cell (i, j) covers circumferential index i (period 2*pi*R) and axial
    index j (width L). Field arrays are indexed [i, j].
    """

    n_circ: int
    n_axial: int
    radius: float
    width: float
    groove_mask: np.ndarray  # bool, shape (n_circ, n_axial)

    def __post_init__(self):
        if self.n_circ < 3 or self.n_axial < 3:
            raise ValidationError("grid needs at least 3 volumes per direction")
        if self.groove_mask.shape != (self.n_circ, self.n_axial):
            raise ValidationError("groove mask shape mismatch")
        if self.n_groove < 1:
            raise ValidationError("groove footprint contains no volumes; "
                                  "refine the mesh")
        self.groove_mask.setflags(write=False)

    @property
    def n_groove(self):
        return int(np.count_nonzero(self.groove_mask))

    @property
    def groove_volume_indices(self):
        ii, jj = np.nonzero(self.groove_mask)
        return frozenset(zip(ii.tolist(), jj.tolist()))

    @property
    def d_circ(self):
        """Circumferential cell size along the surface [m]."""
        return 2.0 * math.pi * self.radius / self.n_circ

    @property
    def d_axial(self):
        return self.width / self.n_axial

    @property
    def alpha_centers(self):
        return (np.arange(self.n_circ) + 0.5) * (2.0 * math.pi / self.n_circ)

    @property
    def z_centers(self):
        return (np.arange(self.n_axial) + 0.5) * self.d_axial


def build_grid(geometry, n_circ, n_axial):
    """Build a FilmGrid whose groove cells are the volumes whose centers
    fall inside the groove rectangle (angular wrap handled)."""
    alpha = (np.arange(n_circ) + 0.5) * (2.0 * math.pi / n_circ)
    z = (np.arange(n_axial) + 0.5) * (geometry.width / n_axial)

    half_angle = geometry.groove_circumferential_length / (2.0 * geometry.radius)
    d_alpha = alpha - geometry.groove_angular_position
    d_alpha = (d_alpha + math.pi) % (2.0 * math.pi) - math.pi
    in_circ = np.abs(d_alpha) <= half_angle + 1e-9

    half_width = geometry.groove_axial_width / 2.0
    in_axial = np.abs(z - geometry.width / 2.0) <= half_width + 1e-9 * geometry.width

    mask = np.logical_and.outer(in_circ, in_axial)
    return FilmGrid(n_circ=n_circ, n_axial=n_axial, radius=geometry.radius,
                    width=geometry.width, groove_mask=mask)


@dataclass(frozen=True)
class VolumeCoefficients:
    """Flux-balance coefficients of one finite volume, all in m^3/s per
    unit of their multiplying field (Pa for pressure terms)."""

    couette_east: float       # C1, multiplies theta_P
    couette_west: float       # C2, multiplies theta_W
    poiseuille_east: float    # C3
    poiseuille_west: float    # C4
    poiseuille_north: float   # C5 at the +z face
    poiseuille_south: float   # C5 at the -z face
    source: float             # groove inflow minus explicit squeeze


@dataclass(frozen=True)
class FilmSolution:
    """Converged pressure / oil-fraction fields and integrated force."""

    pressure: np.ndarray        # [Pa], shape (n_circ, n_axial)
    oil_fraction: np.ndarray    # dimensionless, same shape
    hydrodynamic_force: tuple   # (F_X, F_Y) [N]
    iterations_used: int
    residual: float
    state: ShaftState
    supply_flowrate: float

    def __post_init__(self):
        self.pressure.setflags(write=False)
        self.oil_fraction.setflags(write=False)


@dataclass(frozen=True)
class SolverOptions:
    max_sweeps: int = 100_000
    tolerance: float = 1e-6
    relaxation: float = 1.0
    adaptive_relaxation: bool = True
    initial_pressure: np.ndarray | None = None
    initial_oil_fraction: np.ndarray | None = None


def film_thickness(geometry, state, alpha):
    """Oil film thickness h(alpha) = c_r + e_x*sin(alpha) - e_y*cos(alpha).

    alpha may be a scalar or an array. Raises ContactError when the
    eccentricity leaves the clearance circle.
    """
    state.check_clearance(geometry)
    return (geometry.radial_clearance
            + state.eccentricity_x * np.sin(alpha)
            - state.eccentricity_y * np.cos(alpha))


def _film_thickness_rate(state, alpha):
    return (state.eccentricity_rate_x * np.sin(alpha)
            - state.eccentricity_rate_y * np.cos(alpha))


def _assembly_arrays(geometry, state, grid, supply_flowrate):
    """Vectorized per-cell coefficients, laid out (n_axial, n_circ) for
    the sweep kernel. Returns (c1, c2, c3, c4, c5n, c5s, src, sqz)."""
    nx, nz = grid.n_circ, grid.n_axial
    dx, dz = grid.d_circ, grid.d_axial
    mu = geometry.oil_viscosity
    surface_speed = state.rotational_speed * geometry.radius

    d_alpha = 2.0 * math.pi / nx
    alpha_c = grid.alpha_centers
    alpha_e = (np.arange(nx) + 1.0) * d_alpha   # east face of cell i
    alpha_w = np.arange(nx) * d_alpha           # west face

    h_c = film_thickness(geometry, state, alpha_c)
    h_e = film_thickness(geometry, state, alpha_e)
    h_w = film_thickness(geometry, state, alpha_w)

    c1_row = 0.5 * surface_speed * h_e * dz
    c2_row = 0.5 * surface_speed * h_w * dz
    c3_row = h_e ** 3 * dz / (12.0 * mu * dx)
    c4_row = h_w ** 3 * dz / (12.0 * mu * dx)
    c5_row = h_c ** 3 * dx / (12.0 * mu * dz)

    def tile(row):
        return np.tile(row, (nz, 1))

    c1, c2, c3, c4 = tile(c1_row), tile(c2_row), tile(c3_row), tile(c4_row)
    c5n, c5s = tile(c5_row), tile(c5_row)
    # Axial edges see p = 0 at half a cell: double the face conductance.
    c5s[0, :] = 2.0 * c5_row
    c5n[-1, :] = 2.0 * c5_row

    src = np.zeros((nz, nx))
    if supply_flowrate != 0.0:
        src[grid.groove_mask.T] = supply_flowrate / grid.n_groove

    sqz = np.tile(_film_thickness_rate(state, alpha_c) * dx * dz, (nz, 1))
    return c1, c2, c3, c4, c5n, c5s, src, sqz


def assemble_volume_equation(geometry, state, grid, cell_index,
                             previous_fields=None, supply_flowrate=0.0):
    """Flux-balance coefficients for one volume.

    previous_fields, when given, is the (pressure, oil_fraction) pair
    whose oil fraction feeds the explicit squeeze term; a full film
    (theta = 1) is assumed otherwise.
    """
    i, j = cell_index
    if not (0 <= i < grid.n_circ and 0 <= j < grid.n_axial):
        raise ValidationError(f"cell index {cell_index} outside grid")
    c1, c2, c3, c4, c5n, c5s, src, sqz = _assembly_arrays(
        geometry, state, grid, supply_flowrate)
    theta_prev = 1.0
    if previous_fields is not None:
        theta_prev = float(previous_fields[1][i, j])
    return VolumeCoefficients(
        couette_east=float(c1[j, i]),
        couette_west=float(c2[j, i]),
        poiseuille_east=float(c3[j, i]),
        poiseuille_west=float(c4[j, i]),
        poiseuille_north=float(c5n[j, i]),
        poiseuille_south=float(c5s[j, i]),
        source=float(src[j, i] - sqz[j, i] * theta_prev),
    )


def solve_film(geometry, state, grid, supply_flowrate, options=None):
    """Solve the film for given kinematics and groove supply flowrate.

    Returns a FilmSolution whose fields satisfy the cavitation switch and
    the axial/periodic boundary conditions to the solver tolerance.
    Raises DivergenceError (carrying the last residual) when the sweep
    budget is exhausted.
    """
    options = options or SolverOptions()
    if supply_flowrate < 0.0:
        raise ValidationError("supply flowrate must be non-negative")
    if state.rotational_speed <= 0.0:
        raise ValidationError("rotational speed must be positive for the "
                              "oil transport upwinding")
    state.check_clearance(geometry)

    nx, nz = grid.n_circ, grid.n_axial
    if options.initial_pressure is not None:
        p = np.ascontiguousarray(options.initial_pressure.T, dtype=float)
        p = p.copy()
    else:
        p = np.zeros((nz, nx))
    if options.initial_oil_fraction is not None:
        theta = np.ascontiguousarray(options.initial_oil_fraction.T,
                                     dtype=float).copy()
    else:
        theta = np.ones((nz, nx))

    arrays = _assembly_arrays(geometry, state, grid, supply_flowrate)
    sweeps, residual, _, converged = gauss_seidel_run(
        p, theta, *arrays,
        options.tolerance, options.max_sweeps,
        options.relaxation, options.adaptive_relaxation)
    if not converged:
        raise DivergenceError(
            f"film solve did not converge in {options.max_sweeps} sweeps "
            f"(residual {residual:.3e})", residual=residual)

    pressure = p.T.copy()
    oil_fraction = theta.T.copy()
    solution = FilmSolution(
        pressure=pressure, oil_fraction=oil_fraction,
        hydrodynamic_force=(0.0, 0.0), iterations_used=sweeps,
        residual=residual, state=state, supply_flowrate=supply_flowrate)
    force = integrate_hydrodynamic_force(solution, geometry, grid)
    return FilmSolution(
        pressure=pressure, oil_fraction=oil_fraction,
        hydrodynamic_force=force, iterations_used=sweeps,
        residual=residual, state=state, supply_flowrate=supply_flowrate)


def integrate_hydrodynamic_force(solution, geometry, grid):
    """Integrate the pressure field into the (F_X, F_Y) force on the journal.

    The film pushes the journal surface inward, along -(-sin a, cos a),
    which is the radial direction consistent with the film thickness
    convention h = c_r + e_x sin a - e_y cos a.
    """
    alpha = grid.alpha_centers
    cell_area = grid.d_circ * grid.d_axial
    p_sum = solution.pressure.sum(axis=1)  # over z, per circumferential cell
    f_x = float(np.sum(p_sum * np.sin(alpha)) * cell_area)
    f_y = float(-np.sum(p_sum * np.cos(alpha)) * cell_area)
    return (f_x, f_y)


def global_mass_balance(solution, geometry, grid, supply_flowrate):
    """Relative mismatch between groove supply and axial edge outflow.

    Valid for steady solutions (zero eccentricity rate). Outflow is the
    pressure-driven flux through both axial edges, evaluated with the
    same half-cell conductances as the solver. With zero supply the
    absolute imbalance [m^3/s] is returned instead, with a warning.
    """
    state = solution.state
    if state.eccentricity_rate_x != 0.0 or state.eccentricity_rate_y != 0.0:
        warnings.warn("mass balance assumes a steady solution; the squeeze "
                      "contribution is not accounted for", stacklevel=2)
    h_c = film_thickness(geometry, state, grid.alpha_centers)
    conductance = h_c ** 3 / (12.0 * geometry.oil_viscosity) / (grid.d_axial / 2.0)
    outflow = float(np.sum(conductance * solution.pressure[:, 0]) * grid.d_circ
                    + np.sum(conductance * solution.pressure[:, -1]) * grid.d_circ)
    if supply_flowrate == 0.0:
        warnings.warn("zero supply flowrate: returning absolute imbalance",
                      stacklevel=2)
        return abs(outflow)
    return abs(supply_flowrate - outflow) / supply_flowrate


def dump_film_csv(solution, geometry, grid, path):
    """Write the film fields as CSV rows (i, j, alpha_rad, z_m, p_Pa, theta)."""
    alpha = grid.alpha_centers
    z = grid.z_centers
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["i", "j", "alpha_rad", "z_m", "p_Pa", "theta"])
        for i in range(grid.n_circ):
            for j in range(grid.n_axial):
                writer.writerow([i, j, repr(float(alpha[i])), repr(float(z[j])),
                                 repr(float(solution.pressure[i, j])),
                                 repr(float(solution.oil_fraction[i, j]))])
