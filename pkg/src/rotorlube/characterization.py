"""Static equilibrium and linearized dynamic coefficients of one bearing.

The journal equilibrium solves F_H(e) + W = 0 with a damped Newton
iteration on the two eccentricity components; the Jacobian comes from
central finite differences of full film solves. The same perturbation
machinery extracts the 2x2 stiffness and damping matrices around the
equilibrium, with the restoring-force sign convention

    F_H(e, edot) ~ F_H0 - K (e - e0) - C edot

so that positive-definite-ish K and C stabilize the assembled rotor
system. This convention is what `rotor.attach_bearings` assumes when it
adds the blocks to the global stiffness and damping matrices.
"""

import csv
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ContactError, EquilibriumError, ValidationError
from .lubrication import ShaftState, SolverOptions, solve_film


@dataclass(frozen=True)
class BearingCoefficients:
    """Equilibrium position plus linearized film coefficients."""

    eccentricity_x: float
    eccentricity_y: float
    stiffness: np.ndarray   # 2x2 [N/m], K[i, j] = -dF_i/de_j
    damping: np.ndarray     # 2x2 [N.s/m], C[i, j] = -dF_i/dedot_j
    supply_flowrate: float
    rotational_speed: float

    def __post_init__(self):
        if not (np.all(np.isfinite(self.stiffness))
                and np.all(np.isfinite(self.damping))):
            raise ValidationError("bearing coefficients must be finite")
        self.stiffness.setflags(write=False)
        self.damping.setflags(write=False)

    @property
    def eccentricity(self):
        return math.hypot(self.eccentricity_x, self.eccentricity_y)


@dataclass(frozen=True)
class CharacterizationOptions:
    # The film solve tolerance bounds the force noise floor, so the
    # equilibrium force tolerance cannot be much tighter than what the
    # field tolerance supports on the working meshes.
    force_tolerance_rel: float = 1e-3   # on |F_H + W| / |W|
    max_newton_iterations: int = 60
    displacement_step: float = 1e-3     # fraction of radial clearance
    velocity_step: float = 1e-3         # fraction of c_r * speed
    solver: SolverOptions = SolverOptions(tolerance=1e-7)


class _FilmForce:
    """Film force evaluator with warm-started fields between calls."""

    def __init__(self, geometry, grid, supply_flowrate, speed, options):
        self.geometry = geometry
        self.grid = grid
        self.supply_flowrate = supply_flowrate
        self.speed = speed
        self.options = options
        self._last = None

    def __call__(self, e_x, e_y, v_x=0.0, v_y=0.0):
        state = ShaftState(e_x, e_y, v_x, v_y, self.speed)
        solver = self.options.solver
        if self._last is not None:
            solver = replace(solver,
                             initial_pressure=self._last.pressure,
                             initial_oil_fraction=self._last.oil_fraction)
        solution = solve_film(self.geometry, state, self.grid,
                              self.supply_flowrate, solver)
        self._last = solution
        return np.array(solution.hydrodynamic_force)


def find_equilibrium(geometry, grid, supply_flowrate, speed, load,
                     options=None, initial_guess=None):
    """Eccentricity (e_x0, e_y0) where the film balances the applied load.

    load is the (W_X, W_Y) force the shaft applies on the film [N]; at
    the returned point |F_H + W| < force_tolerance_rel * |W|. Raises
    EquilibriumError with the best iterate when no balance point inside
    the clearance circle is found.
    """
    options = options or CharacterizationOptions()
    load = np.asarray(load, dtype=float)
    load_norm = float(np.linalg.norm(load))
    if load_norm == 0.0:
        raise ValidationError("load must be nonzero; the unloaded journal "
                              "position is not an equilibrium problem")
    if supply_flowrate < 0.0:
        raise ValidationError("supply flowrate must be non-negative")

    c_r = geometry.radial_clearance
    force = _FilmForce(geometry, grid, supply_flowrate, speed, options)
    tol = options.force_tolerance_rel * load_norm
    delta = options.displacement_step * c_r

    def residual(e):
        return force(e[0], e[1]) + load

    if initial_guess is not None:
        e = np.asarray(initial_guess, dtype=float)
    else:
        # Bracket along the load line; the journal sinks roughly with W.
        direction = load / load_norm
        best = None
        for frac in (0.05, 0.2, 0.4, 0.6, 0.8, 0.9):
            cand = frac * c_r * direction
            r = residual(cand)
            n = float(np.linalg.norm(r))
            if best is None or n < best[0]:
                best = (n, cand)
        e = best[1]

    r = residual(e)
    r_norm = float(np.linalg.norm(r))
    best_e, best_norm = e.copy(), r_norm
    for _ in range(options.max_newton_iterations):
        if r_norm < tol:
            return float(e[0]), float(e[1])
        jac = np.empty((2, 2))
        for j in range(2):
            step = np.zeros(2)
            step[j] = delta
            f_plus = force(*(e + step))
            f_minus = force(*(e - step))
            jac[:, j] = (f_plus - f_minus) / (2.0 * delta)
        try:
            full_step = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError:
            full_step = np.linalg.lstsq(jac, -r, rcond=None)[0]

        # Damped update, keeping the iterate inside the clearance circle.
        scale = 1.0
        for _ in range(10):
            e_new = e + scale * full_step
            norm_e = float(np.linalg.norm(e_new))
            if norm_e >= 0.98 * c_r:
                e_new *= 0.98 * c_r / norm_e
            r_new = residual(e_new)
            r_new_norm = float(np.linalg.norm(r_new))
            if r_new_norm < r_norm:
                break
            scale *= 0.5
        else:
            break
        e, r, r_norm = e_new, r_new, r_new_norm
        if r_norm < best_norm:
            best_e, best_norm = e.copy(), r_norm

    if best_norm < tol:
        return float(best_e[0]), float(best_e[1])
    raise EquilibriumError(
        f"no equilibrium inside clearance: residual {best_norm:.3e} N vs "
        f"tolerance {tol:.3e} N",
        best_eccentricity=(float(best_e[0]), float(best_e[1])),
        best_residual=best_norm)


def linearized_coefficients(geometry, grid, supply_flowrate, speed,
                            equilibrium, options=None):
    """Stiffness and damping matrices by central differences at equilibrium.

    K[i, j] = -dF_Hi/de_j and C[i, j] = -dF_Hi/dedot_j, the restoring
    convention documented in the module docstring. Perturbations that
    would leave the clearance circle are automatically halved.
    """
    options = options or CharacterizationOptions()
    c_r = geometry.radial_clearance
    e0 = np.asarray(equilibrium, dtype=float)
    force = _FilmForce(geometry, grid, supply_flowrate, speed, options)
    force(e0[0], e0[1])  # prime the warm-start field at the equilibrium

    delta_e = options.displacement_step * c_r
    for _ in range(6):
        if np.linalg.norm(e0) + delta_e < c_r:
            break
        delta_e *= 0.5
    else:
        raise ContactError("equilibrium too close to the wall to perturb")
    delta_v = options.velocity_step * c_r * speed

    stiffness = np.empty((2, 2))
    damping = np.empty((2, 2))
    for j in range(2):
        step = np.zeros(2)
        step[j] = delta_e
        f_plus = force(*(e0 + step))
        f_minus = force(*(e0 - step))
        stiffness[:, j] = -(f_plus - f_minus) / (2.0 * delta_e)
    for j in range(2):
        vel = np.zeros(2)
        vel[j] = delta_v
        f_plus = force(e0[0], e0[1], vel[0], vel[1])
        f_minus = force(e0[0], e0[1], -vel[0], -vel[1])
        damping[:, j] = -(f_plus - f_minus) / (2.0 * delta_v)

    return BearingCoefficients(
        eccentricity_x=float(e0[0]), eccentricity_y=float(e0[1]),
        stiffness=stiffness, damping=damping,
        supply_flowrate=supply_flowrate, rotational_speed=speed)


def characterize_bearing(geometry, grid, supply_flowrate, speed, load,
                         options=None, initial_guess=None):
    """find_equilibrium followed by linearized_coefficients."""
    equilibrium = find_equilibrium(geometry, grid, supply_flowrate, speed,
                                   load, options, initial_guess)
    return linearized_coefficients(geometry, grid, supply_flowrate, speed,
                                   equilibrium, options)


_CSV_FIELDS = ["rotational_speed_rad_s", "supply_flowrate_m3_s",
               "eccentricity_x_m", "eccentricity_y_m",
               "k_xx", "k_xy", "k_yx", "k_yy",
               "c_xx", "c_xy", "c_yx", "c_yy"]


def export_coefficients_csv(path, coefficients):
    """Write a coefficient table keyed by (speed, supply flowrate)."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(_CSV_FIELDS)
        for c in coefficients:
            k, d = c.stiffness, c.damping
            writer.writerow([repr(float(v)) for v in (
                c.rotational_speed, c.supply_flowrate,
                c.eccentricity_x, c.eccentricity_y,
                k[0, 0], k[0, 1], k[1, 0], k[1, 1],
                d[0, 0], d[0, 1], d[1, 0], d[1, 1])])


def load_coefficients_csv(path):
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        out = []
        for row in reader:
            v = {name: float(row[name]) for name in _CSV_FIELDS}
            out.append(BearingCoefficients(
                eccentricity_x=v["eccentricity_x_m"],
                eccentricity_y=v["eccentricity_y_m"],
                stiffness=np.array([[v["k_xx"], v["k_xy"]],
                                    [v["k_yx"], v["k_yy"]]]),
                damping=np.array([[v["c_xx"], v["c_xy"]],
                                  [v["c_yx"], v["c_yy"]]]),
                supply_flowrate=v["supply_flowrate_m3_s"],
                rotational_speed=v["rotational_speed_rad_s"]))
    return out
