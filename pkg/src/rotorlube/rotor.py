"""Lateral finite-element model of the rotor: shaft, discs, bearings.

Four DOFs per node: translations (x, y) and rotations (alpha about X,
beta about Y), beam bending in both lateral planes with shear
deformation, rotary inertia and gyroscopic coupling. Element matrices
are integrated numerically from the interdependent beam shape functions
(exact for these polynomial integrands), which keeps the cross-plane
sign conventions self-consistent; the test-suite pins them against the
closed-form textbook matrices.

Nodes are numbered 1..n_nodes to match the usual tabulated rotor
descriptions; DOF index of node n starts at 4*(n-1).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .units import GRAVITY

_GAUSS_XI, _GAUSS_W = np.polynomial.legendre.leggauss(6)
_GAUSS_XI = 0.5 * (_GAUSS_XI + 1.0)   # map to [0, 1]
_GAUSS_W = 0.5 * _GAUSS_W


@dataclass(frozen=True)
class Material:
    young_modulus: float
    poisson_ratio: float
    density: float

    def __post_init__(self):
        if self.young_modulus <= 0 or self.density <= 0:
            raise ValidationError("material moduli and density must be positive")
        if not 0.0 < self.poisson_ratio < 0.5:
            raise ValidationError("Poisson ratio must lie in (0, 0.5)")

    @property
    def shear_modulus(self):
        return self.young_modulus / (2.0 * (1.0 + self.poisson_ratio))


@dataclass(frozen=True)
class ShaftElement:
    length: float
    diameter: float
    material: Material

    def __post_init__(self):
        if self.length <= 0 or self.diameter <= 0:
            raise ValidationError("element dimensions must be positive")

    @property
    def area(self):
        return math.pi * self.diameter ** 2 / 4.0

    @property
    def area_inertia(self):
        return math.pi * self.diameter ** 4 / 64.0

    @property
    def shear_factor(self):
        """kappa for a solid circular section, 6(1+nu)/(7+6nu)."""
        nu = self.material.poisson_ratio
        return 6.0 * (1.0 + nu) / (7.0 + 6.0 * nu)

    @property
    def mass(self):
        return self.material.density * self.area * self.length


@dataclass(frozen=True)
class RigidDisc:
    """Rigid disc at a node; bore defaults to zero (solid cylinder)."""

    node: int
    width: float
    outer_diameter: float
    density: float
    bore: float = 0.0

    def __post_init__(self):
        if self.width < 0 or self.outer_diameter <= 0 or self.density <= 0:
            raise ValidationError("disc dimensions must be non-negative")
        if not 0.0 <= self.bore < self.outer_diameter:
            raise ValidationError("disc bore must be smaller than the "
                                  "outer diameter")

    @property
    def mass(self):
        return (self.density * math.pi / 4.0
                * (self.outer_diameter ** 2 - self.bore ** 2) * self.width)

    @property
    def polar_inertia(self):
        return self.mass * (self.outer_diameter ** 2 + self.bore ** 2) / 8.0

    @property
    def diametral_inertia(self):
        r_sq = (self.outer_diameter ** 2 + self.bore ** 2) / 4.0
        return self.mass * (3.0 * r_sq + self.width ** 2) / 12.0


@dataclass(frozen=True)
class UnbalanceSpec:
    """Unbalance mass-eccentricity product [kg.m]; force = moment*speed^2."""

    node: int
    moment: float

    def __post_init__(self):
        if self.moment < 0:
            raise ValidationError("unbalance moment must be non-negative")


@dataclass(frozen=True)
class RotorModel:
    """Assembled global matrices, 4 DOFs per node.

    The gyroscopic matrix enters the equation of motion scaled by the
    spin speed: M qdd + (C + speed*G) qd + K q = F(t). ``damping``
    contains the stiffness-proportional structural part plus any bearing
    damping blocks added by attach_bearings; ``stiffness`` likewise.
    """

    n_nodes: int
    mass: np.ndarray
    damping: np.ndarray
    gyroscopic: np.ndarray
    stiffness: np.ndarray
    gravity_force: np.ndarray
    node_positions: np.ndarray
    bearing_nodes: tuple
    disc_nodes: tuple
    total_mass: float

    def __post_init__(self):
        n = 4 * self.n_nodes
        for name in ("mass", "damping", "gyroscopic", "stiffness"):
            mat = getattr(self, name)
            if mat.shape != (n, n):
                raise ValidationError(f"{name} matrix shape mismatch")
            mat.setflags(write=False)
        self.gravity_force.setflags(write=False)
        self.node_positions.setflags(write=False)

    @property
    def n_dof(self):
        return 4 * self.n_nodes

    def translational_dofs(self, node):
        """(x, y) DOF indices of a 1-based node number."""
        if not 1 <= node <= self.n_nodes:
            raise ValidationError(f"node {node} outside 1..{self.n_nodes}")
        base = 4 * (node - 1)
        return base, base + 1


def _shape_rows(element, xi):
    """Displacement and rotation shape rows at xi for one bending plane."""
    ell = element.length
    e_mod = element.material.young_modulus
    g_mod = element.material.shear_modulus
    phi = (12.0 * e_mod * element.area_inertia
           / (element.shear_factor * g_mod * element.area * ell ** 2))
    c = 1.0 / (1.0 + phi)
    n_row = np.array([
        c * (1.0 - 3.0 * xi ** 2 + 2.0 * xi ** 3 + phi * (1.0 - xi)),
        c * ell * (xi - 2.0 * xi ** 2 + xi ** 3 + 0.5 * phi * (xi - xi ** 2)),
        c * (3.0 * xi ** 2 - 2.0 * xi ** 3 + phi * xi),
        c * ell * (-xi ** 2 + xi ** 3 - 0.5 * phi * (xi - xi ** 2)),
    ])
    p_row = np.array([
        c * 6.0 * (xi ** 2 - xi) / ell,
        c * (1.0 - 4.0 * xi + 3.0 * xi ** 2 + phi * (1.0 - xi)),
        c * 6.0 * (xi - xi ** 2) / ell,
        c * (3.0 * xi ** 2 - 2.0 * xi + phi * xi),
    ])
    dn_row = np.array([
        c * (-6.0 * xi + 6.0 * xi ** 2 - phi) / ell,
        c * (1.0 - 4.0 * xi + 3.0 * xi ** 2 + 0.5 * phi * (1.0 - 2.0 * xi)),
        c * (6.0 * xi - 6.0 * xi ** 2 + phi) / ell,
        c * (-2.0 * xi + 3.0 * xi ** 2 - 0.5 * phi * (1.0 - 2.0 * xi)),
    ])
    dp_row = np.array([
        c * 6.0 * (2.0 * xi - 1.0) / ell ** 2,
        c * (-4.0 + 6.0 * xi + phi * (-1.0)) / ell,
        c * 6.0 * (1.0 - 2.0 * xi) / ell ** 2,
        c * (6.0 * xi - 2.0 + phi) / ell,
    ])
    return n_row, p_row, dn_row, dp_row, phi


_XZ_DOFS = np.array([0, 3, 4, 7])   # x0, beta0, x1, beta1
_YZ_DOFS = np.array([1, 2, 5, 6])   # y0, alpha0, y1, alpha1
_YZ_SIGNS = np.array([1.0, -1.0, 1.0, -1.0])  # alpha = -d(u_y)/dz


def beam_element_matrices(element):
    """Element (M, K, G) 8x8 for DOFs (x0, y0, a0, b0, x1, y1, a1, b1).

    G is the speed-independent gyroscopic matrix; it multiplies the spin
    speed in the equation of motion.
    """
    ell = element.length
    rho = element.material.density
    e_mod = element.material.young_modulus
    g_mod = element.material.shear_modulus
    area = element.area
    inertia = element.area_inertia
    polar = 2.0 * inertia

    k_plane = np.zeros((4, 4))
    mt_plane = np.zeros((4, 4))
    mr_plane = np.zeros((4, 4))
    g_mat = np.zeros((8, 8))
    kappa_ga = element.shear_factor * g_mod * area
    for xi, w in zip(_GAUSS_XI, _GAUSS_W):
        n_row, p_row, dn_row, dp_row, _ = _shape_rows(element, xi)
        gamma = dn_row - p_row
        k_plane += w * ell * (e_mod * inertia * np.outer(dp_row, dp_row)
                              + kappa_ga * np.outer(gamma, gamma))
        mt_plane += w * ell * rho * area * np.outer(n_row, n_row)
        mr_plane += w * ell * rho * inertia * np.outer(p_row, p_row)
        # Rotation rows about X (from the yz plane DOFs) and about Y
        # (xz plane DOFs); their skew product is the gyroscopic matrix.
        a_row = np.zeros(8)
        b_row = np.zeros(8)
        a_row[_YZ_DOFS] = -_YZ_SIGNS * p_row  # alpha-type rotation
        b_row[_XZ_DOFS] = p_row               # beta-type rotation
        g_mat += w * ell * rho * polar * (np.outer(a_row, b_row)
                                          - np.outer(b_row, a_row))

    m_mat = np.zeros((8, 8))
    k_mat = np.zeros((8, 8))
    m_plane = mt_plane + mr_plane
    sign = np.outer(_YZ_SIGNS, _YZ_SIGNS)
    m_mat[np.ix_(_XZ_DOFS, _XZ_DOFS)] = m_plane
    m_mat[np.ix_(_YZ_DOFS, _YZ_DOFS)] = m_plane * sign
    k_mat[np.ix_(_XZ_DOFS, _XZ_DOFS)] = k_plane
    k_mat[np.ix_(_YZ_DOFS, _YZ_DOFS)] = k_plane * sign
    return m_mat, k_mat, g_mat


def disc_matrices(disc):
    """Nodal (M, G) 4x4 of a rigid disc for DOFs (x, y, alpha, beta)."""
    m = disc.mass
    m_mat = np.diag([m, m, disc.diametral_inertia, disc.diametral_inertia])
    g_mat = np.zeros((4, 4))
    g_mat[2, 3] = disc.polar_inertia
    g_mat[3, 2] = -disc.polar_inertia
    return m_mat, g_mat


def assemble_rotor(elements, discs=(), bearing_nodes=(),
                   damping_factor=1e-5, gravity=GRAVITY):
    """Assemble the global rotor model from element and disc lists.

    damping_factor is the stiffness-proportionality constant [s] of the
    structural damping, C = damping_factor * K_shaft. Gravity loads are
    built consistently from the assembled mass matrix, so the gravity
    vector carries nodal moments as well as forces.
    """
    n_nodes = len(elements) + 1
    n = 4 * n_nodes
    for disc in discs:
        if not 1 <= disc.node <= n_nodes:
            raise ValidationError(f"disc node {disc.node} outside the rotor")
    for node in bearing_nodes:
        if not 1 <= node <= n_nodes:
            raise ValidationError(f"bearing node {node} outside the rotor")

    mass = np.zeros((n, n))
    stiffness = np.zeros((n, n))
    gyroscopic = np.zeros((n, n))
    for idx, element in enumerate(elements):
        dofs = np.arange(4 * idx, 4 * idx + 8)
        m_e, k_e, g_e = beam_element_matrices(element)
        mass[np.ix_(dofs, dofs)] += m_e
        stiffness[np.ix_(dofs, dofs)] += k_e
        gyroscopic[np.ix_(dofs, dofs)] += g_e
    for disc in discs:
        base = 4 * (disc.node - 1)
        dofs = np.arange(base, base + 4)
        m_d, g_d = disc_matrices(disc)
        mass[np.ix_(dofs, dofs)] += m_d
        gyroscopic[np.ix_(dofs, dofs)] += g_d

    damping = damping_factor * stiffness

    downward = np.zeros(n)
    downward[1::4] = -1.0
    gravity_force = gravity * (mass @ downward)
    total_mass = float(sum(e.mass for e in elements)
                       + sum(d.mass for d in discs))

    positions = np.concatenate(([0.0],
                                np.cumsum([e.length for e in elements])))
    return RotorModel(
        n_nodes=n_nodes, mass=mass, damping=damping, gyroscopic=gyroscopic,
        stiffness=stiffness, gravity_force=gravity_force,
        node_positions=positions, bearing_nodes=tuple(bearing_nodes),
        disc_nodes=tuple(d.node for d in discs), total_mass=total_mass)


def unbalance_force(spec, speed, t):
    """Rotating nodal force (F_x, F_y, 0, 0) of magnitude moment*speed^2."""
    if speed <= 0:
        raise ValidationError("rotational speed must be positive")
    amp = spec.moment * speed ** 2
    phase = speed * t
    return np.array([amp * math.cos(phase), amp * math.sin(phase), 0.0, 0.0])


def attach_bearings(model, coefficients_by_node):
    """Add bearing stiffness/damping blocks at the translational DOFs.

    With the restoring sign convention of the characterization module
    the 2x2 blocks add positively into the global matrices. Returns a
    new model; the input is unchanged.
    """
    stiffness = model.stiffness.copy()
    damping = model.damping.copy()
    for node, coeffs in coefficients_by_node.items():
        ix, iy = model.translational_dofs(node)
        dofs = np.array([ix, iy])
        stiffness[np.ix_(dofs, dofs)] += coeffs.stiffness
        damping[np.ix_(dofs, dofs)] += coeffs.damping
    return RotorModel(
        n_nodes=model.n_nodes, mass=model.mass.copy(), damping=damping,
        gyroscopic=model.gyroscopic.copy(), stiffness=stiffness,
        gravity_force=model.gravity_force.copy(),
        node_positions=model.node_positions.copy(),
        bearing_nodes=model.bearing_nodes, disc_nodes=model.disc_nodes,
        total_mass=model.total_mass)


def static_pinned_solve(model, pinned_nodes=None):
    """Static gravity solve with (x, y) pinned at the given nodes.

    Returns (displacements, reactions) where reactions maps each pinned
    node to the (R_x, R_y) constraint force acting on the shaft. The
    load a bearing film must carry is the negative of its reaction.
    """
    pinned_nodes = tuple(pinned_nodes or model.bearing_nodes)
    if not pinned_nodes:
        raise ValidationError("static solve needs at least one pinned node")
    constrained = []
    for node in pinned_nodes:
        constrained.extend(model.translational_dofs(node))
    constrained = np.array(constrained)
    free = np.setdiff1d(np.arange(model.n_dof), constrained)

    k_ff = model.stiffness[np.ix_(free, free)]
    k_cf = model.stiffness[np.ix_(constrained, free)]
    u = np.zeros(model.n_dof)
    u[free] = np.linalg.solve(k_ff, model.gravity_force[free])
    r = k_cf @ u[free] - model.gravity_force[constrained]
    reactions = {}
    for idx, node in enumerate(pinned_nodes):
        reactions[node] = (float(r[2 * idx]), float(r[2 * idx + 1]))
    return u, reactions


def whirl_eigenvalues(model, speed):
    """Complex eigenvalues of the first-order form at the given speed."""
    n = model.n_dof
    c_total = model.damping + speed * model.gyroscopic
    a_mat = np.zeros((2 * n, 2 * n))
    a_mat[:n, n:] = np.eye(n)
    minv = np.linalg.inv(model.mass)
    a_mat[n:, :n] = -minv @ model.stiffness
    a_mat[n:, n:] = -minv @ c_total
    return np.linalg.eigvals(a_mat)
