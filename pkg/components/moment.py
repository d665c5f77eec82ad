# components/moment.py
#
# Hyper-Kähler moment map of the left L-action on G_θ, in three equivalent
# forms, plus the zero level set parameterisation and the checks built on it.
#
#   quaternionic:  μ(e_a) = -Im X_a + ½ Σ_β θ_β^a  W̄_β i W_β
#   abstract:      μ_α(V) = ω_α(V, X) + ½ ω_α(ρ_θ(V) W, W)
#   components:    the same, written out in X_a = x_a + b_a i + s_a j + p_a k
#                  and W_β = u_β + y_β i + z_β j + w_β k
#
# A MomentValue is an (l, 3) array; row a holds (μ_1, μ_2, μ_3) on e_a.
#
# For teammates:
#   - LSpec.generators are 1-based acting directions; `columns` gives the
#     0-based positions. A generator c is the real axis of quaternion c of
#     ℍ^p, so its Im X lives in the same quaternion.
#   - moment() is the quaternionic form and is what everything else calls;
#     the other two forms exist as independent cross-checks.

import logging
from dataclasses import dataclass

import numpy as np

from components.group import act_L, check_element, GroupElement
from components.liealg import (
    complex_structure,
    connection_coefficients,
    HYPERKAHLER,
    quaternions_to_x,
    rho,
    x_to_quaternions,
)
from components.quat_core import r_vector
from utils.errors import IsotropyViolation, SpecInvalid

logger = logging.getLogger(__name__)

ISOTROPY_TOL = 1e-12
# central differences are exact on quadratics; this only bounds round-off
JACOBIAN_STEP = 1e-6
RANK_TOL = 1e-8


@dataclass(frozen=True)
class LSpec:
    generators: tuple = (1,)

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(int(c) for c in self.generators))

    @property
    def l(self):
        return len(self.generators)

    @property
    def columns(self):
        return tuple(c - 1 for c in self.generators)


def default_lspec(l=1):
    return LSpec(tuple(range(1, l + 1)))


@dataclass
class LSpecReport:
    isotropy: float
    fibre_geodesic: float

    def to_dict(self):
        return {"isotropy": self.isotropy, "fibre_geodesic": self.fibre_geodesic}


def validate_lspec(spec, lspec):
    """Raise on an unusable L; otherwise return isotropy / geodesic residuals."""
    if spec.mode != HYPERKAHLER:
        raise SpecInvalid("moment maps need a hyper-Kähler spec")
    gens = lspec.generators
    if lspec.l == 0:
        return LSpecReport(0.0, 0.0)
    if len(set(gens)) != len(gens):
        raise SpecInvalid(f"generators repeat: {gens}")
    if any(c < 1 or c > spec.k for c in gens):
        raise SpecInvalid(f"generators must lie in 1..k={spec.k}, got {gens}")
    if lspec.l > spec.p:
        raise SpecInvalid(f"l={lspec.l} exceeds p={spec.p}")

    cols = list(lspec.columns)
    worst = 0.0
    for axis in (1, 2, 3):
        omega = complex_structure(spec, axis).T[np.ix_(cols, cols)]
        worst = max(worst, float(np.max(np.abs(omega))))
    if worst > ISOTROPY_TOL:
        raise IsotropyViolation(f"span of e_{gens} is not isotropic (max |ω| = {worst:.3g})")
    if any(c > spec.p for c in gens):
        raise SpecInvalid(f"generators must be real quaternionic axes, i.e. <= p={spec.p}")

    # fibres of L are totally geodesic: ∇_{e_a} e_b = 0 on 𝔩
    G = connection_coefficients(spec)
    geodesic = float(np.max(np.abs(G[np.ix_(cols, cols)]), initial=0.0))
    return LSpecReport(worst, geodesic)


def _theta_tilde(spec, lspec):
    return spec.theta[:, list(lspec.columns)]


# --------- the three forms ---------

def moment(spec, lspec, g):
    validate_lspec(spec, lspec)
    check_element(spec, g)
    xq = x_to_quaternions(g.X, spec.p)
    r = r_vector(np.asarray(g.W, dtype=float))
    cols = list(lspec.columns)
    return -xq[cols, 1:] + 0.5 * _theta_tilde(spec, lspec).T @ r


def moment_abstract(spec, lspec, g):
    validate_lspec(spec, lspec)
    check_element(spec, g)
    nx = spec.nx
    x = np.asarray(g.X, dtype=float)
    w = np.asarray(g.W, dtype=float).ravel()
    structures = [complex_structure(spec, axis) for axis in (1, 2, 3)]
    out = np.zeros((lspec.l, 3))
    for a, c in enumerate(lspec.columns):
        V = np.zeros(nx)
        V[c] = 1.0
        rw = rho(spec, V) @ w
        for alpha, J in enumerate(structures):
            Jx, Jw = J[:nx, :nx], J[nx:, nx:]
            out[a, alpha] = (Jx @ V) @ x + 0.5 * (Jw @ rw) @ w
    return out


def moment_components(spec, lspec, g, T):
    """(μ_1, μ_2, μ_3) paired with T ∈ ℝ^l, in real coordinates."""
    validate_lspec(spec, lspec)
    check_element(spec, g)
    T = np.asarray(T, dtype=float)
    xq = x_to_quaternions(g.X, spec.p)
    u, y, z, w = np.asarray(g.W, dtype=float).T
    th = _theta_tilde(spec, lspec)
    cols = list(lspec.columns)
    b, s, p = xq[cols, 1], xq[cols, 2], xq[cols, 3]
    weights = th @ T  # Σ_α θ_β^α t_α
    mu1 = -b @ T + 0.5 * weights @ (u**2 + y**2 - z**2 - w**2)
    mu2 = -s @ T + weights @ (z * y - u * w)
    mu3 = -p @ T + weights @ (u * z + w * y)
    return np.array([mu1, mu2, mu3])


# --------- level sets ---------

def level_set_lift(spec, lspec, x, im_x, W):
    """
    Point of μ⁻¹(0) from free coordinates.

    x: real parts of all p quaternions of X; im_x: (p - l, 3) imaginary
    parts of the non-generator quaternions in increasing order; W: (q, 4).
    The generator imaginary parts are solved from μ = 0.
    """
    validate_lspec(spec, lspec)
    W = np.asarray(W, dtype=float).reshape(spec.q, 4)
    x = np.asarray(x, dtype=float)
    cols = list(lspec.columns)
    others = [g for g in range(spec.p) if g not in cols]
    im_x = np.asarray(im_x, dtype=float).reshape(len(others), 3)

    xq = np.zeros((spec.p, 4))
    xq[:, 0] = x
    xq[others, 1:] = im_x
    xq[cols, 1:] = 0.5 * _theta_tilde(spec, lspec).T @ r_vector(W)
    return GroupElement(quaternions_to_x(xq), W)


def level_residual(spec, lspec, g, xi=None):
    """max |μ(g) - ξ|; ξ is an (l, 3) array, zero by default."""
    mu = moment(spec, lspec, g)
    xi = np.zeros_like(mu) if xi is None else np.asarray(xi, dtype=float).reshape(mu.shape)
    return float(np.max(np.abs(mu - xi), initial=0.0))


def check_invariance(spec, lspec, g, V):
    moved = act_L(spec, lspec.columns, V, g)
    return float(np.max(np.abs(moment(spec, lspec, moved) - moment(spec, lspec, g)), initial=0.0))


# --------- regularity ---------

def moment_jacobian(spec, lspec, g, step=JACOBIAN_STEP):
    """(3l) × (4p + 4q) derivative of the flattened moment map."""
    base = np.concatenate([np.asarray(g.X, dtype=float), np.ravel(g.W)])
    cols = []
    for i in range(base.size):
        dv = np.zeros_like(base)
        dv[i] = step
        plus = moment(spec, lspec, GroupElement.from_vector(spec, base + dv))
        minus = moment(spec, lspec, GroupElement.from_vector(spec, base - dv))
        cols.append(((plus - minus) / (2.0 * step)).ravel())
    return np.column_stack(cols)


def is_regular(spec, lspec, g, tol=RANK_TOL):
    jac = moment_jacobian(spec, lspec, g)
    rank = np.linalg.matrix_rank(jac, tol=tol)
    logger.debug("moment jacobian rank %d of %d", rank, 3 * lspec.l)
    return rank == 3 * lspec.l
