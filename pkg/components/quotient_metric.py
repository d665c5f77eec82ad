# components/quotient_metric.py
#
# The quotient metric h = h₀ + h₁ on L\μ⁻¹(0) in closed form, the flat metric
# of G_θ in monopole coordinates, and a numerical reduction that recomputes
# the quotient metric from first principles to check the closed form.
#
# Chart coordinates on the quotient, in this order:
#   for each non-generator quaternion γ:  x_γ, b_γ, s_γ, p_γ
#   τ_1 .. τ_q                            τ_β = ψ_β - 2 Σ_a θ_β^a x_a
#   r_1 .. r_q                            three components each
#
# Closed form (H is q×q, Ω the diagonal Dirac potentials):
#   H_{βγ} = (θ̃ θ̃ᵗ)_{βγ} + δ_{βγ} / r_β
#   h₁ = ¼ H_{βγ} dr_β·dr_γ + ¼ H^{βγ} (dτ_β + Ω_β·dr_β)(dτ_γ + Ω_γ·dr_γ)
#   h₀ = Euclidean on the non-generator quaternions
#
# For teammates:
#   - G_θ with its left-invariant metric is isometric to flat ℝ^{4p+4q} in
#     the (X, W) coordinates (θ(X) is orthogonal), so the reduction only needs
#     Euclidean pullbacks. See reduction_oracle().
#   - The Dirac string of every potential here is the half axis r = (-t, 0, 0).

import logging
from dataclasses import dataclass

import numpy as np

from components.group import act_L, act_torus, commutator, GroupElement, TorusElement
from components.liealg import HKGroupSpec, quaternions_to_x
from components.moment import LSpec, validate_lspec
from components.quat_core import from_monopole, monopole_coords, QI, qmul, r_vector
from utils.errors import SingularTheta, SpecInvalid, StringLocus, ZeroQuaternion, ZeroRadius

logger = logging.getLogger(__name__)

# r + r_1 below this fraction of r counts as on the string
STRING_TOL = 1e-12
# exclusion zone for numerical work
R_MIN = 1e-3
STRING_MIN = 1e-3
# finite-difference step of the reduction (scaled down near the centres)
ORACLE_STEP = 1e-6
ORACLE_TOL = 1e-6
# default range of the sampled |r_β| (log-uniform)
SAMPLE_RADII = (0.1, 100.0)
PRESET_NAMES = ("taub-nut", "taubian-calabi", "lwy")


@dataclass(frozen=True)
class QuotientChartPoint:
    x: np.ndarray       # (p - l,)
    im_x: np.ndarray    # (p - l, 3)
    tau: np.ndarray     # (q,)
    r: np.ndarray       # (q, 3)

    def as_vector(self):
        flat = np.column_stack([self.x, self.im_x]).ravel() if len(self.x) else np.zeros(0)
        return np.concatenate([flat, np.ravel(self.tau), np.ravel(self.r)])

    @classmethod
    def from_vector(cls, spec, lspec, vec):
        vec = np.asarray(vec, dtype=float)
        n0 = 4 * (spec.p - lspec.l)
        head = vec[:n0].reshape(-1, 4)
        tau = vec[n0: n0 + spec.q]
        r = vec[n0 + spec.q:].reshape(spec.q, 3)
        return cls(head[:, 0].copy(), head[:, 1:].copy(), tau.copy(), r.copy())

    @property
    def radii(self):
        return np.linalg.norm(self.r, axis=1)


@dataclass
class PPMetricData:
    H: np.ndarray
    Hinv: np.ndarray
    Omega: np.ndarray   # (q, 3): Ω_β = Ω_{ββ}; off-diagonal potentials vanish


def chart_dimension(spec, lspec):
    return 4 * (spec.p - lspec.l) + 4 * spec.q


def chart_names(spec, lspec):
    names = []
    for gamma in _free_quaternions(spec, lspec):
        names += [f"{c}_{gamma + 1}" for c in ("x", "b", "s", "p")]
    names += [f"tau_{b + 1}" for b in range(spec.q)]
    for b in range(spec.q):
        names += [f"r{c}_{b + 1}" for c in (1, 2, 3)]
    return names


def _free_quaternions(spec, lspec):
    cols = set(lspec.columns)
    return [g for g in range(spec.p) if g not in cols]


def _theta_tilde(spec, lspec):
    return spec.theta[:, list(lspec.columns)]


# --------- closed form ---------

def h_matrix(spec, lspec, r):
    r = np.asarray(r, dtype=float).reshape(spec.q, 3)
    radii = np.linalg.norm(r, axis=1)
    if np.any(radii == 0.0):
        raise ZeroRadius(f"r_β = 0 for β = {[int(b) + 1 for b in np.flatnonzero(radii == 0.0)]}")
    th = _theta_tilde(spec, lspec)
    return th @ th.T + np.diag(1.0 / radii)


def dirac_potential(r):
    """Ω(r) = (0, -r_3, r_2) / (|r| (|r| + r_1)), curl Ω = -grad(1/|r|)."""
    r = np.asarray(r, dtype=float)
    rn = float(np.linalg.norm(r))
    if rn == 0.0:
        raise ZeroRadius("dirac_potential at r = 0")
    denom = rn * (rn + r[0])
    if rn + r[0] <= STRING_TOL * rn:
        raise StringLocus(f"r = {r.tolist()} lies on the Dirac string")
    return np.array([0.0, -r[2], r[1]]) / denom


def distance_to_string(r):
    r = np.asarray(r, dtype=float)
    if r[0] >= 0.0:
        return float(np.linalg.norm(r))
    return float(np.hypot(r[1], r[2]))


def pp_data(spec, lspec, r):
    H = h_matrix(spec, lspec, r)
    r = np.asarray(r, dtype=float).reshape(spec.q, 3)
    return PPMetricData(H, np.linalg.inv(H), np.array([dirac_potential(rb) for rb in r]))


def _pp_block(H, Hinv, Omega):
    """¼ H dr² + ¼ H⁻¹ (dτ + Ω·dr)² in (τ, r) coordinates."""
    q = H.shape[0]
    omega_mat = np.zeros((q, 3 * q))
    for b in range(q):
        omega_mat[b, 3 * b: 3 * b + 3] = Omega[b]
    out = np.zeros((4 * q, 4 * q))
    out[:q, :q] = 0.25 * Hinv
    out[:q, q:] = 0.25 * Hinv @ omega_mat
    out[q:, :q] = out[:q, q:].T
    out[q:, q:] = 0.25 * np.kron(H, np.eye(3)) + 0.25 * omega_mat.T @ Hinv @ omega_mat
    return out


def pp_metric(spec, lspec, pt):
    validate_lspec(spec, lspec)
    data = pp_data(spec, lspec, pt.r)
    n0 = 4 * (spec.p - lspec.l)
    out = np.zeros((n0 + 4 * spec.q, n0 + 4 * spec.q))
    out[:n0, :n0] = np.eye(n0)
    out[n0:, n0:] = _pp_block(data.H, data.Hinv, data.Omega)
    return out


def flat_chart_metric(W):
    """Euclidean metric of ℍ^q in (ψ_1..ψ_q, r_1..r_q) coordinates at W."""
    W = np.atleast_2d(np.asarray(W, dtype=float))
    norms = np.linalg.norm(W, axis=1)
    if np.any(norms == 0.0):
        raise ZeroQuaternion("flat chart metric is singular where some W_β = 0")
    r = r_vector(W)
    radii = np.linalg.norm(r, axis=1)
    H = np.diag(1.0 / radii)
    return _pp_block(H, np.diag(radii), np.array([dirac_potential(rb) for rb in r]))


def monopole_chart(W):
    """(ψ_1..ψ_q, r_1..r_q) of a fibre point."""
    W = np.atleast_2d(np.asarray(W, dtype=float))
    coords = [monopole_coords(wb) for wb in W]
    return np.concatenate([[c.psi for c in coords], np.ravel([c.r for c in coords])])


def from_monopole_chart(vec, q):
    vec = np.asarray(vec, dtype=float)
    psi, r = vec[:q], vec[q:].reshape(q, 3)
    return np.array([from_monopole(psi[b], r[b]) for b in range(q)])


# --------- numerical reduction ---------

def _embed(spec, lspec, x_gens, chart_vec):
    """Point of μ⁻¹(0) ⊂ G_θ with generator coordinates x_gens over a chart point."""
    pt = QuotientChartPoint.from_vector(spec, lspec, chart_vec)
    cols = list(lspec.columns)
    th = _theta_tilde(spec, lspec)
    psi = pt.tau + 2.0 * th @ np.asarray(x_gens, dtype=float)
    W = from_monopole_chart(np.concatenate([psi, pt.r.ravel()]), spec.q)

    xq = np.zeros((spec.p, 4))
    xq[cols, 0] = x_gens
    xq[cols, 1:] = 0.5 * th.T @ pt.r
    free = _free_quaternions(spec, lspec)
    xq[free, 0] = pt.x
    xq[free, 1:] = pt.im_x
    return np.concatenate([quaternions_to_x(xq), W.ravel()])


def _central_jacobian(func, base, step):
    cols = []
    for i in range(base.size):
        dv = np.zeros_like(base)
        dv[i] = step
        cols.append((func(base + dv) - func(base - dv)) / (2.0 * step))
    return np.column_stack(cols)


def reduction_oracle(spec, lspec, pt, step=ORACLE_STEP):
    """
    Quotient metric recomputed by Riemannian submersion.

    The chart point is lifted into μ⁻¹(0), the Euclidean metric of G_θ is
    pulled back along the lift (with the L-orbit coordinates x_a added), and
    the x_a directions are projected out by a Schur complement.
    """
    validate_lspec(spec, lspec)
    radii = pt.radii
    if np.any(radii == 0.0):
        raise ZeroRadius("reduction_oracle needs every r_β != 0")
    for rb in pt.r:
        dirac_potential(rb)
    l = lspec.l
    h = step * min(1.0, float(np.min(radii)))
    base = np.concatenate([np.zeros(l), pt.as_vector()])
    jac = _central_jacobian(lambda v: _embed(spec, lspec, v[:l], v[l:]), base, h)
    G = jac.T @ jac
    if l == 0:
        return G
    gxx, gxc, gcc = G[:l, :l], G[:l, l:], G[l:, l:]
    return gcc - gxc.T @ np.linalg.solve(gxx, gxc)


# --------- orbit space L\G_θ ---------

def orbit_space_dimension(spec, lspec):
    return 4 * spec.p + 4 * spec.q - lspec.l


def orbit_space_metric(spec, lspec, y):
    """
    Metric of L\\G_θ on the slice x_a = 0.

    y lists the X coordinates other than the generator columns (in order),
    then W flattened. Only the W part enters the metric.
    """
    validate_lspec(spec, lspec)
    y = np.asarray(y, dtype=float)
    n_x = spec.nx - lspec.l
    W = y[n_x:].reshape(spec.q, 4)
    th = _theta_tilde(spec, lspec)
    # Killing field of e_a: e_a ⊕ i θ^a W
    iw = qmul(np.broadcast_to(QI, W.shape), W)
    killing_w = np.einsum("ba,bc->abc", th, iw).reshape(lspec.l, -1)
    gxx = np.eye(lspec.l) + killing_w @ killing_w.T
    gxy = np.zeros((lspec.l, y.size))
    gxy[:, n_x:] = killing_w
    return np.eye(y.size) - gxy.T @ np.linalg.solve(gxx, gxy)


def orbit_slice_point(spec, lspec, g):
    """Slice coordinates y of the L-orbit through g."""
    keep = [c for c in range(spec.nx) if c not in set(lspec.columns)]
    x = np.asarray(g.X, dtype=float)
    # move to x_a = 0 along the orbit
    g0 = act_L(spec, lspec.columns, -x[list(lspec.columns)], g)
    return np.concatenate([np.asarray(g0.X)[keep], np.ravel(g0.W)])


# --------- presets and facts ---------

def preset(name, theta=None, m=None, weights=None):
    """(spec, lspec) for taub-nut(θ), taubian-calabi(m, weights), lwy(θ ∈ GL(m))."""
    if name == "taub-nut":
        value = 1.0 if theta is None else float(np.asarray(theta, dtype=float).ravel()[0])
        return HKGroupSpec(s=3, k=1, q=1, theta=[[value]]), LSpec((1,))
    if name == "taubian-calabi":
        if weights is None:
            weights = np.ones(2 if m is None else int(m))
        weights = np.asarray(weights, dtype=float).ravel()
        if m is not None and weights.size != int(m):
            raise SpecInvalid(f"taubian-calabi got m={m} but {weights.size} weights")
        return HKGroupSpec(s=3, k=1, q=weights.size, theta=weights.reshape(-1, 1)), LSpec((1,))
    if name == "lwy":
        th = np.eye(2) if theta is None else np.atleast_2d(np.asarray(theta, dtype=float))
        if th.shape[0] != th.shape[1]:
            raise SingularTheta(f"lwy needs a square theta, got {th.shape}")
        if np.linalg.matrix_rank(th) < th.shape[0]:
            raise SingularTheta("lwy needs an invertible theta")
        size = th.shape[0]
        return HKGroupSpec(s=3 * size, k=size, q=size, theta=th), LSpec(tuple(range(1, size + 1)))
    raise SpecInvalid(f"unknown preset {name!r}; choose from {PRESET_NAMES}")


def quotient_dimension(spec, lspec):
    return 4 * spec.p + 4 * spec.q - 4 * lspec.l


@dataclass
class FixedPointReport:
    applies: bool
    origin_fixed: bool
    origin_torus_fixed: bool
    candidates: int
    not_fixed: int

    @property
    def passed(self):
        return self.origin_fixed and self.origin_torus_fixed and self.not_fixed == self.candidates

    def to_dict(self):
        return {
            "applies": self.applies,
            "origin_fixed": self.origin_fixed,
            "origin_torus_fixed": self.origin_torus_fixed,
            "candidates": self.candidates,
            "not_fixed": self.not_fixed,
            "passed": self.passed,
        }


def _in_L(spec, lspec, g, tol):
    x = np.asarray(g.X, dtype=float).copy()
    x[list(lspec.columns)] = 0.0
    return float(np.max(np.abs(x), initial=0.0)) <= tol and float(np.max(np.abs(g.W))) <= tol


def _commutator_in_L(spec, lspec, g, directions, tol):
    for V in directions:
        c = commutator(spec, GroupElement(V, np.zeros((spec.q, 4))), g)
        if not _in_L(spec, lspec, c, tol):
            return False
    return True


def fixed_point_check(spec, lspec, samples, rng, tol=1e-9):
    """
    The class of (X, W) is fixed iff (V,0)(X,W)(V,0)⁻¹(X,W)⁻¹ ∈ L for all V.
    The origin must pass; random points with W != 0 must fail.
    """
    validate_lspec(spec, lspec)
    directions = [rng.standard_normal(spec.nx) for _ in range(4)]
    origin = GroupElement.identity(spec)
    origin_fixed = _commutator_in_L(spec, lspec, origin, directions, tol)
    phi = TorusElement(rng.uniform(0.0, 2 * np.pi, spec.q))
    origin_torus_fixed = act_torus(spec, phi, origin).distance(origin) <= tol

    not_fixed = 0
    for _ in range(samples):
        W = rng.standard_normal((spec.q, 4))
        g = GroupElement(rng.standard_normal(spec.nx), W)
        if not _commutator_in_L(spec, lspec, g, directions, tol):
            not_fixed += 1
    applies = lspec.l == spec.p == spec.q
    report = FixedPointReport(applies, origin_fixed, origin_torus_fixed, samples, not_fixed)
    logger.info("fixed point check: %d/%d sampled points not fixed", not_fixed, samples)
    return report


# --------- sampling ---------

def sample_directions(rng, count, hemisphere=True):
    v = rng.standard_normal((count, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    if hemisphere:
        v[:, 0] = np.abs(v[:, 0])
    return v


def sample_chart_points(spec, lspec, rng, count, radii=SAMPLE_RADII, hemisphere=True):
    lo, hi = radii
    if not 0.0 < lo <= hi:
        raise SpecInvalid(f"sampling radii need 0 < lo <= hi, got {radii}")
    n_free = spec.p - lspec.l
    points = []
    for _ in range(count):
        rad = np.exp(rng.uniform(np.log(lo), np.log(hi), spec.q))
        r = sample_directions(rng, spec.q, hemisphere) * rad[:, None]
        points.append(
            QuotientChartPoint(
                x=rng.standard_normal(n_free),
                im_x=rng.standard_normal((n_free, 3)),
                tau=rng.uniform(0.0, 4 * np.pi, spec.q),
                r=r,
            )
        )
    return points


def radial_points(spec, lspec, radii, direction=(0.0, 0.0, 1.0)):
    """Chart points with every r_β = radius · direction, other coordinates zero."""
    direction = np.asarray(direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    n_free = spec.p - lspec.l
    return [
        QuotientChartPoint(
            x=np.zeros(n_free),
            im_x=np.zeros((n_free, 3)),
            tau=np.zeros(spec.q),
            r=np.tile(radius * direction, (spec.q, 1)),
        )
        for radius in radii
    ]


def compare_with_oracle(spec, lspec, points, step=ORACLE_STEP):
    """Max entrywise |pp_metric - reduction_oracle| per point."""
    out = []
    for pt in points:
        diff = np.abs(pp_metric(spec, lspec, pt) - reduction_oracle(spec, lspec, pt, step))
        out.append(float(np.max(diff)))
    return out
