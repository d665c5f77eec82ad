# components/liealg.py
#
# The metric Lie algebra g_θ = ℝ^s × (ℝ^k ⋉_ρ ℍ^q) built from a spec, with its
# bracket, Levi-Civita connection, curvature, Nijenhuis tensors and Kähler
# forms, and the checks that certify the flat / Kähler / hyper-Kähler axioms.
#
# Basis layout (orthonormal), used everywhere in this package:
#   [ e_1 .. e_k | centre e_{k+1} .. e_{k+s} | fibre ]
# The fibre is ℍ^q flattened as (f_1, f_1 i, f_1 j, f_1 k, f_2, ...) in
# hyper-Kähler mode, or ℝ^{2m} as m rotation planes in "flat2m" mode.
#
# For teammates:
#   - All algebraic data is dense numpy: structure constants C[i, j, m] are
#     the e_m component of [e_i, e_j], connection coefficients G[i, j, m] the
#     e_m component of ∇_{e_i} e_j. Full tensors are built with einsum and
#     then reduced to a max-abs residual, so one check = one number.
#   - Functions taking an element accept an AlgebraElement or a flat vector.
#   - ℝ^{s+k} ≅ ℍ^p puts X coordinate c (0-based) on the real axis of
#     quaternion c when c < p, and fills the imaginary slots of quaternions
#     1..p in order with the remaining coordinates. See x_to_quaternions().

from dataclasses import dataclass, field

import numpy as np

from components.quat_core import left_matrix, QI, structure_matrix
from utils.errors import OddDimension, SpecInvalid

HYPERKAHLER = "hyperkahler"
FLAT2M = "flat2m"
MODES = (HYPERKAHLER, FLAT2M)

# residual tolerance for algebraic identities, scaled by max(1, |θ|)²
ALG_TOL = 1e-12

# 2×2 rotation generator; J on a plane and ρ on a plane share this pattern
_PLANE = np.array([[0.0, -1.0], [1.0, 0.0]])
_LEFT_I = left_matrix(QI)


@dataclass(frozen=True, eq=False)
class HKGroupSpec:
    s: int
    k: int
    q: int
    theta: np.ndarray
    mode: str = HYPERKAHLER

    def __post_init__(self):
        theta = np.array(self.theta, dtype=float, copy=True)
        if theta.ndim == 1:
            theta = theta.reshape(-1, 1)
        theta.setflags(write=False)
        object.__setattr__(self, "theta", theta)
        _validate(self)

    def __eq__(self, other):
        if not isinstance(other, HKGroupSpec):
            return NotImplemented
        return (
            (self.s, self.k, self.q, self.mode) == (other.s, other.k, other.q, other.mode)
            and np.array_equal(self.theta, other.theta)
        )

    __hash__ = None

    @property
    def nx(self):
        """Dimension of ℝ^s × ℝ^k."""
        return self.s + self.k

    @property
    def p(self):
        return self.nx // 4

    @property
    def block(self):
        return 4 if self.mode == HYPERKAHLER else 2

    @property
    def nw(self):
        return self.block * self.q

    @property
    def dim(self):
        return self.nx + self.nw

    def describe(self):
        return f"s={self.s} k={self.k} q={self.q} mode={self.mode} dim={self.dim}"


def _validate(spec):
    if spec.mode not in MODES:
        raise SpecInvalid(f"mode must be one of {MODES}, got {spec.mode!r}")
    if spec.s < 0 or spec.k < 1 or spec.q < 1:
        raise SpecInvalid(f"need s >= 0, k >= 1, q >= 1 (got s={spec.s}, k={spec.k}, q={spec.q})")
    if spec.theta.shape != (spec.q, spec.k):
        raise SpecInvalid(f"theta must be {spec.q}x{spec.k}, got {spec.theta.shape}")
    if not np.all(np.isfinite(spec.theta)):
        raise SpecInvalid("theta has non-finite entries")
    zero_rows = np.flatnonzero(~np.any(spec.theta != 0.0, axis=1))
    if zero_rows.size:
        raise SpecInvalid(f"theta row(s) {[int(b) + 1 for b in zero_rows]} vanish")
    if np.linalg.matrix_rank(spec.theta) != spec.k:
        raise SpecInvalid(f"rank(theta) must equal k={spec.k}")
    if spec.mode == HYPERKAHLER and spec.nx % 4 != 0:
        raise SpecInvalid(f"hyper-Kähler mode needs s + k divisible by 4 (s + k = {spec.nx})")


def algebra_tolerance(spec):
    return ALG_TOL * max(1.0, float(np.max(np.abs(spec.theta)))) ** 2


# --------- elements ---------

@dataclass(frozen=True)
class AlgebraElement:
    t_part: np.ndarray
    w_part: np.ndarray = field(default_factory=lambda: np.zeros((0, 4)))

    def as_vector(self):
        return np.concatenate([np.ravel(self.t_part), np.ravel(self.w_part)]).astype(float)

    @classmethod
    def from_vector(cls, spec, vec):
        vec = np.asarray(vec, dtype=float)
        return cls(vec[: spec.nx].copy(), vec[spec.nx:].reshape(spec.q, spec.block).copy())


def _vec(spec, a):
    if isinstance(a, AlgebraElement):
        a = a.as_vector()
    a = np.asarray(a, dtype=float)
    if a.shape != (spec.dim,):
        raise SpecInvalid(f"element has shape {a.shape}, expected ({spec.dim},)")
    return a


def basis_vector(spec, index):
    out = np.zeros(spec.dim)
    out[index] = 1.0
    return out


def e(spec, alpha):
    """e_alpha (1-based) in ℝ^{s+k}."""
    return basis_vector(spec, alpha - 1)


def f(spec, beta, unit=0):
    """f_β·u for u = 1, i, j, k (unit 0..3), 1-based β."""
    return basis_vector(spec, spec.nx + spec.block * (beta - 1) + unit)


# --------- ℝ^{s+k} ≅ ℍ^p ---------

def quaternion_slots(p):
    """slots[c] is the flat (p, 4) position of X coordinate c."""
    slots = np.empty(4 * p, dtype=int)
    slots[:p] = 4 * np.arange(p)
    rest = np.arange(3 * p)
    slots[p:] = 4 * (rest // 3) + 1 + rest % 3
    return slots


def x_to_quaternions(x, p):
    flat = np.zeros(4 * p)
    flat[quaternion_slots(p)] = np.asarray(x, dtype=float)
    return flat.reshape(p, 4)


def quaternions_to_x(xq):
    xq = np.asarray(xq, dtype=float)
    p = xq.shape[0]
    return xq.reshape(-1)[quaternion_slots(p)]


# --------- representation and brackets ---------

def rho(spec, T):
    """ρ_θ(T) on the fibre; T has length k (or s + k, centre ignored)."""
    T = np.asarray(T, dtype=float)[: spec.k]
    angles = spec.theta @ T
    pattern = _LEFT_I if spec.mode == HYPERKAHLER else _PLANE
    out = np.zeros((spec.nw, spec.nw))
    b = spec.block
    for beta, t in enumerate(angles):
        out[b * beta: b * (beta + 1), b * beta: b * (beta + 1)] = t * pattern
    return out


def structure_constants(spec):
    n, nx = spec.dim, spec.nx
    C = np.zeros((n, n, n))
    for alpha in range(spec.k):
        T = np.zeros(spec.k)
        T[alpha] = 1.0
        A = rho(spec, T)
        # [e_α, w] = ρ(e_α) w, C[α, j, m] = A[m, j]
        C[alpha, nx:, nx:] = A.T
        C[nx:, alpha, nx:] = -A.T
    return C


def bracket(spec, a, b):
    C = structure_constants(spec)
    return np.einsum("i,j,ijm->m", _vec(spec, a), _vec(spec, b), C)


def connection_coefficients(spec):
    """Koszul formula in an orthonormal basis."""
    C = structure_constants(spec)
    return 0.5 * (C - np.einsum("jmi->ijm", C) + np.einsum("mij->ijm", C))


def connection_operators(spec):
    """N[i] is the matrix of ∇_{e_i} acting on left-invariant fields."""
    return np.swapaxes(connection_coefficients(spec), 1, 2)


def levi_civita(spec, X, Y):
    G = connection_coefficients(spec)
    return np.einsum("i,j,ijm->m", _vec(spec, X), _vec(spec, Y), G)


def curvature_tensor(spec):
    """R[i, j] is the matrix of R(e_i, e_j) = [∇_i, ∇_j] - ∇_[e_i, e_j]."""
    C = structure_constants(spec)
    N = connection_operators(spec)
    NN = np.einsum("iab,jbc->ijac", N, N)
    return NN - np.swapaxes(NN, 0, 1) - np.einsum("ijc,cab->ijab", C, N)


def curvature_alg(spec, X, Y, Z):
    R = curvature_tensor(spec)
    return np.einsum("i,j,ijab,b->a", _vec(spec, X), _vec(spec, Y), R, _vec(spec, Z))


def jacobi_tensor(spec):
    C = structure_constants(spec)
    T = np.einsum("ijc,clm->ijlm", C, C)
    return T + np.einsum("jlim->ijlm", T) + np.einsum("lijm->ijlm", T)


# --------- complex structures and Kähler forms ---------

def complex_structure(spec, axis):
    """J_axis on g_θ: right multiplication by -i, -j, -k on ℍ^p ⊕ ℍ^q."""
    if spec.mode != HYPERKAHLER:
        raise SpecInvalid("complex_structure(axis) needs a hyper-Kähler spec; use kahler_structure_flat")
    p = spec.p
    S = np.zeros((4 * p, 4 * p))
    S[quaternion_slots(p), np.arange(4 * p)] = 1.0
    jx = S.T @ structure_matrix(axis, p) @ S
    out = np.zeros((spec.dim, spec.dim))
    out[: spec.nx, : spec.nx] = jx
    out[spec.nx:, spec.nx:] = structure_matrix(axis, spec.q)
    return out


def _structure(spec, axis, structure):
    return complex_structure(spec, axis) if structure is None else np.asarray(structure, dtype=float)


def nijenhuis_tensor(spec, J):
    """N[a, b] = J([a,b] - [Ja,Jb]) - ([Ja,b] + [a,Jb]) on basis pairs."""
    C = structure_constants(spec)
    JT = J.T  # row a is J e_a
    plain = C
    both = np.einsum("ai,bj,ijm->abm", JT, JT, C)
    left = np.einsum("ai,ijm->ajm", JT, C)
    right = np.einsum("bj,ijm->ibm", JT, C)
    return np.einsum("mk,abk->abm", J, plain - both) - (left + right)


def nijenhuis(spec, axis, X, Y, structure=None):
    J = _structure(spec, axis, structure)
    N = nijenhuis_tensor(spec, J)
    return np.einsum("a,b,abm->m", _vec(spec, X), _vec(spec, Y), N)


def kahler_matrix(J):
    """ω[a, b] = g(J e_a, e_b)."""
    return np.asarray(J).T.copy()


def kahler_form(spec, axis, X, Y, structure=None):
    omega = kahler_matrix(_structure(spec, axis, structure))
    return float(_vec(spec, X) @ omega @ _vec(spec, Y))


def d_omega_tensor(spec, J):
    C = structure_constants(spec)
    omega = kahler_matrix(J)
    return -(
        np.einsum("abm,mc->abc", C, omega)
        + np.einsum("bcm,ma->abc", C, omega)
        + np.einsum("cam,mb->abc", C, omega)
    )


def d_omega(spec, axis, X, Y, Z, structure=None):
    D = d_omega_tensor(spec, _structure(spec, axis, structure))
    return float(np.einsum("a,b,c,abc->", _vec(spec, X), _vec(spec, Y), _vec(spec, Z), D))


def parallel_residual(spec, J):
    """max |∇_{e_i} J - J ∇_{e_i}| over the basis."""
    N = connection_operators(spec)
    return float(np.max(np.abs(N @ J - J @ N), initial=0.0))


# --------- reports ---------

@dataclass
class VerificationReport:
    checks: dict
    tolerance: float
    subject: str = ""

    @property
    def passed(self):
        return all(v <= self.tolerance for v in self.checks.values())

    def failed(self):
        return [name for name, v in self.checks.items() if v > self.tolerance]

    def to_dict(self):
        return {
            "subject": self.subject,
            "passed": self.passed,
            "tolerance": self.tolerance,
            "checks": {name: float(v) for name, v in self.checks.items()},
        }


def _max_abs(arr):
    return float(np.max(np.abs(arr), initial=0.0))


def _complex_checks(spec, J, tag):
    n = spec.dim
    return {
        f"square_{tag}": _max_abs(J @ J + np.eye(n)),
        f"compatible_{tag}": _max_abs(J.T @ J - np.eye(n)),
        f"nijenhuis_{tag}": _max_abs(nijenhuis_tensor(spec, J)),
        f"d_omega_{tag}": _max_abs(d_omega_tensor(spec, J)),
        f"parallel_{tag}": parallel_residual(spec, J),
    }


def verify_hyperkahler(spec):
    if spec.mode != HYPERKAHLER:
        raise SpecInvalid("verify_hyperkahler needs mode 'hyperkahler'")
    checks = {
        "jacobi": _max_abs(jacobi_tensor(spec)),
        "curvature": _max_abs(curvature_tensor(spec)),
    }
    J = {axis: complex_structure(spec, axis) for axis in (1, 2, 3)}
    for axis, Ja in J.items():
        checks.update(_complex_checks(spec, Ja, str(axis)))
    checks["quaternion_relation"] = _max_abs(J[1] @ J[2] - J[3])
    return VerificationReport(checks, algebra_tolerance(spec), spec.describe())


def flat_complex_structure(spec):
    """Pairs consecutive coordinates: J f_{2i+1} = f_{2i+2}, on both factors."""
    if spec.nx % 2:
        raise OddDimension(f"s + k = {spec.nx} is odd, no complex structure")
    out = np.zeros((spec.dim, spec.dim))
    out[: spec.nx, : spec.nx] = np.kron(np.eye(spec.nx // 2), _PLANE)
    out[spec.nx:, spec.nx:] = np.kron(np.eye(spec.nw // 2), _PLANE)
    return out


def kahler_structure_flat(spec):
    """Complex structure of an even-dimensional flat spec plus its report."""
    if spec.mode == HYPERKAHLER:
        spec = as_flat(spec)
    J = flat_complex_structure(spec)
    checks = {"curvature": _max_abs(curvature_tensor(spec))}
    checks.update(_complex_checks(spec, J, "J"))
    return J, VerificationReport(checks, algebra_tolerance(spec), spec.describe())


def as_flat(spec):
    """Same algebra with each ℍ block read as two rotation planes."""
    if spec.mode == FLAT2M:
        return spec
    theta = np.repeat(spec.theta, 2, axis=0)
    return HKGroupSpec(spec.s, spec.k, 2 * spec.q, theta, mode=FLAT2M)


# --------- fixtures ---------

def eight_dim_family(theta=1.0):
    return HKGroupSpec(s=3, k=1, q=1, theta=[[theta]])


def twelve_dim_family(s_param):
    return HKGroupSpec(s=3, k=1, q=2, theta=[[1.0], [s_param]])
