# components/group.py
#
# Group law on G_θ = ℝ^{s+k} ⋉_θ ℍ^q and its two commuting actions: left
# translation by the abelian subgroup L and the torus T^q acting on the fibre.
#
#   (X, W)·(X', W')  = (X + X', W + θ(X) W')
#   θ(X) W           = per-β left multiplication by e^{i<X, θ_β>}
#
# X keeps the acting coordinates first (only X[:k] enters the twist). W is a
# (q, 4) array. Hyper-Kähler mode only; flat2m specs have no quaternionic
# fibre to twist.

from dataclasses import dataclass

import numpy as np

from components.liealg import HYPERKAHLER
from components.quat_core import left_matrix, qexp_i, qmul, QI
from utils.errors import SpecInvalid


@dataclass(frozen=True)
class GroupElement:
    X: np.ndarray
    W: np.ndarray

    def as_vector(self):
        return np.concatenate([np.ravel(self.X), np.ravel(self.W)])

    @classmethod
    def from_vector(cls, spec, vec):
        vec = np.asarray(vec, dtype=float)
        return cls(vec[: spec.nx].copy(), vec[spec.nx:].reshape(spec.q, 4).copy())

    @classmethod
    def identity(cls, spec):
        return cls(np.zeros(spec.nx), np.zeros((spec.q, 4)))

    def distance(self, other):
        return float(np.max(np.abs(self.as_vector() - other.as_vector())))


@dataclass(frozen=True)
class TorusElement:
    phi: np.ndarray

    def matrix(self):
        """4q×4q block matrix of W ↦ B(φ) W."""
        phi = np.atleast_1d(np.asarray(self.phi, dtype=float))
        out = np.zeros((4 * phi.size, 4 * phi.size))
        for beta, angle in enumerate(phi):
            out[4 * beta: 4 * beta + 4, 4 * beta: 4 * beta + 4] = torus_block(angle)
        return out


def torus_block(angle):
    """B(φ): rotation by φ in the (1, i) and (j, k) planes."""
    return left_matrix(qexp_i(angle))


def check_element(spec, g):
    if spec.mode != HYPERKAHLER:
        raise SpecInvalid("group operations need a hyper-Kähler spec")
    X = np.asarray(g.X, dtype=float)
    W = np.asarray(g.W, dtype=float)
    if X.shape != (spec.nx,) or W.shape != (spec.q, 4):
        raise SpecInvalid(f"group element shapes {X.shape}, {W.shape} do not match {spec.describe()}")
    return X, W


def angles(spec, X):
    """<X, θ_β> for every β."""
    return spec.theta @ np.asarray(X, dtype=float)[: spec.k]


def twist(spec, X, W):
    return qmul(qexp_i(angles(spec, X)), W)


def twist_matrix(spec, X):
    """Matrix of θ(X) on ℝ^{4q}; also the fibre part of dL_h for h = (X, ·)."""
    out = np.zeros((spec.nw, spec.nw))
    for beta, angle in enumerate(angles(spec, X)):
        out[4 * beta: 4 * beta + 4, 4 * beta: 4 * beta + 4] = torus_block(angle)
    return out


def left_translation_matrix(spec, h):
    """dL_h on ℝ^{s+k} ⊕ ℝ^{4q}."""
    X, _ = check_element(spec, h)
    out = np.eye(spec.dim)
    out[spec.nx:, spec.nx:] = twist_matrix(spec, X)
    return out


def multiply(spec, g1, g2):
    X1, W1 = check_element(spec, g1)
    X2, W2 = check_element(spec, g2)
    return GroupElement(X1 + X2, W1 + twist(spec, X1, W2))


def inverse(spec, g):
    X, W = check_element(spec, g)
    return GroupElement(-X, -twist(spec, -X, W))


def conjugate(spec, g, h):
    """g·h·g⁻¹ = (X', W + θ(X) W' - θ(X') W)."""
    X, W = check_element(spec, g)
    Xh, Wh = check_element(spec, h)
    return GroupElement(Xh.copy(), W + twist(spec, X, Wh) - twist(spec, Xh, W))


def commutator(spec, g, h):
    return multiply(spec, multiply(spec, g, h), multiply(spec, inverse(spec, g), inverse(spec, h)))


def _rho_w(spec, T, W):
    """ρ_θ(T) W with the quaternionic left action i<T, θ_β>."""
    a = angles(spec, T)
    return qmul(np.broadcast_to(QI, W.shape), W) * a[:, None]


def adjoint(spec, g, a):
    """Ad(X, W)(X', W') = (X', θ(X) W' - ρ_θ(X') W). `a` is an AlgebraElement or vector."""
    X, W = check_element(spec, g)
    vec = a.as_vector() if hasattr(a, "as_vector") else np.asarray(a, dtype=float)
    Xa, Wa = vec[: spec.nx], vec[spec.nx:].reshape(spec.q, 4)
    out_w = twist(spec, X, Wa) - _rho_w(spec, Xa, W)
    return np.concatenate([Xa, out_w.ravel()])


def embed_generators(spec, columns, V):
    """V ∈ ℝ^l placed on the (0-based) acting columns of ℝ^{s+k}."""
    out = np.zeros(spec.nx)
    out[list(columns)] = np.asarray(V, dtype=float)
    return out


def act_L(spec, columns, V, g):
    """A(V, (X, W)) = (V + X, θ(V) W), V ∈ ℝ^l on the given acting columns."""
    X, W = check_element(spec, g)
    full = embed_generators(spec, columns, V)
    return GroupElement(full + X, twist(spec, full, W))


def act_torus(spec, t, g):
    X, W = check_element(spec, g)
    phi = np.atleast_1d(np.asarray(t.phi if isinstance(t, TorusElement) else t, dtype=float))
    if phi.shape != (spec.q,):
        raise SpecInvalid(f"torus element needs {spec.q} angles, got {phi.shape}")
    return GroupElement(X.copy(), qmul(qexp_i(phi), W))


def random_element(spec, rng, scale=1.0):
    return GroupElement(
        scale * rng.standard_normal(spec.nx),
        scale * rng.standard_normal((spec.q, 4)),
    )
