# components/quat_core.py
#
# Quaternion arithmetic on numpy arrays, the hypercomplex structure given by
# right multiplication, and the monopole coordinates (ψ, r) of a quaternion.
#
# Conventions:
#   - A quaternion is a length-4 array (re, i, j, k). A quaternionic vector in
#     ℍ^n is an (n, 4) array; flattened it is the Euclidean ℝ^{4n}.
#   - J_1, J_2, J_3 are right multiplication by -i, -j, -k.
#   - r = W̄ i W, read as its (i, j, k) components.
#   - W = e^{iψ/2} a(r) with a(r) pure imaginary, ψ in (0, 4π].
#
# For teammates:
#   - Everything here is vectorised over leading axes: qmul(a, b) works for
#     a.shape == b.shape == (..., 4).
#   - The `Quaternion` dataclass is a thin scalar wrapper for readability in
#     tests and the CLI; the array functions are what the other components use.

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from utils.errors import ZeroQuaternion

FOUR_PI = 4.0 * np.pi

# 2(|r| + r_1) <= STRING_REL_TOL * |r| counts as on the Dirac string
STRING_REL_TOL = 1e-12

# unit quaternions 1, i, j, k
BASIS = np.eye(4)
ONE, QI, QJ, QK = BASIS


# --------- products ---------

def qmul(a, b):
    """Hamilton product of quaternion arrays, shape (..., 4)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a0, a1, a2, a3 = np.moveaxis(a, -1, 0)
    b0, b1, b2, b3 = np.moveaxis(b, -1, 0)
    return np.stack(
        [
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        ],
        axis=-1,
    )


def qconj(a):
    a = np.asarray(a, dtype=float)
    return a * np.array([1.0, -1.0, -1.0, -1.0])


def qnorm(a):
    return np.linalg.norm(np.asarray(a, dtype=float), axis=-1)


def qexp_i(angle):
    """e^{i·angle} for a scalar or array of angles, shape (..., 4)."""
    angle = np.asarray(angle, dtype=float)
    out = np.zeros(angle.shape + (4,))
    out[..., 0] = np.cos(angle)
    out[..., 1] = np.sin(angle)
    return out


def left_matrix(q):
    """4×4 real matrix of v ↦ q·v."""
    return np.column_stack([qmul(q, e) for e in BASIS])


def right_matrix(q):
    """4×4 real matrix of v ↦ v·q."""
    return np.column_stack([qmul(e, q) for e in BASIS])


# --------- hypercomplex structure ---------

_RIGHT_UNITS = {1: -QI, 2: -QJ, 3: -QK}


def _check_axis(axis):
    if axis not in _RIGHT_UNITS:
        raise ValueError(f"axis must be 1, 2 or 3, got {axis!r}")


def right_structure(axis, v):
    """J_axis(v) = v·(-i), v·(-j) or v·(-k), applied entrywise on ℍ^n."""
    _check_axis(axis)
    v = np.asarray(v, dtype=float)
    return qmul(v, np.broadcast_to(_RIGHT_UNITS[axis], v.shape))


def structure_block(axis):
    """4×4 matrix of J_axis on one quaternionic coordinate."""
    _check_axis(axis)
    return right_matrix(_RIGHT_UNITS[axis])


def structure_matrix(axis, n):
    """4n×4n matrix of J_axis on ℍ^n (block diagonal)."""
    return np.kron(np.eye(n), structure_block(axis))


# --------- monopole coordinates ---------

def r_vector(W):
    """Imaginary part of W̄ i W as (i, j, k) components; shape (..., 3)."""
    W = np.asarray(W, dtype=float)
    prod = qmul(qmul(qconj(W), np.broadcast_to(QI, W.shape)), W)
    return prod[..., 1:]


def section(r, branch=1):
    """
    Pure imaginary a with -a i a = r, as a quaternion (0, a_i, a_j, a_k).

    a(r) = (|r|·e_1 + r) / sqrt(2(|r| + r_1)). It is singular on the half axis
    r = (-t, 0, 0), t > 0 (the Dirac string); there any unit a ⊥ i works and
    we use sqrt(|r|)·j. `branch=-1` returns -a(r), which shifts ψ by 2π.
    """
    r = np.asarray(r, dtype=float)
    rn = float(np.linalg.norm(r))
    if rn == 0.0:
        raise ZeroQuaternion("r = 0 has no monopole section")
    denom = 2.0 * (rn + r[0])
    if denom <= STRING_REL_TOL * rn:
        a = np.sqrt(rn) * QJ
    else:
        a = np.concatenate([[0.0], (rn * np.array([1.0, 0.0, 0.0]) + r) / np.sqrt(denom)])
    return branch * a


@dataclass(frozen=True)
class MonopoleCoords:
    psi: float
    r: tuple

    @property
    def radius(self):
        return float(np.linalg.norm(self.r))


def monopole_coords(W, branch=1):
    """Split W = e^{iψ/2} a(r) and return (ψ, r) with ψ in (0, 4π]."""
    W = np.asarray(W, dtype=float)
    norm = float(qnorm(W))
    if norm == 0.0:
        raise ZeroQuaternion("monopole coordinates are singular at W = 0")
    r = r_vector(W)
    a = section(r, branch)
    # W·a⁻¹ lies in span{1, i}
    phase = qmul(W, qconj(a)) / float(np.dot(a, a))
    half = np.arctan2(phase[1], phase[0])
    psi = 2.0 * half
    if psi <= 0.0:
        psi += FOUR_PI
    return MonopoleCoords(psi=float(psi), r=tuple(float(c) for c in r))


def from_monopole(psi, r, branch=1):
    """Inverse of monopole_coords: W = e^{iψ/2} a(r)."""
    return qmul(qexp_i(0.5 * psi), section(r, branch))


# --------- scalar wrapper ---------

@dataclass(frozen=True)
class Quaternion:
    re: float = 0.0
    im_i: float = 0.0
    im_j: float = 0.0
    im_k: float = 0.0

    @classmethod
    def from_array(cls, arr):
        re, i, j, k = (float(c) for c in np.asarray(arr, dtype=float))
        return cls(re, i, j, k)

    def as_array(self):
        return np.array([self.re, self.im_i, self.im_j, self.im_k])

    def __mul__(self, other):
        return Quaternion.from_array(qmul(self.as_array(), other.as_array()))

    def __add__(self, other):
        return Quaternion.from_array(self.as_array() + other.as_array())

    def __neg__(self):
        return Quaternion.from_array(-self.as_array())

    def conjugate(self):
        return Quaternion(self.re, -self.im_i, -self.im_j, -self.im_k)

    def norm(self):
        return float(qnorm(self.as_array()))
