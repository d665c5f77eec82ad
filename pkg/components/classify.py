# components/classify.py
#
# Metric equivalence of θ-specs under the torus normaliser: θ' = P S θ A with
# P a row permutation, S a diagonal of row signs and A ∈ O(k).
#
# For teammates:
#   - invariants() is cheap and only a necessary condition. Different
#     invariants mean "not equivalent"; equal invariants mean "run the search".
#   - equivalent_monomial() tries every (P, S) and solves for A with an
#     orthogonal Procrustes fit. A False verdict means no monomial witness,
#     which is a proof of inequivalence only when the invariants differ too.

import itertools
import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import orthogonal_procrustes

from utils.errors import ProblemTooLarge, ShapeMismatch

logger = logging.getLogger(__name__)

MAX_Q = 8
WITNESS_TOL = 1e-9
# two invariant values closer than this count as the same
INVARIANT_DECIMALS = 9


@dataclass(frozen=True)
class EquivalenceInvariants:
    signature: tuple
    row_norms: tuple
    gram_eigenvalues: tuple

    def to_dict(self):
        return {
            "signature": list(self.signature),
            "row_norms": list(self.row_norms),
            "gram_eigenvalues": list(self.gram_eigenvalues),
        }

    @property
    def degenerate(self):
        """Repeated values, where non-monomial symmetries might exist."""
        return _has_repeats(self.row_norms) or _has_repeats(self.gram_eigenvalues)


def _has_repeats(values):
    return len(set(values)) < len(values)


def _rounded(values):
    # + 0.0 folds -0.0 into 0.0
    return tuple(float(v) + 0.0 for v in np.round(np.sort(values), INVARIANT_DECIMALS))


def same_invariants(inv1, inv2, atol=1e-8):
    if inv1.signature != inv2.signature:
        return False
    return np.allclose(inv1.row_norms, inv2.row_norms, rtol=0.0, atol=atol) and np.allclose(
        inv1.gram_eigenvalues, inv2.gram_eigenvalues, rtol=0.0, atol=atol
    )


def invariants(spec):
    theta = np.asarray(spec.theta, dtype=float)
    return EquivalenceInvariants(
        signature=(spec.s, spec.k, spec.q),
        row_norms=_rounded(np.linalg.norm(theta, axis=1)),
        gram_eigenvalues=_rounded(np.linalg.eigvalsh(theta.T @ theta)),
    )


@dataclass
class Witness:
    permutation: tuple
    signs: tuple
    rotation: np.ndarray
    residual: float

    def apply(self, theta):
        """P S θ A."""
        theta = np.asarray(theta, dtype=float)
        signed = theta * np.asarray(self.signs, dtype=float)[:, None]
        return signed[list(self.permutation)] @ self.rotation

    def to_dict(self):
        return {
            "permutation": [int(i) for i in self.permutation],
            "signs": [int(s) for s in self.signs],
            "rotation": np.asarray(self.rotation).tolist(),
            "residual": self.residual,
        }


@dataclass
class Verdict:
    equivalent: bool
    witness: Witness | None
    invariants_1: EquivalenceInvariants
    invariants_2: EquivalenceInvariants

    @property
    def degenerate(self):
        return self.invariants_1.degenerate or self.invariants_2.degenerate

    def to_dict(self):
        return {
            "equivalent": self.equivalent,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "invariants_1": self.invariants_1.to_dict(),
            "invariants_2": self.invariants_2.to_dict(),
            "degenerate": self.degenerate,
        }


def _fit(candidate, target):
    """Best A ∈ O(k) with candidate·A ≈ target, and the fit residual."""
    A, _ = orthogonal_procrustes(candidate, target)
    residual = float(np.max(np.abs(candidate @ A - target), initial=0.0))
    return A, residual


def equivalent_monomial(spec1, spec2, tol=WITNESS_TOL):
    sig1 = (spec1.s, spec1.k, spec1.q)
    sig2 = (spec2.s, spec2.k, spec2.q)
    if sig1 != sig2:
        raise ShapeMismatch(f"signatures differ: {sig1} vs {sig2}")
    if spec1.q > MAX_Q:
        raise ProblemTooLarge(f"monomial search limited to q <= {MAX_Q}, got q={spec1.q}")

    inv1, inv2 = invariants(spec1), invariants(spec2)
    if not same_invariants(inv1, inv2):
        logger.debug("invariants differ, skipping search")
        return Verdict(False, None, inv1, inv2)

    theta = np.asarray(spec1.theta, dtype=float)
    target = np.asarray(spec2.theta, dtype=float)
    q, k = theta.shape
    for perm in itertools.permutations(range(q)):
        permuted = theta[list(perm)]
        # rows with matching norms only; saves most of the sign loop
        if not np.allclose(np.linalg.norm(permuted, axis=1), np.linalg.norm(target, axis=1), atol=1e-8):
            continue
        for signs in itertools.product((1.0, -1.0), repeat=q):
            sign_vec = np.asarray(signs)
            candidate = sign_vec[:, None] * permuted
            A, residual = _fit(candidate, target)
            if residual <= tol and np.max(np.abs(A.T @ A - np.eye(k))) <= tol:
                # signs are stated on rows of θ before permuting
                row_signs = np.empty(q)
                row_signs[list(perm)] = sign_vec
                witness = Witness(tuple(perm), tuple(int(s) for s in row_signs), A, residual)
                return Verdict(True, witness, inv1, inv2)
    return Verdict(False, None, inv1, inv2)


def random_monomial(rng, q, k):
    """A random (P, S, A) as a Witness, for building equivalent specs."""
    perm = tuple(int(i) for i in rng.permutation(q))
    signs = tuple(int(s) for s in rng.choice([-1, 1], size=q))
    A, _ = np.linalg.qr(rng.standard_normal((k, k)))
    return Witness(perm, signs, A, 0.0)
