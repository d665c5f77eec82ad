import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import random_hk_spec
from components.classify import (
    equivalent_monomial,
    invariants,
    random_monomial,
    same_invariants,
)
from components.liealg import eight_dim_family, HKGroupSpec, twelve_dim_family
from components.quotient_metric import preset
from utils.errors import ProblemTooLarge, ShapeMismatch


def _moved(spec, witness):
    return HKGroupSpec(s=spec.s, k=spec.k, q=spec.q, theta=witness.apply(spec.theta))


def test_invariants_example():
    inv = invariants(twelve_dim_family(2.0))
    assert inv.signature == (3, 1, 2)
    assert inv.row_norms == (1.0, 2.0)
    assert inv.gram_eigenvalues == (5.0,)
    assert not inv.degenerate
    assert inv.to_dict()["row_norms"] == [1.0, 2.0]


def test_invariants_survive_the_normaliser(rng):
    for _ in range(20):
        spec = random_hk_spec(rng)
        moved = _moved(spec, random_monomial(rng, spec.q, spec.k))
        assert same_invariants(invariants(spec), invariants(moved))


def test_eight_dim_family_members_are_distinct():
    specs = [eight_dim_family(t) for t in (1.0, 2.0, 3.0)]
    for i, a in enumerate(specs):
        for b in specs[i + 1:]:
            verdict = equivalent_monomial(a, b)
            assert not verdict.equivalent
            assert verdict.witness is None


def test_sign_flip_is_an_equivalence():
    assert equivalent_monomial(eight_dim_family(1.5), eight_dim_family(-1.5)).equivalent
    assert equivalent_monomial(twelve_dim_family(2.0), twelve_dim_family(-2.0)).equivalent
    assert not equivalent_monomial(twelve_dim_family(2.0), twelve_dim_family(3.0)).equivalent


def test_self_equivalence_has_identity_witness(lwy):
    spec, _ = lwy
    verdict = equivalent_monomial(spec, spec)
    assert verdict.equivalent
    assert_allclose(verdict.witness.apply(spec.theta), spec.theta, atol=1e-12)
    assert verdict.witness.residual <= 1e-12


def test_random_witnesses_are_recovered(rng):
    for _ in range(100):
        spec = random_hk_spec(rng)
        target = _moved(spec, random_monomial(rng, spec.q, spec.k))
        verdict = equivalent_monomial(spec, target)
        assert verdict.equivalent, spec.describe()
        A = verdict.witness.rotation
        assert_allclose(A.T @ A, np.eye(spec.k), atol=1e-9)
        assert_allclose(verdict.witness.apply(spec.theta), target.theta, atol=1e-9)


def test_verdict_is_symmetric(rng):
    spec = random_hk_spec(rng)
    other = _moved(spec, random_monomial(rng, spec.q, spec.k))
    assert equivalent_monomial(spec, other).equivalent == equivalent_monomial(other, spec).equivalent
    third = twelve_dim_family(5.0)
    assert not equivalent_monomial(twelve_dim_family(0.5), third).equivalent
    assert not equivalent_monomial(third, twelve_dim_family(0.5)).equivalent


def test_signature_mismatch():
    a, _ = preset("taub-nut")
    b, _ = preset("taubian-calabi", m=2)
    with pytest.raises(ShapeMismatch):
        equivalent_monomial(a, b)


def test_search_size_limit():
    spec = HKGroupSpec(s=3, k=1, q=9, theta=np.arange(1.0, 10.0).reshape(9, 1))
    with pytest.raises(ProblemTooLarge):
        equivalent_monomial(spec, spec)


def test_degenerate_flag():
    spec, _ = preset("taubian-calabi", m=2)
    verdict = equivalent_monomial(spec, spec)
    assert verdict.equivalent
    assert verdict.degenerate
    assert verdict.to_dict()["degenerate"] is True
    assert not equivalent_monomial(twelve_dim_family(2.0), twelve_dim_family(2.0)).degenerate
