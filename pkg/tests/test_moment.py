import numpy as np
import pytest
from numpy.testing import assert_allclose

from components.group import act_L, act_torus, GroupElement, random_element
from components.liealg import as_flat, HKGroupSpec, x_to_quaternions
from components.moment import (
    check_invariance,
    default_lspec,
    is_regular,
    level_residual,
    level_set_lift,
    LSpec,
    moment,
    moment_abstract,
    moment_components,
    moment_jacobian,
    validate_lspec,
)
from components.quat_core import r_vector
from components.quotient_metric import preset
from utils.errors import IsotropyViolation, SpecInvalid


def _random_lift(spec, lspec, rng):
    others = spec.p - lspec.l
    return level_set_lift(
        spec,
        lspec,
        rng.standard_normal(spec.p),
        rng.standard_normal((others, 3)),
        rng.standard_normal((spec.q, 4)),
    )


def test_moment_vanishes_at_identity(any_preset):
    spec, lspec = any_preset
    mu = moment(spec, lspec, GroupElement.identity(spec))
    assert mu.shape == (lspec.l, 3)
    assert not np.any(mu)


def test_taub_nut_closed_form(rng):
    theta = 2.0
    spec, lspec = preset("taub-nut", theta=theta)
    g = random_element(spec, rng)
    b, s, p = g.X[1:]
    u, y, z, w = g.W[0]
    expected = [
        -b + 0.5 * theta * (u**2 + y**2 - z**2 - w**2),
        -s + theta * (y * z - u * w),
        -p + theta * (u * z + w * y),
    ]
    assert_allclose(moment(spec, lspec, g)[0], expected, atol=1e-13)


def test_lwy_rows(lwy, rng):
    spec, lspec = lwy
    g = random_element(spec, rng)
    xq = x_to_quaternions(g.X, spec.p)
    r = r_vector(g.W)
    mu = moment(spec, lspec, g)
    for a in range(lspec.l):
        expected = -xq[a, 1:] + 0.5 * sum(spec.theta[beta, a] * r[beta] for beta in range(spec.q))
        assert_allclose(mu[a], expected, atol=1e-13)


def test_three_forms_agree(any_preset, rng):
    spec, lspec = any_preset
    for _ in range(5):
        g = random_element(spec, rng)
        mu = moment(spec, lspec, g)
        assert_allclose(moment_abstract(spec, lspec, g), mu, atol=1e-12)
        T = rng.standard_normal(lspec.l)
        assert_allclose(moment_components(spec, lspec, g, T), T @ mu, atol=1e-12)


def test_forms_agree_on_complex_fibre(taubian_calabi, rng):
    spec, lspec = taubian_calabi
    g = random_element(spec, rng)
    W = g.W.copy()
    W[:, 2:] = 0.0
    g = GroupElement(g.X, W)
    mu = moment(spec, lspec, g)
    assert_allclose(moment_abstract(spec, lspec, g), mu, atol=1e-12)
    # z = w = 0: only the first component sees the fibre
    xq = x_to_quaternions(g.X, spec.p)
    assert_allclose(mu[0, 1:], -xq[0, 2:], atol=1e-13)


def test_lift_lands_on_zero_level(any_preset, rng):
    spec, lspec = any_preset
    zero = level_set_lift(
        spec, lspec, np.zeros(spec.p), np.zeros((spec.p - lspec.l, 3)), np.zeros((spec.q, 4))
    )
    assert zero.distance(GroupElement.identity(spec)) == 0.0
    for _ in range(10):
        assert level_residual(spec, lspec, _random_lift(spec, lspec, rng)) <= 1e-12


def test_taub_nut_lift_example():
    theta = 3.0
    spec, lspec = preset("taub-nut", theta=theta)
    g = level_set_lift(spec, lspec, [0.0], np.zeros((0, 3)), [[1.0, 0.0, 0.0, 0.0]])
    assert_allclose(g.X, [0.0, theta / 2, 0.0, 0.0])


def test_level_residual_against_target(taub_nut, rng):
    spec, lspec = taub_nut
    g = random_element(spec, rng)
    mu = moment(spec, lspec, g)
    assert level_residual(spec, lspec, g, xi=mu) == 0.0
    assert level_residual(spec, lspec, g) == pytest.approx(np.max(np.abs(mu)))


def test_invariance_under_L_and_torus(any_preset, rng):
    spec, lspec = any_preset
    for _ in range(5):
        g = random_element(spec, rng)
        V = rng.standard_normal(lspec.l)
        assert check_invariance(spec, lspec, g, V) <= 1e-12
        phi = rng.uniform(0, 2 * np.pi, spec.q)
        turned = act_torus(spec, phi, g)
        assert_allclose(moment(spec, lspec, turned), moment(spec, lspec, g), atol=1e-12)


def test_level_set_preserved_by_actions(lwy, rng):
    spec, lspec = lwy
    g = _random_lift(spec, lspec, rng)
    moved = act_L(spec, lspec.columns, rng.standard_normal(lspec.l), g)
    assert level_residual(spec, lspec, moved) <= 1e-12


def test_non_isotropic_generators_rejected():
    spec = HKGroupSpec(s=4, k=4, q=4, theta=np.eye(4))
    # e_3 is the i-axis of the first quaternion, paired with e_1 by ω_1
    with pytest.raises(IsotropyViolation):
        validate_lspec(spec, LSpec((1, 3)))


def test_generator_must_be_a_real_axis():
    spec = HKGroupSpec(s=2, k=2, q=2, theta=np.eye(2))
    with pytest.raises(SpecInvalid):
        validate_lspec(spec, LSpec((2,)))


@pytest.mark.parametrize("gens", [(2,), (0,), (1, 1)])
def test_bad_generator_lists(taub_nut, gens):
    spec, _ = taub_nut
    with pytest.raises(SpecInvalid):
        validate_lspec(spec, LSpec(gens))


def test_flat_spec_has_no_moment_map(taub_nut):
    spec, lspec = taub_nut
    with pytest.raises(SpecInvalid):
        validate_lspec(as_flat(spec), lspec)


@pytest.mark.parametrize("X,W", [(np.zeros(2), np.ones((1, 4))), (np.zeros(4), np.ones((1, 3)))])
def test_element_shape_is_checked(taub_nut, X, W):
    spec, lspec = taub_nut
    g = GroupElement(X, W)
    for form in (moment, moment_abstract):
        with pytest.raises(SpecInvalid):
            form(spec, lspec, g)
    with pytest.raises(SpecInvalid):
        moment_components(spec, lspec, g, [1.0])


def test_lspec_report_and_defaults(any_preset):
    spec, lspec = any_preset
    report = validate_lspec(spec, lspec)
    assert report.isotropy == 0.0
    assert report.fibre_geodesic <= 1e-14
    assert set(report.to_dict()) == {"isotropy", "fibre_geodesic"}
    assert default_lspec(2).generators == (1, 2)
    assert LSpec((1, 3)).columns == (0, 2)


def test_jacobian_has_full_rank(any_preset, rng):
    spec, lspec = any_preset
    g = _random_lift(spec, lspec, rng)
    jac = moment_jacobian(spec, lspec, g)
    assert jac.shape == (3 * lspec.l, spec.dim)
    assert is_regular(spec, lspec, g)
    assert is_regular(spec, lspec, GroupElement.identity(spec))
