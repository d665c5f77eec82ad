import numpy as np
import pytest
from numpy.testing import assert_allclose

from components.group import act_L, random_element
from components.liealg import HKGroupSpec
from components.moment import LSpec
from components.quat_core import QI, qmul
from components.quotient_metric import (
    chart_dimension,
    chart_names,
    compare_with_oracle,
    dirac_potential,
    distance_to_string,
    fixed_point_check,
    flat_chart_metric,
    from_monopole_chart,
    h_matrix,
    orbit_slice_point,
    orbit_space_dimension,
    orbit_space_metric,
    pp_metric,
    preset,
    quotient_dimension,
    QuotientChartPoint,
    radial_points,
    reduction_oracle,
    sample_chart_points,
    sample_directions,
)
from utils.errors import SingularTheta, SpecInvalid, StringLocus, ZeroQuaternion, ZeroRadius


def _point(spec, lspec, r, tau=None):
    n_free = spec.p - lspec.l
    return QuotientChartPoint(
        x=np.zeros(n_free),
        im_x=np.zeros((n_free, 3)),
        tau=np.zeros(spec.q) if tau is None else np.asarray(tau, dtype=float),
        r=np.asarray(r, dtype=float).reshape(spec.q, 3),
    )


# --------- H and the Dirac potential ---------

@pytest.mark.parametrize("theta", [1.0, 2.0, 3.0])
def test_taub_nut_h(theta):
    spec, lspec = preset("taub-nut", theta=theta)
    assert_allclose(h_matrix(spec, lspec, [[0.0, 3.0, 4.0]]), [[theta**2 + 0.2]])


def test_h_matrix_limits_and_structure(lwy, rng):
    spec, lspec = lwy
    far = h_matrix(spec, lspec, 1e12 * np.ones((2, 3)))
    assert_allclose(far, spec.theta @ spec.theta.T, atol=1e-11)
    r1, r2 = rng.standard_normal((2, 2, 3))
    H1, H2 = h_matrix(spec, lspec, r1), h_matrix(spec, lspec, r2)
    assert H1[0, 1] == H2[0, 1] == H1[1, 0]
    assert np.linalg.det(H1) > 0
    with pytest.raises(ZeroRadius):
        h_matrix(spec, lspec, np.zeros((2, 3)))


def test_generalized_weights():
    spec, lspec = preset("taubian-calabi", weights=[1.0, 2.0])
    H = h_matrix(spec, lspec, [[1.0, 0.0, 0.0], [0.0, 0.0, 2.0]])
    assert_allclose(H, [[2.0, 2.0], [2.0, 4.5]])


@pytest.mark.parametrize("rho", [0.1, 1.0, 10.0])
@pytest.mark.parametrize("theta", [1.0, 2.0, 3.0])
def test_taub_nut_metric_by_hand(theta, rho):
    spec, lspec = preset("taub-nut", theta=theta)
    H = theta**2 + 1.0 / rho
    omega = np.array([0.0, -1.0 / rho, 0.0])
    expected = np.zeros((4, 4))
    expected[0, 0] = 0.25 / H
    expected[0, 1:] = expected[1:, 0] = 0.25 * omega / H
    expected[1:, 1:] = 0.25 * H * np.eye(3) + 0.25 * np.outer(omega, omega) / H
    got = pp_metric(spec, lspec, _point(spec, lspec, [0.0, 0.0, rho]))
    assert_allclose(got, expected, atol=1e-12)


def test_taub_nut_metric_at_unit_point(taub_nut):
    spec, lspec = taub_nut
    g = pp_metric(spec, lspec, _point(spec, lspec, [0.0, 0.0, 1.0]))
    assert g[0, 0] == pytest.approx(0.125)
    assert g[0, 2] == pytest.approx(-0.125)
    assert g[1, 1] == pytest.approx(0.5)
    assert g[2, 2] == pytest.approx(0.625)


def test_dirac_potential_curl():
    r0 = np.array([1.0, 2.0, 2.0])
    h = 1e-4
    jac = np.zeros((3, 3))
    for i in range(3):
        dv = np.zeros(3)
        dv[i] = h
        jac[:, i] = (dirac_potential(r0 + dv) - dirac_potential(r0 - dv)) / (2 * h)
    curl = np.array([jac[2, 1] - jac[1, 2], jac[0, 2] - jac[2, 0], jac[1, 0] - jac[0, 1]])
    # -grad(1/|r|) = r / |r|³
    assert_allclose(curl, r0 / 27.0, atol=1e-7)


def test_dirac_potential_rotational_symmetry(rng):
    r = rng.standard_normal(3)
    r[0] = abs(r[0])
    a = 0.7
    R = np.array([[1, 0, 0], [0, np.cos(a), -np.sin(a)], [0, np.sin(a), np.cos(a)]])
    assert_allclose(dirac_potential(R @ r), R @ dirac_potential(r), atol=1e-13)


def test_dirac_potential_singular_sets():
    with pytest.raises(StringLocus):
        dirac_potential([-1.0, 0.0, 0.0])
    with pytest.raises(ZeroRadius):
        dirac_potential(np.zeros(3))
    assert distance_to_string([1.0, 0.0, 0.0]) == 1.0
    assert distance_to_string([-1.0, 3.0, 4.0]) == 5.0


# --------- closed form ---------

def test_pp_metric_positive_definite(any_preset, rng):
    spec, lspec = any_preset
    for pt in sample_chart_points(spec, lspec, rng, 100):
        g = pp_metric(spec, lspec, pt)
        assert g.shape == (chart_dimension(spec, lspec),) * 2
        assert_allclose(g, g.T)
        assert np.min(np.linalg.eigvalsh(g)) > 0


def test_sampled_radii_stay_in_range(lwy, rng):
    spec, lspec = lwy
    radii = np.concatenate([pt.radii for pt in sample_chart_points(spec, lspec, rng, 50)])
    assert radii.min() >= 0.1 and radii.max() <= 100.0
    assert radii.min() < 0.5 and radii.max() > 20.0
    for bad in [(0.0, 1.0), (2.0, 1.0)]:
        with pytest.raises(SpecInvalid):
            sample_chart_points(spec, lspec, rng, 1, radii=bad)


def test_partial_reduction_keeps_flat_block(rng):
    spec = HKGroupSpec(s=7, k=1, q=1, theta=[[1.5]])
    lspec = LSpec((1,))
    pt = sample_chart_points(spec, lspec, rng, 1)[0]
    g = pp_metric(spec, lspec, pt)
    assert_allclose(g[:4, :4], np.eye(4))
    assert not np.any(g[:4, 4:])
    assert chart_names(spec, lspec)[:4] == ["x_2", "b_2", "s_2", "p_2"]
    assert compare_with_oracle(spec, lspec, [pt])[0] <= 1e-6


# --------- flat fibre ---------

def test_flat_chart_metric_at_one():
    assert_allclose(flat_chart_metric([[1.0, 0.0, 0.0, 0.0]]), 0.25 * np.eye(4), atol=1e-15)
    with pytest.raises(ZeroQuaternion):
        flat_chart_metric(np.zeros((1, 4)))


def test_flat_chart_metric_is_a_pullback(rng):
    for _ in range(5):
        r = sample_directions(rng, 2) * rng.uniform(0.5, 3.0, (2, 1))
        vec = np.concatenate([rng.uniform(0.0, 4 * np.pi, 2), r.ravel()])
        h = 1e-6
        jac = np.zeros((8, 8))
        for i in range(8):
            dv = np.zeros(8)
            dv[i] = h
            plus = from_monopole_chart(vec + dv, 2).ravel()
            minus = from_monopole_chart(vec - dv, 2).ravel()
            jac[:, i] = (plus - minus) / (2 * h)
        W = from_monopole_chart(vec, 2)
        got = flat_chart_metric(W)
        assert_allclose(got, jac.T @ jac, atol=1e-8)


# --------- reduction oracle ---------

def test_oracle_matches_closed_form(any_preset, rng):
    spec, lspec = any_preset
    points = sample_chart_points(spec, lspec, rng, 20)
    assert max(compare_with_oracle(spec, lspec, points)) <= 1e-6


def test_oracle_on_radial_points(taubian_calabi):
    spec, lspec = taubian_calabi
    points = radial_points(spec, lspec, [0.5, 1.0, 5.0])
    assert max(compare_with_oracle(spec, lspec, points)) <= 1e-6


def test_oracle_without_reduction(taub_nut, rng):
    spec, _ = taub_nut
    lspec = LSpec(())
    points = sample_chart_points(spec, lspec, rng, 5)
    assert max(compare_with_oracle(spec, lspec, points)) <= 1e-6


def test_oracle_independent_of_tau(taub_nut):
    spec, lspec = taub_nut
    a = reduction_oracle(spec, lspec, _point(spec, lspec, [0.3, 1.0, -0.4], tau=[0.2]))
    b = reduction_oracle(spec, lspec, _point(spec, lspec, [0.3, 1.0, -0.4], tau=[2.9]))
    assert_allclose(a, b, atol=1e-7)


# --------- orbit space ---------

def test_orbit_space_metric_is_the_horizontal_norm(lwy, rng):
    spec, lspec = lwy
    g = random_element(spec, rng)
    y = orbit_slice_point(spec, lspec, g)
    assert y.size == orbit_space_dimension(spec, lspec)
    h = orbit_space_metric(spec, lspec, y)

    W = y[spec.nx - lspec.l:].reshape(spec.q, 4)
    iw = qmul(np.broadcast_to(QI, W.shape), W)
    killing = np.zeros((spec.dim, lspec.l))
    for a, c in enumerate(lspec.columns):
        killing[c, a] = 1.0
        killing[spec.nx:, a] = (spec.theta[:, [c]] * iw).ravel()
    keep = [c for c in range(spec.nx) if c not in lspec.columns] + list(range(spec.nx, spec.dim))

    v = rng.standard_normal(y.size)
    full = np.zeros(spec.dim)
    full[keep] = v
    coef = np.linalg.lstsq(killing, -full, rcond=None)[0]
    horizontal = full + killing @ coef
    assert v @ h @ v == pytest.approx(horizontal @ horizontal, rel=1e-10)


def test_orbit_slice_point_is_orbit_invariant(lwy, rng):
    spec, lspec = lwy
    g = random_element(spec, rng)
    moved = act_L(spec, lspec.columns, rng.standard_normal(lspec.l), g)
    assert_allclose(orbit_slice_point(spec, lspec, moved), orbit_slice_point(spec, lspec, g), atol=1e-12)


# --------- presets and facts ---------

def test_preset_examples():
    spec, lspec = preset("taub-nut", theta=2.0)
    assert (spec.s, spec.k, spec.q) == (3, 1, 1) and lspec.generators == (1,)
    spec, lspec = preset("taubian-calabi", m=3)
    assert (spec.s, spec.k, spec.q) == (3, 1, 3)
    assert_allclose(spec.theta, np.ones((3, 1)))
    spec, lspec = preset("lwy", theta=[[1.0, 0.0], [1.0, 2.0]])
    assert (spec.s, spec.k, spec.q) == (6, 2, 2) and lspec.generators == (1, 2)


@pytest.mark.parametrize("theta", [[[1.0, 1.0], [1.0, 1.0]], [[1.0, 0.0]]])
def test_lwy_rejects_singular_theta(theta):
    with pytest.raises(SingularTheta):
        preset("lwy", theta=theta)


def test_preset_rejects_bad_input():
    with pytest.raises(SpecInvalid):
        preset("eguchi-hanson")
    with pytest.raises(SpecInvalid):
        preset("taubian-calabi", m=3, weights=[1.0, 2.0])


def test_dimensions():
    assert quotient_dimension(*preset("taub-nut")) == 4
    for m in (2, 3):
        assert quotient_dimension(*preset("taubian-calabi", m=m)) == 4 * m
        assert quotient_dimension(*preset("lwy", theta=np.eye(m))) == 4 * m
    spec, lspec = preset("taub-nut")
    assert orbit_space_dimension(spec, lspec) == 7
    assert chart_dimension(spec, lspec) == 4
    assert chart_names(spec, lspec) == ["tau_1", "r1_1", "r2_1", "r3_1"]


@pytest.mark.parametrize("m", [1, 2])
def test_origin_is_the_only_fixed_point(m, rng):
    spec, lspec = preset("lwy", theta=np.eye(m))
    report = fixed_point_check(spec, lspec, 200, rng)
    assert report.applies
    assert report.passed, report.to_dict()
    assert report.not_fixed == 200


def test_chart_point_vector_layout(rng):
    spec = HKGroupSpec(s=7, k=1, q=2, theta=[[1.0], [2.0]])
    lspec = LSpec((1,))
    pt = sample_chart_points(spec, lspec, rng, 1)[0]
    vec = pt.as_vector()
    assert vec.size == chart_dimension(spec, lspec) == 12
    back = QuotientChartPoint.from_vector(spec, lspec, vec)
    assert_allclose(back.r, pt.r)
    assert_allclose(back.im_x, pt.im_x)
