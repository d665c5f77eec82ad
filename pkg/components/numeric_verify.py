# components/numeric_verify.py
#
# Chart-based tensor calculus by central finite differences: Christoffel
# symbols, Riemann, Ricci and sectional curvature of a metric given only as
# an evaluator. Used to certify Ricci-flatness of quotient metrics and the
# non-negative sectional curvature of L\G_θ on samples.
#
# Index conventions:
#   dg[a, b, c]       = ∂_a g_bc
#   ddg[a, b, c, d]   = ∂_a ∂_b g_cd
#   Gamma[a, b, c]    = Γ^a_bc
#   dGamma[e, a, b, c] = ∂_e Γ^a_bc
#   Riem[a, b, c, d]  = R^a_bcd, with R(∂_c, ∂_d) ∂_b = R^a_bcd ∂_a
#
# For teammates:
#   - The evaluator must be pure: sample sweeps call it from a thread pool.
#   - Richardson extrapolation combines steps h and h/2 as (4 D(h/2) - D(h)) / 3.
#   - verify_quotient: samples with some |r_β| < RICHARDSON_RADIUS report the
#     extrapolated Ricci; each r_β block steps by h·max(1, |r_β|).
#   - Every report keeps the plain residual at h and h/2. passes() wants a
#     halving ratio >= 3 on 80% of samples, round-off-floor samples exempt.

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from components.quotient_metric import (
    distance_to_string,
    orbit_space_dimension,
    orbit_space_metric,
    orbit_slice_point,
    pp_metric,
    QuotientChartPoint,
    R_MIN,
    radial_points,
    SAMPLE_RADII,
    sample_chart_points,
    STRING_MIN,
)
from components.group import random_element
from utils.errors import DomainBoundary, StringLocus, ZeroQuaternion, ZeroRadius

logger = logging.getLogger(__name__)

DEFAULT_STEP = 1e-3
RICCI_TOL = 5e-4
SECTIONAL_TOL = 1e-4
# quotient samples with some |r_β| below this are reported Richardson-extrapolated
RICHARDSON_RADIUS = 0.5
# halving the step must cut |Ricci| by HALVING_RATIO on CONVERGED_SHARE of the samples
HALVING_RATIO = 3.0
CONVERGED_SHARE = 0.8
# a half-step residual within FLOOR_MARGIN round-off floors is exempt from the ratio
FLOOR_MARGIN = 5.0


@dataclass
class MetricField:
    evaluator: Callable
    dim: int
    chart: str = "chart"
    # contains(pt, margin) -> bool with one margin per coordinate; None means the whole of ℝ^dim
    contains: Callable | None = None

    def __call__(self, pt):
        return np.asarray(self.evaluator(np.asarray(pt, dtype=float)), dtype=float)

    def check(self, pt, margin):
        margin = np.broadcast_to(np.asarray(margin, dtype=float), (self.dim,))
        if self.contains is not None and not self.contains(np.asarray(pt, dtype=float), margin):
            raise DomainBoundary(f"stencil of radius {np.max(margin):g} leaves the {self.chart} domain")


@dataclass
class CurvatureReport:
    point: list
    max_ricci: float
    step: float
    truncation: float
    max_riemann: float | None = None
    min_sectional: float | None = None
    index: int = 0
    chart: str = ""
    # plain central differences at step / 2; halving_ratio is None when that residual is 0
    max_ricci_half: float = 0.0
    halving_ratio: float | None = None
    roundoff_floor: float = 0.0
    richardson: bool = False

    @property
    def converged(self):
        """Second-order decay under step halving, or already at the round-off floor."""
        if self.max_ricci_half <= FLOOR_MARGIN * self.roundoff_floor:
            return True
        return self.halving_ratio is not None and self.halving_ratio >= HALVING_RATIO

    def to_dict(self):
        return {
            "index": self.index,
            "chart": self.chart,
            "point": [float(v) for v in self.point],
            "max_ricci": self.max_ricci,
            "max_ricci_half": self.max_ricci_half,
            "halving_ratio": self.halving_ratio,
            "roundoff_floor": self.roundoff_floor,
            "converged": self.converged,
            "richardson": self.richardson,
            "max_riemann": self.max_riemann,
            "min_sectional": self.min_sectional,
            "step": self.step,
            "truncation": self.truncation,
        }


@dataclass
class SamplePlan:
    points: list
    step: float = DEFAULT_STEP
    planes: int = 10
    ricci_tol: float = RICCI_TOL
    sectional_tol: float = SECTIONAL_TOL
    richardson: bool = False
    richardson_radius: float = RICHARDSON_RADIUS
    threads: int = 1
    seed: int = 0
    orbit_points: list = field(default_factory=list)


# --------- finite differences ---------

def _safe_eval(field_, pt):
    try:
        return field_(pt)
    except (ZeroRadius, StringLocus, ZeroQuaternion) as exc:
        raise DomainBoundary(str(exc)) from exc


def metric_derivatives(field_, pt, step):
    """(g, dg, ddg) at pt by central differences; step is a scalar or one step per coordinate."""
    pt = np.asarray(pt, dtype=float)
    n = field_.dim
    h = np.broadcast_to(np.asarray(step, dtype=float), (n,))
    field_.check(pt, 2.0 * h)
    unit = np.diag(h)
    g = _safe_eval(field_, pt)
    plus = np.array([_safe_eval(field_, pt + unit[a]) for a in range(n)])
    minus = np.array([_safe_eval(field_, pt - unit[a]) for a in range(n)])
    dg = (plus - minus) / (2.0 * h[:, None, None])

    ddg = np.zeros((n, n, n, n))
    for a in range(n):
        for b in range(a, n):
            val = (
                _safe_eval(field_, pt + unit[a] + unit[b])
                - _safe_eval(field_, pt + unit[a] - unit[b])
                - _safe_eval(field_, pt - unit[a] + unit[b])
                + _safe_eval(field_, pt - unit[a] - unit[b])
            ) / (4.0 * h[a] * h[b])
            ddg[a, b] = val
            ddg[b, a] = val
    return g, dg, ddg


def christoffel_symbols(g_inv, dg):
    """Γ^a_bc = ½ g^ad (∂_b g_dc + ∂_c g_bd - ∂_d g_bc)."""
    lowered = np.einsum("bdc->dbc", dg) + np.einsum("cbd->dbc", dg) - dg
    return 0.5 * np.einsum("ad,dbc->abc", g_inv, lowered)


def christoffel_deriv(g_inv, dg_inv, dg, ddg):
    lowered = np.einsum("bdc->dbc", dg) + np.einsum("cbd->dbc", dg) - dg
    lowered_d = np.einsum("ebdc->edbc", ddg) + np.einsum("ecbd->edbc", ddg) - ddg
    return 0.5 * (
        np.einsum("ead,dbc->eabc", dg_inv, lowered)
        + np.einsum("ad,edbc->eabc", g_inv, lowered_d)
    )


def riemann_from_christoffel(Gamma, dGamma):
    """R^a_bcd = ∂_c Γ^a_db - ∂_d Γ^a_cb + Γ^a_ce Γ^e_db - Γ^a_de Γ^e_cb."""
    deriv = np.einsum("cadb->abcd", dGamma)
    quad = np.einsum("ace,edb->abcd", Gamma, Gamma)
    return deriv - np.swapaxes(deriv, 2, 3) + quad - np.swapaxes(quad, 2, 3)


def _geometry(field_, pt, step):
    g, dg, ddg = metric_derivatives(field_, pt, step)
    g_inv = np.linalg.inv(g)
    dg_inv = -np.einsum("ab,ebc,cd->ead", g_inv, dg, g_inv)
    Gamma = christoffel_symbols(g_inv, dg)
    dGamma = christoffel_deriv(g_inv, dg_inv, dg, ddg)
    return g, Gamma, riemann_from_christoffel(Gamma, dGamma)


def _richardson(fn, step, richardson):
    coarse = fn(step)
    if not richardson:
        return coarse
    fine = fn(step / 2.0)
    return (4.0 * fine - coarse) / 3.0


def christoffel(field_, pt, step=DEFAULT_STEP, richardson=False):
    def at(h):
        g, dg, _ = metric_derivatives(field_, pt, h)
        return christoffel_symbols(np.linalg.inv(g), dg)
    return _richardson(at, step, richardson)


def riemann(field_, pt, step=DEFAULT_STEP, richardson=False):
    return _richardson(lambda h: _geometry(field_, pt, h)[2], step, richardson)


def ricci_from_riemann(Riem):
    return np.einsum("abad->bd", Riem)


def ricci(field_, pt, step=DEFAULT_STEP, richardson=False):
    return ricci_from_riemann(riemann(field_, pt, step, richardson))


def lower_riemann(g, Riem):
    return np.einsum("ae,ebcd->abcd", g, Riem)


def sectional_from(g, Riem, u, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    R = lower_riemann(g, Riem)
    num = np.einsum("abcd,a,b,c,d->", R, u, v, u, v)
    den = (u @ g @ u) * (v @ g @ v) - (u @ g @ v) ** 2
    if den <= 0.0:
        raise ValueError("sectional curvature needs two independent directions")
    return float(num / den)


def sectional(field_, pt, plane, step=DEFAULT_STEP, richardson=False):
    """Sectional curvature of the plane spanned by plane = (u, v)."""
    u, v = plane
    if richardson:
        g = field_(pt)
        Riem = riemann(field_, pt, step, richardson=True)
    else:
        g, _, Riem = _geometry(field_, pt, step)
    return sectional_from(g, Riem, u, v)


# --------- fields ---------

def quotient_field(spec, lspec):
    """pp_metric as a MetricField over chart vectors, clear of centres and strings."""
    n0 = 4 * (spec.p - lspec.l)

    def evaluate(vec):
        return pp_metric(spec, lspec, QuotientChartPoint.from_vector(spec, lspec, vec))

    def contains(vec, margin):
        r = vec[n0 + spec.q:].reshape(spec.q, 3)
        reach = np.sqrt(3.0) * margin[n0 + spec.q:].reshape(spec.q, 3).max(axis=1)
        return all(
            np.linalg.norm(rb) - rr >= R_MIN and distance_to_string(rb) - rr >= STRING_MIN
            for rb, rr in zip(r, reach)
        )

    return MetricField(evaluate, n0 + 4 * spec.q, "quotient", contains)


def orbit_space_field(spec, lspec):
    def evaluate(vec):
        return orbit_space_metric(spec, lspec, vec)
    return MetricField(evaluate, orbit_space_dimension(spec, lspec), "orbit-space")


def round_sphere_field():
    """g = dθ² + sin²θ dφ² on 0 < θ < π."""
    def evaluate(vec):
        return np.diag([1.0, np.sin(vec[0]) ** 2])

    def contains(vec, margin):
        return margin[0] < vec[0] < np.pi - margin[0]

    return MetricField(evaluate, 2, "sphere", contains)


def euclidean_field(dim):
    return MetricField(lambda vec: np.eye(dim), dim, "euclidean")


# --------- reports ---------

def _random_planes(rng, dim, count):
    planes = []
    for _ in range(count):
        u, v = rng.standard_normal((2, dim))
        planes.append((u, v))
    return planes


def roundoff_floor(g, step):
    """
    Size of the Ricci entries that rounding alone produces at this step.

    Second differences carry ε·|g|/h² of noise per entry; the metric is
    evaluated with a relative error of about κ·ε and contracted with g⁻¹
    over dim indices, with κ = max|g| · max|g⁻¹|. Hence dim · ε · κ² / h².
    """
    kappa = float(np.max(np.abs(g)) * np.max(np.abs(np.linalg.inv(g))))
    return g.shape[0] * np.finfo(float).eps * kappa**2 / float(np.min(step)) ** 2


def curvature_report(field_, pt, step=DEFAULT_STEP, richardson=False, planes=(), index=0):
    """Ricci / Riemann maxima at pt, with the plain residual at step and step / 2 for the halving ratio."""
    g, _, Riem = _geometry(field_, pt, step)
    _, _, Riem_half = _geometry(field_, pt, step / 2.0)
    ric = ricci_from_riemann(Riem)
    ric_half = ricci_from_riemann(Riem_half)
    coarse = float(np.max(np.abs(ric)))
    fine = float(np.max(np.abs(ric_half)))
    truncation = float(np.max(np.abs(ric - ric_half)))
    if richardson:
        Riem = (4.0 * Riem_half - Riem) / 3.0
        ric = ricci_from_riemann(Riem)
    min_sec = None
    if planes:
        min_sec = min(sectional_from(g, Riem, u, v) for u, v in planes)
    return CurvatureReport(
        point=list(np.asarray(pt, dtype=float)),
        max_ricci=float(np.max(np.abs(ric))),
        step=float(np.max(step)),
        truncation=truncation,
        max_riemann=float(np.max(np.abs(lower_riemann(g, Riem)))),
        min_sectional=min_sec,
        index=index,
        chart=field_.chart,
        max_ricci_half=fine,
        halving_ratio=coarse / fine if fine > 0.0 else None,
        roundoff_floor=roundoff_floor(g, step / 2.0),
        richardson=richardson,
    )


def parallel_map(func, items, threads):
    """Ordered map; items are independent so a thread pool is enough."""
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))


def verify_quotient(spec, lspec, plan):
    """Ricci reports over plan.points on the quotient chart."""
    field_ = quotient_field(spec, lspec)
    n_r = 4 * (spec.p - lspec.l) + spec.q

    def one(item):
        index, pt = item
        vec = pt.as_vector() if isinstance(pt, QuotientChartPoint) else np.asarray(pt, dtype=float)
        radii = np.linalg.norm(vec[n_r:].reshape(spec.q, 3), axis=1)
        # r_β moves on the scale max(1, |r_β|); the metric does not depend on τ or x
        step = np.full(vec.size, plan.step)
        step[n_r:] *= np.repeat(np.maximum(1.0, radii), 3)
        richardson = plan.richardson or bool(radii.min() < plan.richardson_radius)
        return curvature_report(field_, vec, step, richardson, index=index)

    reports = parallel_map(one, list(enumerate(plan.points)), plan.threads)
    worst = max((r.max_ricci for r in reports), default=0.0)
    logger.info(
        "quotient: %d points, max |Ricci| = %.3e (tol %.1e), %.0f%% converged under step halving",
        len(reports), worst, plan.ricci_tol, 100.0 * converged_share(reports),
    )
    return reports


def verify_orbit_space(spec, lspec, plan):
    """Sampled sectional curvatures of L\\G_θ (expected >= 0)."""
    field_ = orbit_space_field(spec, lspec)
    rng = np.random.default_rng(plan.seed)
    items = [
        (i, y, _random_planes(rng, field_.dim, plan.planes))
        for i, y in enumerate(plan.orbit_points)
    ]

    def one(item):
        index, y, planes = item
        return curvature_report(field_, y, plan.step, plan.richardson, planes=planes, index=index)

    reports = parallel_map(one, items, plan.threads)
    worst = min((r.min_sectional for r in reports), default=0.0)
    logger.info("orbit space: %d points, min sectional = %.3e", len(reports), worst)
    return reports


def orbit_sample_points(spec, lspec, rng, count):
    return [orbit_slice_point(spec, lspec, random_element(spec, rng)) for _ in range(count)]


def default_plan(
    spec, lspec, rng, samples, step=DEFAULT_STEP, planes=10, radial=False, radii=SAMPLE_RADII, **kwargs
):
    """Chart samples (or log-spaced radii along e_3 when radial) plus orbit samples."""
    if radial:
        lo, hi = radii
        points = radial_points(spec, lspec, np.geomspace(lo, hi, samples))
    else:
        points = sample_chart_points(spec, lspec, rng, samples, radii=radii)
    orbit = orbit_sample_points(spec, lspec, rng, samples)
    seed = int(rng.integers(0, 2**31 - 1))
    return SamplePlan(points=points, step=step, planes=planes, orbit_points=orbit, seed=seed, **kwargs)


def converged_share(reports):
    if not reports:
        return 1.0
    return sum(r.converged for r in reports) / len(reports)


def passes(plan, quotient_reports, orbit_reports):
    ricci_ok = all(r.max_ricci <= plan.ricci_tol for r in quotient_reports)
    halving_ok = converged_share(quotient_reports) >= CONVERGED_SHARE
    sectional_ok = all(
        r.min_sectional is None or r.min_sectional >= -plan.sectional_tol for r in orbit_reports
    )
    return ricci_ok and halving_ok and sectional_ok
