# app.py
#
# Command-line entry point. One subcommand per task:
#
#   verify          algebraic hyper-Kähler checks of a spec
#   moment          moment map forms, invariance and level-set residuals
#   metric          quotient metric at a chart point, or a radial grid (CSV)
#   reduce-compare  closed-form quotient metric vs the numerical reduction
#   curvature       Ricci of the quotient and sectional curvature of L\G_θ
#   classify        monomial equivalence of two specs
#   preset          write a named preset spec file
#
# stdout carries JSON (or CSV for metric grids); everything human-readable
# goes through logging to stderr. Exit codes: 0 pass, 1 failed check,
# 2 invalid input (any HKQError).

import argparse
import json
import logging
import sys

import numpy as np

from components import classify, liealg, moment, numeric_verify, quotient_metric
from components.group import GroupElement, random_element, TorusElement, act_torus
from utils import specio
from utils.config import RunConfig
from utils.errors import HKQError, SpecInvalid

logger = logging.getLogger("app")

LOG_FORMAT = "[%(levelname)s] %(name)s: %(message)s"
MOMENT_TOL = 1e-10


def _json_print(payload):
    print(json.dumps(payload, indent=2, sort_keys=True))


def _parse_json(value, what):
    try:
        return json.loads(value)
    except json.JSONDecodeError as exc:
        raise SpecInvalid(f"--{what} is not valid JSON: {exc}") from exc


def _as_array(value, what, shape):
    """Parsed JSON value as a float array of the given shape, or SpecInvalid."""
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SpecInvalid(f"--{what} must be a (nested) list of numbers") from exc
    if arr.shape != shape:
        raise SpecInvalid(f"--{what} needs shape {shape}, got {arr.shape}")
    return arr


def _parse_group_point(value, spec):
    payload = _parse_json(value, "point")
    if not isinstance(payload, dict) or not {"X", "W"} <= set(payload):
        raise SpecInvalid('--point must be a JSON object with keys "X" and "W"')
    X = _as_array(payload["X"], "point X", (spec.nx,))
    W = _as_array(payload["W"], "point W", (spec.q, 4))
    return GroupElement(X, W)


def _parse_direction(value):
    try:
        direction = np.array([float(v) for v in value.split(",")])
    except ValueError as exc:
        raise SpecInvalid(f"--direction expects three comma-separated numbers, got {value!r}") from exc
    if direction.shape != (3,) or not np.linalg.norm(direction) > 0.0:
        raise SpecInvalid(f"--direction needs a nonzero vector in ℝ³, got {value!r}")
    return direction


def _parse_radii(value):
    try:
        lo, hi = (float(v) for v in value.split(":"))
    except ValueError as exc:
        raise SpecInvalid(f"--radii expects LO:HI, got {value!r}") from exc
    if not 0.0 < lo <= hi:
        raise SpecInvalid(f"--radii needs 0 < LO <= HI, got {value!r}")
    return lo, hi


def _radii(config):
    value = config.extra.get("radii")
    return quotient_metric.SAMPLE_RADII if value is None else _parse_radii(value)


# --------- spec resolution ---------

def _preset_from(extra):
    theta = extra.get("theta")
    weights = extra.get("weights")
    return quotient_metric.preset(
        extra["preset"],
        theta=None if theta is None else _parse_json(theta, "theta"),
        m=extra.get("m"),
        weights=None if weights is None else _parse_json(weights, "weights"),
    )


def resolve_spec(config):
    """(spec, lspec) from --spec or --preset; --generators overrides the L of either."""
    extra = config.extra
    if config.spec_path is not None:
        spec, lspec = specio.load_spec(config.spec_path)
    elif extra.get("preset"):
        spec, lspec = _preset_from(extra)
    else:
        raise SpecInvalid("give --spec FILE or --preset NAME")
    if config.generators:
        lspec = moment.LSpec(config.generators)
    return spec, lspec


def _require_lspec(spec, lspec):
    return lspec if lspec is not None else moment.default_lspec(1)


# --------- commands ---------

def cmd_verify(config):
    spec, lspec = resolve_spec(config)
    if spec.mode == liealg.FLAT2M:
        _, report = liealg.kahler_structure_flat(spec)
    else:
        report = liealg.verify_hyperkahler(spec)
    if config.tolerance is not None:
        report.tolerance = config.tolerance
    payload = report.to_dict()
    if lspec is not None and spec.mode == liealg.HYPERKAHLER:
        payload["lspec"] = moment.validate_lspec(spec, lspec).to_dict()
    _json_print(payload)
    if report.passed:
        logger.info("%s: all %d checks pass", spec.describe(), len(report.checks))
        return 0
    logger.info("%s: failed %s", spec.describe(), ", ".join(report.failed()))
    return 1


def cmd_moment(config):
    spec, lspec = resolve_spec(config)
    lspec = _require_lspec(spec, lspec)
    tol = MOMENT_TOL if config.tolerance is None else config.tolerance
    rng = config.rng()
    point = config.extra.get("point")
    if point:
        g = _parse_group_point(point, spec)
        _json_print({"moment": moment.moment(spec, lspec, g).tolist()})
        return 0

    rows = []
    for index in range(config.samples):
        g = random_element(spec, rng)
        mu = moment.moment(spec, lspec, g)
        T = rng.standard_normal(lspec.l)
        V = rng.standard_normal(lspec.l)
        phi = TorusElement(rng.uniform(0.0, 2 * np.pi, spec.q))
        lifted = moment.level_set_lift(
            spec, lspec,
            rng.standard_normal(spec.p),
            rng.standard_normal((spec.p - lspec.l, 3)),
            rng.standard_normal((spec.q, 4)),
        )
        rows.append({
            "index": index,
            "moment": mu.tolist(),
            "abstract_gap": float(np.max(np.abs(moment.moment_abstract(spec, lspec, g) - mu))),
            "component_gap": float(np.max(np.abs(moment.moment_components(spec, lspec, g, T) - T @ mu))),
            "invariance": moment.check_invariance(spec, lspec, g, V),
            "torus_invariance": float(np.max(np.abs(moment.moment(spec, lspec, act_torus(spec, phi, g)) - mu))),
            "level_set": moment.level_residual(spec, lspec, lifted),
        })
    frame = specio.summary_frame(rows)
    worst = {
        col: float(frame[col].max()) if len(frame) else 0.0
        for col in ("abstract_gap", "component_gap", "invariance", "torus_invariance", "level_set")
    }
    passed = all(v <= tol for v in worst.values())
    _json_print({"samples": rows, "max": worst, "tolerance": tol, "passed": passed})
    logger.info("moment: %d samples, worst residual %.3e", len(rows), max(worst.values(), default=0.0))
    return 0 if passed else 1


def cmd_metric(config):
    spec, lspec = resolve_spec(config)
    lspec = _require_lspec(spec, lspec)
    extra = config.extra
    names = quotient_metric.chart_names(spec, lspec)

    if extra.get("fibre"):
        W = _as_array(_parse_json(extra["fibre"], "fibre"), "fibre", (spec.q, 4))
        _json_print({
            "chart": "monopole",
            "point": quotient_metric.monopole_chart(W).tolist(),
            "metric": quotient_metric.flat_chart_metric(W).tolist(),
        })
        return 0

    if extra.get("grid"):
        lo, hi, count = _parse_grid(extra["grid"])
        direction = _parse_direction(extra.get("direction") or "0,0,1")
        points = quotient_metric.radial_points(spec, lspec, np.geomspace(lo, hi, count), direction)
        metrics = [quotient_metric.pp_metric(spec, lspec, pt) for pt in points]
        frame = specio.grid_frame(names, [pt.as_vector() for pt in points], metrics)
        if config.output_format == "csv":
            specio.write_grid_csv(frame, sys.stdout)
        else:
            _json_print(frame.to_dict(orient="records"))
        logger.info("metric grid: %d points in [%g, %g]", count, lo, hi)
        return 0

    if not extra.get("point"):
        raise SpecInvalid("metric needs --point, --grid or --fibre")
    vec = _as_array(_parse_json(extra["point"], "point"), "point", (len(names),))
    pt = quotient_metric.QuotientChartPoint.from_vector(spec, lspec, vec)
    data = quotient_metric.pp_data(spec, lspec, pt.r)
    _json_print({
        "chart": "quotient",
        "coordinates": names,
        "point": vec.tolist(),
        "H": data.H.tolist(),
        "metric": quotient_metric.pp_metric(spec, lspec, pt).tolist(),
    })
    return 0


def _parse_grid(value):
    try:
        lo, hi, count = value.split(":")
        lo, hi, count = float(lo), float(hi), int(count)
    except ValueError as exc:
        raise SpecInvalid(f"--grid expects LO:HI:COUNT, got {value!r}") from exc
    if not 0.0 < lo <= hi or count < 1:
        raise SpecInvalid(f"--grid needs 0 < LO <= HI and COUNT >= 1, got {value!r}")
    return lo, hi, count


def cmd_reduce_compare(config):
    spec, lspec = resolve_spec(config)
    lspec = _require_lspec(spec, lspec)
    tol = quotient_metric.ORACLE_TOL if config.tolerance is None else config.tolerance
    step = quotient_metric.ORACLE_STEP if config.step is None else config.step
    radii = _radii(config)
    points = quotient_metric.sample_chart_points(spec, lspec, config.rng(), config.samples, radii=radii)

    def one(item):
        index, pt = item
        diff = quotient_metric.compare_with_oracle(spec, lspec, [pt], step)[0]
        return {"index": index, "point": pt.as_vector().tolist(), "deviation": diff}

    rows = numeric_verify.parallel_map(one, list(enumerate(points)), config.threads)
    worst = max((row["deviation"] for row in rows), default=0.0)
    passed = worst <= tol
    _json_print({"samples": rows, "max_deviation": worst, "tolerance": tol, "passed": passed})
    logger.info("reduce-compare: max deviation %.3e over %d points (tol %.1e)", worst, len(rows), tol)
    return 0 if passed else 1


def cmd_curvature(config):
    spec, lspec = resolve_spec(config)
    lspec = _require_lspec(spec, lspec)
    step = numeric_verify.DEFAULT_STEP if config.step is None else config.step
    tol = numeric_verify.RICCI_TOL if config.tolerance is None else config.tolerance
    radii = _radii(config)
    plan = numeric_verify.default_plan(
        spec, lspec, config.rng(), config.samples,
        step=step, planes=config.planes, radial=bool(config.extra.get("radial")), radii=radii,
        ricci_tol=tol, richardson=config.richardson, threads=config.threads,
    )
    quotient_reports = numeric_verify.verify_quotient(spec, lspec, plan)
    orbit_reports = numeric_verify.verify_orbit_space(spec, lspec, plan)
    passed = numeric_verify.passes(plan, quotient_reports, orbit_reports)
    _json_print({
        "quotient": [r.to_dict() for r in quotient_reports],
        "orbit_space": [r.to_dict() for r in orbit_reports],
        "ricci_tol": plan.ricci_tol,
        "converged_share": numeric_verify.converged_share(quotient_reports),
        "radii": list(radii),
        "sectional_tol": plan.sectional_tol,
        "passed": passed,
    })
    return 0 if passed else 1


def cmd_classify(config):
    spec1, _ = specio.load_spec(config.extra["first"])
    spec2, _ = specio.load_spec(config.extra["second"])
    verdict = classify.equivalent_monomial(spec1, spec2)
    _json_print(verdict.to_dict())
    if verdict.degenerate:
        logger.warning("repeated invariants: a negative verdict only rules out monomial witnesses")
    logger.info("classify: %s", "equivalent" if verdict.equivalent else "not monomially equivalent")
    return 0


def cmd_preset(config):
    extra = dict(config.extra)
    extra["preset"] = extra["name"]
    spec, lspec = _preset_from(extra)
    if extra.get("out"):
        path = specio.dump_spec(spec, extra["out"], lspec)
        logger.info("wrote %s (%s)", path, spec.describe())
    else:
        print(specio.dumps_spec(spec, lspec))
    return 0


COMMANDS = {
    "verify": cmd_verify,
    "moment": cmd_moment,
    "metric": cmd_metric,
    "reduce-compare": cmd_reduce_compare,
    "curvature": cmd_curvature,
    "classify": cmd_classify,
    "preset": cmd_preset,
}


# --------- parser ---------

def _add_spec_source(cmd):
    cmd.add_argument("--spec", help="spec JSON file")
    cmd.add_argument("--preset", choices=quotient_metric.PRESET_NAMES)
    cmd.add_argument("--theta", help="preset θ as JSON (number or matrix)")
    cmd.add_argument("--m", type=int, help="taubian-calabi size")
    cmd.add_argument("--weights", help="taubian-calabi weights as a JSON list")
    cmd.add_argument("--generators", type=int, nargs="+", help="1-based acting directions spanning L")


def _add_sampling(cmd, samples=20):
    cmd.add_argument("--seed", type=int, default=None)
    cmd.add_argument("--samples", type=int, default=samples)
    cmd.add_argument("--threads", type=int, default=None)
    cmd.add_argument("--tol", type=float, default=None)


def _add_radii(cmd):
    lo, hi = quotient_metric.SAMPLE_RADII
    cmd.add_argument("--radii", default=f"{lo:g}:{hi:g}", help="LO:HI range of the sampled |r_β|")


def build_parser():
    parser = argparse.ArgumentParser(prog="hkq", description="Hyper-Kähler quotients of flat Lie groups")
    parser.add_argument("--verbose", "-v", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    verify_cmd = sub.add_parser("verify", help="algebraic hyper-Kähler checks")
    _add_spec_source(verify_cmd)
    verify_cmd.add_argument("--tol", type=float, default=None)

    moment_cmd = sub.add_parser("moment", help="moment map evaluation and residuals")
    _add_spec_source(moment_cmd)
    _add_sampling(moment_cmd)
    moment_cmd.add_argument("--point", help='JSON {"X": [...], "W": [[u,y,z,w], ...]}')

    metric_cmd = sub.add_parser("metric", help="quotient metric at a point or along a grid")
    _add_spec_source(metric_cmd)
    metric_cmd.add_argument("--point", help="chart coordinates as a JSON list")
    metric_cmd.add_argument("--grid", help="LO:HI:COUNT log-spaced radii")
    metric_cmd.add_argument("--direction", default="0,0,1", help="r direction for --grid")
    metric_cmd.add_argument("--fibre", help="W as JSON (q×4): flat metric in monopole coordinates")
    metric_cmd.add_argument("--format", choices=("json", "csv"), default="json")

    reduce_cmd = sub.add_parser("reduce-compare", help="closed form vs numerical reduction")
    _add_spec_source(reduce_cmd)
    _add_sampling(reduce_cmd)
    _add_radii(reduce_cmd)
    reduce_cmd.add_argument("--step", type=float, default=None)

    curv_cmd = sub.add_parser("curvature", help="Ricci-flatness and sectional curvature samples")
    _add_spec_source(curv_cmd)
    _add_sampling(curv_cmd)
    _add_radii(curv_cmd)
    curv_cmd.add_argument("--step", type=float, default=None)
    curv_cmd.add_argument("--planes", type=int, default=10)
    curv_cmd.add_argument("--richardson", action="store_true")
    curv_cmd.add_argument("--radial", action="store_true", help="log-spaced radii along e_3")

    classify_cmd = sub.add_parser("classify", help="monomial equivalence of two specs")
    classify_cmd.add_argument("first")
    classify_cmd.add_argument("second")

    preset_cmd = sub.add_parser("preset", help="write a preset spec")
    preset_cmd.add_argument("name", choices=quotient_metric.PRESET_NAMES)
    preset_cmd.add_argument("--theta", help="θ as JSON (number or matrix)")
    preset_cmd.add_argument("--m", type=int)
    preset_cmd.add_argument("--weights", help="JSON list of nonzero weights")
    preset_cmd.add_argument("--out", help="output file (stdout when omitted)")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.INFO,
        format=LOG_FORMAT,
        force=True,
    )
    config = RunConfig.from_args(args)
    try:
        return COMMANDS[args.command](config)
    except HKQError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
