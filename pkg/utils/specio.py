# utils/specio.py
#
# Reading and writing spec files, plus the tabular (pandas) side of the CLI:
# metric grids and sweep summaries.
#
# Spec file format (JSON object):
#   {"s": 3, "k": 1, "q": 1, "theta": [[1.0]], "mode": "hyperkahler",
#    "generators": [1]}            # "generators" is optional (1-based)
#
# For teammates:
#   - load_spec() returns (spec, lspec); lspec is None when the file has no
#     "generators" key. Callers that need an LSpec fall back to default_lspec().
#   - grid_frame() is the only place that decides the CSV column layout.

import json
from pathlib import Path

import numpy as np
import pandas as pd

from components.liealg import HKGroupSpec
from components.moment import LSpec
from utils.errors import SpecInvalid

REQUIRED_KEYS = ("s", "k", "q", "theta")


def spec_to_dict(spec, lspec=None):
    payload = {
        "s": int(spec.s),
        "k": int(spec.k),
        "q": int(spec.q),
        "theta": [[float(v) for v in row] for row in np.asarray(spec.theta)],
        "mode": spec.mode,
    }
    if lspec is not None:
        payload["generators"] = [int(c) for c in lspec.generators]
    return payload


def spec_from_dict(payload):
    """Parse a decoded JSON object; malformed content becomes SpecInvalid."""
    if not isinstance(payload, dict):
        raise SpecInvalid("spec file must contain a JSON object")
    missing = [key for key in REQUIRED_KEYS if key not in payload]
    if missing:
        raise SpecInvalid(f"spec is missing keys: {', '.join(missing)}")
    try:
        theta = np.asarray(payload["theta"], dtype=float)
        s, k, q = int(payload["s"]), int(payload["k"]), int(payload["q"])
    except (TypeError, ValueError) as exc:
        raise SpecInvalid(f"spec has non-numeric entries: {exc}") from exc
    spec = HKGroupSpec(s=s, k=k, q=q, theta=theta, mode=payload.get("mode", "hyperkahler"))

    lspec = None
    if "generators" in payload:
        gens = payload["generators"]
        if not isinstance(gens, list) or not all(isinstance(c, int) for c in gens):
            raise SpecInvalid("generators must be a list of 1-based integers")
        lspec = LSpec(tuple(gens))
    return spec, lspec


def load_spec(path):
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as handle:
            payload = json.load(handle)
    except FileNotFoundError as exc:
        raise SpecInvalid(f"spec file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise SpecInvalid(f"spec file is not valid JSON: {exc}") from exc
    return spec_from_dict(payload)


def dumps_spec(spec, lspec=None):
    return json.dumps(spec_to_dict(spec, lspec), indent=2, sort_keys=True)


def dump_spec(spec, path, lspec=None):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_spec(spec, lspec) + "\n", encoding="utf-8")
    return path


# --------- grid tables ---------

def packed_columns(dim):
    """Lower-triangular names g_00, g_10, g_11, g_20, ..."""
    return [f"g_{i}{j}" for i in range(dim) for j in range(i + 1)]


def pack_lower(matrix):
    matrix = np.asarray(matrix, dtype=float)
    rows, cols = np.tril_indices(matrix.shape[0])
    return matrix[rows, cols]


def unpack_lower(values, dim):
    out = np.zeros((dim, dim))
    rows, cols = np.tril_indices(dim)
    out[rows, cols] = values
    out[cols, rows] = values
    return out


def grid_frame(coord_names, points, metrics) -> pd.DataFrame:
    """One row per chart point: coordinates first, then the packed metric."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if len(metrics) == 0:
        return pd.DataFrame(columns=list(coord_names))
    dim = np.asarray(metrics[0]).shape[0]
    packed = np.array([pack_lower(m) for m in metrics])
    frame = pd.DataFrame(points, columns=list(coord_names))
    metric_frame = pd.DataFrame(packed, columns=packed_columns(dim))
    return pd.concat([frame, metric_frame], axis=1)


def write_grid_csv(frame: pd.DataFrame, target) -> None:
    """`target` is a path or an open text stream (stdout)."""
    frame.to_csv(target, index=False, float_format="%.17g")


def summary_frame(records) -> pd.DataFrame:
    """Sweep results (list of dicts) as a DataFrame sorted by sample index."""
    frame = pd.DataFrame.from_records(records)
    if "index" in frame.columns:
        frame = frame.sort_values("index").reset_index(drop=True)
    return frame
