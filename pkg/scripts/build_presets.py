# scripts/build_presets.py
#
# Writes the preset spec files used in the README examples and the
# acceptance runs into data/. Safe to re-run; files are overwritten.
#
#   python scripts/build_presets.py

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from components.liealg import eight_dim_family, twelve_dim_family  # noqa: E402
from components.moment import LSpec  # noqa: E402
from components.quotient_metric import preset  # noqa: E402
from utils.config import DATA_DIR  # noqa: E402
from utils.specio import dump_spec  # noqa: E402

# 檔名 → (spec, lspec)
PRESETS = {
    "taub_nut_1.json": preset("taub-nut", theta=1.0),
    "taub_nut_2.json": preset("taub-nut", theta=2.0),
    "taubian_calabi_2.json": preset("taubian-calabi", m=2),
    "taubian_calabi_3.json": preset("taubian-calabi", m=3),
    "lwy_id2.json": preset("lwy", theta=[[1.0, 0.0], [0.0, 1.0]]),
    "lwy_lower2.json": preset("lwy", theta=[[1.0, 0.0], [1.0, 2.0]]),
}

# 8 維與 12 維族群只當作 fixture，不帶 L
FAMILIES = {
    "eight_dim_1.json": eight_dim_family(1.0),
    "eight_dim_2.json": eight_dim_family(2.0),
    "eight_dim_3.json": eight_dim_family(3.0),
    "twelve_dim_s2.json": twelve_dim_family(2.0),
}


def build(target_dir=DATA_DIR):
    written = []
    for name, (spec, lspec) in PRESETS.items():
        written.append(dump_spec(spec, Path(target_dir) / name, lspec))
    for name, spec in FAMILIES.items():
        written.append(dump_spec(spec, Path(target_dir) / name, LSpec((1,))))
    return written


if __name__ == "__main__":
    paths = build()
    print(f"[OK] wrote {len(paths)} spec files into {DATA_DIR}")
