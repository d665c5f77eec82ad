# utils/config.py
#
# Run configuration for the CLI. Values come from parsed arguments plus the
# environment (.env is loaded once at import, like the dashboard did for its
# deployment settings).
#
# Environment:
#   HKQ_THREADS  cap for the worker pool used by sample sweeps (default: cpu count)
#   HKQ_SEED     seed used when --seed is not given (default: 0)

import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from dotenv import load_dotenv

load_dotenv()

BASE_DIR = Path(__file__).resolve().parents[1]
DATA_DIR = BASE_DIR / "data"

DEFAULT_SEED = 0
DEFAULT_SAMPLES = 20
DEFAULT_PLANES = 10


def _env_int(name, default):
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        return default


def env_threads():
    """Worker cap from HKQ_THREADS, never below 1."""
    return max(1, _env_int("HKQ_THREADS", os.cpu_count() or 1))


def env_seed():
    return _env_int("HKQ_SEED", DEFAULT_SEED)


@dataclass(frozen=True)
class RunConfig:
    spec_path: Path | None = None
    generators: tuple = ()
    seed: int = DEFAULT_SEED
    samples: int = DEFAULT_SAMPLES
    planes: int = DEFAULT_PLANES
    step: float | None = None
    tolerance: float | None = None
    richardson: bool = False
    threads: int = 1
    output_format: str = "json"
    extra: dict = field(default_factory=dict)

    def rng(self):
        """Fresh generator; every command draws from this and only this."""
        return np.random.default_rng(self.seed)

    @classmethod
    def from_args(cls, args):
        """Build from an argparse namespace; missing attributes fall back to defaults."""
        seed = getattr(args, "seed", None)
        spec_path = getattr(args, "spec", None)
        gens = getattr(args, "generators", None)
        return cls(
            spec_path=Path(spec_path) if spec_path else None,
            generators=tuple(gens) if gens else (),
            seed=env_seed() if seed is None else int(seed),
            samples=getattr(args, "samples", DEFAULT_SAMPLES) or DEFAULT_SAMPLES,
            planes=getattr(args, "planes", DEFAULT_PLANES) or DEFAULT_PLANES,
            step=getattr(args, "step", None),
            tolerance=getattr(args, "tol", None),
            richardson=bool(getattr(args, "richardson", False)),
            threads=min(env_threads(), getattr(args, "threads", None) or env_threads()),
            output_format=getattr(args, "format", "json") or "json",
            extra=dict(vars(args)),
        )
