"""CNN experiment harness for volumetric scan cohorts.

Trains a 2D or 3D residual network against a split assignment produced by
the cohort-splitting toolchain and emits reports in that toolchain's file
formats. It never invents a split of its own.
"""

from .config import MODEL_2D, MODEL_3D, MODEL_NAMES, ExperimentConfig
from .errors import (
    FormatError,
    HarnessError,
    IncompatibleAssignment,
    MissingImage,
    UnknownModel,
)
from .models import BLOCK_CHANNELS, N_WEIGHT_LAYERS, ResNet22_3d, build_model
from .run import run_experiment, summarize_runs
from .volumes import make_volumes, make_volumes_from_csv

__version__ = "0.1.0"

__all__ = [
    "BLOCK_CHANNELS",
    "ExperimentConfig",
    "FormatError",
    "HarnessError",
    "IncompatibleAssignment",
    "MODEL_2D",
    "MODEL_3D",
    "MODEL_NAMES",
    "MissingImage",
    "N_WEIGHT_LAYERS",
    "ResNet22_3d",
    "UnknownModel",
    "build_model",
    "make_volumes",
    "make_volumes_from_csv",
    "run_experiment",
    "summarize_runs",
]
