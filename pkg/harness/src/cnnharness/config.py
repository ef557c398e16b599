"""Experiment configuration with per-model training defaults."""

from dataclasses import dataclass, field

MODEL_2D = "2d_resnet18_pretrained"
MODEL_3D = "3d_resnet22_bottleneck"
MODEL_NAMES = (MODEL_2D, MODEL_3D)

#: (learning rate, weight decay) per model family
TRAINING_DEFAULTS = {
    MODEL_2D: (0.0001, 0.01),
    MODEL_3D: (0.001, 0.0001),
}

SLICE_VIEWS = ("sagittal", "coronal", "axial")


@dataclass(frozen=True)
class ExperimentConfig:
    """One training run, fully specified.

    An assignment file is required: the harness refuses to invent its own
    split. learning_rate and weight_decay default per model family when left
    as None. The 2D model classifies a single slice, coronal index 88 by
    default (meant for full-size spatially normalized volumes; synthetic runs
    with small volumes must pick an in-range index).
    """

    model: str
    manifest: str
    assignment: str
    image_root: str
    learning_rate: float | None = None
    weight_decay: float | None = None
    max_epochs: int = 36
    patience: int = 5
    slice_view: str = "coronal"
    slice_index: int = 88
    batch_size: int = 16
    seed: int = 0
    transition_only: bool = False
    out: str | None = None

    def __post_init__(self):
        from .errors import UnknownModel

        if self.model not in MODEL_NAMES:
            raise UnknownModel(self.model)
        for name in ("manifest", "assignment", "image_root"):
            if not getattr(self, name):
                raise ValueError(f"{name} path must be set")
        if self.learning_rate is None or self.weight_decay is None:
            lr, wd = TRAINING_DEFAULTS[self.model]
            if self.learning_rate is None:
                object.__setattr__(self, "learning_rate", lr)
            if self.weight_decay is None:
                object.__setattr__(self, "weight_decay", wd)
        if self.learning_rate <= 0 or self.weight_decay < 0:
            raise ValueError("learning_rate must be > 0 and weight_decay >= 0")
        if self.max_epochs < 1:
            raise ValueError(f"max_epochs must be >= 1, got {self.max_epochs}")
        if self.patience < 0:
            raise ValueError(f"patience must be >= 0, got {self.patience}")
        if self.slice_view not in SLICE_VIEWS:
            raise ValueError(f"slice_view must be one of {SLICE_VIEWS}")
        if self.slice_index < 0:
            raise ValueError(f"slice_index must be >= 0, got {self.slice_index}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
