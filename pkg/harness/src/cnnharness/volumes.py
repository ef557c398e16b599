"""Synthesize small volumes from latent feature vectors.

Each scan's latent vector is tiled out to the requested 3D shape with
np.resize, so the volume carries exactly the information in the vector —
subject fingerprint, stage shift, and noise — in a form a convolutional
network can consume. Useful for exercising the training loop without any
access-gated imaging data.
"""

from pathlib import Path
from typing import Mapping

import numpy as np

from .io import parse_features, volume_path


def make_volumes(
    vectors: Mapping[str, np.ndarray],
    image_root,
    shape: tuple[int, int, int] = (16, 16, 16),
) -> int:
    """Write one `<scan_id>.npy` per vector under image_root; returns count."""
    if len(shape) != 3 or any(s < 1 for s in shape):
        raise ValueError(f"bad volume shape {shape}")
    root = Path(image_root)
    root.mkdir(parents=True, exist_ok=True)
    for scan_id, vector in vectors.items():
        volume = np.resize(np.asarray(vector, dtype=np.float32), shape)
        np.save(volume_path(root, scan_id), volume)
    return len(vectors)


def make_volumes_from_csv(
    features_text: str,
    image_root,
    shape: tuple[int, int, int] = (16, 16, 16),
) -> int:
    """Same, but straight from the latent-vector CSV format."""
    return make_volumes(parse_features(features_text), image_root, shape)
