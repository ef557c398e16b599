"""Workspace fixtures.

The harness only ever consumes files, so every fixture builds an on-disk
workspace: a manifest, a latent-vector CSV, synthesized volumes, and split
assignments. The files are produced with the cohortsplit package — the
upstream tool whose formats the harness reads — which doubles as an
interoperability check on every test.
"""

from types import SimpleNamespace

import pytest

from cohortsplit.features import write_features
from cohortsplit.manifest import write_assignment, write_manifest
from cohortsplit.splitting import (
    SplitRatios,
    split_by_subject,
    split_by_visit_history,
    split_random_by_scan,
)
from cohortsplit.synth import SynthConfig, generate

from cnnharness import ExperimentConfig, make_volumes_from_csv

VOLUME_SHAPE = (12, 12, 12)
RATIOS = SplitRatios(train=0.6, val=0.15, test=0.25)


def build_workspace(root, n_subjects=40, seed=0, visits=(2, 3)):
    config = SynthConfig(
        n_subjects=n_subjects,
        visits_per_subject=visits,
        feature_dim=16,
        sigma_subject=10.0,
        sigma_stage=1.0,
        sigma_noise=0.5,
        transition_prob=0.08,
        initial_stage_distribution=(0.4, 0.35, 0.25),
    )
    cohort, features = generate(config, seed=seed)
    root.mkdir(parents=True, exist_ok=True)
    manifest = root / "manifest.csv"
    manifest.write_text(write_manifest(cohort))
    features_csv = root / "features.csv"
    features_csv.write_text(write_features(features))
    volumes = root / "volumes"
    make_volumes_from_csv(features_csv.read_text(), volumes, shape=VOLUME_SHAPE)

    assignments = {}
    for name, assignment in (
        ("random", split_random_by_scan(cohort, RATIOS, seed)),
        ("subject", split_by_subject(cohort, RATIOS, seed)),
        ("vh", split_by_visit_history(cohort, 0.15, seed)[0]),
    ):
        text, meta = write_assignment(assignment, cohort)
        (root / f"{name}.csv").write_text(text)
        (root / f"{name}.meta.json").write_text(meta)
        assignments[name] = root / f"{name}.csv"

    def make_config(**overrides):
        kwargs = dict(
            model="3d_resnet22_bottleneck",
            manifest=str(manifest),
            assignment=str(assignments["random"]),
            image_root=str(volumes),
            max_epochs=2,
            batch_size=16,
            seed=0,
        )
        kwargs.update(overrides)
        return ExperimentConfig(**kwargs)

    return SimpleNamespace(
        root=root,
        cohort=cohort,
        manifest=manifest,
        features_csv=features_csv,
        volumes=volumes,
        assignments=assignments,
        make_config=make_config,
    )


@pytest.fixture(scope="session")
def workspace(tmp_path_factory):
    """A 40-subject workspace shared across fast tests (read-only!)."""
    return build_workspace(tmp_path_factory.mktemp("ws"))
