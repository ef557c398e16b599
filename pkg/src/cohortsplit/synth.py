"""Synthetic longitudinal cohorts with controllable leakage signal.

Each subject gets a persistent random "fingerprint" vector; each scan is
fingerprint + stage signal + fresh noise. With the fingerprint scale well
above the stage scale, features identify the subject far better than the
disease stage — exactly the situation in which a split that ignores subject
identity rewards memorization. Stages follow a one-way CN→MCI→AD chain with
a per-visit-pair transition probability, so label persistence is also a
controlled variable.

Generation is a pure function of (config, seed).
"""

import math
from dataclasses import dataclass

import numpy as np

from .cohort import PROGRESSION_ORDER, Cohort, ScanRecord, build_cohort
from .features import FeatureMatrix, build_features

#: Default per-consecutive-pair probability of advancing one stage;
#: 152 label changes over 2,074 visit pairs, the rate seen in mid-sized
#: longitudinal dementia cohorts.
DEFAULT_TRANSITION_PROB = 152 / 2074

#: Default initial stage mix (CN, MCI, AD); 203/279/175 of 657 subjects.
DEFAULT_STAGE_DISTRIBUTION = (203 / 657, 279 / 657, 175 / 657)


@dataclass(frozen=True)
class SynthConfig:
    """Knobs of the generator.

    visits_per_subject is an inclusive [min, max] range sampled uniformly.
    initial_stage_distribution is ordered (CN, MCI, AD).
    """

    n_subjects: int
    visits_per_subject: tuple[int, int]
    feature_dim: int
    sigma_subject: float
    sigma_stage: float
    sigma_noise: float
    transition_prob: float
    initial_stage_distribution: tuple[float, float, float]

    def __post_init__(self):
        lo, hi = self.visits_per_subject
        if self.n_subjects < 1:
            raise ValueError(f"n_subjects must be >= 1, got {self.n_subjects}")
        if not (1 <= lo <= hi):
            raise ValueError(f"bad visits_per_subject range [{lo}, {hi}]")
        if self.feature_dim < 1:
            raise ValueError(f"feature_dim must be >= 1, got {self.feature_dim}")
        for name in ("sigma_subject", "sigma_stage", "sigma_noise"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if not (0.0 <= self.transition_prob <= 1.0):
            raise ValueError(
                f"transition_prob must be in [0,1], got {self.transition_prob}"
            )
        if any(p < 0 for p in self.initial_stage_distribution):
            raise ValueError("initial stage probabilities must be >= 0")
        if abs(sum(self.initial_stage_distribution) - 1.0) > 1e-9:
            raise ValueError("initial stage probabilities must sum to 1")


def calibrate_defaults() -> SynthConfig:
    """Defaults sized like a real longitudinal dementia cohort.

    657 subjects with 5–6 visits each; 7.33% of consecutive visit pairs
    advance a stage; initial stage mix 30.9/42.5/26.6% CN/MCI/AD. Fingerprint
    scale dominates stage scale (10 vs 1) so subject identity, not stage, is
    the strongest signal in feature space. The visit floor matters: with
    fewer than four visits per subject, random-by-scan test scans often lack
    a same-subject training sibling and the memorizer loses its edge over
    the last-visit holdout.
    """
    return SynthConfig(
        n_subjects=657,
        visits_per_subject=(5, 6),
        feature_dim=32,
        sigma_subject=10.0,
        sigma_stage=1.0,
        sigma_noise=0.5,
        transition_prob=DEFAULT_TRANSITION_PROB,
        initial_stage_distribution=DEFAULT_STAGE_DISTRIBUTION,
    )


def _stage_direction(dim: int) -> np.ndarray:
    """The fixed unit vector along which stage level shifts every feature."""
    return np.ones(dim) / math.sqrt(dim)


def generate(config: SynthConfig, seed: int) -> tuple[Cohort, FeatureMatrix]:
    """Draw one cohort and its feature matrix, deterministically under seed."""
    return _generate(config, seed, visit_counts=None)


def generate_reference_cohort(seed: int, config: SynthConfig | None = None) -> tuple[Cohort, FeatureMatrix]:
    """A 657-subject, 2,731-scan cohort with fixed visit counts.

    103 subjects get 5 visits and 554 get 4 (103·5 + 554·4 = 2,731), so the
    last-visit holdout is exactly 657 scans against a 2,074-scan pool. Other
    knobs come from calibrate_defaults() unless a config is given.
    """
    base = config if config is not None else calibrate_defaults()
    if base.n_subjects != 657:
        raise ValueError("the fixed-shape cohort requires n_subjects=657")
    counts = [5] * 103 + [4] * 554
    return _generate(base, seed, visit_counts=counts)


def _generate(
    config: SynthConfig, seed: int, visit_counts: list[int] | None
) -> tuple[Cohort, FeatureMatrix]:
    rng = np.random.default_rng(seed)
    d = config.feature_dim
    direction = _stage_direction(d)
    width = max(4, len(str(config.n_subjects)))
    stage_probs = np.asarray(config.initial_stage_distribution, dtype=np.float64)
    stage_probs = stage_probs / stage_probs.sum()  # exact renormalization

    records: list[ScanRecord] = []
    vectors: dict[str, np.ndarray] = {}
    for i in range(config.n_subjects):
        subject_id = f"S{i + 1:0{width}d}"
        fingerprint = config.sigma_subject * rng.standard_normal(d)
        if visit_counts is None:
            lo, hi = config.visits_per_subject
            n_visits = int(rng.integers(lo, hi + 1))
        else:
            n_visits = visit_counts[i]
        stage = int(rng.choice(3, p=stage_probs))
        for visit in range(n_visits):
            if visit > 0:
                # one Bernoulli draw per consecutive pair; the top stage absorbs
                if rng.random() < config.transition_prob and stage < 2:
                    stage += 1
            label = PROGRESSION_ORDER[stage]
            feat = (
                fingerprint
                + direction * (stage * config.sigma_stage)
                + config.sigma_noise * rng.standard_normal(d)
            )
            scan_id = f"{subject_id}-V{visit:02d}"
            records.append(
                ScanRecord(
                    scan_id=scan_id,
                    subject_id=subject_id,
                    visit_index=visit,
                    acquisition_date=None,
                    label=label,
                )
            )
            vectors[scan_id] = feat
    return build_cohort(records), build_features(vectors)
