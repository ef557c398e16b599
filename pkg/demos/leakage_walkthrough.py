#!/usr/bin/env python3
"""Walk through the leakage demonstration one step at a time.

The 1-NN classifier here never learns anything about disease stage: subject
fingerprints dominate the feature space, so its test accuracy measures how
often a test scan has a same-subject sibling on the training side. Watch the
three split schemes hand it very different scores on the same cohort.
"""
import argparse

from cohortsplit import split_by_subject, split_by_visit_history, split_random_by_scan
from cohortsplit.baselines import nearest_neighbor_predict
from cohortsplit.metrics import evaluate
from cohortsplit.splitting import reference_ratios
from cohortsplit.synth import calibrate_defaults, generate


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    config = calibrate_defaults()
    cohort, features = generate(config, seed=args.seed)
    print(f"cohort: {cohort.n_scans} scans, {cohort.n_subjects} subjects, seed {args.seed}")
    print(f"feature space: {features.dim}d, subject sigma {config.sigma_subject} "
          f"vs stage sigma {config.sigma_stage}")
    print()

    ratios = reference_ratios()
    splits = {
        "random_by_scan": split_random_by_scan(cohort, ratios, args.seed),
        "by_visit_history": split_by_visit_history(cohort, 0.15, args.seed)[0],
        "by_subject": split_by_subject(cohort, ratios, args.seed),
    }
    for name, assignment in splits.items():
        report = evaluate(
            nearest_neighbor_predict(features, cohort, assignment), cohort, assignment
        )
        print(f"{name:<18} 1-NN accuracy {report.accuracy * 100:5.1f}% "
              f"on {report.n_scored} test scans")

    print()
    print("random_by_scan leaves siblings of most test scans in training, so the")
    print("memorizer looks strong; by_subject removes every sibling and it falls")
    print("to roughly the majority-class floor. The gap is the leakage.")


if __name__ == "__main__":
    main()
